"""Exact arithmetic in Q(q)^pi.

Q(q)^pi = Q(q)[pi]/(pi^2 - 1) is isomorphic to Q(q) x Q(q) through the two
specializations pi = +1 and pi = -1.  A :class:`Scalar` stores exactly those
two values; ring operations are componentwise and every linear-algebra task
splits into two independent field computations.

Rational functions are backed by FLINT's ``fmpq_poly`` and kept in a canonical
form (monic denominator, coprime numerator), so equality is a representation
comparison.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from functools import lru_cache

from flint import fmpq, fmpq_poly

from .errors import DivisionByZeroDivisor, NotRegularAtZero, ParseError

_ONE_POLY = fmpq_poly([1])
_ZERO_POLY = fmpq_poly([])


def _val(p: fmpq_poly) -> int:
    """Order of vanishing of a nonzero polynomial at q = 0."""
    for k, c in enumerate(p.coeffs()):
        if c != 0:
            return k
    raise ValueError("valuation of zero polynomial")


def _reverse(p: fmpq_poly, deg: int) -> fmpq_poly:
    # q^deg * p(1/q)
    cs = p.coeffs()
    cs = cs + [0] * (deg + 1 - len(cs))
    return fmpq_poly(cs[::-1])


def _alternate(p: fmpq_poly) -> fmpq_poly:
    # p(-q)
    return fmpq_poly([c if k % 2 == 0 else -c for k, c in enumerate(p.coeffs())])


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class RatFunc:
    """An element of Q(q) in canonical form num/den, den monic, gcd 1."""

    __slots__ = ("num", "den", "_key")

    def __init__(self, num=0, den=None, *, _canonical: bool = False):
        if not isinstance(num, fmpq_poly):
            num = fmpq_poly([_as_fmpq(num)])
        if den is None:
            den = _ONE_POLY
        elif not isinstance(den, fmpq_poly):
            den = fmpq_poly([_as_fmpq(den)])
        if not _canonical:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            if num.is_zero():
                den = _ONE_POLY
            else:
                if not den.is_one():
                    g = num.gcd(den)
                    if not g.is_one():
                        num = num / g
                        den = den / g
                    lc = den.leading_coefficient()
                    if lc != 1:
                        num = num / lc
                        den = den / lc
        self.num = num
        self.den = den
        self._key = None

    # constructors
    @classmethod
    def monomial(cls, exp: int, coeff=1) -> "RatFunc":
        """coeff * q^exp, exp may be negative."""
        c = _as_fmpq(coeff)
        if c == 0:
            return RAT_ZERO
        if exp >= 0:
            return cls(fmpq_poly([0] * exp + [c]), _ONE_POLY, _canonical=True)
        return cls(fmpq_poly([c]), fmpq_poly([0] * (-exp) + [1]), _canonical=True)

    @classmethod
    def from_laurent(cls, coeffs: dict) -> "RatFunc":
        """Build sum c_k q^k from a mapping k -> c_k."""
        items = {k: _as_fmpq(c) for k, c in coeffs.items() if c != 0}
        if not items:
            return RAT_ZERO
        low = min(items)
        shift = -low if low < 0 else 0
        cs = [0] * (max(items) + shift + 1)
        for k, c in items.items():
            cs[k + shift] = c
        num = fmpq_poly(cs)
        den = fmpq_poly([0] * shift + [1]) if shift else _ONE_POLY
        return cls(num, den)

    # predicates
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_laurent(self) -> bool:
        """True when the denominator is a power of q."""
        cs = self.den.coeffs()
        return all(c == 0 for c in cs[:-1])

    # arithmetic
    def __add__(self, other):
        other = _coerce_rat(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        other = _coerce_rat(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce_rat(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return RAT_ZERO
        if self.den.is_one() and other.den.is_one():
            return RatFunc(self.num * other.num, _ONE_POLY, _canonical=True)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        other = _coerce_rat(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce_rat(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num ** n, self.den ** n, _canonical=True) if n else RAT_ONE

    # comparison / hashing
    def key(self) -> tuple:
        if self._key is None:
            self._key = (tuple(self.num.coeffs()), tuple(self.den.coeffs()))
        return self._key

    def __eq__(self, other):
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash(self.key())

    # q = 0 data
    def valuation(self) -> float | int:
        """Order at q = 0; +inf for zero."""
        if self.num.is_zero():
            return float("inf")
        return _val(self.num) - _val(self.den)

    def value_at_zero(self) -> Fraction:
        v = self.valuation()
        if v < 0:
            raise NotRegularAtZero(f"{self} has a pole at q=0")
        if v > 0:
            return Fraction(0)
        return _to_fraction(self.num.coeffs()[_val(self.num)]) / _to_fraction(
            self.den.coeffs()[_val(self.den)])

    def series(self, start: int, stop: int) -> list[Fraction]:
        """Laurent coefficients c_start, ..., c_{stop-1} of the expansion at q = 0."""
        if stop <= start:
            return []
        if self.num.is_zero():
            return [Fraction(0)] * (stop - start)
        vn, vd = _val(self.num), _val(self.den)
        n = [_to_fraction(c) for c in self.num.coeffs()[vn:]]
        d = [_to_fraction(c) for c in self.den.coeffs()[vd:]]
        shift = vn - vd
        # power series n/d, coefficients 0..stop-shift-1
        length = stop - shift
        out: list[Fraction] = []
        d0 = d[0]
        for k in range(max(length, 0)):
            acc = n[k] if k < len(n) else Fraction(0)
            for j in range(1, min(k, len(d) - 1) + 1):
                acc -= d[j] * out[k - j]
            out.append(acc / d0)
        res = []
        for e in range(start, stop):
            k = e - shift
            res.append(out[k] if 0 <= k < len(out) else Fraction(0))
        return res

    def laurent_coeffs(self) -> dict[int, Fraction]:
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        shift = self.den.degree()
        return {k - shift: _to_fraction(c) for k, c in enumerate(self.num.coeffs()) if c != 0}

    # involutions
    def substitute_inverse(self, sign: int = 1) -> "RatFunc":
        """f(q) -> f(sign / q)."""
        if self.num.is_zero():
            return self
        num, den = self.num, self.den
        if sign < 0:
            num, den = _alternate(num), _alternate(den)
        dn, dd = num.degree(), den.degree()
        rn = _reverse(num, dn)
        rd = _reverse(den, dd)
        # num(1/q)/den(1/q) = rn q^dd / (rd q^dn)
        if dd >= dn:
            return RatFunc(rn * fmpq_poly([0] * (dd - dn) + [1]), rd)
        return RatFunc(rn, rd * fmpq_poly([0] * (dn - dd) + [1]))

    def substitute_power(self, k: int) -> "RatFunc":
        """f(q) -> f(q^k) for k >= 1."""
        def spread(p):
            cs = p.coeffs()
            out = [0] * ((len(cs) - 1) * k + 1) if cs else []
            for j, c in enumerate(cs):
                out[j * k] = c
            return fmpq_poly(out)
        return RatFunc(spread(self.num), spread(self.den))

    def evaluate(self, x):
        return _to_fraction(self.num(x)) / _to_fraction(self.den(x))

    def __str__(self):
        return format_ratfunc(self)

    def __repr__(self):
        return f"RatFunc({format_ratfunc(self)!r})"

    def __reduce__(self):
        return (_rebuild_rat, (
            [(_to_fraction(c).numerator, _to_fraction(c).denominator) for c in self.num.coeffs()],
            [(_to_fraction(c).numerator, _to_fraction(c).denominator) for c in self.den.coeffs()],
        ))


def _rebuild_rat(num, den):
    return RatFunc(fmpq_poly([fmpq(a, b) for a, b in num]),
                   fmpq_poly([fmpq(a, b) for a, b in den]), _canonical=True)


def _as_fmpq(x):
    if isinstance(x, fmpq):
        return x
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, int):
        return fmpq(x)
    if hasattr(x, "p") and hasattr(x, "q"):
        return fmpq(int(x.p), int(x.q))
    raise TypeError(f"cannot coerce {type(x).__name__} to a rational")


def _coerce_rat(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, (int, Fraction, fmpq)):
        return RatFunc(x)
    return NotImplemented


RAT_ZERO = RatFunc(_ZERO_POLY, _ONE_POLY, _canonical=True)
RAT_ONE = RatFunc(_ONE_POLY, _ONE_POLY, _canonical=True)
RAT_Q = RatFunc(fmpq_poly([0, 1]), _ONE_POLY, _canonical=True)


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _laurent_terms(coeffs: dict[int, Fraction], suffix: str = "") -> list[tuple[bool, str]]:
    out = []
    for k in sorted(coeffs, reverse=True):
        c = coeffs[k]
        a = -c if c < 0 else c
        if k == 0:
            body = _frac_str(a) if (a != 1 or not suffix) else ""
        else:
            mon = "q" if k == 1 else f"q^{k}" if k > 0 else f"q^({k})"
            body = mon if a == 1 else f"{_frac_str(a)}*{mon}"
        if suffix:
            body = f"{body}*{suffix}" if body else suffix
        out.append((c < 0, body))
    return out


def _join_terms(terms: list[tuple[bool, str]]) -> str:
    if not terms:
        return "0"
    parts = []
    for neg, body in terms:
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def _poly_terms(coeffs: dict[int, Fraction]) -> str:
    return _join_terms(_laurent_terms(coeffs))


def format_ratfunc(f: RatFunc) -> str:
    if f.is_laurent():
        return _poly_terms(f.laurent_coeffs())
    num = {k: _to_fraction(c) for k, c in enumerate(f.num.coeffs()) if c != 0}
    den = {k: _to_fraction(c) for k, c in enumerate(f.den.coeffs()) if c != 0}
    return f"({_poly_terms(num)})/({_poly_terms(den)})"


class Scalar:
    """Element of Q(q)^pi stored as its pi = +1 and pi = -1 specializations."""

    __slots__ = ("plus", "minus")

    def __init__(self, plus=RAT_ZERO, minus=None):
        if not isinstance(plus, RatFunc):
            plus = RatFunc(plus)
        if minus is None:
            minus = plus
        elif not isinstance(minus, RatFunc):
            minus = RatFunc(minus)
        self.plus = plus
        self.minus = minus

    @classmethod
    def from_even_odd(cls, a: RatFunc, b: RatFunc) -> "Scalar":
        """a + b*pi."""
        return cls(a + b, a - b)

    def even_odd(self) -> tuple[RatFunc, RatFunc]:
        half = Fraction(1, 2)
        return (self.plus + self.minus) * half, (self.plus - self.minus) * half

    @classmethod
    def monomial(cls, pi_exp: int = 0, q_exp: int = 0, coeff=1) -> "Scalar":
        """coeff * pi^pi_exp * q^q_exp."""
        p = RatFunc.monomial(q_exp, coeff)
        return cls(p, -p if pi_exp % 2 else p)

    def component(self, sigma: int) -> RatFunc:
        return self.plus if sigma == 0 else self.minus

    # predicates
    def is_zero(self) -> bool:
        return self.plus.is_zero() and self.minus.is_zero()

    def is_invertible(self) -> bool:
        return not self.plus.is_zero() and not self.minus.is_zero()

    def is_zero_divisor(self) -> bool:
        return self.plus.is_zero() != self.minus.is_zero()

    # arithmetic
    def __add__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        return Scalar(self.plus + other.plus, self.minus + other.minus)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.plus, -self.minus)

    def __sub__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        return Scalar(self.plus - other.plus, self.minus - other.minus)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        return Scalar(self.plus * other.plus, self.minus * other.minus)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self.is_invertible():
            raise DivisionByZeroDivisor(f"{self} is not invertible in Q(q)^pi")
        return Scalar(self.plus.inverse(), self.minus.inverse())

    def __truediv__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce_scalar(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return Scalar(self.plus ** n, self.minus ** n)

    def __eq__(self, other):
        other = _coerce_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return self.plus == other.plus and self.minus == other.minus

    def __hash__(self):
        return hash((self.plus, self.minus))

    # structure
    def bar(self) -> "Scalar":
        """The involution q -> pi q^{-1}."""
        return Scalar(self.plus.substitute_inverse(1), self.minus.substitute_inverse(-1))

    def pi_twist(self) -> "Scalar":
        """Multiplication by pi."""
        return Scalar(self.plus, -self.minus)

    def valuation(self):
        return min(self.plus.valuation(), self.minus.valuation())

    def eval_at_q0(self) -> tuple[Fraction, Fraction]:
        return self.plus.value_at_zero(), self.minus.value_at_zero()

    def is_integral(self) -> bool:
        """Membership in Z[q, q^-1]^pi."""
        if not (self.plus.is_laurent() and self.minus.is_laurent()):
            return False
        a, b = self.plus.laurent_coeffs(), self.minus.laurent_coeffs()
        for k in set(a) | set(b):
            x, y = a.get(k, Fraction(0)), b.get(k, Fraction(0))
            if x.denominator != 1 or y.denominator != 1 or (x - y) % 2:
                return False
        return True

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r})"

    def __reduce__(self):
        return (Scalar, (self.plus, self.minus))


def _coerce_scalar(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, RatFunc):
        return Scalar(x, x)
    if isinstance(x, (int, Fraction, fmpq)):
        r = RatFunc(x)
        return Scalar(r, r)
    return NotImplemented


ZERO = Scalar(RAT_ZERO, RAT_ZERO)
ONE = Scalar(RAT_ONE, RAT_ONE)
Q = Scalar(RAT_Q, RAT_Q)
PI = Scalar(RAT_ONE, -RAT_ONE)


def format_scalar(x: Scalar) -> str:
    """Render as a(q) + b(q)*pi; Laurent parts are expanded termwise."""
    a, b = x.even_odd()
    if b.is_zero():
        return format_ratfunc(a)
    if a.is_laurent() and b.is_laurent():
        return _join_terms(_laurent_terms(a.laurent_coeffs()) + _laurent_terms(b.laurent_coeffs(), "pi"))
    bs = f"({format_ratfunc(b)})*pi"
    if a.is_zero():
        return bs
    return f"{format_ratfunc(a)} + {bs}"


_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Load,
                  ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)


def parse_scalar(text: str) -> Scalar:
    """Parse strings such as ``q + q^-1 + (2*q)*pi`` or ``(1 - q^4)/(1 + pi*q^2)``."""
    src = text.replace("^", "**").replace("π", "pi")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse scalar {text!r}") from exc
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ParseError(f"unsupported syntax in {text!r}")
    return _eval_ast(tree.body, text)


def _eval_ast(node, text):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, int):
            raise ParseError(f"only integer literals allowed in {text!r}")
        return Scalar(node.value)
    if isinstance(node, ast.Name):
        if node.id == "q":
            return Q
        if node.id == "pi":
            return PI
        raise ParseError(f"unknown symbol {node.id!r} in {text!r}")
    if isinstance(node, ast.UnaryOp):
        v = _eval_ast(node.operand, text)
        return -v if isinstance(node.op, ast.USub) else v
    left = _eval_ast(node.left, text)
    if isinstance(node.op, ast.Pow):
        exp = _int_literal(node.right, text)
        return left ** exp
    right = _eval_ast(node.right, text)
    if isinstance(node.op, ast.Add):
        return left + right
    if isinstance(node.op, ast.Sub):
        return left - right
    if isinstance(node.op, ast.Mult):
        return left * right
    return left / right


def _int_literal(node, text) -> int:
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_int_literal(node.operand, text)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    raise ParseError(f"exponents must be integer literals in {text!r}")


# (q, pi)-integers

@lru_cache(maxsize=4096)
def qpi_integer(n: int, d: int = 1, odd: bool = True) -> Scalar:
    """[n]_i = ((pi_i q_i)^n - q_i^-n) / (pi_i q_i - q_i^-1) with q_i = q^d, pi_i = pi^odd."""
    # Both specializations are Laurent polynomials: sum of geometric terms.
    comps = []
    for sign in (1, -1):
        s = sign if odd else 1
        terms: dict[int, int] = {}
        if n > 0:
            for k in range(n):
                # (s q)^(n-1-k) q^-k
                e = n - 1 - k
                terms[d * (e - k)] = terms.get(d * (e - k), 0) + s ** e
        elif n < 0:
            m = -n
            top = RatFunc.monomial(-d * m, s ** m) - RatFunc.monomial(d * m)
            bottom = RatFunc.monomial(d, s) - RatFunc.monomial(-d)
            comps.append(top / bottom)
            continue
        comps.append(RatFunc.from_laurent(terms))
    return Scalar(comps[0], comps[1])


@lru_cache(maxsize=4096)
def qpi_factorial(n: int, d: int = 1, odd: bool = True) -> Scalar:
    out = ONE
    for k in range(1, n + 1):
        out = out * qpi_integer(k, d, odd)
    return out


@lru_cache(maxsize=4096)
def qpi_binomial(n: int, a: int, d: int = 1, odd: bool = True) -> Scalar:
    if a < 0:
        raise ValueError("binomial needs a >= 0")
    out = ONE
    for i in range(1, a + 1):
        out = out * qpi_integer(n + i - a, d, odd)
    return out / qpi_factorial(a, d, odd)


def q_pi_power(pi_exp: int, q_exp: int) -> Scalar:
    return Scalar.monomial(pi_exp, q_exp)
