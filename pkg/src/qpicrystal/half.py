"""The half quantum covering group U^- as words in F_i modulo the radical of
the polarization.

Weight spaces are built height by height.  At depth nu the candidates are the
words F_j w with w a chosen word at nu - alpha_j; every other word lies in the
span of lexicographically smaller candidates, so greedy selection over the
candidates returns the lexicographically earliest maximal independent word
subset of all words.  The polarization on candidates comes from
(F_j x, z) = (x, E_j'(z)) and the q-derivation recursion for E_j'.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from math import comb
from typing import TYPE_CHECKING, Iterable, Sequence

from . import cache
from .cartan import CartanDatum, depths_of_height, height, sub, unit
from .errors import CutoffExceeded, ModuleMismatch
from .linalg import Mat, bilinear, independent_rows, rank_pair, solve
from .scalar import ONE, ZERO, Scalar, qpi_binomial, qpi_factorial

if TYPE_CHECKING:
    from .graded import HalfGraded

Word = tuple  # tuple of 0-based indices; the word F_{w[0]} F_{w[1]} ...


def word_depth(rank: int, w: Word) -> tuple[int, ...]:
    nu = [0] * rank
    for i in w:
        nu[i] += 1
    return tuple(nu)


class HalfElement:
    """Finite Q(q)^pi-combination of words (not reduced unless asked)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {w: c for w, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def word(cls, w: Iterable[int], coeff: Scalar = ONE) -> "HalfElement":
        return cls({tuple(w): coeff})

    @classmethod
    def one(cls) -> "HalfElement":
        return cls({(): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        # equality of word expansions; use HalfAlgebra.equal for equality in U^-
        if not isinstance(other, HalfElement):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def depth(self, rank: int) -> tuple[int, ...] | None:
        ds = {word_depth(rank, w) for w in self.terms}
        if len(ds) > 1:
            raise ModuleMismatch("element is not homogeneous")
        return ds.pop() if ds else None

    def parity(self, datum: CartanDatum) -> int:
        ps = {datum.root_parity(word_depth(datum.rank, w)) for w in self.terms}
        if len(ps) > 1:
            raise ModuleMismatch("element has mixed parity")
        return ps.pop() if ps else 0

    def __add__(self, other: "HalfElement") -> "HalfElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, ZERO) + c
        return HalfElement(out)

    def __neg__(self):
        return HalfElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Scalar) -> "HalfElement":
        return HalfElement({w: c * x for w, x in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, HalfElement):
            out: dict = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 + w2
                    out[w] = out.get(w, ZERO) + c1 * c2
            return HalfElement(out)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def rho(self) -> "HalfElement":
        return HalfElement({w[::-1]: c for w, c in self.terms.items()})

    def bar(self) -> "HalfElement":
        return HalfElement({w: c.bar() for w, c in self.terms.items()})

    def sorted_terms(self) -> list[tuple[Word, Scalar]]:
        return sorted(self.terms.items())

    def to_json(self) -> dict:
        return {"terms": [{"word": [i + 1 for i in w], "plus": str(c.plus), "minus": str(c.minus)}
                          for w, c in self.sorted_terms()]}

    def __str__(self):
        return format_half(self)

    def __repr__(self):
        return f"HalfElement({format_half(self)})"


def format_half(x: HalfElement) -> str:
    if x.is_zero():
        return "0"
    parts = []
    for w, c in x.sorted_terms():
        mono = "*".join(f"F{i + 1}" for i in w) or "1"
        parts.append(f"({c})*{mono}")
    return " + ".join(parts)


@dataclass
class WeightSpaceBasis:
    depth: tuple[int, ...]
    words: list[Word]
    heads: list[tuple[int, int]]          # word = (j,) + lower.words[k]
    gram: Mat
    F: dict = field(default_factory=dict)   # j -> Mat from depth - e_j
    E1: dict = field(default_factory=dict)  # i -> E_i' : this -> depth - e_i
    E2: dict = field(default_factory=dict)  # i -> E_i''

    @property
    def dim(self) -> int:
        return len(self.words)

    def reduction(self, algebra: "HalfAlgebra", w: Word) -> list[Scalar]:
        return algebra.word_coords(w)


def default_cutoff(rank: int) -> int:
    return 8 if rank <= 2 else 5


class HalfAlgebra:
    """U^- for a validated Cartan datum, computed lazily up to a height cutoff."""

    def __init__(self, datum: CartanDatum, cutoff: int | None = None):
        self.datum = datum.require_valid()
        self.rank = datum.rank
        self.cutoff = default_cutoff(self.rank) if cutoff is None else cutoff
        self._spaces: dict[tuple, WeightSpaceBasis] = {}
        self._coords: dict[Word, list[Scalar]] = {(): [ONE]}
        self._lock = threading.RLock()
        zero = (0,) * self.rank
        self._spaces[zero] = WeightSpaceBasis(zero, [()], [], Mat([[ONE]]))

    # structure constants
    def c_prime(self, i: int, j: int) -> Scalar:
        """pi_i^{p(j)} q_i^{-a_ij}: E_i'(F_j y) = c F_j E_i'(y) + delta_ij y."""
        D = self.datum
        return Scalar.monomial(D.parity[i] * D.parity[j], -D.d[i] * D.A[i][j])

    def c_dprime(self, i: int, j: int) -> Scalar:
        D = self.datum
        return Scalar.monomial(D.parity[i] * D.parity[j], D.d[i] * D.A[i][j])

    def qdata(self, i: int) -> tuple[int, bool]:
        return self.datum.d[i], self.datum.odd(i)

    # weight spaces
    def space(self, depth: Sequence[int]) -> WeightSpaceBasis:
        depth = tuple(depth)
        ws = self._spaces.get(depth)
        if ws is not None:
            return ws
        if any(x < 0 for x in depth) or len(depth) != self.rank:
            raise ValueError(f"invalid depth {depth}")
        if height(depth) > self.cutoff:
            raise CutoffExceeded(f"height {height(depth)} exceeds cutoff {self.cutoff}")
        with self._lock:
            ws = self._spaces.get(depth)
            if ws is None:
                ws = cache.load(self.datum, depth)
                if ws is None:
                    ws = self._build(depth)
                    cache.save(self.datum, depth, ws)
                self._spaces[depth] = ws
        return ws

    def dim(self, depth: Sequence[int]) -> int:
        return self.space(depth).dim

    def _build(self, nu: tuple) -> WeightSpaceBasis:
        r = self.rank
        cands = []
        for j in range(r):
            if nu[j] == 0:
                continue
            low = self.space(sub(nu, unit(r, j)))
            for k, w in enumerate(low.words):
                cands.append(((j,) + w, j, k))
        cands.sort()
        ncand = len(cands)
        # E_i' and E_i'' on candidates, in coordinates of depth nu - e_i
        e1c: dict[int, list[list[Scalar]]] = {}
        e2c: dict[int, list[list[Scalar]]] = {}
        for i in range(r):
            if nu[i] == 0:
                continue
            tgt = self.space(sub(nu, unit(r, i)))
            cols1, cols2 = [], []
            for _, j, k in cands:
                v1 = [ZERO] * tgt.dim
                v2 = [ZERO] * tgt.dim
                low = sub(nu, unit(r, j))
                if low[i] > 0:
                    lowsp = self.space(low)
                    Fj = tgt.F[j]
                    a1 = Fj.apply(lowsp.E1[i].col(k))
                    a2 = Fj.apply(lowsp.E2[i].col(k))
                    c1, c2 = self.c_prime(i, j), self.c_dprime(i, j)
                    v1 = [c1 * x for x in a1]
                    v2 = [c2 * x for x in a2]
                if i == j:
                    v1[k] = v1[k] + ONE
                    v2[k] = v2[k] + ONE
                cols1.append(v1)
                cols2.append(v2)
            e1c[i] = cols1
            e2c[i] = cols2
        # polarization on candidates: (F_j x_k, z) = (x_k, E_j' z)
        G = []
        for _, j, k in cands:
            lowsp = self.space(sub(nu, unit(r, j)))
            grow = lowsp.gram.row(k)
            G.append([_dot(grow, e1c[j][b]) for b in range(ncand)])
        Gc = Mat(G, ncand, ncand)
        S = independent_rows(Gc)
        rp = rank_pair(Gc)
        if rp != (len(S), len(S)):
            raise ArithmeticError(f"weight space {nu}: ranks {rp} disagree with selection {len(S)}")
        GSS = Gc.select_rows(S).select_cols(S)
        R = solve(GSS, Gc.select_rows(S))
        ws = WeightSpaceBasis(nu, [cands[s][0] for s in S], [(cands[s][1], cands[s][2]) for s in S], GSS)
        for j in range(r):
            if nu[j] == 0:
                continue
            idx = [b for b, (_, jj, _) in enumerate(cands) if jj == j]
            idx.sort(key=lambda b: cands[b][2])
            ws.F[j] = R.select_cols(idx)
        for i in e1c:
            rows = len(e1c[i][0]) if e1c[i] else self.space(sub(nu, unit(r, i))).dim
            ws.E1[i] = Mat.from_columns([e1c[i][s] for s in S], rows)
            ws.E2[i] = Mat.from_columns([e2c[i][s] for s in S], rows)
        return ws

    def spaces_up_to(self, h: int) -> list[WeightSpaceBasis]:
        out = []
        for hh in range(h + 1):
            for nu in depths_of_height(self.rank, hh):
                out.append(self.space(nu))
        return out

    # coordinates
    def word_coords(self, w: Word) -> list[Scalar]:
        w = tuple(w)
        c = self._coords.get(w)
        if c is not None:
            return c
        tail = self.word_coords(w[1:])
        nu = word_depth(self.rank, w)
        c = self.space(nu).F[w[0]].apply(tail)
        self._coords[w] = c
        return c

    def coords(self, x: HalfElement, depth: Sequence[int] | None = None) -> list[Scalar]:
        nu = x.depth(self.rank) if depth is None else tuple(depth)
        if nu is None:
            raise ValueError("depth required for the zero element")
        out = [ZERO] * self.space(nu).dim
        for w, c in x.terms.items():
            if word_depth(self.rank, w) != nu:
                raise ModuleMismatch("element is not homogeneous")
            for t, y in enumerate(self.word_coords(w)):
                if not y.is_zero():
                    out[t] = out[t] + c * y
        return out

    def element(self, depth: Sequence[int], vec: Sequence[Scalar]) -> HalfElement:
        ws = self.space(depth)
        return HalfElement({w: c for w, c in zip(ws.words, vec)})

    def reduce(self, x: HalfElement) -> HalfElement:
        nu = x.depth(self.rank)
        if nu is None:
            return HalfElement()
        return self.element(nu, self.coords(x, nu))

    def equal(self, x: HalfElement, y: HalfElement) -> bool:
        return self.reduce(x - y).is_zero()

    # operators on words (unreduced recursion)
    def e_prime(self, i: int, y: HalfElement) -> HalfElement:
        return self._derivation(i, y, self.c_prime)

    def e_dprime(self, i: int, y: HalfElement) -> HalfElement:
        return self._derivation(i, y, self.c_dprime)

    def _derivation(self, i, y, const) -> HalfElement:
        out = HalfElement()
        for w, c in y.terms.items():
            out = out + self._derivation_word(i, w, const).scale(c)
        return out

    def _derivation_word(self, i, w, const) -> HalfElement:
        if not w:
            return HalfElement()
        j, rest = w[0], w[1:]
        inner = self._derivation_word(i, rest, const)
        out = HalfElement({(j,) + u: const(i, j) * c for u, c in inner.terms.items()})
        if i == j:
            out = out + HalfElement({rest: ONE})
        return out

    def polarization_half(self, y: HalfElement, z: HalfElement) -> Scalar:
        """(y, z) by the word recursion (F_i y', z) = (y', E_i' z), (1, 1) = 1."""
        total = ZERO
        for w, c in y.terms.items():
            cur = z
            for i in w:
                cur = self.e_prime(i, cur)
                if cur.is_zero():
                    break
            total = total + c * cur.terms.get((), ZERO)
        return total

    def form(self, y: HalfElement, z: HalfElement) -> Scalar:
        """(y, z) through weight-space coordinates and the Gram matrix."""
        dy, dz = y.depth(self.rank), z.depth(self.rank)
        if dy is None or dz is None or dy != dz:
            return ZERO
        return bilinear(self.coords(y, dy), self.space(dy).gram, self.coords(z, dz))

    def e_prime_matrix(self, i: int, depth) -> Mat:
        return self.space(depth).E1[i]

    def e_dprime_matrix(self, i: int, depth) -> Mat:
        return self.space(depth).E2[i]

    # constructions
    def multiply(self, y: HalfElement, z: HalfElement, reduce: bool = False) -> HalfElement:
        p = y * z
        return self.reduce(p) if reduce else p

    def divided_power(self, i: int, n: int) -> HalfElement:
        d, odd = self.qdata(i)
        return HalfElement({(i,) * n: qpi_factorial(n, d, odd).inverse()})

    def divided_power_monomial(self, spec: Sequence[tuple[int, int]], reduce: bool = True) -> HalfElement:
        out = HalfElement.one()
        for i, n in spec:
            if n < 0:
                raise ValueError("exponents must be nonnegative")
            out = out * self.divided_power(i, n)
        return self.reduce(out) if reduce else out

    def serre_element(self, i: int, j: int) -> HalfElement:
        """sum_t (-1)^t pi_i^{C(t,2) + t p(j)} [b choose t]_i F_i^{b-t} F_j F_i^t, b = 1 - a_ij."""
        D = self.datum
        b = 1 - D.A[i][j]
        d, odd = self.qdata(i)
        terms = {}
        for t in range(b + 1):
            sign = Scalar.monomial(D.parity[i] * (comb(t, 2) + t * D.parity[j]), 0, (-1) ** t)
            w = (i,) * (b - t) + (j,) + (i,) * t
            terms[w] = sign * qpi_binomial(b, t, d, odd)
        return HalfElement(terms)

    def rho(self, y: HalfElement) -> HalfElement:
        return y.rho()

    def bar(self, y: HalfElement) -> HalfElement:
        return y.bar()

    def graded(self) -> "HalfGraded":
        from .graded import HalfGraded
        return HalfGraded(self)

    def boson_projector(self, i: int, u: HalfElement) -> HalfElement:
        """Component u_0 in u = sum_n F_i^(n) u_n with E_i'(u_n) = 0 (direct solve)."""
        from .graded import Kashiwara
        nu = u.depth(self.rank)
        if nu is None:
            return HalfElement()
        K = Kashiwara(self.graded())
        parts = K.string_components(i, nu, self.coords(u, nu))
        return self.element(nu, parts[0]) if 0 in parts else HalfElement()

    def boson_projector_series(self, i: int, u: HalfElement) -> HalfElement:
        """Verbatim series sum_n (-1)^n q^{-C(n,2)} F_i^(n) E_i'^n u, in the q_i, pi_i variables."""
        nu = u.depth(self.rank)
        if nu is None:
            return HalfElement()
        d, odd = self.qdata(i)
        out = HalfElement()
        cur = u
        n = 0
        while not cur.is_zero():
            coeff = Scalar.monomial(0, -d * comb(n, 2), (-1) ** n)
            out = out + (self.divided_power(i, n) * cur).scale(coeff)
            cur = self.e_prime(i, cur)
            n += 1
        return self.reduce(out)


def _dot(u, v):
    acc = ZERO
    for a, b in zip(u, v):
        if not a.is_zero() and not b.is_zero():
            acc = acc + a * b
    return acc


class BosonAlgebra:
    """The algebra generated by e_i, f_i with e_i f_j = c_ij f_j e_i + delta_ij,
    elements kept in normal order (f-word, e-word) -> Scalar."""

    def __init__(self, algebra: HalfAlgebra):
        self.alg = algebra
        self._memo: dict = {}

    def _ef(self, i: int, fword: tuple) -> dict:
        """e_i * fword as normal-ordered terms."""
        key = (i, fword)
        if key in self._memo:
            return self._memo[key]
        out: dict = {}
        if fword:
            j, rest = fword[0], fword[1:]
            c = self.alg.c_prime(i, j)
            for (fw, ew), x in self._ef(i, rest).items():
                k = ((j,) + fw, ew)
                out[k] = out.get(k, ZERO) + c * x
            if i == j:
                k = (rest, ())
                out[k] = out.get(k, ZERO) + ONE
        else:
            out[((), (i,))] = ONE
        self._memo[key] = out
        return out

    def mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for (f1, e1), a in x.items():
            for (f2, e2), b in y.items():
                cur = {(f2, ()): ONE}
                for i in reversed(e1):
                    nxt: dict = {}
                    for (fw, ew), c in cur.items():
                        for (fw2, ew2), d in self._ef(i, fw).items():
                            k = (fw2, ew2 + ew)
                            nxt[k] = nxt.get(k, ZERO) + c * d
                    cur = nxt
                for (fw, ew), c in cur.items():
                    k = (f1 + fw, ew + e2)
                    out[k] = out.get(k, ZERO) + a * b * c
        return {k: v for k, v in out.items() if not v.is_zero()}

    @staticmethod
    def e(i: int) -> dict:
        return {((), (i,)): ONE}

    @staticmethod
    def f(i: int) -> dict:
        return {((i,), ()): ONE}

    def serre_e(self, i: int, j: int) -> dict:
        """S_ij = sum_t (-1)^t pi_i^{C(t,2)+t p(j)} [b choose t]_i e_i^{b-t} e_j e_i^t."""
        s = self.alg.serre_element(i, j)
        return {((), w): c for w, c in s.terms.items()}


def weight_space(algebra: HalfAlgebra, depth: Sequence[int]) -> WeightSpaceBasis:
    return algebra.space(depth)


def bar_half(y: HalfElement) -> HalfElement:
    """Ring involution fixing every F_i; coefficients get q -> pi q^-1."""
    return y.bar()


def rho_antiinvolution(y: HalfElement) -> HalfElement:
    """Anti-involution fixing every F_i: word reversal."""
    return y.rho()
