"""Canonical bases G(b) of U^- and G_lambda(b) of V(lambda).

For a node b at depth nu the element G(b) is the unique vector in the
Q[q, q^-1]-span of divided-power monomials that lies in L, reduces to b
modulo qL, and whose bar image also lies in L.  Writing G(b) = sum_k g_k m_k
over a basis m_k of bar-invariant divided-power monomials, these are linear
conditions on the Laurent coefficients of the g_k, one system per
specialization pi = +1, -1.  The q-window grows until the system is
consistent; uniqueness is asserted, and bar-invariance, integrality and the
congruence are verified afterwards rather than imposed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from flint import fmpq, fmpq_mat, fmpq_poly

from .cartan import height
from .crystal import CrystalGraph, CrystalNode
from .errors import NonTerminating
from .half import HalfAlgebra, HalfElement
from .linalg import Mat, independent_columns
from .scalar import ONE, RatFunc, Scalar

DPSpec = tuple  # ((i, a), ...) with consecutive indices distinct and a >= 1


def dp_sequences(nu: Sequence[int]) -> list[DPSpec]:
    """All divided-power monomial shapes of depth nu."""
    nu = tuple(nu)
    out: list[DPSpec] = []

    def rec(rest, last, acc):
        if not any(rest):
            out.append(tuple(acc))
            return
        for i, n in enumerate(rest):
            if n == 0 or i == last:
                continue
            for a in range(1, n + 1):
                r = list(rest)
                r[i] -= a
                rec(tuple(r), i, acc + [(i, a)])

    rec(nu, None, [])
    return out


def order_reverse_lex(spec: DPSpec):
    return tuple((-i, -a) for i, a in spec)


def order_lex(spec: DPSpec):
    return tuple(spec)


def format_dp(spec: DPSpec) -> str:
    return "".join(f"F{i + 1}" + (f"^({a})" if a > 1 else "") for i, a in spec) or "1"


def tex_dp(spec: DPSpec) -> str:
    return "".join(f"F_{{{i + 1}}}" + (f"^{{({a})}}" if a > 1 else "") for i, a in spec) or "1"


@dataclass
class CanonicalElement:
    depth: tuple
    node: int
    coords: list                 # in the basis of the ambient graded space
    dp_basis: list               # DPSpec list used for the expansion
    dp_coeffs: list              # Scalars, G = sum c_k m_k
    window: int = 0
    checks: dict = field(default_factory=dict)

    def dp_terms(self) -> list[tuple[DPSpec, Scalar]]:
        return [(s, c) for s, c in zip(self.dp_basis, self.dp_coeffs) if not c.is_zero()]

    def dp_str(self) -> str:
        parts = []
        for s, c in self.dp_terms():
            parts.append(format_dp(s) if c == ONE else f"({c})*{format_dp(s)}")
        return " + ".join(parts) or "0"

    def tex(self) -> str:
        parts = []
        for s, c in self.dp_terms():
            coef = "" if c == ONE else f"\\left({_tex_scalar(c)}\\right)"
            parts.append(coef + tex_dp(s))
        return " + ".join(parts) or "0"


def _tex_scalar(c: Scalar) -> str:
    s = str(c)
    s = s.replace("pi", "\\pi").replace("*", " ")
    import re
    s = re.sub(r"q\^\((-?\d+)\)", r"q^{\1}", s)
    s = re.sub(r"q\^(\d+)", r"q^{\1}", s)
    return s


class CanonicalSolver:
    """Shared machinery for U^- and V(lambda).

    ``dp_vector(spec)`` returns coordinates of a divided-power monomial (times
    v+ for modules) in the graded space at the monomial's depth.  All
    divided-power monomials of the depth are used as a spanning set: a
    Q(q)-basis extracted from them need not span the integral form over
    Z[q, q^-1]^pi, so G(b) might have non-Laurent coordinates in it.
    """

    def __init__(self, crystal: CrystalGraph, dp_vector: Callable[[DPSpec], list], max_d: int):
        self.C = crystal
        self.W = crystal.W
        self.dp_vector = dp_vector
        self.max_d = max_d
        self._span: dict = {}
        self._cache: dict = {}

    def window_bound(self, nu) -> int:
        return 2 * (height(nu) * self.max_d) + 4

    def dp_spanning(self, nu, order=order_reverse_lex) -> tuple[list, Mat]:
        key = (tuple(nu), order)
        hit = self._span.get(key)
        if hit is not None:
            return hit
        n = self.W.dim(nu)
        specs = sorted(dp_sequences(nu), key=order)
        T = Mat.from_columns([self.dp_vector(s) for s in specs], n)
        if n and len(independent_columns(T)) != n:
            raise ArithmeticError(f"divided-power monomials do not span depth {nu}")
        self._span[key] = (specs, T)
        return specs, T

    def solve(self, node: CrystalNode, order=order_reverse_lex) -> CanonicalElement:
        key = (node.id, order)
        if key in self._cache:
            return self._cache[key]
        nu = node.depth
        specs, T = self.dp_spanning(nu, order)
        L = self.C.lattice(nu)
        Cmat = L.inv @ T   # lattice coordinates of the monomials
        bound = self.window_bound(nu)
        sol = None
        for N in range(0, bound + 1):
            comps = []
            for sigma in (0, 1):
                g = _solve_component(Cmat.component(sigma), node.residue[sigma], N, sigma,
                                     T.component(sigma))
                if g is None:
                    break
                comps.append(g)
            if len(comps) == 2:
                sol = (N, comps)
                break
        if sol is None:
            raise NonTerminating(f"no canonical element for node {node.id} within window {bound}")
        N, (gp, gm) = sol
        coeffs = [Scalar(RatFunc.from_laurent(a), RatFunc.from_laurent(b)) for a, b in zip(gp, gm)]
        coords = T.apply(coeffs)
        el = CanonicalElement(nu, node.id, coords, specs, coeffs, N)
        self._cache[key] = el
        return el

    def verify(self, el: CanonicalElement) -> dict:
        node = self.C.nodes[el.node]
        L = self.C.lattice(el.depth)
        bar = [c.bar() for c in el.coords]
        inside = L.contains(el.coords)
        checks = {
            "bar_invariant": bar == el.coords,
            "dp_coefficients_integral": all(c.is_integral() for c in el.dp_coeffs),
            "denominators_in_A_Z": all(denominator_ok(c, el.depth, self.max_d) for c in el.coords),
            "in_lattice": inside,
            "congruent_to_node": inside and L.residue(el.coords) == node.residue,
        }
        el.checks.update(checks)
        return checks


def _poly_rows(T: Mat) -> tuple[list, int]:
    """Clear denominators: T = T'/D with T' polynomial; coefficient lists of T'."""
    D = fmpq_poly([1])
    for r in T.data:
        for x in r:
            if not x.is_zero():
                g = D.gcd(x.den)
                D = D * (x.den / g)
    rows = []
    for r in T.data:
        rows.append([[_frac(c) for c in (x.num * (D / x.den)).coeffs()] for x in r])
    deg = max((len(c) for r in rows for c in r), default=1)
    return rows, deg


def _frac(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def _solve_component(C: Mat, target: Sequence[Fraction], N: int, sigma: int, T: Mat):
    """Laurent vectors g (window [-N, N]) with C g = target + O(q) and C bar(g) = O(1).

    Returns None when inconsistent.  Solutions g need not be unique (the
    monomials are dependent); uniqueness of T g is checked exactly.
    """
    d = C.ncols
    n = C.nrows
    vmin = 0
    for r in C.data:
        for x in r:
            if not x.is_zero():
                vmin = min(vmin, x.valuation())
    lo = vmin - N
    ser = [[x.series(vmin, N + 1) for x in r] for r in C.data]

    def coef(b, k, j):
        if j < vmin or j > N:
            return 0
        return ser[b][k][j - vmin]

    unknowns = [(k, e) for k in range(d) for e in range(-N, N + 1)]
    nun = len(unknowns)
    flat = []
    nrows = 0
    for b in range(n):
        for m in range(lo, 1):
            flat.extend(_q(coef(b, k, m - e)) for k, e in unknowns)
            flat.append(_q(target[b] if m == 0 else 0))
            nrows += 1
        for m in range(lo, 0):
            flat.extend(_q(coef(b, k, m + e) * (1 if sigma == 0 or e % 2 == 0 else -1)) for k, e in unknowns)
            flat.append(fmpq(0))
            nrows += 1
    if nrows == 0:
        return None
    R, rank = fmpq_mat(nrows, nun + 1, flat).rref()
    ent = R.entries()
    width = nun + 1
    pivcols = []
    for i in range(rank):
        row = ent[i * width:(i + 1) * width]
        pivcols.append(next(j for j, x in enumerate(row) if x != 0))
    if nun in pivcols:
        return None
    out = [dict() for _ in range(d)]
    for i, c in enumerate(pivcols):
        val = ent[i * width + nun]
        if val != 0:
            k, e = unknowns[c]
            out[k][e] = _frac(val)
    pset = set(pivcols)
    free = [c for c in range(nun) if c not in pset]
    if free:
        _check_kernel_image(T, unknowns, free, pivcols, ent, width, N)
    return out


def _check_kernel_image(T: Mat, unknowns, free, pivcols, ent, width, N) -> None:
    """Every homogeneous solution must map to 0 under the monomial matrix T."""
    rows, deg = _poly_rows(T)
    n = T.nrows
    span = deg + 2 * N
    nun = len(unknowns)
    conv = [fmpq(0)] * (n * span * nun)
    for col, (k, e) in enumerate(unknowns):
        for b in range(n):
            for j, c in enumerate(rows[b][k]):
                if c:
                    conv[(b * span + j + e + N) * nun + col] = _q(c)
    K = [fmpq(0)] * (nun * len(free))
    nf = len(free)
    for t, f in enumerate(free):
        K[f * nf + t] = fmpq(1)
        for i, c in enumerate(pivcols):
            K[c * nf + t] = -ent[i * width + f]
    P = fmpq_mat(n * span, nun, conv) * fmpq_mat(nun, nf, K)
    if any(x != 0 for x in P.entries()):
        raise ArithmeticError("canonical element is not unique: a homogeneous solution survives")


def _q(x):
    if isinstance(x, fmpq):
        return x
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    return fmpq(x)



def denominator_ok(c: Scalar, depth, max_d: int) -> bool:
    """Denominators divide q^k prod_n (1 - q^{4n}) in both specializations."""
    N = 2 * height(depth) * max_d + 2
    big = fmpq_poly([1])
    for n in range(1, N + 1):
        big = big * fmpq_poly([1] + [0] * (4 * n - 1) + [-1])
    for comp in (c.plus, c.minus):
        den = comp.den
        # strip powers of q
        cs = den.coeffs()
        k = next(j for j, x in enumerate(cs) if x != 0)
        den = fmpq_poly(cs[k:])
        if not (big % den).is_zero():
            return False
    return True


class HalfCanonical:
    """Canonical basis of U^- over a crystal of B(infinity)."""

    def __init__(self, algebra: HalfAlgebra, crystal: CrystalGraph):
        self.alg = algebra
        self.C = crystal
        self.solver = CanonicalSolver(crystal, self._dp_vec, max(algebra.datum.d))

    def _dp_vec(self, spec):
        return self.alg.coords(self.alg.divided_power_monomial(spec, reduce=False),
                               _depth_of(spec, self.alg.rank))

    def compute_G(self, nu, order=order_reverse_lex, maximal: bool = False) -> list[CanonicalElement]:
        out = []
        for node in self.C.reps_at(nu):
            el = self.solver.solve(node, order)
            out.append(el)
        if maximal:
            extra = []
            for el in out:
                tw = [c.pi_twist() for c in el.coords]
                extra.append(CanonicalElement(el.depth, el.node, tw, el.dp_basis,
                                              [c.pi_twist() for c in el.dp_coeffs], el.window,
                                              {"pi_variant": True}))
            out = out + extra
        return out

    def element(self, el: CanonicalElement) -> HalfElement:
        return self.alg.element(el.depth, el.coords)

    def G(self, node_id: int, order=order_reverse_lex) -> CanonicalElement:
        return self.solver.solve(self.C.nodes[node_id], order)

    def G3_membership(self, el: CanonicalElement, i: int, n: int | None = None) -> bool:
        """G(b) in sum_{k >= n} F_i^(k) U^- ; n defaults to eps_i(b)."""
        node = self.C.nodes[el.node]
        if n is None:
            n = node.eps[i]
        if n == 0:
            return True
        parts = self.C.K.string_components(i, el.depth, el.coords)
        return all(all(x.is_zero() for x in v) for t, v in parts.items() if t < n)


def _depth_of(spec: DPSpec, rank: int) -> tuple:
    nu = [0] * rank
    for i, a in spec:
        nu[i] += a
    return tuple(nu)


class ModuleCanonical:
    """Canonical basis G_lambda of V(lambda), solved independently on the module
    from the divided-power monomials applied to v+, and compared with G(b) v+."""

    def __init__(self, half: HalfCanonical, module, crystal: CrystalGraph):
        self.half = half
        self.V = module
        self.C = crystal
        self.solver = CanonicalSolver(crystal, self._dp_vec, max(module.datum.d))

    def _dp_vec(self, spec):
        nu = _depth_of(spec, self.V.datum.rank)
        return self.V.project(nu, self.half._dp_vec(spec))

    def compute_G(self, nu, order=order_reverse_lex) -> list[CanonicalElement]:
        return [self.solver.solve(node, order) for node in self.C.reps_at(nu)]

    def apply(self, el: CanonicalElement) -> list[Scalar]:
        """Module coordinates of G(b) v+."""
        return self.V.project(el.depth, el.coords)

    def compare(self, nu) -> dict:
        """G(b) v+ against G_lambda(p(b)) for every representative b of B(infinity) at nu.

        Returns counts and the failures; G(b) v+ must vanish exactly when the
        projected residue does."""
        from .axioms import project_from_Binf
        out = {"checked": 0, "zero": 0, "failures": []}
        if self.V.dim(nu) == 0 or sum(nu) > self.C.max_height:
            return out
        for b in self.half.C.reps_at(nu):
            el = self.half.solver.solve(b)
            v = self.apply(el)
            hit = project_from_Binf(self.V, self.C, b)
            out["checked"] += 1
            if hit is None:
                out["zero"] += 1
                if not all(x.is_zero() for x in v):
                    out["failures"].append((b.id, "nonzero image of a vanishing node"))
                continue
            g = self.solver.solve(self.C.nodes[hit[0]])
            checks = self.solver.verify(g)
            want = [c.pi_twist() for c in g.coords] if hit[1] else g.coords
            if v != want or not all(checks.values()):
                out["failures"].append((b.id, hit, checks))
        return out


def compute_G_module(half: HalfCanonical, module, crystal: CrystalGraph, nu) -> list[CanonicalElement]:
    """G_lambda(b) for the representatives of B(lambda) at depth nu."""
    return ModuleCanonical(half, module, crystal).compute_G(nu)


def G3_membership_check(half: HalfCanonical, nu, i: int, n: int) -> dict:
    """G(b) in sum_{k >= n} F_i^(k) U^- for every representative b with eps_i(b) >= n."""
    out = {"checked": 0, "ok": True}
    if n == 0:
        return out
    for node in half.C.reps_at(nu):
        if node.eps[i] >= n:
            out["checked"] += 1
            out["ok"] &= half.G3_membership(half.solver.solve(node), i, n)
    return out
