"""Reproduction of the worked examples: the odd rank-1 crystal and modules,
V(n) (x) V(1), the osp(1|4) weight 4 alpha_1 + alpha_2 slice, and the odd
commuting pair.  Each item records the stated value, the computed value and
whether they agree; a few stated values are known misprints and are listed
with their corrected form next to them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .axioms import build_Bla, pi_basis_check
from .canonical import HalfCanonical
from .cartan import get_datum
from .crystal import build_Binf, pi_twist
from .half import HalfAlgebra, HalfElement
from .linalg import bilinear
from .modules import IntegrableModule, polarization_suite, relation_suite
from .rank_one import odd_rank_one_check
from .scalar import ONE, Scalar, format_scalar, qpi_factorial, qpi_integer

PI = Scalar.monomial(1, 0)
Q = Scalar.monomial(0, 1)


@dataclass
class Item:
    example: str
    name: str
    ok: bool
    expected: str = ""
    got: str = ""
    note: str = ""


@dataclass
class Reproduction:
    items: list = field(default_factory=list)

    def add(self, *args, **kw) -> Item:
        it = Item(*args, **kw)
        self.items.append(it)
        return it

    @property
    def ok(self) -> bool:
        return all(it.ok for it in self.items)

    def table(self) -> str:
        w = max((len(f"{it.example} {it.name}") for it in self.items), default=10)
        lines = []
        for it in self.items:
            tag = "PASS" if it.ok else "FAIL"
            line = f"{tag}  {(it.example + ' ' + it.name).ljust(w)}"
            if it.note:
                line += f"  [{it.note}]"
            lines.append(line)
        return "\n".join(lines)


# odd rank 1

def rank_one_strings(nmax: int = 8, rep: Reproduction | None = None) -> Reproduction:
    """dim V(n) = n + 1, B(n) = {F^(k) v+}, and all defining relations, for n <= nmax."""
    rep = rep or Reproduction()
    alg = HalfAlgebra(get_datum("osp12"), cutoff=nmax + 2)
    for n in range(nmax + 1):
        V = IntegrableModule(alg, (n,))
        C = build_Bla(V)
        dims = V.total_dim() == n + 1
        # the node at depth k is F^(k) v+ (the module basis vector there is F^k v+)
        string = len(C.nodes) == n + 1
        for k in range(n + 1):
            nodes = C.nodes_at((k,))
            dp = [qpi_factorial(k).inverse()]
            string &= len(nodes) == 1 and C.lattice((k,)).residue(dp) == nodes[0].residue
            string &= C.lattice((k,)).contains(dp)
        rel = relation_suite(V)
        pol = polarization_suite(V)
        rep.add("rank 1", f"V({n}) dim", dims, str(n + 1), str(V.total_dim()))
        rep.add("rank 1", f"B({n}) string", string)
        rep.add("rank 1", f"V({n}) relations", all(rel.values()) and all(pol.values()),
                got=str({k: v for k, v in {**rel, **pol}.items() if not v}))
    return rep


def tensor_rank_one(nmax: int = 6, rep: Reproduction | None = None) -> Reproduction:
    rep = rep or Reproduction()
    alg = HalfAlgebra(get_datum("osp12"), cutoff=nmax + 3)
    for n in range(nmax + 1):
        r = odd_rank_one_check(n, alg)
        for key, val in r.checks.items():
            note = ""
            if key == "Fk_z_formula" and not r.info["Fk_z_with_extra_pi"]:
                note = "holds without the printed leading pi"
            rep.add("V(n)xV(1)", f"n={n} {key}", val, note=note)
    return rep


# osp(1|4), depth 4 alpha_1 + alpha_2

def _dp(alg, spec):
    return alg.divided_power_monomial(spec)


class Example63:
    """The slice at depth (4, 1) of U^- for osp(1|4)."""

    nu = (4, 1)

    def __init__(self, alg: HalfAlgebra | None = None):
        self.alg = alg or HalfAlgebra(get_datum("osp14"), cutoff=5)
        self.binf = build_Binf(self.alg, 5)
        self.canon = HalfCanonical(self.alg, self.binf)
        a = self.alg
        self.G1 = _dp(a, ((0, 4), (1, 1)))                       # F1^(4) F2
        F3 = _dp(a, ((0, 3),))
        inner = HalfElement.word((1, 0)) - HalfElement.word((0, 1)).scale(Q * Q)
        self.X = a.multiply(F3, inner)                          # F1^(3) (F2 F1 - q^2 F1 F2)
        self.G2_stated = self.X + self.G1.scale(Q * Q)
        by_path = {n.path: n for n in self.binf.nodes_at(self.nu)}
        self.b1 = by_path[(0, 0, 0, 0, 1)]
        self.b2 = by_path[(0, 0, 0, 1, 0)]

    def coords(self, x: HalfElement):
        return self.alg.coords(x, self.nu)

    def form(self, x, y) -> Scalar:
        return bilinear(self.coords(x), self.alg.space(self.nu).gram, self.coords(y))

    def run(self, rep: Reproduction | None = None) -> Reproduction:
        rep = rep or Reproduction()
        ex = "osp(1|4) (4,1)"
        m1 = self.binf.K.apply_path((0, 0, 0, 0, 1))[1]
        m2 = self.binf.K.apply_path((0, 0, 0, 1, 0))[1]
        rep.add(ex, "f1^4 f2 1 = F1^(4)F2", m1 == self.coords(self.G1))
        rep.add(ex, "f1^3 f2 f1 1 = F1^(3)(F2F1 - q^2F1F2) + q^2F1^(4)F2", m2 == self.coords(self.G2_stated))
        rep.add(ex, "two distinct nodes", self.b1.rep != self.b2.rep)
        # canonical elements
        G = {el.node: el for el in self.canon.compute_G(self.nu)}
        g1 = self.canon.solver.solve(self.b1)
        g2 = self.canon.solver.solve(self.b2)
        checks = [self.canon.solver.verify(g) for g in G.values()]
        rep.add(ex, "canonical elements verified", all(all(c.values()) for c in checks),
                got=str(len(G)))
        rep.add(ex, "G(b1) = F1^(4)F2", g1.coords == self.coords(self.G1), got=g1.dp_str())
        stated_bar = [c.bar() for c in self.coords(self.G2_stated)] == self.coords(self.G2_stated)
        rep.add(ex, "G(b2) = stated element", g2.coords == self.coords(self.G2_stated),
                "F1^(3)(F2F1 - q^2F1F2) + q^2F1^(4)F2", g2.dp_str(),
                note="stated element equals the Kashiwara monomial but is not bar-invariant"
                if not stated_bar else "")
        rep.add(ex, "stated element bar-invariant", stated_bar, "True", str(stated_bar),
                note="coefficient q^2(1 - [4]) of F1^(4)F2 is not bar-fixed" if not stated_bar else "")
        d = qpi_factorial
        v11 = self.form(self.G1, self.G1)
        vxx = self.form(self.X, self.X)
        vx1 = self.form(self.X, self.G1)
        lit11 = Scalar.monomial(0, 6) * d(4).inverse()
        litxx = Scalar.monomial(1, 3) * d(3).inverse() * (ONE - Scalar.monomial(0, 4))
        cor11 = Scalar.monomial(0, -6) * d(4).inverse()
        corxx = Scalar.monomial(1, -3) * d(3).inverse() * (ONE - Scalar.monomial(0, 4))
        rep.add(ex, "(F1^(4)F2, F1^(4)F2) = (pi q)^-6 / [4]!", v11 == cor11, format_scalar(cor11),
                format_scalar(v11))
        rep.add(ex, "(X, X) = (pi q)^-3 / [3]! (1 - q^4)", vxx == corxx, format_scalar(corxx),
                format_scalar(vxx))
        rep.add(ex, "(X, F1^(4)F2) = 0", vx1.is_zero(), "0", format_scalar(vx1))
        rep.add(ex, "(F1^(4)F2, F1^(4)F2) = (pi q)^6 / [4]! as printed", v11 == lit11,
                note="printed exponent 6; value lies in 1 + q^2 Z[[q]] only for exponent -6")
        rep.add(ex, "(X, X) = (pi q)^3 / [3]! (1 - q^4) as printed", vxx == litxx,
                note="printed exponent 3; value lies in pi + q^2 Z[[q]] only for exponent -3")
        r11 = self.form(self.G1, self.G1).eval_at_q0()
        r22 = self.form(self.G2_stated, self.G2_stated).eval_at_q0()
        r12 = self.form(self.G1, self.G2_stated)
        rep.add(ex, "(b1, b1)_0 = 1", r11 == (1, 1), "(1, 1)", str(r11))
        rep.add(ex, "(b2, b2)_0 = pi", r22 == (1, -1), "(1, -1)", str(r22))
        rep.add(ex, "(b1, b2)_0 = 0", r12.eval_at_q0() == (0, 0), "(0, 0)", str(r12.eval_at_q0()))
        low = r12 - Q * Q
        rep.add(ex, "(b1, b2) = q^2 mod q^4", low.valuation() >= 4, got=format_scalar(r12))
        pb = pi_basis_check(self.binf, self.nu)
        rep.add(ex, "pi-orthonormal pi-basis", all(pb.values()), got=str(pb))
        # negative control
        x = [Scalar.monomial(0, -1) * (ONE - PI) * (s + t) for s, t in zip(m1, m2)]
        val = bilinear(x, self.alg.space(self.nu).gram, x)
        inside = self.binf.lattice(self.nu).contains(x)
        rep.add(ex, "q^-1(1-pi)(b1+b2): (x,x) in A", val.valuation() >= 0, got=format_scalar(val))
        rep.add(ex, "q^-1(1-pi)(b1+b2) outside L(infinity)", not inside)
        rep.add(ex, "G3: G(b2) in F1^3 U^-", self.canon.G3_membership(g2, 0, 3))
        return rep


# odd commuting pair

def odd_pair(rep: Reproduction | None = None) -> Reproduction:
    """a_12 = a_21 = 0 with both indices odd: f~1 f~2 1 = pi f~2 f~1 1 and F1F2 = pi F2F1."""
    rep = rep or Reproduction()
    ex = "odd pair"
    alg = HalfAlgebra(get_datum("oddpair"), cutoff=3)
    B = build_Binf(alg, 3)
    nu = (1, 1)
    x = alg.coords(HalfElement.word((0, 1)), nu)
    y = alg.coords(HalfElement.word((1, 0)), nu)
    rep.add(ex, "F1F2 = pi F2F1", x == [PI * t for t in y])
    m12 = B.K.apply_path((0, 1))[1]
    m21 = B.K.apply_path((1, 0))[1]
    L = B.lattice(nu)
    rep.add(ex, "f1 f2 1 = pi f2 f1 1", L.residue(m12) == pi_twist(L.residue(m21)))
    nodes = B.nodes_at(nu)
    rep.add(ex, "one class, two literal nodes", len(nodes) == 2 and len(B.reps_at(nu)) == 1,
            got=f"{len(nodes)} nodes, {len(B.reps_at(nu))} classes")
    H = HalfCanonical(alg, B)
    gs = [H.solver.solve(n) for n in nodes]
    ok = all(all(H.solver.verify(g).values()) for g in gs)
    words = sorted(tuple(g.coords) == tuple(x) or tuple(g.coords) == tuple(y) for g in gs)
    rep.add(ex, "F1F2 and F2F1 are both canonical", ok and all(words),
            got=", ".join(g.dp_str() for g in gs))
    return rep


# specialization coherence

def specialization(rep: Reproduction | None = None) -> Reproduction:
    """Characters at pi = +1 and -1 agree for every built module; the even
    sub-datum {alpha_2} of osp(1|4) carries no pi and gives classical sl2 strings."""
    rep = rep or Reproduction()
    for name, lams, h in (("osp12", [(n,) for n in range(7)], 8),
                          ("osp14", [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)], 12),
                          ("affine2", [(1, 0), (0, 1), (1, 1)], 5)):
        alg = HalfAlgebra(get_datum(name), cutoff=h)
        for lam in lams:
            V = IntegrableModule(alg, lam, budget=2000, height_limit=h if name == "affine2" else None)
            ch = V.character()
            rep.add("characters", f"{name} V{list(lam)}", all(a == b for a, b in ch.values()),
                    got=str(sum(a for a, _ in ch.values())))
    alg = HalfAlgebra(get_datum("osp14"), cutoff=12)
    for n in range(3):
        rep.add("sl2 at pi=+1", f"V({n} omega_2) alpha_2-string", classical_string(alg, n))
    return rep


def classical_string(alg: HalfAlgebra, n: int) -> bool:
    """The alpha_2-string through v+ in V(n omega_2): one-dimensional weight spaces,
    pi-free action, E_2 F_2^(k) v+ = [n - k + 1]_{q^2} F_2^(k-1) v+, and the
    crystal string of length n + 1 with classical eps and phi."""
    V = IntegrableModule(alg, (0, n))
    C = build_Bla(V)
    ok = True
    for k in range(n + 2):
        ok &= V.dim((0, k)) == (1 if k <= n else 0)
    for k in range(1, n + 1):
        F = V.lower(1, (0, k - 1))[0, 0]
        E = V.raise_(1, (0, k))[0, 0]
        ok &= F.plus == F.minus and E.plus == E.minus
        # basis vectors are F_2^k v+, so E F (F^(k-1)) = [k] [n - k + 1] F^(k-1) in classical units
        want = qpi_integer(n - k + 1, 2, False)
        ok &= E * F == qpi_integer(k, 2, False) * want
    string = [C.nodes_at((0, k)) for k in range(n + 1)]
    ok &= all(len(s) == 1 for s in string)
    ok &= all(s[0].eps[1] == k and s[0].phi[1] == n - k for k, s in enumerate(string))
    return ok


def all_examples() -> Reproduction:
    rep = Reproduction()
    rank_one_strings(8, rep)
    tensor_rank_one(6, rep)
    Example63().run(rep)
    odd_pair(rep)
    specialization(rep)
    return rep


# items that reproduce misprints literally and are expected to fail
KNOWN_MISPRINTS = (
    "G(b2) = stated element",
    "stated element bar-invariant",
    "(F1^(4)F2, F1^(4)F2) = (pi q)^6 / [4]! as printed",
    "(X, X) = (pi q)^3 / [3]! (1 - q^4) as printed",
)
