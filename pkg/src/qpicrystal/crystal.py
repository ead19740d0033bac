"""Crystal lattices, residues at q = 0 and crystal graphs on graded spaces.

The lattice at depth nu is the A-span of the Kashiwara monomials applied to
the seed vector; it is computed from the previous depths by
L_nu = sum_i f~_i L_{nu - e_i}.  Each component (pi = +1, -1) gets its own
A-basis; pairing the k-th basis vectors of both components gives an
A^pi-basis, and residues are coordinates in it evaluated at q = 0.

Nodes are residues of Kashiwara monomials (the literal set).  Two nodes form a
pi-class when their residues differ by pi, i.e. by a sign on the pi = -1
component.  The representative of a class is its earliest monomial in
breadth-first order, so every representative is itself a literal node.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from flint import fmpq_mat

from .cartan import add, depths_of_height, sub, unit
from .errors import CutoffExceeded, NotRegularAtZero
from .graded import Kashiwara
from .linalg import Mat, join, rf_lattice_basis, rf_solve
from .scalar import RAT_ONE, RAT_ZERO, Scalar

Residue = tuple  # (tuple of Fractions at pi=+1, tuple at pi=-1)


def pi_twist(r: Residue) -> Residue:
    return (r[0], tuple(-x for x in r[1]))


def negate(r: Residue) -> Residue:
    return (tuple(-x for x in r[0]), tuple(-x for x in r[1]))


def is_zero_residue(r: Residue) -> bool:
    return all(x == 0 for x in r[0]) and all(x == 0 for x in r[1])


def class_key(r: Residue) -> Residue:
    return min(r, pi_twist(r))


def residue_str(r: Residue) -> str:
    def one(v):
        return "[" + ", ".join(str(x) for x in v) + "]"
    return f"(+{one(r[0])}, -{one(r[1])})"


def scalar_times_residue(pi_exp: int, r: Residue) -> Residue:
    return pi_twist(r) if pi_exp % 2 else r


def kron_residue(a: Residue, b: Residue) -> Residue:
    return (tuple(x * y for x in a[0] for y in b[0]), tuple(x * y for x in a[1] for y in b[1]))


def rank_q(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    M = fmpq_mat(len(rows), ncols, [int(x.numerator) if x.denominator == 1 else _fmpq(x)
                                     for r in rows for x in r])
    return M.rank()


def _fmpq(x: Fraction):
    from flint import fmpq
    return fmpq(x.numerator, x.denominator)


@dataclass
class LatticeSlice:
    depth: tuple
    basis: Mat      # columns: A^pi-basis vectors
    inv: Mat

    @property
    def dim(self) -> int:
        return self.basis.ncols

    def coords(self, v: Sequence[Scalar]) -> list[Scalar]:
        return self.inv.apply(list(v))

    def contains(self, v: Sequence[Scalar]) -> bool:
        return all(c.valuation() >= 0 for c in self.coords(v))

    def residue(self, v: Sequence[Scalar]) -> Residue:
        cs = self.coords(v)
        try:
            return (tuple(c.plus.value_at_zero() for c in cs), tuple(c.minus.value_at_zero() for c in cs))
        except NotRegularAtZero as exc:
            raise NotRegularAtZero(f"vector is not in the crystal lattice at depth {self.depth}") from exc

    def lift(self, r: Residue) -> list[Scalar]:
        """A lattice vector with the given residue."""
        vec = [Scalar(a, b) for a, b in zip(r[0], r[1])]
        return self.basis.apply(vec)


def lattice_from_generators(depth, gens: Sequence[Sequence[Scalar]], dim: int) -> LatticeSlice:
    """A-span of generators; must have full rank ``dim``."""
    comps = []
    for sigma in (0, 1):
        g = [[x.component(sigma) for x in v] for v in gens]
        b = rf_lattice_basis(g, dim)
        if len(b) != dim:
            raise ArithmeticError(f"lattice at {depth} has rank {len(b)} < {dim} (component {sigma})")
        comps.append(Mat.from_columns(b, dim, RAT_ZERO))
    basis = join(comps[0], comps[1])
    ident = Mat.identity(dim, RAT_ONE, RAT_ZERO)
    inv = join(rf_solve(comps[0], ident), rf_solve(comps[1], ident))
    return LatticeSlice(depth, basis, inv)


def lattice_contains(outer: LatticeSlice, vecs: Sequence[Sequence[Scalar]]) -> bool:
    return all(outer.contains(v) for v in vecs)


def lattices_equal(a: LatticeSlice, b: LatticeSlice) -> bool:
    return lattice_contains(a, b.basis.columns()) and lattice_contains(b, a.basis.columns())


@dataclass
class CrystalNode:
    id: int
    depth: tuple
    residue: Residue
    lift: list
    path: tuple                      # f~_{path[0]} ... f~_{path[-1]} seed
    rep: int = -1                    # id of the class representative
    sign: int = 0                    # 0: equals rep, 1: equals pi * rep
    eps: dict = field(default_factory=dict)
    phi: dict = field(default_factory=dict)

    def path_str(self) -> str:
        if not self.path:
            return "1"
        out = []
        k = 0
        p = self.path
        while k < len(p):
            j = k
            while j < len(p) and p[j] == p[k]:
                j += 1
            n = j - k
            out.append(f"f{p[k] + 1}" + (f"^{n}" if n > 1 else ""))
            k = j
        return " ".join(out)


@dataclass
class Edge:
    src: int
    dst: int
    i: int
    sign: int   # pi exponent: f~_i src = pi^sign dst


class CrystalGraph:
    """Crystal lattice and crystal of a graded space, computed up to a height."""

    def __init__(self, space, max_height: int, pairing_fn=None, kashiwara: Kashiwara | None = None):
        self.W = space
        self.datum = space.datum
        self.rank = space.datum.rank
        self.max_height = max_height
        self.K = kashiwara or Kashiwara(space)
        self._pairing_fn = pairing_fn
        self._lattice: dict = {}
        self._nodes: dict = {}
        self._lookup: dict = {}    # depth -> {residue: (node id, pi exponent)} over the pi-closure
        self.nodes: list[CrystalNode] = []
        self._lock = threading.RLock()
        self._built_height = -1

    # weights
    def pairing(self, nu, i: int) -> int:
        if self._pairing_fn is not None:
            return self._pairing_fn(nu, i)
        return -sum(self.datum.A[i][j] * nu[j] for j in range(self.rank))

    def depths(self, h: int | None = None) -> list[tuple]:
        hs = range(self.max_height + 1) if h is None else [h]
        return [nu for hh in hs for nu in depths_of_height(self.rank, hh)
                if self.W.contains(nu) and self.W.dim(nu) > 0]

    # lattices
    def lattice(self, nu) -> LatticeSlice:
        nu = tuple(nu)
        L = self._lattice.get(nu)
        if L is not None:
            return L
        if sum(nu) > self.max_height:
            raise CutoffExceeded(f"depth {nu} beyond height {self.max_height}")
        with self._lock:
            n = self.W.dim(nu)
            if sum(nu) == 0:
                gens = [self.W.seed()]
            else:
                gens = []
                for i in range(self.rank):
                    if nu[i] == 0:
                        continue
                    low = sub(nu, unit(self.rank, i))
                    if self.W.dim(low) == 0:
                        continue
                    Fi = self.K.f_tilde(i, low)
                    gens.extend(Fi.apply(b) for b in self.lattice(low).basis.columns())
            L = lattice_from_generators(nu, gens, n)
            self._lattice[nu] = L
        return L

    # nodes
    def build(self) -> "CrystalGraph":
        with self._lock:
            for h in range(self._built_height + 1, self.max_height + 1):
                for nu in depths_of_height(self.rank, h):
                    if self.W.contains(nu):
                        self._build_depth(nu)
                self._built_height = h
            self._compute_eps_phi()
        return self

    def _add_node(self, nu, vec, path) -> None:
        r = self.lattice(nu).residue(vec)
        if is_zero_residue(r):
            return
        table = self._lookup.setdefault(nu, {})
        if r in table and table[r][1] == 0:
            return  # literal duplicate
        node = CrystalNode(len(self.nodes), nu, r, list(vec), tuple(path))
        if r in table:
            # r = pi * (existing literal); new literal element of the same class
            rep_id, _ = table[r]
            node.rep, node.sign = self.nodes[rep_id].rep, 1 - self.nodes[rep_id].sign
        else:
            node.rep, node.sign = node.id, 0
        self.nodes.append(node)
        self._nodes.setdefault(nu, []).append(node.id)
        table[r] = (node.id, 0)
        tw = pi_twist(r)
        if tw != r and tw not in table:
            table[tw] = (node.id, 1)

    def _build_depth(self, nu) -> None:
        if self.W.dim(nu) == 0:
            self._nodes.setdefault(nu, [])
            return
        if sum(nu) == 0:
            self._add_node(nu, self.W.seed(), ())
            return
        # paths extend on the left: f~_i applied to nodes of depth nu - e_i
        cands = []
        for i in range(self.rank):
            if nu[i] == 0:
                continue
            low = sub(nu, unit(self.rank, i))
            if not self.W.contains(low) or self.W.dim(low) == 0:
                continue
            for nid in self._nodes.get(low, []):
                cands.append(((i,) + self.nodes[nid].path, i, low, nid))
        cands.sort(key=lambda c: (len(c[0]), c[0]))
        for path, i, low, nid in cands:
            vec = self.K.apply_f(i, low, self.nodes[nid].lift)
            self._add_node(nu, vec, path)
        self._nodes.setdefault(nu, [])

    def nodes_at(self, nu) -> list[CrystalNode]:
        return [self.nodes[k] for k in self._nodes.get(tuple(nu), [])]

    def reps_at(self, nu) -> list[CrystalNode]:
        return [n for n in self.nodes_at(nu) if n.rep == n.id]

    def representatives(self) -> list[CrystalNode]:
        return [n for n in self.nodes if n.rep == n.id]

    def find(self, nu, r: Residue):
        """(node id, pi exponent) with r = pi^e * residue(node), over the pi-closure."""
        return self._lookup.get(tuple(nu), {}).get(r)

    def residue(self, nu, vec) -> Residue:
        return self.lattice(nu).residue(vec)

    # operators on residues through lifts
    def e_tilde_node(self, node: CrystalNode, i: int):
        """(target id, pi exponent) for e~_i node, or None when zero."""
        if node.depth[i] == 0:
            return None
        low = sub(node.depth, unit(self.rank, i))
        vec = self.K.apply_e(i, node.depth, node.lift)
        r = self.lattice(low).residue(vec)
        if is_zero_residue(r):
            return None
        hit = self.find(low, r)
        if hit is None:
            raise ArithmeticError(f"e~_{i + 1} of node {node.id} left the crystal")
        return hit

    def f_tilde_node(self, node: CrystalNode, i: int):
        up = add(node.depth, unit(self.rank, i))
        if sum(up) > self.max_height or not self.W.contains(up):
            raise CutoffExceeded("f~ beyond computed height")
        if self.W.dim(up) == 0:
            return None
        vec = self.K.apply_f(i, node.depth, node.lift)
        r = self.lattice(up).residue(vec)
        if is_zero_residue(r):
            return None
        hit = self.find(up, r)
        if hit is None:
            raise ArithmeticError(f"f~_{i + 1} of node {node.id} is not a crystal element")
        return hit

    def _compute_eps_phi(self) -> None:
        for node in self.nodes:
            for i in range(self.rank):
                if i in node.eps:
                    continue
                n = 0
                cur = node
                while True:
                    hit = self.e_tilde_node(cur, i)
                    if hit is None:
                        break
                    cur = self.nodes[hit[0]]
                    n += 1
                node.eps[i] = n
                node.phi[i] = n + self.pairing(node.depth, i)

    def edges(self) -> list[Edge]:
        out = []
        for node in self.representatives():
            if sum(node.depth) >= self.max_height:
                continue
            for i in range(self.rank):
                hit = self.f_tilde_node(node, i)
                if hit is None:
                    continue
                tgt = self.nodes[hit[0]]
                sign = (hit[1] + tgt.sign) % 2
                out.append(Edge(node.id, tgt.rep, i, sign))
        return out

    def gram_at_zero(self, nu, a: Sequence[Scalar], b: Sequence[Scalar]) -> tuple[Fraction, Fraction]:
        G = self.W.gram(nu)
        val = _bil(a, G, b)
        return val.eval_at_q0()

    def parity(self, node: CrystalNode) -> int:
        return self.W.parity(node.depth)

    def to_json(self) -> dict:
        nodes = []
        for n in self.representatives():
            nodes.append({
                "id": n.id,
                "path": n.path_str(),
                "weight": [-x for x in n.depth],
                "pairing": [self.pairing(n.depth, i) for i in range(self.rank)],
                "eps": [n.eps[i] for i in range(self.rank)],
                "phi": [n.phi[i] for i in range(self.rank)],
                "parity": self.parity(n),
            })
        edges = [{"src": e.src, "dst": e.dst, "i": e.i + 1, "sign": "pi" if e.sign else "1"}
                 for e in self.edges()]
        return {"nodes": nodes, "edges": edges}


def _bil(a, G: Mat, b):
    from .linalg import bilinear
    return bilinear(list(a), G, list(b))


def build_Binf(algebra, max_height: int | None = None) -> CrystalGraph:
    """B(infinity) and L(infinity) of U^- up to ``max_height``."""
    h = algebra.cutoff if max_height is None else max_height
    return CrystalGraph(algebra.graded(), h).build()


# Kashiwara operators on elements of U^-

@dataclass
class StringDecomposition:
    i: int
    components: list    # [(n, u_n)] with E_i' u_n = 0 and u = sum F_i^(n) u_n

    def reconstruct(self, algebra):
        from .half import HalfElement
        out = HalfElement()
        for n, u in self.components:
            out = out + algebra.multiply(algebra.divided_power(self.i, n), u)
        return out


def _half_kashiwara(algebra) -> Kashiwara:
    K = getattr(algebra, "_kashiwara", None)
    if K is None:
        K = Kashiwara(algebra.graded())
        algebra._kashiwara = K
    return K


def _check_cutoff(algebra, nu) -> None:
    if sum(nu) > algebra.cutoff:
        raise CutoffExceeded(f"depth {nu} beyond cutoff {algebra.cutoff}")


def string_decompose(algebra, i: int, u) -> StringDecomposition:
    nu = u.depth(algebra.rank)
    if nu is None:
        return StringDecomposition(i, [])
    _check_cutoff(algebra, nu)
    parts = _half_kashiwara(algebra).string_components(i, nu, algebra.coords(u, nu))
    comps = []
    for t, v in sorted(parts.items()):
        if any(not x.is_zero() for x in v):
            low = tuple(x - (t if j == i else 0) for j, x in enumerate(nu))
            comps.append((t, algebra.element(low, v)))
    return StringDecomposition(i, comps)


def kashiwara_f(algebra, i: int, u):
    nu = u.depth(algebra.rank)
    if nu is None:
        return u
    up = add(nu, unit(algebra.rank, i))
    _check_cutoff(algebra, up)
    return algebra.element(up, _half_kashiwara(algebra).apply_f(i, nu, algebra.coords(u, nu)))


def kashiwara_e(algebra, i: int, u):
    from .half import HalfElement
    nu = u.depth(algebra.rank)
    if nu is None or nu[i] == 0:
        return HalfElement()
    _check_cutoff(algebra, nu)
    low = sub(nu, unit(algebra.rank, i))
    return algebra.element(low, _half_kashiwara(algebra).apply_e(i, nu, algebra.coords(u, nu)))
