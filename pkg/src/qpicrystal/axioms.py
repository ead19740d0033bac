"""Mechanical checks of the grand-loop statements C_l.1 - C_l.14, the crystal
axioms, and pi-orthonormality, on everything computed up to a height.

Every check works with lifts of residues: a node's lift is the Kashiwara
monomial it came from, and residues are compared exactly over Q x Q.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .cartan import add, depths_of_height, sub, unit
from .crystal import (CrystalGraph, LatticeSlice, build_Binf, is_zero_residue, lattice_contains,
                      lattice_from_generators, lattices_equal, pi_twist, rank_q)
from .half import HalfAlgebra
from .linalg import inverse
from .modules import (IntegrableModule, tensor, tensor_lattice, tensor_maps)
from .scalar import ONE, Scalar


@dataclass
class Check:
    name: str
    ok: bool = True
    count: int = 0
    failures: list = field(default_factory=list)

    def record(self, good: bool, info=None) -> None:
        self.count += 1
        if not good:
            self.ok = False
            if len(self.failures) < 10:
                self.failures.append(info)

    def __str__(self):
        tag = "ok" if self.ok else "FAIL"
        extra = f" first failures: {self.failures}" if self.failures else ""
        return f"{self.name}: {tag} ({self.count} checks){extra}"


def build_Bla(module, max_height: int | None = None) -> CrystalGraph:
    """L(lambda), B(lambda) seeded at the highest vector."""
    h = module.max_height if max_height is None else min(max_height, module.max_height)
    return CrystalGraph(module, h, pairing_fn=module.pairing, kashiwara=module.kashiwara).build()


def _top(C: CrystalGraph) -> int:
    return C.max_height


def _res_or_none(L: LatticeSlice, vec):
    r = L.residue(vec)
    return None if is_zero_residue(r) else r


# crystal operators on lifts, as residues

def f_residue(C: CrystalGraph, node, i: int):
    up = add(node.depth, unit(C.rank, i))
    if sum(up) > C.max_height or not C.W.contains(up) or C.W.dim(up) == 0:
        return None
    return _res_or_none(C.lattice(up), C.K.apply_f(i, node.depth, node.lift))


def e_residue(C: CrystalGraph, node, i: int):
    if node.depth[i] == 0:
        return None
    low = sub(node.depth, unit(C.rank, i))
    if C.W.dim(low) == 0:
        return None
    return _res_or_none(C.lattice(low), C.K.apply_e(i, node.depth, node.lift))


# pi-basis and pi-orthonormality

def pi_basis_check(C: CrystalGraph, nu) -> dict:
    """Residues of B at depth nu form a pi-basis of L/qL (representatives a basis,
    every node a representative up to pi) and are pi-orthonormal under (,)_0."""
    nu = tuple(nu)
    n = C.W.dim(nu)
    reps = C.reps_at(nu)
    out = {"count": len(reps) == n}
    if n == 0:
        out.update(basis=True, closure=True, orthonormal=True)
        return out
    out["basis"] = all(rank_q([r.residue[s] for r in reps], n) == n for s in (0, 1))
    out["closure"] = all(C.nodes[m.rep].residue in (m.residue, pi_twist(m.residue))
                         for m in C.nodes_at(nu))
    ok = True
    for a, b in itertools.combinations_with_replacement(reps, 2):
        g = C.gram_at_zero(nu, a.lift, b.lift)
        if a.id == b.id:
            ok &= g[0] == 1 and g[1] in (1, -1)
        else:
            ok &= g == (0, 0)
    out["orthonormal"] = ok
    return out


def self_pairing(C: CrystalGraph, node) -> str:
    """'1' or 'pi' for (b, b)_0."""
    g = C.gram_at_zero(node.depth, node.lift, node.lift)
    return "1" if g == (1, 1) else "pi" if g == (1, -1) else str(g)


def adjunction_check(C: CrystalGraph) -> Check:
    """(f~_i u, v)_0 = pi_i^{eps_i(u)} (u, e~_i v)_0 on crystal nodes."""
    ch = Check("adjunction_at_zero")
    D = C.datum
    for nu in C.depths():
        for i in range(C.rank):
            up = add(nu, unit(C.rank, i))
            if sum(up) > C.max_height or C.W.dim(up) == 0:
                continue
            for u in C.nodes_at(nu):
                fu = C.K.apply_f(i, nu, u.lift)
                for v in C.nodes_at(up):
                    ev = C.K.apply_e(i, up, v.lift)
                    lhs = C.gram_at_zero(up, fu, v.lift)
                    rhs = C.gram_at_zero(nu, u.lift, ev)
                    if D.odd(i) and u.eps[i] % 2:
                        rhs = (rhs[0], -rhs[1])
                    ch.record(lhs == rhs, (u.id, v.id, i))
    return ch


def dual_lattice(C: CrystalGraph, nu) -> LatticeSlice:
    """{u : (u, L) in A} at depth nu."""
    L = C.lattice(nu)
    P = L.basis.T @ C.W.gram(nu)
    return LatticeSlice(tuple(nu), inverse(P), P)


def self_duality_check(C: CrystalGraph) -> Check:
    ch = Check("lattice_self_dual")
    for nu in C.depths():
        L = C.lattice(nu)
        G = L.basis.T @ C.W.gram(nu) @ L.basis
        integral = all(x.valuation() >= 0 for row in G.data for x in row)
        ch.record(integral and lattices_equal(L, dual_lattice(C, nu)), nu)
    return ch


def negative_control(binf: CrystalGraph) -> dict:
    """x = q^-1 (1 - pi)(b1 + b2) at depth (4, 1) of osp(1|4): (x, x) in A, x not in L(infinity)."""
    nu = (4, 1)
    by_path = {n.path: n for n in binf.nodes_at(nu)}
    nodes = [by_path[(0, 0, 0, 0, 1)], by_path[(0, 0, 0, 1, 0)]]
    x = [a + b for a, b in zip(nodes[0].lift, nodes[1].lift)]
    c = Scalar.monomial(0, -1) * (ONE - Scalar.monomial(1, 0))
    x = [c * t for t in x]
    G = binf.W.gram(nu)
    from .linalg import bilinear
    val = bilinear(x, G, x)
    return {"self_pairing": val, "self_pairing_in_A": val.valuation() >= 0,
            "in_lattice": binf.lattice(nu).contains(x),
            "self_pairings": [self_pairing(binf, n) for n in nodes]}


# crystal axioms on a single crystal

def crystal_axioms(C: CrystalGraph, name: str) -> dict[str, Check]:
    """pi-basis, e~/f~ closure, e~ f~ inverse, phi = eps + <h_i, wt> with phi
    measured by f~ strings (only where the string stays below the top)."""
    basis = Check(f"{name}:pi_basis")
    closure = Check(f"{name}:closure")
    inverse_ = Check(f"{name}:e_f_inverse")
    phi = Check(f"{name}:phi_eps")
    for nu in C.depths():
        rep = pi_basis_check(C, nu)
        basis.record(all(rep.values()), (nu, rep))
        for b in C.nodes_at(nu):
            for i in range(C.rank):
                er = e_residue(C, b, i)
                if er is not None:
                    low = sub(nu, unit(C.rank, i))
                    closure.record(C.find(low, er) is not None, (b.id, i, "e"))
                up = add(nu, unit(C.rank, i))
                if sum(up) <= C.max_height:
                    fr = f_residue(C, b, i)
                    if fr is not None:
                        closure.record(C.find(up, fr) is not None, (b.id, i, "f"))
                # phi by f~ string
                n, cur, capped = 0, b, False
                while True:
                    if sum(cur.depth) + 1 > C.max_height:
                        capped = True
                        break
                    hit = C.f_tilde_node(cur, i)
                    if hit is None:
                        break
                    cur = C.nodes[hit[0]]
                    n += 1
                if not capped:
                    phi.record(n == b.phi[i] == b.eps[i] + C.pairing(nu, i), (b.id, i, n, b.phi[i]))
    # b = f~ b'  <=>  b' = e~ b, on literal nodes
    for nu in C.depths():
        for i in range(C.rank):
            if nu[i] == 0:
                continue
            low = sub(nu, unit(C.rank, i))
            for b in C.nodes_at(nu):
                er = e_residue(C, b, i)
                for bp in C.nodes_at(low):
                    fr = f_residue(C, bp, i)
                    inverse_.record((fr == b.residue) == (er == bp.residue), (b.id, bp.id, i))
    return {c.name: c for c in (basis, closure, inverse_, phi)}


# grand loop

@dataclass
class GrandLoopReport:
    datum: str
    height: int
    checks: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks.values())

    def add(self, ch: Check) -> None:
        if ch.name in self.checks:
            old = self.checks[ch.name]
            old.ok &= ch.ok
            old.count += ch.count
            old.failures.extend(ch.failures[: max(0, 10 - len(old.failures))])
        else:
            self.checks[ch.name] = ch

    def lines(self) -> list[str]:
        return [str(c) for _, c in sorted(self.checks.items())]


def project_residue(V: IntegrableModule, cV: CrystalGraph, node):
    """Residue of p_lambda(lift of node) in L(lambda)/qL(lambda), or None when zero."""
    if V.dim(node.depth) == 0 or sum(node.depth) > cV.max_height:
        return None
    return _res_or_none(cV.lattice(node.depth), V.project(node.depth, node.lift))


def project_from_Binf(V: IntegrableModule, cV: CrystalGraph, node):
    """(node id of B(lambda), pi exponent) for the image of a B(infinity) node, or None."""
    r = project_residue(V, cV, node)
    if r is None:
        return None
    hit = cV.find(node.depth, r)
    if hit is None:
        raise ArithmeticError(f"projection of node {node.id} is not in B(lambda)")
    return hit


def _lambda_checks(rep: GrandLoopReport, binf: CrystalGraph, V: IntegrableModule, cV: CrystalGraph) -> None:
    tag = f"lambda={list(V.lam)}"
    l = rep.height
    c2 = Check("C2_e_stable_L(lambda)")
    c3 = Check("C3_projection_lattice")
    c6 = Check("C6_f_commutes_with_projection")
    c11 = Check("C11_projection_bijective")
    c12 = Check("C12_e_commutes_with_projection")
    for nu in cV.depths():
        L = cV.lattice(nu)
        for i in range(V.datum.rank):
            if nu[i] and V.dim(sub(nu, unit(V.datum.rank, i))):
                low = sub(nu, unit(V.datum.rank, i))
                E = V.kashiwara.e_tilde(i, nu)
                c2.record(lattice_contains(cV.lattice(low), [E.apply(b) for b in L.basis.columns()]),
                          (tag, nu, i))
    for h in range(min(l, cV.max_height) + 1):
        for nu in depths_of_height(V.datum.rank, h):
            if binf.W.dim(nu) == 0:
                continue
            Linf = binf.lattice(nu)
            imgs = [V.project(nu, b) for b in Linf.basis.columns()]
            if V.dim(nu) == 0:
                c3.record(True, (tag, nu))
                continue
            c3.record(lattices_equal(lattice_from_generators(nu, imgs, V.dim(nu)), cV.lattice(nu)),
                      (tag, nu))
            # C6 on lattice generators, h <= l - 1
            if h < l:
                for i in range(V.datum.rank):
                    up = add(nu, unit(V.datum.rank, i))
                    if sum(up) > cV.max_height or V.dim(up) == 0:
                        continue
                    Lup = cV.lattice(up)
                    for b in Linf.basis.columns():
                        lhs = V.kashiwara.apply_f(i, nu, V.project(nu, b))
                        rhs = V.project(up, binf.K.apply_f(i, nu, b))
                        diff = [a - c for a, c in zip(lhs, rhs)]
                        c6.record(all(x.valuation() >= 1 for x in Lup.coords(diff)), (tag, nu, i))
            # C11: nonzero images of literal nodes are literal B(lambda) nodes up to pi,
            # and representatives map bijectively onto classes
            seen = {}
            for b in binf.nodes_at(nu):
                r = project_residue(V, cV, b)
                if r is None:
                    continue
                hit = cV.find(nu, r)
                c11.record(hit is not None, (tag, b.id))
                if hit is not None and b.rep == b.id:
                    key = cV.nodes[hit[0]].rep
                    c11.record(key not in seen, (tag, b.id, "not injective"))
                    seen[key] = b.id
                # C12
                for i in range(V.datum.rank):
                    if nu[i] == 0:
                        continue
                    low = sub(nu, unit(V.datum.rank, i))
                    if V.dim(low) == 0:
                        continue
                    lhs = _res_or_none(cV.lattice(low), V.kashiwara.apply_e(i, nu, V.project(nu, b.lift)))
                    rhs = _res_or_none(cV.lattice(low), V.project(low, binf.K.apply_e(i, nu, b.lift)))
                    c12.record(lhs == rhs, (tag, b.id, i))
            c11.record(set(seen) == {n.id for n in cV.reps_at(nu)}, (tag, nu, "not surjective"))
    for ch in (c2, c3, c6, c11, c12):
        rep.add(ch)
    ax = crystal_axioms(cV, "B(lambda)")
    c5 = Check("C5_pi_basis_B(lambda)")
    c5.ok, c5.count, c5.failures = ax["B(lambda):pi_basis"].ok, ax["B(lambda):pi_basis"].count, \
        ax["B(lambda):pi_basis"].failures
    rep.add(c5)
    c7 = Check("C7_closure_B(lambda)")
    c7.ok, c7.count, c7.failures = ax["B(lambda):closure"].ok, ax["B(lambda):closure"].count, \
        ax["B(lambda):closure"].failures
    rep.add(c7)
    c13 = Check("C13_e_f_inverse")
    c13.ok, c13.count = ax["B(lambda):e_f_inverse"].ok, ax["B(lambda):e_f_inverse"].count
    c13.failures = ax["B(lambda):e_f_inverse"].failures
    rep.add(c13)
    rep.add(ax["B(lambda):phi_eps"])


def _tensor_checks(rep: GrandLoopReport, A, cA, B, cB, W, cW) -> None:
    """C8 - C10 for V(lambda) (x) V(mu) and V(lambda + mu)."""
    tag = f"{list(A.lam)}x{list(B.lam)}"
    T = tensor(A, B)
    maps = tensor_maps(W, T)
    c8 = Check("C8_Phi_lattice")
    c9 = Check("C9_Psi_lattice")
    c10 = Check("C10_Psi_crystal")
    top = min(cA.max_height, cB.max_height, cW.max_height, T.max_height)
    for h in range(top + 1):
        for nu in depths_of_height(W.datum.rank, h):
            if T.dim(nu) == 0:
                continue
            blocks = T.blocks(nu)
            if any(sum(n1) > cA.max_height or sum(n2) > cB.max_height for n1, n2, _, _ in blocks):
                continue
            LT = tensor_lattice(T, cA.lattice, cB.lattice, nu)
            if W.dim(nu):
                LW = cW.lattice(nu)
                c8.record(lattice_contains(LT, [maps.Phi[nu].apply(b) for b in LW.basis.columns()]),
                          (tag, nu))
                c9.record(lattice_contains(LW, [maps.Psi[nu].apply(b) for b in LT.basis.columns()]),
                          (tag, nu))
            for n1, n2, _, _ in blocks:
                for b in cA.nodes_at(n1):
                    for bp in cB.nodes_at(n2):
                        _, v = T.embed(n1, b.lift, n2, bp.lift)
                        if not W.dim(nu):
                            c10.record(all(x.is_zero() for x in maps.Psi[nu].apply(v)) if maps.Psi[nu].nrows
                                       else True, (tag, b.id, bp.id))
                            continue
                        r = _res_or_none(cW.lattice(nu), maps.Psi[nu].apply(v))
                        c10.record(r is None or cW.find(nu, r) is not None, (tag, b.id, bp.id))
    for ch in (c8, c9, c10):
        rep.add(ch)


def grand_loop(datum, height: int, lambdas: Sequence[Sequence[int]], pairs=None,
               budget: int = 2000) -> GrandLoopReport:
    """All C_l statements restricted to depths of height <= ``height``.

    ``lambdas`` are dominant weights for the module statements; ``pairs`` are
    (lambda, mu) for C8 - C10 (default: all pairs from ``lambdas``).
    """
    alg = HalfAlgebra(datum, cutoff=height)
    binf = build_Binf(alg, height)
    rep = GrandLoopReport(datum.name, height)
    rep.info["B(infinity) nodes"] = len(binf.nodes)
    rep.info["B(infinity) classes"] = len(binf.representatives())
    # C1, C4, C7, C13, C14 on B(infinity)
    c1 = Check("C1_e_stable_L(infinity)")
    for nu in binf.depths():
        L = binf.lattice(nu)
        for i in range(binf.rank):
            if nu[i] and binf.W.dim(sub(nu, unit(binf.rank, i))):
                E = binf.K.e_tilde(i, nu)
                low = sub(nu, unit(binf.rank, i))
                c1.record(lattice_contains(binf.lattice(low), [E.apply(b) for b in L.basis.columns()]),
                          (nu, i))
    rep.add(c1)
    ax = crystal_axioms(binf, "B(infinity)")
    for key, new in (("pi_basis", "C4_pi_basis_B(infinity)"), ("closure", "C7_closure_B(infinity)"),
                     ("e_f_inverse", "C13_e_f_inverse")):
        old = ax[f"B(infinity):{key}"]
        ch = Check(new, old.ok, old.count, old.failures)
        rep.add(ch)
    c14 = Check("C14_f_e_identity")
    literal = Check("e_closure_literal_B(infinity)")
    for b in binf.nodes:
        for i in range(binf.rank):
            hit = binf.e_tilde_node(b, i)
            if hit is None:
                continue
            literal.record(hit[1] == 0, (b.id, i))
            low = sub(b.depth, unit(binf.rank, i))
            back = binf.K.apply_f(i, low, binf.K.apply_e(i, b.depth, b.lift))
            c14.record(binf.lattice(b.depth).residue(back) == b.residue, (b.id, i))
    rep.add(c14)
    rep.info["e_closure_literal"] = literal.ok
    # modules
    mods, crys = {}, {}

    def module(lam):
        lam = tuple(lam)
        if lam not in mods:
            V = IntegrableModule(alg, lam, budget=budget, height_limit=height)
            mods[lam] = V
            crys[lam] = build_Bla(V)
        return mods[lam], crys[lam]

    for lam in lambdas:
        V, cV = module(lam)
        rep.info[f"dim V{list(V.lam)} (height <= {V.max_height})"] = V.total_dim()
        _lambda_checks(rep, binf, V, cV)
    if pairs is None:
        pairs = [(a, b) for a in lambdas for b in lambdas]
    for a, b in pairs:
        A, cA = module(a)
        B, cB = module(b)
        W, cW = module(tuple(x + y for x, y in zip(a, b)))
        _tensor_checks(rep, A, cA, B, cB, W, cW)
    rep.info["binf"] = binf
    return rep


def orthonormality_suite(C: CrystalGraph) -> dict[str, Check]:
    """pi-orthonormal pi-basis, adjunction at q = 0 and lattice self-duality."""
    ch = Check("pi_orthonormal_basis")
    for nu in C.depths():
        rep = pi_basis_check(C, nu)
        ch.record(all(rep.values()), (nu, rep))
    return {"pi_orthonormal_basis": ch, "adjunction_at_zero": adjunction_check(C),
            "lattice_self_dual": self_duality_check(C)}


def rho_stability_check(alg: HalfAlgebra, binf: CrystalGraph) -> Check:
    """rho (the anti-involution fixing each F_i) maps L(infinity) into itself."""
    ch = Check("rho_stable_L(infinity)")
    for nu in binf.depths():
        L = binf.lattice(nu)
        for v in L.basis.columns():
            img = alg.coords(alg.rho(alg.element(nu, v)), nu)
            ch.record(L.contains(img), nu)
    return ch
