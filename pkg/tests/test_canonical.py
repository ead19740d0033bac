import pytest

from qpicrystal.axioms import rho_stability_check
from qpicrystal.canonical import (G3_membership_check, HalfCanonical, ModuleCanonical,
                                  compute_G_module, dp_sequences, format_dp, order_lex,
                                  order_reverse_lex)
from qpicrystal.scalar import PI, Q


@pytest.fixture(scope="module")
def canon14(osp14, binf14):
    return HalfCanonical(osp14, binf14)


@pytest.fixture(scope="module")
def canon_aff(affine2, binf_aff):
    return HalfCanonical(affine2, binf_aff)


def test_dp_sequences():
    assert dp_sequences((2, 0)) == [((0, 2),)]
    got = {format_dp(s) for s in dp_sequences((2, 1))}
    assert got == {"F1^(2)F2", "F1F2F1", "F2F1^(2)"}


@pytest.mark.parametrize("which", ["canon14", "canon_aff"])
def test_all_elements_verified(request, which):
    H = request.getfixturevalue(which)
    n = 0
    for nu in H.C.depths():
        for el in H.compute_G(nu):
            checks = H.solver.verify(el)
            assert all(checks.values()), (nu, el.node, checks)
            n += 1
    assert n == len(H.C.representatives())


def test_osp14_slice_4_1(osp14, canon14):
    # derived values, frozen after the bar/lattice checks above
    by_path = {n.path: n for n in canon14.C.nodes_at((4, 1))}
    g1 = canon14.solver.solve(by_path[(0, 0, 0, 0, 1)])
    g2 = canon14.solver.solve(by_path[(0, 0, 0, 1, 0)])
    F = osp14.divided_power_monomial
    want1 = F(((0, 4), (1, 1)))
    want2 = F(((0, 3), (1, 1), (0, 1))) + F(((0, 4), (1, 1))).scale(-(Q.inverse() + Q * PI))
    assert osp14.equal(canon14.element(g1), want1)
    assert osp14.equal(canon14.element(g2), want2)


def test_order_independence(canon14):
    for nu in [(2, 1), (3, 1), (2, 2), (4, 1)]:
        a = {el.node: el.coords for el in canon14.compute_G(nu, order_reverse_lex)}
        fresh = HalfCanonical(canon14.alg, canon14.C)
        b = {el.node: el.coords for el in fresh.compute_G(nu, order_lex)}
        assert a == b


def test_G3_membership(canon14, canon_aff):
    for H in (canon14, canon_aff):
        for nu in H.C.depths():
            for i in range(H.C.rank):
                for n in range(1, nu[i] + 1):
                    assert G3_membership_check(H, nu, i, n)["ok"]


def test_maximal_variants(canon14):
    base = canon14.compute_G((2, 1))
    both = canon14.compute_G((2, 1), maximal=True)
    assert len(both) == 2 * len(base)
    for a, b in zip(base, both[len(base):]):
        assert b.checks["pi_variant"]
        assert b.coords == [c.pi_twist() for c in a.coords]


@pytest.mark.parametrize("lam", [(1, 0), (0, 1), (1, 1)])
def test_module_canonical_matches(canon14, modules14, lam):
    V, C = modules14[lam]
    M = ModuleCanonical(canon14, V, C)
    checked = 0
    for nu in canon14.C.depths():
        r = M.compare(nu)
        assert not r["failures"], (nu, r["failures"])
        checked += r["checked"]
    assert checked > 0
    for nu in C.depths():
        for el in compute_G_module(canon14, V, C, nu):
            assert all(M.solver.verify(el).values())


def test_rho_stability(osp14, binf14):
    assert rho_stability_check(osp14, binf14).ok


def test_tex_and_str(canon14):
    el = canon14.compute_G((4, 1))[1]
    assert "F1^(3)F2F1" in el.dp_str()
    assert "F_{1}^{(3)}F_{2}F_{1}" in el.tex()
