import pytest
from hypothesis import given, strategies as st

from qpicrystal.axioms import build_Bla, crystal_axioms, negative_control, orthonormality_suite
from qpicrystal.crystal import (build_Binf, class_key, kashiwara_e, kashiwara_f, pi_twist,
                                string_decompose)
from qpicrystal.errors import CutoffExceeded
from qpicrystal.half import HalfElement
from qpicrystal.modules import IntegrableModule
from qpicrystal.scalar import Scalar


def test_classes_match_dimensions(binf14, binf_aff):
    for C in (binf14, binf_aff):
        for nu in C.depths():
            assert len(C.reps_at(nu)) == C.W.dim(nu), nu


def test_height_six_counts(binf14):
    assert len(binf14.representatives()) == 64
    assert len(binf14.nodes) == 67


@pytest.mark.parametrize("which", ["binf14", "binf_aff"])
def test_crystal_axioms(request, which):
    C = request.getfixturevalue(which)
    for name, ch in crystal_axioms(C, which).items():
        assert ch.ok, str(ch)


def test_phi_minus_eps_is_pairing(binf14):
    for b in binf14.nodes:
        for i in range(2):
            assert b.phi[i] - b.eps[i] == binf14.pairing(b.depth, i)


def test_literal_e_closure_fails_only_up_to_pi(binf14):
    # e~_2 (f~_1 f~_2^2 f~_1^2 1) lands on pi times the node f~_1^2 f~_2 f~_1 1
    by_path = {n.path: n for n in binf14.nodes}
    b = by_path[(0, 1, 1, 0, 0)]
    target, pi_exp = binf14.e_tilde_node(b, 1)
    assert binf14.nodes[target].path == (0, 0, 1, 0)
    assert pi_exp == 1
    assert pi_twist(binf14.nodes[target].residue) not in {n.residue for n in binf14.nodes_at((3, 1))}


def test_class_key_pi_invariant(binf14):
    for b in binf14.nodes:
        assert class_key(b.residue) == class_key(pi_twist(b.residue))


word_st = st.lists(st.integers(0, 1), min_size=1, max_size=5).map(tuple)
coef_st = st.tuples(st.integers(0, 1), st.integers(-2, 2), st.integers(1, 3))


@st.composite
def homogeneous(draw):
    w = draw(word_st)
    perms = draw(st.lists(st.permutations(list(w)), min_size=1, max_size=3))
    out = HalfElement()
    for p in perms:
        a, e, c = draw(coef_st)
        out = out + HalfElement.word(tuple(p), Scalar.monomial(a, e, c))
    return out


@given(homogeneous(), st.integers(0, 1))
def test_string_decomposition_reconstructs(osp14, u, i):
    sd = string_decompose(osp14, i, u)
    assert osp14.equal(sd.reconstruct(osp14), u)
    for n, v in sd.components:
        assert osp14.reduce(osp14.e_prime(i, v)).is_zero()


@given(homogeneous(), st.integers(0, 1))
def test_e_after_f_is_identity(osp14, u, i):
    if sum(u.depth(2)) >= osp14.cutoff:
        return
    assert osp14.equal(kashiwara_e(osp14, i, kashiwara_f(osp14, i, u)), u)


def test_kashiwara_cutoff(osp14):
    from qpicrystal.half import HalfAlgebra
    alg = HalfAlgebra(osp14.datum, cutoff=6)
    u = HalfElement.word((0, 0, 1, 0, 1, 0))
    with pytest.raises(CutoffExceeded):
        kashiwara_f(alg, 0, u)


@pytest.mark.parametrize("n", range(0, 9))
def test_rank_one_string(osp12, n):
    C = build_Bla(IntegrableModule(osp12, (n,)))
    assert len(C.nodes) == n + 1
    for k, b in enumerate(sorted(C.nodes, key=lambda x: x.depth)):
        assert b.path == (0,) * k
        assert (b.eps[0], b.phi[0]) == (k, n - k)


def test_orthonormality(binf14, binf_aff):
    for C in (binf14, binf_aff):
        for name, ch in orthonormality_suite(C).items():
            assert ch.ok, str(ch)


def test_negative_control(binf14):
    r = negative_control(binf14)
    assert r["self_pairing_in_A"] and not r["in_lattice"]
    assert r["self_pairings"] == ["1", "pi"]


def test_build_is_deterministic(osp14):
    a = build_Binf(osp14, 5).to_json()
    b = build_Binf(osp14, 5).to_json()
    assert a == b
