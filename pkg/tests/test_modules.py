from fractions import Fraction
from itertools import product

import pytest

from qpicrystal.axioms import build_Bla
from qpicrystal.errors import DimensionBudgetExceeded, ModuleMismatch, NonDominantWeight
from qpicrystal.modules import (DELTA, DELTA_PRIME, IntegrableModule, all_tensor_maps,
                                divided_power_identity_check, highest_vectors_count,
                                j_polarization_check, polarization_suite, relation_suite,
                                singular_vectors, tensor, tensor_maps, tensor_rule_check,
                                verify_tensor_maps)

B2_POS = ((1, 0), (0, 1), (1, 1), (2, 1))
D14 = (1, 2)


def weyl_dim_b2(lam):
    """Weyl dimension formula for B2 with alpha_1 short, (omega_i, alpha_j) = delta_ij d_j."""
    out = Fraction(1)
    for beta in B2_POS:
        num = sum((lam[j] + 1) * D14[j] * beta[j] for j in range(2))
        den = sum(D14[j] * beta[j] for j in range(2))
        out *= Fraction(num, den)
    return out


@pytest.mark.parametrize("n", range(0, 9))
def test_rank_one_dims_and_relations(osp12, n):
    V = IntegrableModule(osp12, (n,))
    assert V.total_dim() == n + 1
    assert all(relation_suite(V).values())
    assert all(polarization_suite(V).values())


@pytest.mark.parametrize("lam", [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)])
def test_osp14_dims_match_weyl(osp14, lam):
    V = IntegrableModule(osp14, lam, budget=2000)
    assert V.total_dim() == weyl_dim_b2(lam)


@pytest.mark.parametrize("lam", [(1, 0), (0, 1), (1, 1)])
def test_osp14_relations(modules14, lam):
    V, _ = modules14[lam]
    assert all(relation_suite(V).values())
    assert all(polarization_suite(V).values())
    for i in range(2):
        assert all(divided_power_identity_check(V, i).values())


def test_characters_agree_at_both_specializations(modules14):
    for V, _ in modules14.values():
        for nu, (plus, minus) in V.character().items():
            assert plus == minus == V.dim(nu)


@pytest.mark.parametrize("cop", [DELTA, DELTA_PRIME])
def test_tensor_relations(osp14, modules14, cop):
    A, _ = modules14[(1, 0)]
    B, _ = modules14[(0, 1)]
    T = tensor(A, B, cop)
    assert T.total_dim() == A.total_dim() * B.total_dim()
    assert all(relation_suite(T).values())


@pytest.mark.parametrize("n,m", [(1, 1), (2, 1), (2, 3), (4, 2)])
def test_rank_one_tensor_maps(osp12, n, m):
    A = IntegrableModule(osp12, (n,))
    B = IntegrableModule(osp12, (m,))
    V = IntegrableModule(osp12, (n + m,))
    for cop in (DELTA, DELTA_PRIME):
        T = tensor(A, B, cop)
        assert all(verify_tensor_maps(V, T, tensor_maps(V, T)).values())
    maps = all_tensor_maps(V, A, B)
    assert set(maps) == {"Phi", "Psi", "Phi'", "Psi'", "S"}


def test_singular_vectors_rank_one(osp12):
    # V(n) (x) V(m) has one singular vector per depth k <= min(n, m)
    T = tensor(IntegrableModule(osp12, (3,)), IntegrableModule(osp12, (2,)))
    counts = [singular_vectors(T, (k,)).ncols for k in range(6)]
    assert counts == [1, 1, 1, 0, 0, 0]
    assert highest_vectors_count(T)[(1,)] == 1


def test_tensor_map_mismatch(osp12):
    A = IntegrableModule(osp12, (1,))
    with pytest.raises(ModuleMismatch):
        tensor_maps(IntegrableModule(osp12, (3,)), tensor(A, A))


@pytest.mark.parametrize("n,m", list(product(range(0, 4), repeat=2)))
def test_tensor_rule_rank_one(osp12, n, m):
    A = IntegrableModule(osp12, (n,))
    B = IntegrableModule(osp12, (m,))
    rep = tensor_rule_check(A, build_Bla(A), B, build_Bla(B))
    assert rep.ok and rep.comparisons == 2 * (n + 1) * (m + 1)


def test_j_polarization(osp12):
    A = IntegrableModule(osp12, (2,))
    B = IntegrableModule(osp12, (1,))
    assert j_polarization_check(A, B).ok


def test_budget(osp14):
    with pytest.raises(DimensionBudgetExceeded):
        IntegrableModule(osp14, (2, 2), budget=20)


def test_non_dominant(osp14):
    with pytest.raises(NonDominantWeight):
        IntegrableModule(osp14, (-1, 0))


def test_affine_truncation(affine2):
    V = IntegrableModule(affine2, (1, 0), height_limit=4)
    assert V.truncated and V.max_height == 4
    assert V.complete((1, 1)) and not V.complete((2, 2))
    assert all(relation_suite(V).values())
    for nu, (plus, minus) in V.character().items():
        assert plus == minus


@pytest.mark.parametrize("n", range(0, 5))
def test_EF_on_highest_vector(osp12, n):
    # E F v+ = [n] v+
    from qpicrystal.scalar import qpi_integer
    V = IntegrableModule(osp12, (n,))
    v = V.highest()
    assert V.act_E(0, V.act_F(0, v)).coords == [qpi_integer(n)]
    assert V.polarization(v, v) == V.gram((0,))[0, 0]
    assert V.kashiwara_op(0, v, "e") is None
