import pytest

from qpicrystal.rank_one import RankOneTensor, odd_rank_one_check


@pytest.mark.parametrize("n", range(0, 7))
def test_rank_one_tensor(osp12, n):
    rep = odd_rank_one_check(n, osp12)
    assert rep.ok, rep.checks


@pytest.mark.parametrize("n", range(0, 7))
def test_printed_Fkz_formula_only_small_n(osp12, n):
    # the printed coefficient carries an extra leading pi; it agrees only for n <= 1
    assert odd_rank_one_check(n, osp12).info["Fk_z_with_extra_pi"] == (n <= 1)


def test_z_undefined_for_n0(osp12):
    assert RankOneTensor(0, osp12).z() is None
