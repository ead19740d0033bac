import pytest
from hypothesis import settings

from qpicrystal.axioms import build_Bla
from qpicrystal.cartan import get_datum
from qpicrystal.crystal import build_Binf
from qpicrystal.half import HalfAlgebra
from qpicrystal.modules import IntegrableModule

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def osp12():
    return HalfAlgebra(get_datum("osp12"), cutoff=8)


@pytest.fixture(scope="session")
def osp14():
    return HalfAlgebra(get_datum("osp14"), cutoff=6)


@pytest.fixture(scope="session")
def affine2():
    return HalfAlgebra(get_datum("affine2"), cutoff=5)


@pytest.fixture(scope="session")
def binf14(osp14):
    return build_Binf(osp14, 6)


@pytest.fixture(scope="session")
def binf_aff(affine2):
    return build_Binf(affine2, 5)


@pytest.fixture(scope="session")
def modules14(osp14):
    out = {}
    for lam in ((1, 0), (0, 1), (1, 1)):
        V = IntegrableModule(osp14, lam, budget=2000)
        out[lam] = (V, build_Bla(V))
    return out


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    from test_acceptance import ACCEPTANCE_KEY
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(lines, key=lambda x: (x[0], x[1])):
        terminalreporter.write_line(line)
