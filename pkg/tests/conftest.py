import pytest

from cspath import PropagatorSpec, bose_hubbard

BH_PARAMS = {"mu": 0.5, "U": 1.0}
# BH partition function at beta = 1, mu = 1/2, U = 1
Z_BH = 3.8907263234675571047  # 30-digit direct sum
# propagator at z_a = z_b = 1, T = 1 from a 30-digit direct sum
K_BH = 0.870496283733654155 + 0.124289541698448315j


@pytest.fixture
def bh():
    return bose_hubbard()


@pytest.fixture
def bh_spec():
    return PropagatorSpec(1.0, 1.0, 1.0, 1.0, bose_hubbard(), dict(BH_PARAMS))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
