import pytest

from gradflux import GridSpec, PoissonSolver, SolverConfig, example1, solve


@pytest.fixture(scope="session")
def grid100():
    return GridSpec(100)


@pytest.fixture(scope="session")
def prob100(grid100):
    return example1(grid100)


@pytest.fixture(scope="session")
def psolver100(grid100):
    return PoissonSolver(grid100)


@pytest.fixture(scope="session")
def solved100(prob100, psolver100):
    """Noiseless reference solve at n=100, shared by all expensive tests."""
    cfg = SolverConfig(lam=1.0, tol=1e-7, max_iter=5000, record_history=True)
    res = solve(prob100, cfg, psolver100)
    assert res.converged
    return res
