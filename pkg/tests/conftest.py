import numpy as np
import pytest

from cryptoherm.polyfam import Gegenbauer, Hermite, Jacobi, Laguerre, Legendre, Tschebyshev

# every parametrized family exercised by the residual checks
FAMILIES = [
    Gegenbauer(0.75),
    Gegenbauer(1.0),
    Gegenbauer(2.0),
    Laguerre(0.5),
    Laguerre(1.0),
    Laguerre(3.0),
    Tschebyshev(),
    Hermite(),
    Legendre(),
    Jacobi(0.0, 0.0),
    Jacobi(0.5, -0.25),
    Jacobi(2.0, 3.0),
]


def family_id(family):
    params = ",".join(f"{v:g}" for v in vars(family).values())
    return f"{family.name}({params})" if params else family.name


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_offdiag(rng, n):
    """Off-diagonal pentadiagonal data: magnitudes in [0.5, 2], random signs above the diagonal."""
    from cryptoherm.penta import PentaHamiltonian

    def mags(m):
        return rng.uniform(0.5, 2.0, m)

    def signs(m):
        return rng.choice([-1.0, 1.0], m)

    return PentaHamiltonian(
        None,
        mags(n - 1) * signs(n - 1),
        mags(n - 1),
        mags(n - 2) * signs(n - 2),
        mags(n - 2),
    )


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_lines():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
