"""Inner-product metrics for real tridiagonal non-Hermitian Hamiltonians.

Solves ``H^T Theta = Theta H`` for band-matrix metrics by recurrences, and
checks the results against a brute-force null-space solver and the
biorthogonal spectral representation.
"""
from .errors import (
    BreakdownError,
    CryptohermError,
    DimensionError,
    NotPositiveDefiniteError,
    ResidualError,
    SpectrumError,
)
from .linalg import (
    NullSpaceResult,
    SymmetricBandMetric,
    dieudonne_residual,
    min_eigenvalue_symmetric,
    null_space_band,
    relative_dieudonne_residual,
    symmetric_sqrt,
)
from .metric import (
    CombinationCoefficients,
    MetricComponents,
    ScanResult,
    combine,
    cutoff_anomaly,
    diagonal_metric,
    hermitize,
    jacobi_diagonal_metric,
    pentadiagonal_metric,
    positivity_scan,
    tridiagonal_metric,
)
from .penta import PentaHamiltonian, PentaSeeds, build_penta_pair, verify_penta
from .polyfam import (
    Custom,
    Gegenbauer,
    Hermite,
    Jacobi,
    Laguerre,
    Legendre,
    Spectrum,
    Tschebyshev,
    TridiagonalHamiltonian,
    build_hamiltonian,
    eval_polynomial_vector,
    ket,
    spectrum,
)
from .spectral import (
    BiorthogonalBasis,
    KappaVector,
    biorthogonal_basis,
    kappa_from_band_metric,
    spectral_metric,
)

__version__ = "0.1.0"
