"""Recurrent band-metric solutions of ``H^T Theta = Theta H`` for tridiagonal H.

The solvers below walk the nonzero diagonals of the antisymmetric difference
``Q = H^T Theta - Theta H`` one index at a time. Each step divides by a
subdiagonal element ``a_{n+1,n}`` of the Hamiltonian, so a vanishing coupling
is reported as a :class:`~cryptoherm.errors.BreakdownError`.

Element names follow 1-based matrix notation: ``a_{jk}`` for the Hamiltonian
and ``b_{jk}`` for the metric, with every element outside ``1..N`` equal to
zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import BreakdownError, DimensionError, ResidualError
from .linalg import (
    SymmetricBandMetric,
    min_eigenvalue_symmetric,
    relative_dieudonne_residual,
    symmetric_sqrt_pair,
)
from .polyfam import Jacobi, TridiagonalHamiltonian, build_hamiltonian

# renormalize well before the float limits so that one more step cannot overflow
_TINY = 1e-150
_HUGE = 1e150


class _Band:
    """Mutable 1-based band storage used while a recurrence is running."""

    def __init__(self, n: int, k: int):
        self.n = n
        self.k = k
        self.diags = [np.zeros(n - d) for d in range(k + 1)]
        self.scale = 1.0

    def __getitem__(self, jk):
        j, m = jk
        if j > m:
            j, m = m, j
        d = m - j
        if j < 1 or m > self.n or d > self.k:
            return 0.0
        return self.diags[d][j - 1]

    def __setitem__(self, jk, value):
        j, m = jk
        d = m - j
        if not np.isfinite(value):
            raise BreakdownError(f"non-finite metric element b_{{{j},{m}}}", index=(j, m))
        self.diags[d][j - 1] = value
        mag = abs(value)
        if mag > _HUGE or (0.0 < mag < _TINY):
            self._rescale(1.0 / mag)

    def _rescale(self, factor):
        for d in self.diags:
            d *= factor
        self.scale *= factor

    def freeze(self) -> SymmetricBandMetric:
        return SymmetricBandMetric(tuple(self.diags), scale=self.scale)


def _divisor(value: float, j: int, k: int) -> float:
    if value == 0.0:
        raise BreakdownError(f"vanishing Hamiltonian element a_{{{j},{k}}}", index=(j, k))
    return value


def diagonal_metric(h: TridiagonalHamiltonian, theta1: float = 1.0) -> SymmetricBandMetric:
    """Diagonal metric from ``theta_{n+1} b_{n+1} = theta_n c_n``.

    Examples
    --------
    >>> from cryptoherm.polyfam import Legendre, build_hamiltonian
    >>> diagonal_metric(build_hamiltonian(Legendre(), 4)).diagonal.tolist()
    [1.0, 3.0, 5.0, 7.0]
    """
    band = _Band(h.n, 0)
    band[1, 1] = theta1
    for n in range(1, h.n):
        c_n = h.c[n - 1]
        b_next = h.b[n - 1]
        if b_next == 0.0:
            # b_{n+1} = 0 admits a diagonal solution only if c_n = 0 as well,
            # and then theta_{n+1} is free; that case is left to the oracle
            raise BreakdownError(
                f"b_{n + 1} = 0 with c_{n} = {c_n!r}: no diagonal metric continues past row {n}",
                index=n + 1,
            )
        band[n + 1, n + 1] = band[n, n] * c_n / b_next
    return band.freeze()


def jacobi_diagonal_metric(mu: float, nu: float, n: int) -> SymmetricBandMetric:
    """Closed-form diagonal metric for the Jacobi Hamiltonian (``theta_1 = 1``).

    Uses the ratio ``k sigma_k sigma_{2k+1} / (mu_k nu_k sigma_{2k-1})`` with
    ``mu_k = mu + k``, ``nu_k = nu + k`` and ``sigma_k = mu + nu + k``.
    """
    Jacobi(mu, nu)  # parameter validation
    if n < 1:
        raise DimensionError(f"size must be positive, got {n}")
    s = mu + nu
    band = _Band(n, 0)
    band[1, 1] = 1.0
    for k in range(1, n):
        if k == 1:
            # sigma_1 cancels between numerator and denominator
            ratio = (s + 3) / ((mu + 1) * (nu + 1))
        else:
            ratio = k * (s + k) * (s + 2 * k + 1) / ((mu + k) * (nu + k) * (s + 2 * k - 1))
        band[k + 1, k + 1] = band[k, k] * ratio
    return band.freeze()


def tridiagonal_metric(h: TridiagonalHamiltonian, b12: float = 1.0) -> SymmetricBandMetric:
    """Pure off-diagonal tridiagonal metric component (``b_11 = 0``)."""
    n_size = h.n
    if n_size < 2:
        raise DimensionError("a tridiagonal metric needs n >= 2")
    a = h.element
    band = _Band(n_size, 1)
    band[1, 1] = 0.0
    band[1, 2] = b12
    for n in range(1, n_size):
        sub = _divisor(a(n + 1, n), n + 1, n)
        # Q_{n,n+2} = 0 -> next off-diagonal element
        if n <= n_size - 2:
            band[n + 1, n + 2] = band[n, n + 1] * a(n + 1, n + 2) / sub
        # Q_{n,n+1} = 0 -> next diagonal element
        band[n + 1, n + 1] = -(
            a(n, n) * band[n, n + 1] - band[n, n] * a(n, n + 1) - band[n, n + 1] * a(n + 1, n + 1)
        ) / sub
    return band.freeze()


def pentadiagonal_metric(
    h: TridiagonalHamiltonian, b13: float = 1.0, b12: float = 0.0, b11: float = 0.0
) -> SymmetricBandMetric:
    """Pentadiagonal metric component from the seeds ``b_11, b_12, b_13``.

    Every element with an index outside ``1..N`` counts as zero, which makes
    the last diagonal element depend on the truncation (see
    :func:`cutoff_anomaly`).
    """
    n_size = h.n
    if n_size < 3:
        raise DimensionError("a pentadiagonal metric needs n >= 3")
    a = h.element
    band = _Band(n_size, 2)
    band[1, 1] = b11
    band[1, 2] = b12
    band[1, 3] = b13
    for n in range(1, n_size):
        sub = _divisor(a(n + 1, n), n + 1, n)
        # Q_{n,n+3} = 0 -> outer diagonal
        if n <= n_size - 3:
            band[n + 1, n + 3] = band[n, n + 2] * a(n + 2, n + 3) / sub
        # Q_{n,n+2} = 0 -> intermediate diagonal
        if n <= n_size - 2:
            band[n + 1, n + 2] = -(
                band[n, n + 2] * a(n, n) - band[n, n + 1] * a(n + 1, n + 2) - band[n, n + 2] * a(n + 2, n + 2)
            ) / sub
        # Q_{n,n+1} = 0 -> main diagonal; a_{0,1} and b_{N-1,N+1} a_{N+1,N} vanish here
        band[n + 1, n + 1] = (
            -(band[n - 1, n + 1] * a(n - 1, n) + a(n, n) * band[n, n + 1])
            + band[n, n] * a(n, n + 1)
            + band[n, n + 1] * a(n + 1, n + 1)
            + band[n, n + 2] * a(n + 2, n + 1)
        ) / sub
    return band.freeze()


def cutoff_anomaly(family, n: int, b13: float = 1.0, b12: float = 0.0, b11: float = 0.0) -> tuple[float, float]:
    """Last diagonal pentadiagonal-metric element with and without truncation.

    Returns ``(truncated, untruncated)``: the ``b_NN`` of the size-``n``
    solution and the ``b_NN`` obtained when the Hamiltonian continues one more
    row, so that ``b_{N-1,N+1} a_{N+1,N}`` enters the recurrence.
    """
    small = pentadiagonal_metric(build_hamiltonian(family, n), b13, b12, b11)
    big = pentadiagonal_metric(build_hamiltonian(family, n + 1), b13, b12, b11)
    return float(small.diagonal[-1] / small.scale), float(big.diagonal[n - 1] / big.scale)


@dataclass(frozen=True)
class MetricComponents:
    diagonal: SymmetricBandMetric | None = None
    tridiagonal: SymmetricBandMetric | None = None
    pentadiagonal: SymmetricBandMetric | None = None

    @property
    def n(self) -> int:
        sizes = {m.n for m in (self.diagonal, self.tridiagonal, self.pentadiagonal) if m is not None}
        if not sizes:
            raise ValueError("no metric components given")
        if len(sizes) > 1:
            raise DimensionError(f"components disagree in size: {sorted(sizes)}")
        return sizes.pop()

    @classmethod
    def solve(cls, h: TridiagonalHamiltonian, band: int = 2) -> "MetricComponents":
        """All recurrent components up to ``band`` with the default seeds."""
        return cls(
            diagonal_metric(h),
            tridiagonal_metric(h) if band >= 1 and h.n >= 2 else None,
            pentadiagonal_metric(h) if band >= 2 and h.n >= 3 else None,
        )


@dataclass(frozen=True)
class CombinationCoefficients:
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise ValueError("combination coefficients must be finite")


def combine(components: MetricComponents, coeffs: CombinationCoefficients) -> SymmetricBandMetric:
    """``Theta_diagonal + alpha Theta_tridiagonal + beta Theta_pentadiagonal``.

    Missing components contribute nothing. Components are combined as
    stored: a component renormalized by its solver (``scale != 1``) enters
    with that extra factor, which only rescales the meaning of its weight.
    """
    n = components.n
    k = min(2, n - 1)
    total = SymmetricBandMetric.zeros(n, k)
    for part, weight in (
        (components.diagonal, 1.0),
        (components.tridiagonal, coeffs.alpha),
        (components.pentadiagonal, coeffs.beta),
    ):
        if part is not None:
            total = total + weight * part
    return total


@dataclass(frozen=True)
class ScanResult:
    """Minimum metric eigenvalue on an ``(alpha, beta)`` grid.

    ``min_eig[i, j]`` belongs to ``alphas[i]`` and ``betas[j]``.
    ``region`` marks the connected set of positive grid points containing the
    point closest to the origin (empty if that point is not positive).
    """

    alphas: np.ndarray
    betas: np.ndarray
    min_eig: np.ndarray
    region: np.ndarray

    def rows(self):
        for i, alpha in enumerate(self.alphas):
            for j, beta in enumerate(self.betas):
                yield float(alpha), float(beta), float(self.min_eig[i, j])


def _axis(bounds, grid: int) -> np.ndarray:
    lo, hi = (float(x) for x in bounds)
    if lo == hi:
        return np.array([lo])
    return np.linspace(lo, hi, grid)


def positivity_scan(components: MetricComponents, alpha_range, beta_range=(0.0, 0.0), grid: int = 21) -> ScanResult:
    """Evaluate the minimum eigenvalue of the combined metric over a grid."""
    if grid < 1:
        raise ValueError("grid must be positive")
    alphas = _axis(alpha_range, grid)
    betas = _axis(beta_range, grid)
    values = np.empty((alphas.size, betas.size))
    for i, alpha in enumerate(alphas):
        for j, beta in enumerate(betas):
            theta = combine(components, CombinationCoefficients(alpha, beta))
            values[i, j] = min_eigenvalue_symmetric(theta)
    labels, _ = ndimage.label(values > 0)
    i0 = int(np.argmin(np.abs(alphas)))
    j0 = int(np.argmin(np.abs(betas)))
    seed = labels[i0, j0]
    region = (labels == seed) if seed else np.zeros_like(values, dtype=bool)
    return ScanResult(alphas, betas, values, region)


def hermitize(h, metric, tol: float = 1e-10) -> np.ndarray:
    """Hermitian partner ``Theta^{1/2} H Theta^{-1/2}`` of ``h``.

    Raises if ``metric`` is not positive definite or does not solve the
    Dieudonné equation for ``h`` to relative accuracy ``tol``.
    """
    resid = relative_dieudonne_residual(h, metric)
    if resid > tol:
        raise ResidualError(f"metric does not solve the Dieudonné equation (relative residual {resid:.3e})")
    root, inv_root = symmetric_sqrt_pair(metric)
    dense = h.to_dense() if hasattr(h, "to_dense") else np.asarray(h, dtype=float)
    return root @ dense @ inv_root
