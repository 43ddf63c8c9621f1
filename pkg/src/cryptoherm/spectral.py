"""Biorthogonal eigenbases and the spectral representation of all metrics.

For a real, non-degenerate spectrum every solution of ``H^T Theta = Theta H``
has the form ``Theta = sum_n kappa_n |psi_n>> <<psi_n|`` where ``|psi_n>>``
are the (normalized) eigenvectors of ``H^T``. This module builds that basis
and converts between band metrics and their ``kappa`` coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionError, ResidualError, SpectrumError
from .linalg import as_dense
from .polyfam import Spectrum, TridiagonalHamiltonian, ket, spectrum

OVERLAP_TOL = 1e-12
FIT_TOL = 1e-8
_REFINE_STEPS = 2


@dataclass(frozen=True)
class BiorthogonalBasis:
    """Eigenvectors of ``H`` (kets) and ``H^T`` (ketkets) at each energy.

    ``kets[:, n]`` and ``ketkets[:, n]`` belong to ``spectrum.energies[n]``
    and satisfy ``ketkets[:, n] @ kets[:, n] == 1``.

    The raw inputs are the polynomial ket ``Y(E_n)`` (first component 1) and
    the ketket with first component 1; ``omega`` is their overlap. They are
    rescaled by ``alpha`` and ``beta`` with ``alpha * beta * omega == 1``,
    ``beta`` chosen so that both vectors of a pair have equal norm. This
    keeps the biorthogonality check well conditioned and makes the basis
    orthonormal when ``H`` is symmetric.
    """

    hamiltonian: TridiagonalHamiltonian
    spectrum: Spectrum
    kets: np.ndarray
    ketkets: np.ndarray
    omega: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    @property
    def n(self) -> int:
        return self.kets.shape[0]

    @property
    def polynomial_kets(self) -> np.ndarray:
        """Kets in the closed-form normalization ``Y_0 = 1``."""
        return self.kets / self.alpha

    def biorthogonality_residual(self) -> float:
        return float(np.linalg.norm(self.ketkets.T @ self.kets - np.eye(self.n)))

    def completeness_residual(self) -> float:
        return float(np.linalg.norm(self.kets @ self.ketkets.T - np.eye(self.n)))


@dataclass(frozen=True)
class KappaVector:
    """Spectral coordinates of a metric; ``gamma = 1 / kappa``.

    ``kappa[n] == 0`` (and ``gamma[n] == inf``) flags a singular metric.
    ``fit_residuals[n]`` is the relative misfit of
    ``Theta |psi_n> = kappa_n |psi_n>>``.
    """

    kappa: np.ndarray
    gamma: np.ndarray
    fit_residuals: np.ndarray

    @classmethod
    def from_kappa(cls, kappa) -> "KappaVector":
        kappa = np.asarray(kappa, dtype=float)
        with np.errstate(divide="ignore"):
            gamma = 1.0 / kappa
        return cls(kappa, gamma, np.zeros_like(kappa))

    @property
    def positive(self) -> bool:
        return bool(np.all(self.kappa > 0))


def _refine_left_vector(ht: np.ndarray, energy: float, v: np.ndarray) -> np.ndarray:
    # inverse iteration at a slightly shifted energy keeps the solve regular
    n = ht.shape[0]
    scale = max(1.0, abs(energy), np.linalg.norm(ht, 1))
    shifted = ht - (energy + 1e-13 * scale) * np.eye(n)
    for _ in range(_REFINE_STEPS):
        try:
            v = np.linalg.solve(shifted, v)
        except np.linalg.LinAlgError:
            break
        v = v / np.linalg.norm(v)
    return v


def biorthogonal_basis(h: TridiagonalHamiltonian, overlap_tol: float = OVERLAP_TOL) -> BiorthogonalBasis:
    """Paired kets and ketkets of ``h`` normalized to ``<<psi_n|psi_n> = 1``."""
    spec = spectrum(h)
    energies = spec.energies
    n = h.n
    kets = np.column_stack([ket(h, e) for e in energies])

    ht = h.to_dense().T
    vals, vecs = np.linalg.eig(ht)
    # pair each energy with one left eigenvector by minimal total distance
    cost = np.abs(energies[:, None] - vals[None, :])
    rows, cols = linear_sum_assignment(cost)
    order = cols[np.argsort(rows)]
    gap = spec.min_gap if n > 1 else np.inf
    if np.any(cost[np.arange(n), order] > 0.5 * gap):
        raise SpectrumError("could not pair ket and ketket eigenvalues")

    ketkets = np.empty((n, n))
    omega = np.empty(n)
    beta = np.empty(n)
    for j, e in enumerate(energies):
        v = _refine_left_vector(ht, e, vecs[:, order[j]].real.copy())
        # unit seed, then fix the sign so the overlap is positive
        pivot = v[0] if abs(v[0]) > 1e-8 * np.max(np.abs(v)) else v[np.argmax(np.abs(v))]
        v = v / pivot
        w = float(v @ kets[:, j])
        if abs(w) <= overlap_tol * np.linalg.norm(v) * np.linalg.norm(kets[:, j]):
            raise SpectrumError(f"vanishing ket/ketket overlap at level {j}")
        if w < 0:
            v, w = -v, -w
        omega[j] = w
        beta[j] = np.sqrt(np.linalg.norm(kets[:, j]) / (np.linalg.norm(v) * w))
        ketkets[:, j] = v * beta[j]
    alpha = 1.0 / (beta * omega)
    kets = kets * alpha
    for arr in (kets, ketkets, omega, alpha, beta):
        arr.setflags(write=False)
    return BiorthogonalBasis(h, spec, kets, ketkets, omega, alpha, beta)


def spectral_metric(basis: BiorthogonalBasis, kappa) -> np.ndarray:
    """``sum_n kappa_n |psi_n>> <<psi_n|`` for ``kappa`` (array or KappaVector)."""
    if isinstance(kappa, KappaVector):
        kappa = kappa.kappa
    kappa = np.asarray(kappa, dtype=float)
    if kappa.shape != (basis.n,):
        raise DimensionError(f"expected {basis.n} kappa values, got shape {kappa.shape}")
    theta = (basis.ketkets * kappa) @ basis.ketkets.T
    return (theta + theta.T) / 2


def kappa_from_band_metric(basis: BiorthogonalBasis, metric, fit_tol: float = FIT_TOL) -> KappaVector:
    """Read off ``kappa`` from a metric via ``Theta |psi_n> = kappa_n |psi_n>>``.

    Each ``kappa_n`` is the least-squares scalar. The misfit is measured
    relative to ``||Theta||_F ||psi_n||`` so that singular metrics
    (``kappa_n = 0``) are handled; a misfit above ``fit_tol`` means ``metric``
    does not solve the Dieudonné equation for the basis's Hamiltonian.
    """
    theta = as_dense(metric)
    if theta.shape != (basis.n, basis.n):
        raise DimensionError(f"metric is {theta.shape}, basis has n={basis.n}")
    norm = np.linalg.norm(theta)
    if norm == 0.0:
        raise ResidualError("zero matrix has no spectral coordinates")
    images = theta @ basis.kets
    targets = basis.ketkets
    kappa = np.sum(images * targets, axis=0) / np.sum(targets * targets, axis=0)
    misfit = images - targets * kappa
    resid = np.linalg.norm(misfit, axis=0) / (norm * np.linalg.norm(basis.kets, axis=0))
    bad = np.flatnonzero(resid > fit_tol)
    if bad.size:
        j = int(bad[0])
        raise ResidualError(f"ketket proportionality fails at level {j} (relative misfit {resid[j]:.3e})")
    with np.errstate(divide="ignore"):
        gamma = 1.0 / kappa
    return KappaVector(kappa, gamma, resid)
