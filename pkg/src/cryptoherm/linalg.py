"""Dense and band matrix primitives.

Everything here works on real matrices only, so the adjoint of a matrix is its
transpose. The brute-force Dieudonné solver :func:`null_space_band` is the
independent oracle used to check the recurrent metric constructions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NotPositiveDefiniteError

DEFAULT_NULL_TOL = 1e-10


def as_dense(matrix) -> np.ndarray:
    """Return a real 2-D float array for ``matrix``.

    Objects exposing ``to_dense()`` (Hamiltonians, band metrics) are expanded
    first. Complex input is rejected.
    """
    if hasattr(matrix, "to_dense"):
        matrix = matrix.to_dense()
    arr = np.asarray(matrix)
    if np.iscomplexobj(arr):
        raise TypeError("complex matrices are not supported")
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def _square(matrix) -> np.ndarray:
    arr = as_dense(matrix)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SymmetricBandMetric:
    """Real symmetric matrix with ``2k + 1`` nonzero diagonals.

    Only the main diagonal and the ``k`` upper diagonals are stored;
    ``diagonals[d][i]`` is the element at row ``i``, column ``i + d``
    (0-based). Symmetry holds by construction.

    ``scale`` is set by the recurrent solvers when they had to renormalize a
    run to avoid overflow: the stored matrix then equals ``scale`` times the
    solution seeded as requested.
    """

    diagonals: tuple
    scale: float = field(default=1.0, compare=False)

    def __post_init__(self):
        diags = tuple(_frozen(d) for d in self.diagonals)
        if not diags:
            raise DimensionError("a band metric needs at least the main diagonal")
        n = diags[0].shape[0]
        if n == 0:
            raise DimensionError("empty metric")
        if len(diags) > n:
            raise DimensionError(f"bandwidth {len(diags) - 1} exceeds n - 1 = {n - 1}")
        for d, diag in enumerate(diags):
            if diag.ndim != 1 or diag.shape[0] != n - d:
                raise DimensionError(f"diagonal {d} must have length {n - d}")
            if not np.all(np.isfinite(diag)):
                raise ValueError(f"diagonal {d} has non-finite entries")
        object.__setattr__(self, "diagonals", diags)

    @property
    def n(self) -> int:
        return self.diagonals[0].shape[0]

    @property
    def bandwidth(self) -> int:
        return len(self.diagonals) - 1

    @property
    def diagonal(self) -> np.ndarray:
        return self.diagonals[0]

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diagonals[0])
        for d in range(1, len(self.diagonals)):
            off = np.diag(self.diagonals[d], d)
            out = out + off + off.T
        return out

    def widened(self, k: int) -> "SymmetricBandMetric":
        """Same matrix stored with bandwidth ``k`` (padding with zero diagonals)."""
        if k < self.bandwidth:
            raise DimensionError("cannot narrow a band metric")
        if k > self.n - 1:
            raise DimensionError(f"bandwidth {k} exceeds n - 1 = {self.n - 1}")
        extra = tuple(np.zeros(self.n - d) for d in range(self.bandwidth + 1, k + 1))
        return SymmetricBandMetric(self.diagonals + extra)

    def __add__(self, other):
        if not isinstance(other, SymmetricBandMetric):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError(f"size mismatch: {self.n} vs {other.n}")
        k = max(self.bandwidth, other.bandwidth)
        left, right = self.widened(k), other.widened(k)
        return SymmetricBandMetric(tuple(x + y for x, y in zip(left.diagonals, right.diagonals)))

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return SymmetricBandMetric(tuple(float(c) * d for d in self.diagonals))

    __rmul__ = __mul__

    @classmethod
    def identity(cls, n: int) -> "SymmetricBandMetric":
        return cls((np.ones(n),))

    @classmethod
    def from_diagonal(cls, values) -> "SymmetricBandMetric":
        return cls((np.asarray(values, dtype=float),))

    @classmethod
    def zeros(cls, n: int, k: int) -> "SymmetricBandMetric":
        return cls(tuple(np.zeros(n - d) for d in range(k + 1)))

    @classmethod
    def from_dense(cls, matrix, k: int | None = None, atol: float = 0.0) -> "SymmetricBandMetric":
        """Extract the band of a symmetric dense matrix.

        With ``k=None`` the smallest bandwidth holding every entry above
        ``atol`` in magnitude is used. The upper triangle is taken as
        authoritative.
        """
        arr = _square(matrix)
        n = arr.shape[0]
        if k is None:
            k = 0
            for d in range(n - 1, 0, -1):
                if np.any(np.abs(np.diag(arr, d)) > atol):
                    k = d
                    break
        return cls(tuple(np.diag(arr, d).copy() for d in range(k + 1)))


@dataclass(frozen=True)
class NullSpaceResult:
    """Solution space of the band-restricted Dieudonné equation.

    ``basis`` is orthonormal under the Frobenius inner product.
    ``singular_values`` are those of the full linear map, in descending order.
    """

    dimension: int
    basis: tuple
    singular_values: np.ndarray
    bandwidth: int

    def projection_residual(self, metric) -> float:
        """Relative Frobenius distance from ``metric`` to the span of the basis."""
        theta = as_dense(metric)
        norm = np.linalg.norm(theta)
        if norm == 0.0:
            return 0.0
        rest = theta.copy()
        for b in self.basis:
            dense = b.to_dense()
            rest -= np.sum(dense * theta) * dense
        return float(np.linalg.norm(rest) / norm)


def dieudonne_difference(hamiltonian, metric) -> np.ndarray:
    """Return ``H^T Theta - Theta H``."""
    h = _square(hamiltonian)
    theta = _square(metric)
    if theta.shape != h.shape:
        raise DimensionError(f"metric is {theta.shape[0]}x{theta.shape[0]}, Hamiltonian is {h.shape[0]}x{h.shape[0]}")
    return h.T @ theta - theta @ h


def dieudonne_residual(hamiltonian, metric) -> float:
    """Frobenius norm of ``H^T Theta - Theta H``."""
    return float(np.linalg.norm(dieudonne_difference(hamiltonian, metric)))


def relative_dieudonne_residual(hamiltonian, metric) -> float:
    """Residual scaled by ``||H||_F * ||Theta||_F``; 0 for a zero metric."""
    h = _square(hamiltonian)
    theta = _square(metric)
    scale = np.linalg.norm(h) * np.linalg.norm(theta)
    if scale == 0.0:
        return 0.0
    return dieudonne_residual(h, theta) / scale


def _band_unknowns(n: int, k: int):
    return [(i, i + d) for d in range(k + 1) for i in range(n - d)]


def dieudonne_operator(hamiltonian, k: int) -> tuple[np.ndarray, list]:
    """Matrix of the linear map from free band entries to ``vec(H^T Theta - Theta H)``.

    Off-diagonal unknowns are parametrized as ``x / sqrt(2)`` per matrix entry
    so that the Euclidean norm of the unknown vector equals the Frobenius norm
    of the metric.
    """
    h = _square(hamiltonian)
    n = h.shape[0]
    if not 0 <= k <= n - 1:
        raise DimensionError(f"bandwidth must lie in [0, {n - 1}], got {k}")
    unknowns = _band_unknowns(n, k)
    columns = np.empty((n * n, len(unknowns)))
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for col, (i, j) in enumerate(unknowns):
        e = np.zeros((n, n))
        if i == j:
            e[i, i] = 1.0
        else:
            e[i, j] = e[j, i] = inv_sqrt2
        columns[:, col] = (h.T @ e - e @ h).ravel()
    return columns, unknowns


def null_space_band(hamiltonian, k: int, tol: float = DEFAULT_NULL_TOL) -> NullSpaceResult:
    """All symmetric ``(2k+1)``-diagonal solutions of ``H^T Theta = Theta H``.

    Singular values below ``tol`` times the largest one are treated as zero.

    Examples
    --------
    >>> import numpy as np
    >>> h = np.array([[0.0, 2.0], [1.0, 0.0]])
    >>> null_space_band(h, 0).dimension
    1
    """
    op, unknowns = dieudonne_operator(hamiltonian, k)
    n = as_dense(hamiltonian).shape[0]
    _, s, vt = np.linalg.svd(op, full_matrices=True)
    largest = s[0] if s.size else 0.0
    if largest == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > tol * largest))
    null_vectors = vt[rank:]
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    basis = []
    for vec in null_vectors:
        diags = [np.zeros(n - d) for d in range(k + 1)]
        for x, (i, j) in zip(vec, unknowns):
            d = j - i
            diags[d][i] = x if d == 0 else x * inv_sqrt2
        basis.append(SymmetricBandMetric(tuple(diags)))
    return NullSpaceResult(dimension=len(basis), basis=tuple(basis), singular_values=s, bandwidth=k)


def min_eigenvalue_symmetric(metric) -> float:
    """Smallest eigenvalue of a symmetric matrix (band or dense)."""
    theta = _square(metric)
    return float(np.linalg.eigvalsh(theta)[0])


def _psd_eigh(metric):
    theta = _square(metric)
    w, v = np.linalg.eigh(theta)
    if w[0] <= 0.0:
        raise NotPositiveDefiniteError(f"metric has minimum eigenvalue {w[0]:.3e}")
    return w, v


def symmetric_sqrt(metric) -> np.ndarray:
    """Unique symmetric positive-definite square root of ``metric``."""
    w, v = _psd_eigh(metric)
    s = (v * np.sqrt(w)) @ v.T
    return (s + s.T) / 2


def symmetric_sqrt_pair(metric) -> tuple[np.ndarray, np.ndarray]:
    """``(Theta^{1/2}, Theta^{-1/2})`` from a single eigen-decomposition."""
    w, v = _psd_eigh(metric)
    root = np.sqrt(w)
    s = (v * root) @ v.T
    s_inv = (v / root) @ v.T
    return (s + s.T) / 2, (s_inv + s_inv.T) / 2
