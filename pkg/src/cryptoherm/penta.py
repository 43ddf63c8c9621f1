"""Pentadiagonal Hamiltonians that admit a tridiagonal metric.

For a pentadiagonal ``H`` the Dieudonné equation with a tridiagonal metric
over-determines the problem: once the off-diagonal couplings and four metric
seeds are fixed, the main diagonal of ``H`` itself is forced. The sweep in
:func:`build_penta_pair` produces such a "tridiagonally hermitizable" pair.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BreakdownError, DimensionError
from .linalg import DEFAULT_NULL_TOL, NullSpaceResult, SymmetricBandMetric, null_space_band

DIVISOR_TOL = 1e-12


@dataclass(frozen=True)
class PentaHamiltonian:
    """Real pentadiagonal matrix stored as five diagonals (0-based arrays).

    ``sup1[i] = H[i, i+1]``, ``sub1[i] = H[i+1, i]``, ``sup2[i] = H[i, i+2]``,
    ``sub2[i] = H[i+2, i]``. ``diag`` may be ``None`` for off-diagonal data
    whose main diagonal is still to be reconstructed.
    """

    diag: np.ndarray | None
    sup1: np.ndarray
    sub1: np.ndarray
    sup2: np.ndarray
    sub2: np.ndarray

    def __post_init__(self):
        arrays = {}
        for name in ("sup1", "sub1", "sup2", "sub2"):
            arrays[name] = np.array(getattr(self, name), dtype=float).ravel()
        n = arrays["sup1"].shape[0] + 1
        if arrays["sub1"].shape[0] != n - 1:
            raise DimensionError("first sub- and superdiagonal lengths differ")
        for name in ("sup2", "sub2"):
            if arrays[name].shape[0] != max(n - 2, 0):
                raise DimensionError(f"{name} must have length {max(n - 2, 0)}")
        if self.diag is not None:
            arrays["diag"] = np.array(self.diag, dtype=float).ravel()
            if arrays["diag"].shape[0] != n:
                raise DimensionError(f"diag must have length {n}")
        for name, arr in arrays.items():
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.sup1.shape[0] + 1

    @property
    def constructible(self) -> bool:
        return bool(np.all(self.sub2 != 0))

    def with_diagonal(self, diag) -> "PentaHamiltonian":
        return PentaHamiltonian(diag, self.sup1, self.sub1, self.sup2, self.sub2)

    def to_dense(self) -> np.ndarray:
        if self.diag is None:
            raise ValueError("main diagonal not set")
        out = np.diag(self.diag) + np.diag(self.sup1, 1) + np.diag(self.sub1, -1)
        if self.n > 2:
            out += np.diag(self.sup2, 2) + np.diag(self.sub2, -2)
        return out

    @classmethod
    def from_dense(cls, matrix) -> "PentaHamiltonian":
        m = np.asarray(matrix, dtype=float)
        return cls(np.diag(m).copy(), np.diag(m, 1).copy(), np.diag(m, -1).copy(), np.diag(m, 2).copy(), np.diag(m, -2).copy())

    def element(self, j: int, k: int) -> float:
        """1-based ``a_{jk}``; zero outside the band or the matrix."""
        n = self.n
        if not (1 <= j <= n and 1 <= k <= n):
            return 0.0
        d = k - j
        if d == 0:
            if self.diag is None:
                raise ValueError("main diagonal not set")
            return float(self.diag[j - 1])
        if d == 1:
            return float(self.sup1[j - 1])
        if d == -1:
            return float(self.sub1[k - 1])
        if d == 2:
            return float(self.sup2[j - 1])
        if d == -2:
            return float(self.sub2[k - 1])
        return 0.0


@dataclass(frozen=True)
class PentaSeeds:
    b11: float = 1.0
    b12: float = 1.0
    b22: float = 1.0
    b23: float = 1.0
    a11: float = 0.0

    def __post_init__(self):
        if self.b12 == 0:
            raise ValueError("b12 must be nonzero: it divides the first diagonal step")


def _check_divisor(value: float, scale: float, what: str, index) -> float:
    if abs(value) <= DIVISOR_TOL * scale or value == 0.0:
        raise BreakdownError(f"vanishing divisor {what} = {value!r}", index=index)
    return value


def build_penta_pair(offdiag: PentaHamiltonian, seeds: PentaSeeds) -> tuple[PentaHamiltonian, SymmetricBandMetric]:
    """Reconstruct the main diagonal of ``offdiag`` and a tridiagonal metric.

    Dependency order for step ``n = 1 .. N-1`` (1-based)::

        b_{n+2,n+3}  from Q_{n,n+3} = 0   (n <= N-3), divisor a_{n+2,n}
        b_{n+2,n+2}  from Q_{n,n+2} = 0   (n <= N-2), divisor a_{n+2,n}
        a_{n+1,n+1}  from Q_{n,n+1} = 0   (n <= N-1), divisor b_{n,n+1}

    The metric rules never touch the Hamiltonian's main diagonal, so each
    step consumes only values fixed earlier; ``b_{0,1}``, ``a_{0,2}`` and
    every element beyond row ``N`` count as zero.
    """
    n_size = offdiag.n
    if n_size < 2:
        raise DimensionError("need n >= 2")
    a = offdiag.element
    coupling_scale = max(
        float(np.max(np.abs(np.concatenate([offdiag.sup1, offdiag.sub1, offdiag.sup2, offdiag.sub2])))),
        np.finfo(float).tiny,
    )

    off = np.zeros(n_size - 1)  # off[j-1] = b_{j,j+1}
    dia = np.zeros(n_size)  # dia[j-1] = b_{j,j}
    ham = np.zeros(n_size)  # ham[j-1] = a_{j,j}

    def b_off(j):
        return off[j - 1] if 1 <= j <= n_size - 1 else 0.0

    def b_dia(j):
        return dia[j - 1] if 1 <= j <= n_size else 0.0

    dia[0] = seeds.b11
    off[0] = seeds.b12
    if n_size >= 2:
        dia[1] = seeds.b22
    if n_size >= 3:
        off[1] = seeds.b23
    ham[0] = seeds.a11

    for n in range(1, n_size):
        if n <= n_size - 2:
            sub2 = _check_divisor(a(n + 2, n), coupling_scale, f"a_{{{n + 2},{n}}}", (n + 2, n))
            if n <= n_size - 3:
                off[n + 1] = b_off(n) * a(n + 1, n + 3) / sub2
            dia[n + 1] = (-b_off(n + 1) * a(n + 1, n) + b_dia(n) * a(n, n + 2) + b_off(n) * a(n + 1, n + 2)) / sub2
        local = max(abs(b_off(n - 1)), abs(b_dia(n)), abs(b_dia(n + 1)), abs(b_off(n + 1)), abs(b_off(n)))
        divisor = _check_divisor(b_off(n), local, f"b_{{{n},{n + 1}}}", (n, n + 1))
        ham[n] = ham[n - 1] + (
            b_dia(n + 1) * a(n + 1, n)
            + b_off(n + 1) * a(n + 2, n)
            - b_off(n - 1) * a(n - 1, n + 1)
            - b_dia(n) * a(n, n + 1)
        ) / divisor

    metric = SymmetricBandMetric((dia, off))
    return offdiag.with_diagonal(ham), metric


def verify_penta(h, tol: float = DEFAULT_NULL_TOL) -> NullSpaceResult:
    """Space of tridiagonal metrics for a (pentadiagonal) Hamiltonian."""
    dense = h.to_dense() if hasattr(h, "to_dense") else np.asarray(h, dtype=float)
    return null_space_band(dense, 1, tol)
