"""Tridiagonal Hamiltonians built from classical orthogonal polynomials.

Index map
---------
Matrix elements are numbered from 1 as in the usual tridiagonal layout::

    a_k = H[k, k]        k = 1..n       stored at a[k-1]
    c_k = H[k, k+1]      k = 1..n-1     stored at c[k-1]
    b_{k+1} = H[k+1, k]  k = 1..n-1     stored at b[k-1]

so ``b[0]`` holds ``b_2`` and the last entry holds ``b_n``; there is no
``b_1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg

from .errors import DimensionError, SpectrumError, ResidualError

DEGENERACY_TOL = 1e-9
KET_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class Gegenbauer:
    a: float
    name = "gegenbauer"


@dataclass(frozen=True)
class Laguerre:
    a: float
    name = "laguerre"


@dataclass(frozen=True)
class Tschebyshev:
    name = "tschebyshev"


@dataclass(frozen=True)
class Hermite:
    name = "hermite"


@dataclass(frozen=True)
class Legendre:
    name = "legendre"


@dataclass(frozen=True)
class Jacobi:
    mu: float
    nu: float
    name = "jacobi"

    def __post_init__(self):
        if not (self.mu > -1 and self.nu > -1):
            raise ValueError(f"Jacobi parameters must exceed -1, got mu={self.mu}, nu={self.nu}")


@dataclass(frozen=True)
class Custom:
    a: tuple
    b: tuple
    c: tuple
    name = "custom"


PolynomialFamily = Union[Gegenbauer, Laguerre, Tschebyshev, Hermite, Legendre, Jacobi, Custom]

FAMILIES = {
    "gegenbauer": Gegenbauer,
    "laguerre": Laguerre,
    "tschebyshev": Tschebyshev,
    "hermite": Hermite,
    "legendre": Legendre,
    "jacobi": Jacobi,
}


def family_params(family) -> dict:
    """Parameters of a family as a plain dict (empty for parameter-free rows)."""
    if isinstance(family, (Gegenbauer, Laguerre)):
        return {"a": family.a}
    if isinstance(family, Jacobi):
        return {"mu": family.mu, "nu": family.nu}
    return {}


def make_family(name: str, **params):
    """Look up a family by name, e.g. ``make_family("jacobi", mu=0.5, nu=0)``."""
    try:
        cls = FAMILIES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    return cls(**params)


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    """Real tridiagonal ``n x n`` matrix stored as three diagonals.

    ``a`` is the main diagonal, ``c`` the superdiagonal and ``b`` the
    subdiagonal (see the module docstring for the index map).
    """

    a: np.ndarray
    c: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float).ravel()
        c = np.array(self.c, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        n = a.shape[0]
        if n == 0:
            raise DimensionError("Hamiltonian must have n >= 1")
        if c.shape[0] != n - 1 or b.shape[0] != n - 1:
            raise DimensionError(f"off-diagonals must have length {n - 1}")
        for name, arr in (("a", a), ("b", b), ("c", c)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"diagonal {name} has non-finite entries")
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def nonzero_couplings(self) -> bool:
        return bool(np.all(self.c != 0) and np.all(self.b != 0))

    def to_dense(self) -> np.ndarray:
        return np.diag(self.a) + np.diag(self.c, 1) + np.diag(self.b, -1)

    def transpose(self) -> "TridiagonalHamiltonian":
        return TridiagonalHamiltonian(self.a, self.b, self.c)

    # 1-based accessors matching the usual a_{jk} notation; out of range -> 0
    def element(self, j: int, k: int) -> float:
        n = self.n
        if not (1 <= j <= n and 1 <= k <= n):
            return 0.0
        if j == k:
            return float(self.a[j - 1])
        if k == j + 1:
            return float(self.c[j - 1])
        if j == k + 1:
            return float(self.b[k - 1])
        return 0.0


def _check_denominators(name, values):
    values = np.asarray(values, dtype=float)
    bad = np.flatnonzero(values == 0)
    if bad.size:
        raise ValueError(f"{name}: vanishing denominator at k={bad[0] + 1}")


def build_hamiltonian(family, n: int) -> TridiagonalHamiltonian:
    """Tridiagonal Hamiltonian of size ``n`` for one of the polynomial families.

    Examples
    --------
    >>> h = build_hamiltonian(Legendre(), 3)
    >>> h.c.tolist(), h.b.tolist()
    ([1.0, 0.6666666666666666], [0.3333333333333333, 0.4])
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DimensionError(f"size must be a positive integer, got {n!r}")
    if isinstance(family, Custom):
        return TridiagonalHamiltonian(family.a, family.c, family.b)

    k = np.arange(1, n, dtype=float)  # k = 1..n-1 for c_k and b_{k+1}
    kk = np.arange(1, n + 1, dtype=float)  # k = 1..n for a_k

    if isinstance(family, Gegenbauer):
        g = float(family.a)
        _check_denominators("Gegenbauer", np.concatenate([2 * k + 2 * g - 2, 2 * k + 2 * g]))
        a = np.zeros(n)
        c = k / (2 * k + 2 * g - 2)
        b = (k + 2 * g - 1) / (2 * k + 2 * g)
    elif isinstance(family, Laguerre):
        g = float(family.a)
        a = 2 * kk + g - 1
        c = -k
        b = -k - g
    elif isinstance(family, Tschebyshev):
        a = np.zeros(n)
        c = np.ones(n - 1)
        if n > 1:
            c[0] = 2.0
        b = np.ones(n - 1)
    elif isinstance(family, Hermite):
        a = np.zeros(n)
        c = np.ones(n - 1)
        b = 2 * k
    elif isinstance(family, Legendre):
        a = np.zeros(n)
        c = k / (2 * k - 1)
        b = k / (2 * k + 1)
    elif isinstance(family, Jacobi):
        a, c, b = _jacobi_diagonals(float(family.mu), float(family.nu), n)
    else:
        raise TypeError(f"unknown polynomial family {family!r}")
    return TridiagonalHamiltonian(a, c, b)


def _jacobi_diagonals(mu: float, nu: float, n: int):
    # sigma_j = mu + nu + j. The k = 1 entries of a and c carry the removable
    # factors sigma_0 and sigma_1; they are cancelled so that mu + nu = 0 or -1
    # stay admissible.
    def sigma(j):
        return mu + nu + j

    a = np.empty(n)
    for k in range(1, n + 1):
        if k == 1:
            a[0] = (mu - nu) / sigma(2)
        else:
            a[k - 1] = (mu - nu) * (mu + nu) / (sigma(2 * k - 2) * sigma(2 * k))
    c = np.empty(n - 1)
    b = np.empty(n - 1)
    for k in range(1, n):
        if k == 1:
            c[0] = -2.0 / sigma(2)
        else:
            c[k - 1] = -2.0 * k * sigma(k) / (sigma(2 * k - 1) * sigma(2 * k))
        b[k - 1] = -2.0 * (mu + k) * (nu + k) / (sigma(2 * k) * sigma(2 * k + 1))
    for name, arr in (("a", a), ("b", b), ("c", c)):
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"Jacobi({mu}, {nu}): vanishing denominator in {name}")
    return a, c, b


def eval_polynomial_vector(h: TridiagonalHamiltonian, x: float) -> np.ndarray:
    """Components ``Y_0(x), ..., Y_{n-1}(x)`` of the three-term recurrence.

    ``Y_0 = 1`` and ``Y_k = ((x - a_k) Y_{k-1} - b_k Y_{k-2}) / c_k``.
    """
    n = h.n
    if np.any(h.c == 0):
        k = int(np.flatnonzero(h.c == 0)[0]) + 1
        raise ZeroDivisionError(f"superdiagonal c_{k} vanishes")
    y = np.empty(n)
    y[0] = 1.0
    if n > 1:
        y[1] = (x - h.a[0]) / h.c[0]
    for k in range(2, n):
        # row k of H: b_k Y_{k-2} + a_k Y_{k-1} + c_k Y_k = x Y_{k-1}
        y[k] = ((x - h.a[k - 1]) * y[k - 1] - h.b[k - 2] * y[k - 2]) / h.c[k - 1]
    return y


@dataclass(frozen=True)
class Spectrum:
    energies: np.ndarray
    min_gap: float

    def __len__(self):
        return self.energies.shape[0]


def spectrum(h: TridiagonalHamiltonian, method: str = "auto", degeneracy_tol: float = DEGENERACY_TOL) -> Spectrum:
    """Sorted real eigenvalues of ``h``.

    ``method="auto"`` symmetrizes by a diagonal similarity when every product
    ``b_{k+1} c_k`` is positive and falls back to a general eigensolver
    otherwise. ``"symmetric"`` and ``"general"`` force either route.
    """
    if method not in ("auto", "symmetric", "general"):
        raise ValueError(f"unknown method {method!r}")
    prod = h.b * h.c
    positive = bool(np.all(prod > 0))
    if method == "symmetric" and not positive:
        raise ValueError("symmetric route requires b_{k+1} c_k > 0 for all k")
    if method == "symmetric" or (method == "auto" and positive):
        if h.n == 1:
            energies = h.a.copy()
        else:
            energies = scipy.linalg.eigh_tridiagonal(h.a, np.sqrt(prod), eigvals_only=True)
    else:
        vals = np.linalg.eigvals(h.to_dense())
        radius = max(np.max(np.abs(vals)), 1.0)
        if np.any(np.abs(vals.imag) > 1e-10 * radius):
            raise SpectrumError("complex eigenvalues: the model has no real spectrum")
        energies = vals.real
    energies = np.sort(energies)
    if energies.shape[0] > 1:
        min_gap = float(np.min(np.diff(energies)))
        radius = float(np.max(np.abs(energies)))
        if min_gap <= degeneracy_tol * radius:
            raise SpectrumError(f"degenerate spectrum: minimal gap {min_gap:.3e}")
    else:
        min_gap = float("inf")
    energies.setflags(write=False)
    return Spectrum(energies=energies, min_gap=min_gap)


def ket(h: TridiagonalHamiltonian, energy: float, tol: float = KET_RESIDUAL_TOL) -> np.ndarray:
    """Closed-form right eigenvector at ``energy`` (first component 1)."""
    y = eval_polynomial_vector(h, energy)
    dense = h.to_dense()
    resid = dense @ y - energy * y
    scale = np.linalg.norm(y) * max(abs(energy), np.linalg.norm(dense), np.finfo(float).tiny)
    if np.linalg.norm(resid) > tol * scale:
        raise ResidualError(f"{energy!r} is not an eigenvalue: relative residual {np.linalg.norm(resid) / scale:.3e}")
    return y


def secular_closure(h: TridiagonalHamiltonian, energy: float) -> float:
    """Last-row mismatch ``(E - a_n) Y_{n-1} - b_n Y_{n-2}`` scaled by ``max |Y|``.

    Vanishes exactly when ``energy`` is a root of the secular polynomial.
    """
    y = eval_polynomial_vector(h, energy)
    n = h.n
    last = (energy - h.a[-1]) * y[-1]
    if n > 1:
        last -= h.b[-1] * y[-2]
    return float(last / np.max(np.abs(y)))
