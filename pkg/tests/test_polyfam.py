from fractions import Fraction

import numpy as np
import pytest

from conftest import FAMILIES, family_id
from cryptoherm.errors import DimensionError, ResidualError, SpectrumError
from cryptoherm.polyfam import (
    Custom,
    Gegenbauer,
    Hermite,
    Jacobi,
    Laguerre,
    Legendre,
    TridiagonalHamiltonian,
    Tschebyshev,
    build_hamiltonian,
    eval_polynomial_vector,
    ket,
    make_family,
    secular_closure,
    spectrum,
)


def test_legendre_entries():
    h = build_hamiltonian(Legendre(), 3)
    np.testing.assert_array_equal(h.a, [0.0, 0.0, 0.0])
    np.testing.assert_array_equal(h.c, [1.0, 2 / 3])
    np.testing.assert_array_equal(h.b, [1 / 3, 2 / 5])


@pytest.mark.parametrize("mu", [-0.5, 0.0, 1.5, 4.0])
def test_jacobi_equal_parameters_zero_diagonal(mu):
    assert np.all(build_hamiltonian(Jacobi(mu, mu), 7).a == 0.0)


def test_jacobi_zero_zero_entries():
    h = build_hamiltonian(Jacobi(0.0, 0.0), 3)
    np.testing.assert_allclose(h.c, [-1.0, -2 / 3], rtol=1e-15)
    np.testing.assert_allclose(h.b, [-1 / 3, -2 / 5], rtol=1e-15)


def test_jacobi_matches_exact_rationals():
    # independent evaluation of the closed forms in exact arithmetic
    mu, nu = Fraction(1, 2), Fraction(-1, 4)
    n = 6
    h = build_hamiltonian(Jacobi(float(mu), float(nu)), n)

    def s(j):
        return mu + nu + j

    for k in range(2, n + 1):
        a_k = (mu * mu - nu * nu) / (s(2 * k - 2) * s(2 * k))
        assert h.a[k - 1] == pytest.approx(float(a_k), rel=1e-14)
    for k in range(1, n):
        c_k = -2 * k * s(k) / (s(2 * k - 1) * s(2 * k))
        b_next = -2 * (mu + k) * (nu + k) / (s(2 * k) * s(2 * k + 1))
        assert h.c[k - 1] == pytest.approx(float(c_k), rel=1e-14)
        assert h.b[k - 1] == pytest.approx(float(b_next), rel=1e-14)


def test_jacobi_parameter_validation():
    with pytest.raises(ValueError):
        Jacobi(-1.0, 0.0)


def test_gegenbauer_one_has_equal_couplings():
    h = build_hamiltonian(Gegenbauer(1.0), 6)
    np.testing.assert_allclose(h.c, h.b, rtol=1e-15)


def test_laguerre_entries():
    h = build_hamiltonian(Laguerre(1.0), 4)
    np.testing.assert_array_equal(h.a, [2.0, 4.0, 6.0, 8.0])
    np.testing.assert_array_equal(h.c, [-1.0, -2.0, -3.0])
    np.testing.assert_array_equal(h.b, [-2.0, -3.0, -4.0])


def test_gegenbauer_vanishing_denominator():
    with pytest.raises(ValueError):
        build_hamiltonian(Gegenbauer(0.0), 3)


def test_custom_passes_sequences_through():
    fam = Custom(a=(1.0, 2.0, 3.0), b=(4.0, 5.0), c=(6.0, 7.0))
    h = build_hamiltonian(fam, 3)
    np.testing.assert_array_equal(h.to_dense(), [[1, 6, 0], [4, 2, 7], [0, 5, 3]])


def test_bad_size():
    with pytest.raises(DimensionError):
        build_hamiltonian(Legendre(), 0)


def test_make_family():
    assert make_family("jacobi", mu=0.5, nu=0.0) == Jacobi(0.5, 0.0)
    with pytest.raises(ValueError):
        make_family("bessel")


def test_element_accessor_is_one_based():
    h = build_hamiltonian(Legendre(), 3)
    assert h.element(1, 2) == 1.0
    assert h.element(2, 1) == pytest.approx(1 / 3)
    assert h.element(0, 1) == 0.0 and h.element(3, 4) == 0.0 and h.element(1, 3) == 0.0


def test_hamiltonian_rejects_length_mismatch():
    with pytest.raises(DimensionError):
        TridiagonalHamiltonian([0.0, 0.0], [1.0], [1.0, 2.0])


# -- polynomial vectors and spectra --------------------------------------


def test_tschebyshev_vector_at_zero():
    y = eval_polynomial_vector(build_hamiltonian(Tschebyshev(), 5), 0.0)
    np.testing.assert_allclose(y, [1, 0, -1, 0, 1], atol=1e-15)


@pytest.mark.parametrize("family", FAMILIES, ids=family_id)
def test_first_component_is_one(family):
    assert eval_polynomial_vector(build_hamiltonian(family, 6), 0.37)[0] == 1.0


def test_legendre_vector_at_one():
    np.testing.assert_allclose(eval_polynomial_vector(build_hamiltonian(Legendre(), 8), 1.0), np.ones(8), rtol=1e-14)


def test_vector_needs_nonzero_superdiagonal():
    h = TridiagonalHamiltonian([0.0, 0.0], [0.0], [1.0])
    with pytest.raises(ZeroDivisionError):
        eval_polynomial_vector(h, 1.0)


def test_tschebyshev_two_spectrum():
    spec = spectrum(build_hamiltonian(Tschebyshev(), 2))
    np.testing.assert_allclose(spec.energies, [-np.sqrt(2), np.sqrt(2)], rtol=1e-15)
    assert spec.min_gap == pytest.approx(2 * np.sqrt(2))


def test_single_level_spectrum():
    spec = spectrum(build_hamiltonian(Jacobi(0.7, 0.7), 1))
    np.testing.assert_array_equal(spec.energies, [0.0])
    assert spec.min_gap == np.inf


@pytest.mark.parametrize("n", [4, 9, 15])
def test_jacobi_zero_zero_spectrum_equals_legendre(n):
    e1 = spectrum(build_hamiltonian(Jacobi(0.0, 0.0), n)).energies
    e2 = spectrum(build_hamiltonian(Legendre(), n)).energies
    np.testing.assert_allclose(e1, e2, atol=1e-10)


def test_legendre_energies_are_gauss_nodes():
    nodes, _ = np.polynomial.legendre.leggauss(10)
    np.testing.assert_allclose(spectrum(build_hamiltonian(Legendre(), 10)).energies, nodes, atol=1e-13)


@pytest.mark.parametrize("family", FAMILIES, ids=family_id)
def test_symmetric_and_general_routes_agree(family):
    h = build_hamiltonian(family, 8)
    fast = spectrum(h, method="symmetric").energies
    slow = spectrum(h, method="general").energies
    np.testing.assert_allclose(fast, slow, atol=1e-10 * max(1.0, np.max(np.abs(fast))))


@pytest.mark.parametrize("family", FAMILIES, ids=family_id)
def test_spectra_interlace(family):
    for n in range(2, 15):
        small = spectrum(build_hamiltonian(family, n)).energies
        big = spectrum(build_hamiltonian(family, n + 1)).energies
        assert np.all(big[:-1] < small) and np.all(small < big[1:])


def test_complex_spectrum_rejected():
    h = TridiagonalHamiltonian([0.0, 0.0], [1.0], [-1.0])
    with pytest.raises(SpectrumError):
        spectrum(h)


def test_degenerate_spectrum_rejected():
    h = TridiagonalHamiltonian([1.0, 1.0], [0.0], [0.0])
    with pytest.raises(SpectrumError):
        spectrum(h, method="general")


def test_unknown_method():
    with pytest.raises(ValueError):
        spectrum(build_hamiltonian(Legendre(), 3), method="qr")


# -- kets ----------------------------------------------------------------


def test_tschebyshev_ket():
    np.testing.assert_allclose(ket(build_hamiltonian(Tschebyshev(), 2), np.sqrt(2)), [1.0, np.sqrt(2) / 2])


def test_single_level_ket():
    h = TridiagonalHamiltonian([2.5], [], [])
    np.testing.assert_array_equal(ket(h, 2.5), [1.0])


def test_legendre_kets_are_eigenvectors():
    h = build_hamiltonian(Legendre(), 3)
    dense = h.to_dense()
    for e in spectrum(h).energies:
        y = ket(h, e)
        assert np.linalg.norm(dense @ y - e * y) / np.linalg.norm(y) <= 1e-12


def test_ket_rejects_non_eigenvalue():
    with pytest.raises(ResidualError):
        ket(build_hamiltonian(Legendre(), 3), 0.1)


@pytest.mark.parametrize("family", FAMILIES, ids=family_id)
@pytest.mark.parametrize("n", [3, 8, 15])
def test_secular_closure(family, n):
    h = build_hamiltonian(family, n)
    for e in spectrum(h).energies:
        assert abs(secular_closure(h, e)) <= 1e-8


def test_hermite_energies_match_dense_symmetrization():
    h = build_hamiltonian(Hermite(), 6)
    sym = np.diag(np.sqrt(h.b * h.c), 1)
    expected = np.linalg.eigvalsh(sym + sym.T)
    np.testing.assert_allclose(spectrum(h).energies, expected, atol=1e-12)
