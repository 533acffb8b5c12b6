import math

import numpy as np
import pytest
from scipy import integrate

from ktlab.errors import InvalidOperator, LaplaceDomain, NegativeTime, SingularMatrix, SpectrumHit
from ktlab.measures import dirac, exp_density, kt_measure
from ktlab.operators import (
    DiagonalOperator,
    MatrixOperator,
    embed,
    exponential_profile,
    hat_mu,
    kt_observable,
    ladder_profile,
    mu_observable,
    on_axis,
    polynomial_profile,
    propagator_norm,
    random_bounded_matrix,
    resolvent_norm,
)

# brute-force sup over k of |e^{t lam} lam/(1-lam)| for alpha = 2, N = 1e5, t = 100,
# computed once with an explicit Python loop and frozen here
KT_ALPHA2_T100 = 0.04266720108945953


def diag(*lam):
    return DiagonalOperator(np.array(lam, dtype=complex))


def test_resolvent_examples():
    assert resolvent_norm(diag(-1), 0.0) == 1.0
    assert resolvent_norm(diag(0), 1.0) == 1.0
    k = np.arange(1, 1001)
    op = DiagonalOperator(-(k ** -2.0) + 1j / k)
    # oracle: direct minimum of |is - lam_k|
    ref = 1.0 / np.min(np.abs(0.1j - op.eigenvalues))
    assert ref == pytest.approx(100.0, rel=1e-12)
    assert resolvent_norm(op, 0.1) == pytest.approx(ref, rel=1e-14)


def test_resolvent_spectrum_hit():
    with pytest.raises(SpectrumHit):
        resolvent_norm(diag(0, -1), 0.0)
    with pytest.raises(SpectrumHit):
        resolvent_norm(MatrixOperator(np.diag([0.0, -1.0])), 0.0)


def test_propagator_examples():
    assert propagator_norm(diag(-1, -2), 1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert propagator_norm(diag(-1, -2), 0.0) == 1.0
    assert propagator_norm(MatrixOperator(np.zeros((3, 3))), 0.0) == pytest.approx(1.0)
    J = MatrixOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))
    ref = np.linalg.svd(np.array([[1.0, 2.0], [0.0, 1.0]]), compute_uv=False)[0]
    assert ref == pytest.approx(1 + math.sqrt(2), rel=1e-15)
    assert propagator_norm(J, 2.0) == pytest.approx(ref, rel=1e-13)


def test_negative_time():
    with pytest.raises(NegativeTime):
        kt_observable(diag(-1), -1.0)


def test_kt_examples():
    assert kt_observable(diag(0), 5.0) == 0.0
    assert kt_observable(diag(-1), 0.0) == 0.5
    for lam in (-0.3 + 2j, -1.0, -1e-3 + 0.1j):
        t = np.array([0.0, 0.5, 10.0, 1e3])
        np.testing.assert_allclose(kt_observable(diag(lam), t),
                                   abs(lam / (1 - lam)) * np.exp(t * np.real(lam)),
                                   rtol=1e-14)


def test_kt_alpha2_regression():
    op = polynomial_profile(2, 10**5, zero=False)
    assert kt_observable(op, 100.0) == pytest.approx(KT_ALPHA2_T100, rel=1e-6)


def test_kt_alpha2_brute_force_small():
    op = polynomial_profile(2, 2000)
    lam = op.eigenvalues
    for t in (0.0, 3.0, 100.0, 1e4):
        ref = max(abs(math.exp(t * l.real) * l / (1 - l)) for l in lam)
        assert kt_observable(op, t) == pytest.approx(ref, rel=1e-14)


def test_mu_observable_examples():
    op = polynomial_profile(1.5, 500)
    t = np.array([0.0, 1.0, 10.0, 1e3])
    np.testing.assert_allclose(mu_observable(op, dirac(0.0), t), propagator_norm(op, t), rtol=1e-15)
    np.testing.assert_allclose(mu_observable(op, kt_measure(), t), kt_observable(op, t), rtol=1e-13)
    assert mu_observable(diag(-1, -1 + 1j), dirac(2.0), 1.0) == pytest.approx(math.exp(-3), rel=1e-14)


def test_hat_mu_examples():
    op = MatrixOperator(np.array([[-1.0, 2.0], [0.0, -0.5]]))
    np.testing.assert_allclose(hat_mu(op, dirac(0.0)), np.eye(2), atol=0)
    A = op.entries
    np.testing.assert_allclose(hat_mu(op, kt_measure()), A @ np.linalg.inv(np.eye(2) - A), atol=1e-14)
    mu = exp_density(2.0, (0.0, 1.0))
    ref = integrate.quad(lambda t: t * math.exp(-3 * t), 0, np.inf, epsabs=1e-14)[0]
    assert ref == pytest.approx(1 / 9, rel=1e-10)
    assert hat_mu(MatrixOperator(np.array([[-1.0]])), mu)[0, 0] == pytest.approx(1 / 9, rel=1e-14)
    assert hat_mu(diag(-1), mu)[0] == pytest.approx(1 / 9, rel=1e-14)


def test_hat_mu_shifted_atom_is_propagator():
    op = MatrixOperator(np.array([[-0.2, 1.0], [0.0, -0.3]]))
    np.testing.assert_allclose(hat_mu(op, dirac(2.0)), op.propagator(2.0), atol=1e-15)


def test_hat_mu_laplace_domain():
    with pytest.raises(LaplaceDomain):
        hat_mu(MatrixOperator.from_raw(np.array([[2.0]])), kt_measure())


def test_kt_factor_singular():
    with pytest.raises(SingularMatrix):
        MatrixOperator.from_raw(np.array([[1.0]])).kt_factor


def test_diagonal_matches_embedded_matrix(rng):
    for _ in range(10):
        n = int(rng.integers(1, 65))
        lam = -rng.uniform(0, 2, n) + 1j * rng.uniform(-3, 3, n)
        op = DiagonalOperator(lam)
        M = embed(op)
        s = rng.uniform(-4, 4, 7)
        t = np.array([0.0, 0.3, 2.0, 15.0])
        np.testing.assert_allclose(resolvent_norm(M, s), resolvent_norm(op, s), rtol=1e-10)
        np.testing.assert_allclose(kt_observable(M, t), kt_observable(op, t), rtol=1e-10)
        np.testing.assert_allclose(propagator_norm(M, t), propagator_norm(op, t), rtol=1e-10)
        mu = exp_density(1.0 + 0.5j, (1.0, 0.3), shift=0.2) - dirac(0.7, 0.5)
        np.testing.assert_allclose(np.diag(hat_mu(M, mu)), hat_mu(op, mu), rtol=1e-10)
        np.testing.assert_allclose(mu_observable(M, mu, t), mu_observable(op, mu, t), rtol=1e-10)


def test_diagonal_invariants(rng):
    for op in (polynomial_profile(2, 10**4), exponential_profile(32), diag(0, -1, -0.5 + 3j)):
        pairs = np.sort(10 ** rng.uniform(-3, 6, (100, 2)), axis=1)
        a, b = kt_observable(op, pairs[:, 0]), kt_observable(op, pairs[:, 1])
        assert np.all(b <= a)
        assert np.all(propagator_norm(op, pairs.ravel()) <= 1.0)
        if op.contains_zero():
            s = 10 ** rng.uniform(-6, 0, 100) * rng.choice([-1, 1], 100)
            assert np.all(resolvent_norm(op, s) * np.abs(s) >= 1 - 1e-12)


def test_truncation_convergence():
    # N vs 2N in the reported t-range [1e2, 1e6]
    t = np.logspace(2, 6, 33)
    for alpha in (1.5, 2, 3):
        a = kt_observable(polynomial_profile(alpha, 10**5), t)
        b = kt_observable(polynomial_profile(alpha, 2 * 10**5), t)
        assert np.max(np.abs(a - b) / b) < 0.005


def test_invalid_operators():
    with pytest.raises(InvalidOperator):
        diag(0.1)
    with pytest.raises(InvalidOperator):
        DiagonalOperator(np.array([]))
    with pytest.raises(InvalidOperator):
        MatrixOperator(np.ones((2, 3)))
    with pytest.raises(InvalidOperator):
        MatrixOperator.bounded(np.array([[0.5]]))


def test_random_bounded_matrix(rng):
    op = random_bounded_matrix(8, rng, abscissa=-0.2)
    assert op.spectral_abscissa == pytest.approx(-0.2, abs=1e-12)


def test_on_axis_and_profiles():
    assert on_axis(diag(0, -1, 2j)).tolist() == [0j, 2j]
    lad = ladder_profile(30)
    assert lad.n == 30 and on_axis(lad).size == 0
    assert polynomial_profile(2, 10).contains_zero()
    assert not polynomial_profile(2, 10, zero=False).contains_zero()
