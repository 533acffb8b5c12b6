import csv
import math

import numpy as np
import pytest

from ktlab.dominating import (
    NONDECREASING,
    FrequencyGrid,
    SampledMonotoneFunction,
    TimeGrid,
    exact_minimal_m,
    minimal_m,
    minimal_omega,
    omega_star,
    right_inverse,
    spectral_candidates,
)
from ktlab.errors import NotAttained, OutOfRange, SpectrumInWindow
from ktlab.operators import (
    DiagonalOperator,
    MatrixOperator,
    exponential_profile,
    kt_observable,
    polynomial_profile,
    resolvent_norm,
)

# brute-force double loop over r in [1e-2, 1] (both signs, 2001 log points plus
# every |Im lambda|) and all 1e6 eigenvalues; frozen baseline
M_ALPHA2_AT_1EM2 = 10000.0


def diag(*lam):
    return DiagonalOperator(np.array(lam, dtype=complex))


def test_m_for_zero_operator():
    g = FrequencyGrid(points_per_decade=8)
    m = minimal_m(diag(0), g)
    np.testing.assert_allclose(m.values, 1.0 / m.abscissae, rtol=1e-15)


def test_m_for_single_negative_eigenvalue():
    # dist(ir, -1) = sqrt(1 + r^2), so m(s) = sup over s <= r <= 1 = 1/sqrt(1 + s^2)
    g = FrequencyGrid(points_per_decade=8)
    m = minimal_m(diag(-1), g)
    np.testing.assert_allclose(m.values, 1.0 / np.sqrt(1 + m.abscissae ** 2), rtol=1e-15)
    assert m.values[-1] == pytest.approx(1 / math.sqrt(2))


def test_m_alpha2_against_brute_force(alpha2):
    g = FrequencyGrid(s_min=1e-2, points_per_decade=16)
    m = minimal_m(alpha2, g)
    assert m(1e-2) == pytest.approx(M_ALPHA2_AT_1EM2, rel=1e-12)
    assert exact_minimal_m(alpha2, np.array([1e-2, 0.5]))[0] == pytest.approx(M_ALPHA2_AT_1EM2, rel=1e-12)


def test_m_brute_force_small_family(rng):
    k = np.arange(1, 301)
    op = DiagonalOperator(np.append(-(k ** -1.5) + 1j / k, 0.0))
    g = FrequencyGrid(s_min=1e-2, points_per_decade=8)
    m = minimal_m(op, g)
    # oracle: dense r-grid plus the spectral candidates, explicit max over r >= s
    r = np.unique(np.concatenate([np.logspace(-2, 0, 20001), np.abs(op.eigenvalues.imag)]))
    r = r[(r >= 1e-2) & (r <= 1)]
    vals = np.maximum(resolvent_norm(op, r), resolvent_norm(op, -r))
    for s, v in zip(m.abscissae, m.values):
        ref = vals[r >= s].max()
        assert ref <= v * (1 + 1e-12)
        assert v <= ref * 1.02


def test_m_window_error():
    with pytest.raises(SpectrumInWindow):
        minimal_m(diag(0, 0.5j), FrequencyGrid())


def test_m_matrix_matches_diagonal():
    lam = np.array([0, -0.01 + 0.1j, -0.2 + 0.5j, -1.0])
    g = FrequencyGrid(s_min=1e-3, points_per_decade=8)
    g = g.with_candidates(spectral_candidates(diag(*lam), g))
    a = minimal_m(diag(*lam), g)
    b = minimal_m(MatrixOperator(np.diag(lam)), g)
    np.testing.assert_allclose(b.values, a.values, rtol=1e-10)


def test_omega_examples():
    tg = TimeGrid(points_per_decade=8)
    w0 = minimal_omega(diag(0), tg)
    assert np.all(w0.values == 0) and w0.origin_value == 0
    w1 = minimal_omega(diag(-1), TimeGrid(t_max=30.0, points_per_decade=8))
    np.testing.assert_allclose(w1.values, 0.5 * np.exp(-w1.abscissae), rtol=1e-14)
    assert w1.origin_value == 0.5


def test_omega_jordan_against_dense_oracle():
    op = MatrixOperator(np.array([[-0.1, 1.0], [0.0, -0.1]]))
    tg = TimeGrid()
    w = minimal_omega(op, tg)
    td = np.arange(0.0, 400.0, 0.01)
    kd = kt_observable(op, td)
    run = np.maximum.accumulate(kd[::-1])[::-1]
    # kt is maximal at t = 0, so omega(0) = kt(0); the running max still
    # lifts omega above kt where kt dips before its transient hump
    assert np.argmax(kd) == 0
    assert w.origin_value == pytest.approx(kd[0], rel=1e-14)
    assert np.max(run - kd) > 0.05
    t = tg.points()
    sel = t <= 390
    ref = np.interp(t[sel], td, run)
    assert np.max(np.abs(w.values[sel] - ref) / ref) < 0.01


def test_right_inverse_power_law(rng):
    s = np.logspace(-6, 0, 97)
    for alpha in (0.5, 1.5, 2.0, 3.0):
        f = SampledMonotoneFunction(s, s ** -alpha)
        y = 10 ** rng.uniform(0, 6 * alpha, 1000)
        x = right_inverse(f, y)
        np.testing.assert_allclose(x, y ** (-1 / alpha), rtol=1e-8)
        np.testing.assert_allclose(f(x), y, rtol=1e-8)


def test_right_inverse_plateau():
    f = SampledMonotoneFunction([0.1, 0.5, 1.0], [2.0, 2.0, 2.0])
    assert right_inverse(f, 2.0) == 1.0
    for y in (1.9, 2.1):
        with pytest.raises(OutOfRange):
            right_inverse(f, y)
    g = SampledMonotoneFunction([0.1, 0.2, 0.4, 0.8], [5.0, 3.0, 3.0, 1.0])
    assert right_inverse(g, 3.0) == 0.4


def test_right_inverse_alpha2(alpha2):
    m = minimal_m(alpha2, FrequencyGrid(s_min=1e-4, points_per_decade=16))
    s = right_inverse(m, 1e4)
    assert s == pytest.approx(1e-2, rel=1e-12)
    # scan oracle: largest grid-dense s with m(s) >= 1e4
    xs = np.logspace(-4, 0, 40001)
    assert abs(xs[m(xs) >= 1e4].max() - s) <= 1e-4 * s


def test_omega_star_examples():
    t = np.linspace(0.01, 20, 2000)
    w = SampledMonotoneFunction(t, np.exp(-t), origin_value=1.0)
    assert omega_star(w, math.exp(-3)) == pytest.approx(3.0, rel=1e-8)
    assert omega_star(w, 1.0) == 0.0
    assert omega_star(w, 2.0) == 0.0
    with pytest.raises(NotAttained):
        omega_star(w, 1e-12)


def test_omega_star_plateau_takes_smallest_t():
    w = SampledMonotoneFunction([1.0, 2.0, 3.0, 4.0], [4.0, 2.0, 2.0, 1.0], origin_value=4.0)
    assert omega_star(w, 2.0) == 2.0
    assert omega_star(w, 4.0) == 0.0


def test_omega_star_alpha2(alpha2):
    w = minimal_omega(alpha2, TimeGrid())
    ts = omega_star(w, 1e-2)
    assert w(ts) <= 1e-2 * (1 + 1e-8)
    tt = np.logspace(0, 6, 200001)
    scan = tt[np.argmax(w(tt) <= 1e-2)]
    assert abs(scan - ts) <= 1e-4 * ts


def test_random_inverse_contracts(alpha2, rng):
    w = minimal_omega(alpha2, TimeGrid())
    lo, hi = w.value_range
    s = np.exp(rng.uniform(math.log(lo), math.log(w.origin_value), 1000))
    ts = omega_star(w, s)
    assert np.all(w(ts) <= s * (1 + 1e-8))
    inside = (s > lo) & (s < hi)
    np.testing.assert_allclose(w(ts[inside]), s[inside], rtol=1e-6)
    m = minimal_m(alpha2, FrequencyGrid())
    lo, hi = m.value_range
    y = np.exp(rng.uniform(math.log(lo), math.log(hi), 1000))
    np.testing.assert_allclose(m(right_inverse(m, y)), y, rtol=1e-8)


@pytest.mark.parametrize("op", [polynomial_profile(1.5, 10**5), polynomial_profile(2, 10**5),
                                exponential_profile(32), DiagonalOperator(np.array([0, -1.0]))],
                         ids=["alpha1.5", "alpha2", "exponential", "split"])
def test_monotone_and_lower_bound(op):
    m = minimal_m(op, FrequencyGrid())
    w = minimal_omega(op, TimeGrid())
    assert np.all(np.diff(m.values) <= 0)
    assert np.all(np.diff(w.values) <= 0) and w.origin_value >= w.values[0]
    assert np.min(m.values * m.abscissae) >= 1 - 1e-12


def test_refinement_stability_with_candidates():
    for op in (polynomial_profile(2, 10**6), exponential_profile(32),
               MatrixOperator(np.array([[-0.1, 1.0], [0.0, -0.1]]))):
        g = FrequencyGrid()
        g = g.with_candidates(spectral_candidates(op, g))
        a, b = minimal_m(op, g), minimal_m(op, g.refined())
        common, ia, ib = np.intersect1d(a.abscissae, b.abscissae, return_indices=True)
        assert common.size >= 97
        assert np.max(np.abs(a.values[ia] - b.values[ib]) / b.values[ib]) < 0.01


def test_interpolation_rules():
    f = SampledMonotoneFunction([1.0, 10.0], [4.0, 0.0])
    assert f(math.sqrt(10.0)) == pytest.approx(2.0)  # linear in value, log in x
    g = SampledMonotoneFunction([1.0, 2.0], [1.0, 3.0], direction=NONDECREASING)
    assert g(1.5) == pytest.approx(3 ** (math.log(1.5) / math.log(2)))
    with pytest.raises(OutOfRange):
        g(0.5)
    h = SampledMonotoneFunction([1.0, 2.0], [1.0, 0.5], origin_value=3.0)
    assert h(0.5) == pytest.approx(2.0)


@pytest.mark.parametrize("x,v", [([1.0], [1.0]), ([1.0, 1.0], [1, 1]), ([-1.0, 1.0], [1, 1]),
                                 ([1.0, 2.0], [1.0, 2.0]), ([1.0, 2.0], [1.0, np.nan])])
def test_invalid_samples(x, v):
    with pytest.raises(ValueError):
        SampledMonotoneFunction(x, v)


def test_grids():
    assert TimeGrid().with_zero().size == 97
    fg = FrequencyGrid()
    p = fg.points()
    assert p.size == 97 and p[0] == 1e-6 and p[-1] == 1.0
    assert fg.refined().points().size == 193
    assert fg.with_candidates([0.123, 5.0]).points().size == 98
    with pytest.raises(ValueError):
        FrequencyGrid(points_per_decade=3)


def test_csv_format(tmp_path):
    f = SampledMonotoneFunction([0.1, 1.0], [1 / 3, 0.1], origin_value=0.5)
    f.to_csv(tmp_path / "f.csv")
    rows = list(csv.reader(open(tmp_path / "f.csv")))
    assert rows == [["abscissa", "value"], ["0", "0.5"], ["0.10000000000000001", "0.33333333333333331"],
                    ["1", "0.10000000000000001"]]


def test_omega_star_contract_near_underflow(rng):
    # omega drops from ~1e-290 to exactly 0 in one cell; the inverse is
    # ill-conditioned there and must still satisfy omega(omega*(s)) <= s
    w = minimal_omega(DiagonalOperator(np.array([0, -1, -0.5 + 0.3j])), TimeGrid())
    s = np.exp(rng.uniform(math.log(1e-300), math.log(0.5), 20000))
    assert np.all(w(omega_star(w, s)) <= s)
