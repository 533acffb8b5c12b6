"""Numerical surrogates for the rate theorems.

Asymptotic statements are replaced by finite-window tests: an O(.) bound
becomes "the ratio stays bounded", witnessed by a non-positive fitted log-log
slope and by stability of the fitted constant under grid refinement. Every
check returns a :class:`RateFitReport`; none of them mutate their inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dominating import (
    FrequencyGrid,
    SampledMonotoneFunction,
    TimeGrid,
    diagonal_window_distance,
    format_float,
    omega_star,
    right_inverse,
)
from .errors import HypothesisFailed, SpectrumHit
from .measures import BoundedMeasure, fourier
from .operators import (
    SPECTRUM_TOL,
    DiagonalOperator,
    eigenvalues,
    kt_observable,
    mu_observable,
    on_axis,
    resolvent_norm,
)

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive"

RESOLVENT_BOUND = "ResolventBound_2_3"
LOWER_BOUND = "LowerBound_2_4"
LOG_CHARACTERIZATION = "LogCharacterization_2_5"
DICHOTOMY = "Dichotomy_2_2"
UPPER_BOUND = "UpperBound_3_5"
S0_PROXY = "S0InftyProxy_3_1"
MU_DECAY = "MuDecay_3_4"
M_LOWER = "MLowerBound"

# report order
THEOREM_IDS = (
    M_LOWER, DICHOTOMY, RESOLVENT_BOUND, LOWER_BOUND,
    LOG_CHARACTERIZATION, S0_PROXY, MU_DECAY, UPPER_BOUND,
)

SLOPE_TOL = 0.05
UPPER_SLOPE_TOL = 0.02
REFINE_TOL = 0.10
LOG_SIDE_TOL = 0.05
C_SCAN = (0.1, 1.0, 10.0)
ANALYTIC_MARGIN = 0.05
PROXY_LIMIT = 1e3


@dataclass(frozen=True)
class RateFitReport:
    theorem_id: str
    verdict: str
    fitted_constants: dict = field(default_factory=dict)
    observed_exponent: float | None = None
    residual: float = 0.0
    diagnostics: str = ""
    branch: str | None = None

    def __post_init__(self):
        if self.theorem_id not in THEOREM_IDS:
            raise ValueError(f"unknown theorem id {self.theorem_id!r}")
        if self.verdict not in (CONSISTENT, INCONSISTENT, INCONCLUSIVE):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if not self.residual >= 0:
            raise ValueError("residual must be >= 0")
        if self.verdict == INCONCLUSIVE and not self.diagnostics:
            raise ValueError("an inconclusive report needs diagnostics")

    def constants_text(self):
        clean = {k: _json_number(v) for k, v in sorted(self.fitted_constants.items())}
        return json.dumps(clean, sort_keys=True, separators=(",", ":"))

    def csv_row(self):
        exp = "" if self.observed_exponent is None else format_float(self.observed_exponent)
        return [self.theorem_id, self.verdict, exp, format_float(self.residual), self.constants_text()]

    def text_block(self):
        lines = [f"[{self.theorem_id}] {self.verdict}"]
        if self.branch:
            lines.append(f"  branch: {self.branch}")
        if self.observed_exponent is not None:
            lines.append(f"  observed exponent: {self.observed_exponent:.6g}")
        lines.append(f"  residual: {self.residual:.6g}")
        for k, v in sorted(self.fitted_constants.items()):
            lines.append(f"  {k} = {v:.10g}" if isinstance(v, float) else f"  {k} = {v}")
        if self.diagnostics:
            lines.append(f"  diagnostics: {self.diagnostics}")
        return "\n".join(lines)


def _json_number(v):
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return float(format_float(v))
    return v


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogLogFit:
    slope: float | None
    intercept: float
    residual: float


def fit_loglog(x, y):
    """Least squares line through (log x, log y).

    All-zero data gives slope None; data that underflows to zero inside the
    window gives slope -inf (faster than any power). The residual is the
    root-mean-square deviation in log space.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points to fit")
    if np.all(y == 0):
        return LogLogFit(None, -math.inf, 0.0)
    if np.any(y <= 0):
        return LogLogFit(-math.inf, -math.inf, 0.0)
    lx, ly = np.log(x), np.log(y)
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, ly, rcond=None)
    res = float(np.sqrt(np.mean((ly - (slope * lx + icpt)) ** 2)))
    return LogLogFit(float(slope), float(icpt), res)


def last_decades(t, decades, t_max=None):
    t = np.asarray(t, dtype=float)
    top = t[-1] if t_max is None else t_max
    return t[t >= top / 10.0 ** decades * (1 - 1e-12)]


def decay_exponent(op, t_lo=1e2, t_hi=1e6, grid: TimeGrid | None = None):
    """Fitted log-log slope of kt_observable over [t_lo, t_hi]."""
    grid = grid or TimeGrid(t_max=t_hi)
    t = grid.points()
    t = t[(t >= t_lo * (1 - 1e-12)) & (t <= t_hi)]
    return fit_loglog(t, kt_observable(op, t))


def _rel_change(a, b):
    if a == b:
        return 0.0
    if not (math.isfinite(a) and math.isfinite(b)):
        return math.inf
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _inconclusive(tid, why, **constants):
    return RateFitReport(tid, INCONCLUSIVE, dict(constants), None, 0.0, why)


# ---------------------------------------------------------------------------
# m(s) >= 1/s
# ---------------------------------------------------------------------------

def check_m_lower(m: SampledMonotoneFunction, op=None) -> RateFitReport:
    if op is not None and not op.contains_zero():
        return _inconclusive(M_LOWER, "0 not in spectrum")
    prod = m.values * m.abscissae
    worst = float(prod.min())
    fit = fit_loglog(m.abscissae, m.values)
    ok = worst >= 1 - 1e-12
    return RateFitReport(
        M_LOWER, CONSISTENT if ok else INCONSISTENT, {"min_m_times_s": worst},
        fit.slope, max(0.0, 1.0 - worst),
        "" if ok else f"m(s)*s drops to {worst:.6g} < 1",
    )


# ---------------------------------------------------------------------------
# resolvent bound via omega*
# ---------------------------------------------------------------------------

def _both_signs(op, s):
    return np.maximum(resolvent_norm(op, s), resolvent_norm(op, -s))


def _resolvent_samples(op, grid: FrequencyGrid, lo):
    """Grid points in [lo, s_max] plus eigenvalue imaginary parts there."""
    s = grid.points()
    lam = eigenvalues(op)
    cand = np.concatenate([np.abs(lam.imag), np.abs(np.asarray(grid.extra_candidates, dtype=float))])
    pts = np.concatenate([s, cand])
    pts = pts[(pts >= lo) & (pts <= grid.s_max)]
    return np.unique(pts)


def _resolvent_ratio_sup(op, omega, c, grid, lo):
    s = _resolvent_samples(op, grid, lo)
    R = _both_signs(op, s)
    rhs = 1.0 / s + omega_star(omega, c * s)
    ratio = R / rhs
    i = int(np.argmax(ratio))
    return float(ratio[i]), float(s[i])


def check_resolvent_bound(op, omega: SampledMonotoneFunction, c: float,
                          grid: FrequencyGrid | None = None) -> RateFitReport:
    """K* = max ||R(is)|| / (1/s + omega*(cs)), stable under refinement."""
    if not 0 < c < 1:
        raise ValueError("c must lie in (0, 1)")
    grid = grid or FrequencyGrid()
    first = omega.origin_value if omega.origin_value is not None else omega.values[0]
    last = omega.values[-1]
    if not (first == 0 or last <= first / 10):
        return _inconclusive(RESOLVENT_BOUND, f"omega does not decay over the window ({first:.3g} -> {last:.3g})")
    lo = max(grid.s_min, last / c)
    if lo >= grid.s_max:
        return _inconclusive(RESOLVENT_BOUND, "omega(T_max)/c leaves no frequency window")
    K1, s_at = _resolvent_ratio_sup(op, omega, c, grid, lo)
    K2 = _resolvent_ratio_sup(op, omega, c, grid.refined(), lo)[0]
    change = _rel_change(K1, K2)
    ok = math.isfinite(K1) and change < REFINE_TOL
    diag = f"K* attained at s = {s_at:.6g}; frequency window [{lo:.3g}, {grid.s_max:g}]"
    if not ok:
        diag += f"; K* moved by {100 * change:.3g}% under refinement"
    return RateFitReport(
        RESOLVENT_BOUND, CONSISTENT if ok else INCONSISTENT,
        {"K": K1, "K_refined": K2, "c": float(c), "s_lo": float(lo)},
        None, change, diag,
    )


# ---------------------------------------------------------------------------
# lower bound
# ---------------------------------------------------------------------------

def hypothesis_witness(op, m: SampledMonotoneFunction, count=5):
    """s * sup ||R(+-ir)|| over the ``count`` smallest frequency cells.

    For diagonal models the cell supremum is exact; for matrices it is the
    larger endpoint value.
    """
    s = m.abscissae[: count + 1]
    if isinstance(op, DiagonalOperator):
        sup = 1.0 / diagonal_window_distance(op, s)[:count]
    else:
        vals = _both_signs(op, s)
        sup = np.maximum(vals[:-1], vals[1:])
    return s[:count] * sup


def _window_ratio(t, num, f, arg):
    lo, hi = f.value_range
    ok = (arg >= lo) & (arg <= hi)
    if ok.sum() < 2:
        return None
    return t[ok], num[ok] / right_inverse(f, arg[ok])


def check_lower_bound(op, m: SampledMonotoneFunction, grid: TimeGrid | None = None,
                      C_scan=C_SCAN) -> RateFitReport:
    """kt(t) >= c m^-1(C t) for large t, with C scanned over ``C_scan``."""
    grid = grid or TimeGrid()
    w = hypothesis_witness(op, m)
    witnessed = bool(np.all(np.diff(w) < 0) and w[0] > 10)
    if not witnessed:
        return _inconclusive(
            LOWER_BOUND,
            "hypothesis not numerically witnessed: s*||R(is)|| at the smallest frequencies "
            f"is {', '.join(f'{x:.3g}' for x in w)}",
            witness_min_s=float(w[0]))
    t = grid.points()
    t = t[t.size // 2:]
    kt = np.asarray(kt_observable(op, t), dtype=float)
    fit = fit_loglog(t, kt)
    best = None
    notes = []
    for C in C_scan:
        win = _window_ratio(t, kt, m, C * t)
        if win is None:
            notes.append(f"C={C:g}: C*t outside range of m")
            continue
        tw, r = win
        c_star = float(r.min())
        tail = tw >= tw[-1] / 100 * (1 - 1e-12)
        slope = fit_loglog(tw[tail], r[tail]).slope if tail.sum() >= 2 else None
        passed = c_star >= 1e-6 and slope is not None and slope >= -SLOPE_TOL
        notes.append(f"C={C:g}: c*={c_star:.4g}, tail slope={slope if slope is None else round(slope, 4)}")
        if passed and (best is None or c_star > best[1]):
            best = (C, c_star, float(tw[0]), float(tw[-1]))
    if best is None and all("outside" in n for n in notes):
        return _inconclusive(LOWER_BOUND, "; ".join(notes))
    ok = best is not None
    consts = {"witness_min_s": float(w[0])}
    if ok:
        consts.update({"C": best[0], "c": best[1], "t_lo": best[2], "t_hi": best[3]})
    return RateFitReport(
        LOWER_BOUND, CONSISTENT if ok else INCONSISTENT, consts,
        fit.slope, fit.residual, "; ".join(notes),
    )


# ---------------------------------------------------------------------------
# upper bound
# ---------------------------------------------------------------------------

def analytic_margin_ok(op, margin=ANALYTIC_MARGIN):
    lam = eigenvalues(op)
    far = np.abs(lam.imag) >= 1
    return bool(np.all(np.abs(lam[far].real) >= margin))


def check_upper_bound(op, m: SampledMonotoneFunction, eps: float,
                      grid: TimeGrid | None = None, decades=3) -> RateFitReport:
    """kt(t) = O(m^-1(t^(1-eps))): bounded ratio over the last decades of t."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    grid = grid or TimeGrid()
    if not isinstance(op, DiagonalOperator):
        return _inconclusive(UPPER_BOUND, "upper bound check is limited to normal (diagonal) models")
    if not analytic_margin_ok(op):
        return _inconclusive(UPPER_BOUND, f"eigenvalues with |Im| >= 1 come closer than {ANALYTIC_MARGIN} to iR")
    t = last_decades(grid.points(), decades)
    kt = np.asarray(kt_observable(op, t), dtype=float)
    fit = fit_loglog(t, kt)
    if np.all(kt == 0):
        return RateFitReport(UPPER_BOUND, CONSISTENT, {"K": 0.0, "eps": float(eps)}, None, 0.0,
                             "kt_observable vanishes identically, ratio is 0")
    win = _window_ratio(t, kt, m, t ** (1 - eps))
    if win is None:
        return _inconclusive(UPPER_BOUND, "t^(1-eps) outside the range of m")
    tw, r = win
    rfit = fit_loglog(tw, r)
    K = float(r.max())
    ok = rfit.slope is not None and rfit.slope <= UPPER_SLOPE_TOL
    diag = f"ratio slope {rfit.slope:.4g} over t in [{tw[0]:.3g}, {tw[-1]:.3g}]"
    if ok and rfit.slope < -SLOPE_TOL:
        diag += "; ratio tends to 0, so the bound is not sharp here"
    return RateFitReport(
        UPPER_BOUND, CONSISTENT if ok else INCONSISTENT,
        {"K": K, "eps": float(eps), "t_lo": float(tw[0]), "t_hi": float(tw[-1]), "ratio_slope": rfit.slope},
        fit.slope, fit.residual, diag,
    )


# ---------------------------------------------------------------------------
# s_0^infty proxy
# ---------------------------------------------------------------------------

def estimate_s0_proxy(op, R: float = 1.0, points_per_decade=16) -> RateFitReport:
    """sup { ||R(is)|| : |s| >= R }; consistent when finite and below 1e3."""
    if not R >= 1:
        raise ValueError("R must be >= 1")
    if isinstance(op, DiagonalOperator):
        lam = op.eigenvalues
        gap = np.maximum(0.0, R - np.abs(lam.imag))
        d = float(np.min(np.hypot(lam.real, gap)))
        if d <= SPECTRUM_TOL:
            raise SpectrumHit(f"spectrum meets iR outside (-{R}, {R})")
        sup = 1.0 / d
        where = "exact distance to the spectrum"
    else:
        s = R * 10.0 ** (np.arange(3 * points_per_decade + 1) / points_per_decade)
        lam = op.spectrum
        cand = np.abs(lam.imag)
        s = np.unique(np.concatenate([s, cand[cand >= R]]))
        vals = _both_signs(op, s)
        sup = float(vals.max())
        where = f"grid up to |s| = {s[-1]:.3g} plus eigenvalue candidates"
    ok = sup < PROXY_LIMIT
    diag = where if ok else f"resolvent unbounded along iR (sup {sup:.3g} >= {PROXY_LIMIT:g}); {where}"
    return RateFitReport(
        S0_PROXY, CONSISTENT if ok else INCONSISTENT, {"R": float(R), "sup": sup},
        None, 0.0, diag,
    )


# ---------------------------------------------------------------------------
# log characterisation (normal models)
# ---------------------------------------------------------------------------

def log_side_constant(m: SampledMonotoneFunction, c: float, s_floor=None):
    """max over sampled pairs s <= t of c log(t/s) - m(s)/m(t).

    Samples of m are exact, so this is a lower bound for the supremum over all
    pairs in the window. Moving a continuum pair outward to the neighbouring
    samples costs at most c*h per end (h = largest gap in log s), hence the
    supremum lies in [C_s, C_s + 2 c h].
    """
    x, v = m.abscissae, m.values
    keep = x >= (s_floor if s_floor is not None else x[0]) * (1 - 1e-12)
    x, v = x[keep], v[keep]
    lx = np.log(x)
    # rows s, columns t; only s <= t counts
    gain = c * (lx[None, :] - lx[:, None]) - v[:, None] / v[None, :]
    gain = np.where(np.arange(x.size)[:, None] <= np.arange(x.size)[None, :], gain, -np.inf)
    return float(gain.max())


def log_side_bracket(m: SampledMonotoneFunction, c: float, s_floor=None):
    """(lower, upper) bounds for the log-side constant over the sampled window."""
    lo = log_side_constant(m, c, s_floor)
    x = m.abscissae
    if s_floor is not None:
        x = x[x >= s_floor * (1 - 1e-12)]
    h = float(np.max(np.diff(np.log(x))))
    return lo, lo + 2 * c * h


def _decay_side(op, m, c, t, decades):
    kt = np.asarray(kt_observable(op, t), dtype=float)
    win = _window_ratio(t, kt, m, c * t)
    if win is None:
        return None
    tw, r = win
    tw_tail = last_decades(tw, decades)
    r = r[tw >= tw_tail[0]]
    return tw_tail, r


def check_log_characterization(m: SampledMonotoneFunction, op, c: float,
                               grid: TimeGrid | None = None, decades=3,
                               m_exact=None, dense_per_decade=256) -> RateFitReport:
    """Decay O(m^-1(ct)) versus m(s)/m(t) >= c log(t/s) - C; the two must agree.

    ``m_exact``, when given, evaluates m exactly at arbitrary abscissae; the
    pair scan then runs on ``dense_per_decade`` samples per decade, which
    shrinks the sampling slack 2 c h of the log-side constant.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    grid = grid or TimeGrid()
    if not isinstance(op, DiagonalOperator):
        return _inconclusive(LOG_CHARACTERIZATION, "log characterisation is limited to normal (diagonal) models")
    proxy = estimate_s0_proxy(op, 1.0)
    if proxy.verdict != CONSISTENT:
        return _inconclusive(LOG_CHARACTERIZATION, "resolvent not bounded for |s| >= 1: " + proxy.diagnostics)

    base = _decay_side(op, m, c, grid.points(), decades)
    fine = _decay_side(op, m, c, grid.refined().points(), decades)
    if base is None or fine is None:
        return _inconclusive(LOG_CHARACTERIZATION, "c*t never enters the range of m")
    tw, r = base
    rfit = fit_loglog(tw, r) if tw.size >= 2 else LogLogFit(None, 0.0, 0.0)
    K1, K2 = float(r.max()), float(fine[1].max())
    k_change = _rel_change(K1, K2)
    decay_holds = (rfit.slope is None or rfit.slope <= SLOPE_TOL) and k_change < REFINE_TOL

    x0 = m.abscissae[0]
    m_scan = m
    if m_exact is not None:
        x = m.abscissae
        n = int(round(np.log10(x[-1] / x0) * dense_per_decade))
        dense = np.unique(np.concatenate([x, x0 * (x[-1] / x0) ** (np.arange(n + 1) / n)]))
        dense = dense[(dense >= x0) & (dense <= x[-1])]
        m_scan = SampledMonotoneFunction(dense, m_exact(dense))
    C_lo, C_hi = log_side_bracket(m_scan, c)
    C_cut = log_side_constant(m_scan, c, s_floor=10 * x0)
    C_full = C_lo
    c_change = abs(C_full - C_cut) / max(1.0, abs(C_full))
    log_holds = c_change < LOG_SIDE_TOL

    agree = decay_holds == log_holds
    kt_fit = fit_loglog(tw, np.asarray(kt_observable(op, tw), dtype=float)) if tw.size >= 2 else LogLogFit(None, 0, 0)
    diag = (f"decay side {'holds' if decay_holds else 'fails'} (ratio slope "
            f"{'n/a' if rfit.slope is None else f'{rfit.slope:.4g}'}, K* change {100 * k_change:.3g}%); "
            f"log side {'holds' if log_holds else 'fails'} (C* {C_cut:.6g} -> {C_full:.6g} "
            f"when the floor drops from {10 * x0:.3g} to {x0:.3g})")
    return RateFitReport(
        LOG_CHARACTERIZATION, CONSISTENT if agree else INCONSISTENT,
        {"c": float(c), "K": K1 if decay_holds else math.inf, "C": C_lo,
         "C_lo": C_lo, "C_hi": C_hi,
         "decay_side": int(decay_holds), "log_side": int(log_holds)},
        kt_fit.slope, c_change, diag,
        branch="both hold" if decay_holds and log_holds else ("both fail" if agree else "disagree"),
    )


# ---------------------------------------------------------------------------
# dichotomy
# ---------------------------------------------------------------------------

def _splits(op, delta=1e-6):
    lam = eigenvalues(op)
    if isinstance(op, DiagonalOperator):
        nonzero = lam[lam != 0]
        zero_ok = True
    else:
        tol = op.eig_tol
        small = np.abs(lam) <= tol
        nonzero = lam[~small]
        # 0 must be semisimple: geometric multiplicity equals algebraic
        mult = int(small.sum())
        kernel = op.n - np.linalg.matrix_rank(op.entries, tol=tol)
        zero_ok = mult == 0 or kernel == mult
    gap = float(-nonzero.real.max()) if nonzero.size else math.inf
    return zero_ok and gap >= delta, gap


def check_dichotomy(op, grid: TimeGrid | None = None) -> RateFitReport:
    """Classify: limsup t kt(t) > 0, or a spectral splitting with fast decay."""
    grid = grid or TimeGrid()
    axis = on_axis(op)
    tol = SPECTRUM_TOL if isinstance(op, DiagonalOperator) else op.eig_tol
    if np.any(np.abs(axis) > tol):
        return _inconclusive(DICHOTOMY, f"nonzero eigenvalue {axis[np.abs(axis) > tol][0]} on iR")
    t = last_decades(grid.points(), 2)
    kt = np.asarray(kt_observable(op, t), dtype=float)
    kfit = fit_loglog(t, kt)
    tk = t * kt
    tfit = fit_loglog(t, tk)
    split, gap = _splits(op)
    consts = {"gap": gap, "min_t_kt": float(tk.min())}
    if tfit.slope is not None and (tfit.slope > SLOPE_TOL or tk.min() > 0.1):
        return RateFitReport(DICHOTOMY, CONSISTENT, consts, kfit.slope, kfit.residual,
                             f"t*kt slope {tfit.slope:.4g}, min {tk.min():.4g}", branch="limsup positive")
    fast = kfit.slope is None or kfit.slope <= -1 - SLOPE_TOL
    if fast and split:
        return RateFitReport(DICHOTOMY, CONSISTENT, consts, kfit.slope, kfit.residual,
                             f"decay faster than 1/t and spectral gap {gap:.3g}", branch="splitting")
    if fast:
        return RateFitReport(DICHOTOMY, INCONSISTENT, consts, kfit.slope, kfit.residual,
                             "decay faster than 1/t without a spectral splitting")
    return _inconclusive(DICHOTOMY, f"neither branch witnessed (t*kt slope {tfit.slope}, kt slope {kfit.slope})",
                         **consts)


# ---------------------------------------------------------------------------
# measure decay
# ---------------------------------------------------------------------------

def check_mu_decay(op, mu: BoundedMeasure, grid: TimeGrid | None = None) -> RateFitReport:
    """||T(t) hat_mu(T)|| -> 0 when the transform of mu vanishes on the boundary spectrum."""
    grid = grid or TimeGrid()
    for lam in on_axis(op):
        # the multiplier of hat_mu at lambda = i s0 is the transform at -s0
        val = abs(fourier(mu, -lam.imag))
        if val > 1e-10:
            raise HypothesisFailed(f"transform of mu is {val:.3g} at the boundary eigenvalue {lam}")
    proxy = estimate_s0_proxy(op, 1.0)
    if proxy.verdict != CONSISTENT:
        return _inconclusive(MU_DECAY, "asymptotic analyticity proxy fails: " + proxy.diagnostics)
    t = grid.points()
    vals = np.asarray(mu_observable(op, mu, t), dtype=float)
    v1 = float(mu_observable(op, mu, 1.0))
    vend = float(vals[-1])
    drop = math.inf if vend == 0 else v1 / vend
    tail = last_decades(t, 3)
    fit = fit_loglog(tail, vals[-tail.size:])
    ok = drop >= 100 and vend <= vals.min()
    return RateFitReport(
        MU_DECAY, CONSISTENT if ok else INCONSISTENT,
        {"mu_at_1": v1, "mu_at_tmax": vend, "drop_factor": drop},
        fit.slope, fit.residual,
        f"||T(t) hat_mu|| drops by a factor {drop:.4g} between t = 1 and t = {t[-1]:g}",
    )


def order_reports(reports):
    return sorted(reports, key=lambda r: THEOREM_IDS.index(r.theorem_id))


__all__ = [
    "RateFitReport", "LogLogFit", "fit_loglog", "decay_exponent", "last_decades",
    "check_m_lower", "check_resolvent_bound", "check_lower_bound", "check_upper_bound",
    "estimate_s0_proxy", "check_log_characterization", "log_side_constant", "log_side_bracket",
    "check_dichotomy", "check_mu_decay", "hypothesis_witness", "order_reports",
    "THEOREM_IDS", "CONSISTENT", "INCONSISTENT", "INCONCLUSIVE",
]
