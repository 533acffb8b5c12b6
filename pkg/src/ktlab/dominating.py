"""Sampled dominating functions and their generalised inverses.

The minimal dominating functions are

    m(s)     = sup { ||R(ir, A)|| : s <= |r| <= 1 },      0 < s <= 1,
    omega(t) = sup { ||T(u) A R(1, A)|| : u >= t },        t >= 0,

sampled on logarithmic grids and interpolated piecewise-linearly in log-log
coordinates, which reproduces power laws exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotAttained, OutOfRange, SpectrumInWindow, TailUnbounded
from .operators import (
    SPECTRUM_TOL,
    DiagonalOperator,
    MatrixOperator,
    kt_observable,
    resolvent_norm,
    semigroup_bound,
)

NONINCREASING = "nonincreasing"
NONDECREASING = "nondecreasing"


def format_float(x):
    """17 significant digits, the fixed format of every CSV output."""
    return "%.17g" % x


def _log_grid(lo, hi, ppd, include_lo):
    n = int(round(math.log10(hi / lo) * ppd))
    if n < 1:
        raise ValueError(f"grid [{lo}, {hi}] spans less than one step")
    j = np.arange(0 if include_lo else 1, n + 1)
    pts = 10.0 ** (math.log10(lo) + j / ppd)
    pts[-1] = hi
    if include_lo:
        pts[0] = lo
    return pts


@dataclass(frozen=True)
class FrequencyGrid:
    """Log grid on [s_min, s_max] (both included)."""

    s_min: float = 1e-6
    s_max: float = 1.0
    points_per_decade: int = 16
    extra_candidates: tuple = field(default=())

    def __post_init__(self):
        if not 0 < self.s_min < self.s_max:
            raise ValueError(f"need 0 < s_min < s_max, got {self.s_min}, {self.s_max}")
        if self.points_per_decade < 4:
            raise ValueError("points_per_decade must be >= 4")

    def points(self):
        """Grid abscissae merged with the extra candidates that fall inside the window."""
        pts = _log_grid(self.s_min, self.s_max, self.points_per_decade, include_lo=True)
        if self.extra_candidates:
            extra = [s for s in self.extra_candidates if self.s_min < s < self.s_max]
            pts = np.unique(np.concatenate([pts, extra]))
        return pts

    def with_candidates(self, values):
        return FrequencyGrid(self.s_min, self.s_max, self.points_per_decade,
                             tuple(sorted(set(self.extra_candidates) | {float(v) for v in values})))

    def refined(self):
        return FrequencyGrid(self.s_min, self.s_max, 2 * self.points_per_decade, self.extra_candidates)


@dataclass(frozen=True)
class TimeGrid:
    """t = 0 plus a log grid on (t_min, t_max]."""

    t_max: float = 1e6
    points_per_decade: int = 16
    t_min: float = 1.0
    extra_candidates: tuple = field(default=())

    def __post_init__(self):
        if not 0 < self.t_min < self.t_max:
            raise ValueError(f"need 0 < t_min < t_max, got {self.t_min}, {self.t_max}")
        if self.points_per_decade < 4:
            raise ValueError("points_per_decade must be >= 4")

    def points(self):
        """Positive sample times, ascending (t = 0 excluded)."""
        pts = _log_grid(self.t_min, self.t_max, self.points_per_decade, include_lo=False)
        if self.extra_candidates:
            extra = [t for t in self.extra_candidates if self.t_min < t <= self.t_max]
            pts = np.unique(np.concatenate([pts, extra]))
        return pts

    def with_zero(self):
        return np.concatenate([[0.0], self.points()])

    def refined(self):
        return TimeGrid(self.t_max, 2 * self.points_per_decade, self.t_min, self.extra_candidates)


class SampledMonotoneFunction:
    """A weakly monotone function known at finitely many positive abscissae.

    Between samples the function is interpolated linearly in (log x, log y);
    when one of the two bracketing values is zero the interpolation is
    linear in (log x, y) instead. ``origin_value``, when given, is the value at
    x = 0 and is joined to the first sample linearly in x.
    """

    def __init__(self, abscissae, values, direction=NONINCREASING, origin_value=None):
        x = np.array(abscissae, dtype=float)
        v = np.array(values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape:
            raise ValueError("abscissae and values must be 1-D and of equal length")
        if x.size < 2:
            raise ValueError("need at least 2 sample points")
        if not np.all(x > 0) or not np.all(np.diff(x) > 0):
            raise ValueError("abscissae must be positive and strictly increasing")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("values must be finite and nonnegative")
        if direction not in (NONINCREASING, NONDECREASING):
            raise ValueError(f"unknown direction {direction!r}")
        full = v if origin_value is None else np.concatenate([[origin_value], v])
        steps = np.diff(full)
        if direction == NONINCREASING and np.any(steps > 0):
            raise ValueError("values are not nonincreasing")
        if direction == NONDECREASING and np.any(steps < 0):
            raise ValueError("values are not nondecreasing")
        x.setflags(write=False)
        v.setflags(write=False)
        self.abscissae = x
        self.values = v
        self.direction = direction
        self.origin_value = None if origin_value is None else float(origin_value)

    def __len__(self):
        return self.abscissae.size

    def __repr__(self):
        return (f"SampledMonotoneFunction(n={len(self)}, x=[{self.abscissae[0]:.3g}, "
                f"{self.abscissae[-1]:.3g}], {self.direction})")

    @property
    def value_range(self):
        return float(self.values.min()), float(self.values.max())

    def restrict(self, lo=None, hi=None):
        """The samples with lo <= x <= hi (origin dropped unless lo is None)."""
        x = self.abscissae
        keep = np.ones(x.size, dtype=bool)
        if lo is not None:
            keep &= x >= lo
        if hi is not None:
            keep &= x <= hi
        origin = self.origin_value if lo is None else None
        return SampledMonotoneFunction(x[keep], self.values[keep], self.direction, origin)

    def __call__(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        ax, av = self.abscissae, self.values
        below = xs < ax[0]
        if np.any(xs > ax[-1]) or np.any(xs < 0) or (self.origin_value is None and np.any(below)):
            raise OutOfRange(f"evaluation outside sampled window [{ax[0]}, {ax[-1]}]")
        idx = np.clip(np.searchsorted(ax, xs, side="right") - 1, 0, ax.size - 2)
        x0, x1 = ax[idx], ax[idx + 1]
        v0, v1 = av[idx], av[idx + 1]
        xc = np.maximum(xs, ax[0])
        frac = (np.log(xc) - np.log(x0)) / (np.log(x1) - np.log(x0))
        with np.errstate(divide="ignore", invalid="ignore"):
            loglog = np.exp(np.log(v0) + frac * (np.log(v1) - np.log(v0)))
        lin = v0 + frac * (v1 - v0)
        out = np.where((v0 > 0) & (v1 > 0), loglog, lin)
        out = np.where(xs == x0, v0, np.where(xs == x1, v1, out))
        if np.any(below):
            o = self.origin_value
            out = np.where(below, o + (av[0] - o) * xs / ax[0], out)
        return float(out[0]) if np.ndim(x) == 0 else out

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["abscissa", "value"])
            if self.origin_value is not None:
                w.writerow([format_float(0.0), format_float(self.origin_value)])
            for a, v in zip(self.abscissae, self.values):
                w.writerow([format_float(a), format_float(v)])


def _segment_solve(x0, x1, v0, v1, y):
    """x in [x0, x1] where the interpolant through (x0, v0), (x1, v1) equals y."""
    with np.errstate(divide="ignore", invalid="ignore"):
        loglog = (np.log(y) - np.log(v0)) / (np.log(v1) - np.log(v0))
        lin = (y - v0) / (v1 - v0)
    frac = np.where((v0 > 0) & (v1 > 0), loglog, lin)
    frac = np.clip(np.nan_to_num(frac, nan=0.0), 0.0, 1.0)
    return np.exp(np.log(x0) + frac * (np.log(x1) - np.log(x0)))


def right_inverse(f: SampledMonotoneFunction, y):
    """s with f(s) = y for nonincreasing f; vectorised over y.

    Where f is constant at level y the largest such abscissa is returned.
    The interpolant is log-log linear per segment, so the inverse is solved in
    closed form on the bracketing segment.
    """
    if f.direction != NONINCREASING:
        raise ValueError("right_inverse is implemented for nonincreasing functions")
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    x, v = f.abscissae, f.values
    lo, hi = f.value_range
    bad = (ys < lo) | (ys > hi) | ~np.isfinite(ys)
    if np.any(bad):
        raise OutOfRange(f"{ys[bad][0]} outside the range [{lo}, {hi}] of the sampled function")
    # samples with v >= y form a prefix of length count
    j = np.searchsorted(-v, -ys, side="right") - 1
    k = np.minimum(j + 1, x.size - 1)
    exact = (v[j] == ys) | (j == x.size - 1)
    out = np.where(exact, x[j], _segment_solve(x[j], x[k], v[j], v[k], ys))
    return float(out[0]) if np.ndim(y) == 0 else out


def omega_star(omega: SampledMonotoneFunction, s):
    """min { t >= 0 : omega(t) <= s } on the interpolated samples; vectorised over s.

    Without an origin value the sampled window starts at the first abscissa,
    which is then returned for s >= omega(first abscissa).
    """
    if omega.direction != NONINCREASING:
        raise ValueError("omega_star needs a nonincreasing function")
    ss = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(~(ss > 0)):
        raise ValueError("omega_star is defined for s > 0")
    x, v = omega.abscissae, omega.values
    j = np.searchsorted(-v, -ss, side="left")
    o = omega.origin_value
    at_origin = np.zeros(ss.size, dtype=bool) if o is None else ss >= o
    missing = (j == x.size) & ~at_origin
    if np.any(missing):
        raise NotAttained(f"omega never drops to {ss[missing][0]} before t = {x[-1]}")
    jc = np.clip(j, 1, x.size - 1)
    out = _segment_solve(x[jc - 1], x[jc], v[jc - 1], v[jc], ss)
    if o is None:
        first = np.full(ss.size, x[0])
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            first = np.where(o > v[0], x[0] * (o - ss) / (o - v[0]), 0.0)
    out = np.where(j == 0, first, out)
    out = np.where(at_origin, 0.0, out)
    # near a zero sample the inverse is ill-conditioned; nudge right by ulps so
    # omega(out) <= s holds exactly, falling back to the bracketing node
    live = ~at_origin & (out > 0)
    right = x[np.minimum(j, x.size - 1)]
    for _ in range(64):
        over = live & (omega(np.maximum(out, x[0] if o is None else 0.0)) > ss)
        if not over.any():
            break
        out = np.where(over, np.minimum(np.nextafter(out, np.inf), right), out)
    else:
        out = np.where(live & (omega(out) > ss), right, out)
    return float(out[0]) if np.ndim(s) == 0 else out


# ---------------------------------------------------------------------------
# minimal dominating functions
# ---------------------------------------------------------------------------

def _check_window(op, s_min):
    if isinstance(op, DiagonalOperator):
        lam = op.eigenvalues
        tol = SPECTRUM_TOL
    else:
        lam = op.spectrum
        tol = max(SPECTRUM_TOL, op.eig_tol)
    hit = (np.abs(lam.real) <= tol) & (np.abs(lam) > tol) & (np.abs(lam.imag) >= s_min) & (np.abs(lam.imag) <= 1)
    if np.any(hit):
        raise SpectrumInWindow(f"eigenvalue {lam[hit][0]} lies on iR inside the frequency window")


def _segment_min(values, bounds):
    """min of values[bounds[j]:bounds[j+1]] for each j (inf when empty)."""
    padded = np.append(values, np.inf)
    b = np.asarray(bounds)
    starts = b[:-1]
    mins = np.minimum.reduceat(padded, np.minimum(b, values.size))[:-1]
    return np.where(b[1:] > starts, mins, np.inf)


def diagonal_window_distance(op: DiagonalOperator, s):
    """For ascending positive s_0 < ... < s_{n-1}: per cell j the exact
    min { dist(ir, sigma(A)) : s_j <= |r| <= s_{j+1} } (last entry: |r| = s_{n-1})."""
    re, im = op._by_imag
    s = np.asarray(s, dtype=float)
    absre = np.abs(re)
    # positive side: eigenvalues with s_j <= Im < s_{j+1}
    pos = _segment_min(absre, np.searchsorted(im, s, side="left"))
    # negative side on the mirrored family
    neg_im = -im[::-1]
    neg = _segment_min(absre[::-1], np.searchsorted(neg_im, s, side="left"))
    d_pos = op.distance_to_spectrum(1j * s)
    d_neg = op.distance_to_spectrum(-1j * s)
    ends = np.minimum(d_pos, d_neg)
    cells = np.minimum(np.minimum(pos, neg), np.minimum(ends[:-1], ends[1:]))
    return np.append(cells, ends[-1])


def spectral_candidates(op, grid: FrequencyGrid, limit=4096):
    """|Im lambda| for eigenvalues inside the window, or () for large families.

    Injected into a frequency grid these pin the corners of staircase-shaped
    m. Diagonal families above ``limit`` eigenvalues are left alone: their
    cell suprema are exact anyway.
    """
    lam = op.eigenvalues if isinstance(op, DiagonalOperator) else op.spectrum
    if lam.size > limit:
        return ()
    im = np.abs(lam.imag)
    return tuple(np.unique(im[(im > grid.s_min) & (im < grid.s_max)]).tolist())


def _matrix_samples(op: MatrixOperator, grid: FrequencyGrid):
    s = grid.points()
    lam = op.spectrum
    cand = np.abs(lam.imag)
    cand = cand[(cand >= grid.s_min) & (cand <= grid.s_max)]
    extra = np.abs(np.asarray(grid.extra_candidates, dtype=float))
    extra = extra[(extra >= grid.s_min) & (extra <= grid.s_max)]
    r = np.unique(np.concatenate([s, cand, extra]))
    vals = np.maximum(resolvent_norm(op, r), resolvent_norm(op, -r))
    return r, vals


def cell_sup_resolvent(op, grid: FrequencyGrid):
    """max(||R(ir)||, ||R(-ir)||) sup'd over each grid cell [s_j, s_{j+1}].

    Exact for diagonal operators; for matrices the sup runs over grid points
    plus the imaginary parts of eigenvalues (and extra candidates) in the cell.
    """
    s = grid.points()
    _check_window(op, grid.s_min)
    if isinstance(op, DiagonalOperator):
        d = diagonal_window_distance(op, s)
        if np.any(d <= SPECTRUM_TOL):
            raise SpectrumInWindow("resolvent is numerically singular inside the frequency window")
        return 1.0 / d
    r, vals = _matrix_samples(op, grid)
    cell = np.searchsorted(s, r, side="right") - 1
    cell = np.minimum(cell, s.size - 1)
    out = np.zeros(s.size)
    np.maximum.at(out, cell, vals)
    # each cell also owns its right endpoint
    np.maximum(out[:-1], vals[np.searchsorted(r, s[1:])], out=out[:-1])
    return out


def exact_minimal_m(op: DiagonalOperator, s):
    """m at arbitrary ascending abscissae in (0, 1], exact for diagonal models."""
    s = np.asarray(s, dtype=float)
    if s[0] <= 0 or s[-1] > 1 or np.any(np.diff(s) <= 0):
        raise ValueError("abscissae must be ascending inside (0, 1]")
    _check_window(op, s[0])
    pts = s if s[-1] == 1.0 else np.append(s, 1.0)
    d = diagonal_window_distance(op, pts)
    if np.any(d <= SPECTRUM_TOL):
        raise SpectrumInWindow("resolvent is numerically singular inside the frequency window")
    return np.maximum.accumulate((1.0 / d)[::-1])[::-1][: s.size]


def minimal_m(op, grid: FrequencyGrid | None = None) -> SampledMonotoneFunction:
    """m(s) = sup { ||R(ir, A)|| : s <= |r| <= 1 } at every grid abscissa."""
    grid = grid or FrequencyGrid()
    if grid.s_max != 1.0:
        raise ValueError("minimal_m is defined on (0, 1]; use s_max = 1")
    s = grid.points()
    cells = cell_sup_resolvent(op, grid)
    m = np.maximum.accumulate(cells[::-1])[::-1]
    return SampledMonotoneFunction(s, m, NONINCREASING)


def minimal_omega(op, grid: TimeGrid | None = None) -> SampledMonotoneFunction:
    """omega(t) = sup { ||T(u) A R(1, A)|| : u >= t } on the time grid.

    Diagonal models: the observable is nonincreasing, so the tail beyond t_max
    is the value at t_max. Matrices: the tail is bounded by
    M * ||T(t_max) A R(1, A)|| with M = sup ||T(t)|| estimated on a grid;
    :class:`TailUnbounded` is raised when that estimate keeps growing.
    """
    grid = grid or TimeGrid()
    t = grid.with_zero()
    kt = np.array(kt_observable(op, t), dtype=float)
    tail = 0.0
    if isinstance(op, MatrixOperator):
        try:
            M = semigroup_bound(op)
        except TailUnbounded:
            raise TailUnbounded("spectral abscissa >= 0 and ||T(t)|| is not bounded on the grid") from None
        tail = M * kt[-1]
    run = np.maximum.accumulate(kt[::-1])[::-1]
    run = np.maximum(run, tail)
    return SampledMonotoneFunction(t[1:], run[1:], NONINCREASING, origin_value=run[0])


def sampled_function(fn, grid_points, direction=NONINCREASING):
    """Samples of a callable on the given positive abscissae."""
    x = np.asarray(grid_points, dtype=float)
    return SampledMonotoneFunction(x, np.asarray(fn(x), dtype=float), direction)
