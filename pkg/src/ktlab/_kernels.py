"""Hot loops over large eigenvalue families.

Every kernel exists twice: a numba ``@njit`` version and a vectorised numpy
version. The numba path is used when numba imports and the environment
variable ``KTLAB_DISABLE_NUMBA`` is unset (or ``0``); otherwise the numpy path
is used. Both paths return bitwise-identical results for the reductions here
(max/min are exact in floating point), up to the last ulp of ``exp``.
"""

import os

import numpy as np

_FLAG = os.environ.get("KTLAB_DISABLE_NUMBA", "0").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED

# elements per temporary block in the numpy fallbacks
_BLOCK = 1 << 22


def backend():
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# sup_k exp(t * re_k) * w_k  for every t
# ---------------------------------------------------------------------------

def sup_weighted_decay_numpy(re, weights, times):
    re = np.ascontiguousarray(re, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    out = np.zeros(times.shape[0])
    if re.size == 0 or times.size == 0:
        return out
    step = max(1, _BLOCK // max(1, times.size))
    for lo in range(0, re.size, step):
        r = re[lo:lo + step]
        w = weights[lo:lo + step]
        block = np.exp(np.multiply.outer(times, r))
        block *= w
        np.maximum(out, block.max(axis=1), out=out)
    return out


def _sup_weighted_decay_loop(re, weights, times):
    nt = times.shape[0]
    out = np.zeros(nt)
    floor = 0.0
    for k in range(re.shape[0]):
        w = weights[k]
        # exp(t*re) <= 1, so a weight below every current maximum cannot win
        if w <= floor:
            continue
        r = re[k]
        changed = False
        for j in range(nt):
            v = np.exp(times[j] * r) * w
            if v > out[j]:
                out[j] = v
                changed = True
        if changed:
            floor = out[0]
            for j in range(1, nt):
                if out[j] < floor:
                    floor = out[j]
    return out


# ---------------------------------------------------------------------------
# min_k |q - lambda_k| for eigenvalues sorted by imaginary part
# ---------------------------------------------------------------------------

def nearest_distance_numpy(re_sorted, im_sorted, q_re, q_im):
    re_sorted = np.asarray(re_sorted, dtype=np.float64)
    im_sorted = np.asarray(im_sorted, dtype=np.float64)
    q_re = np.atleast_1d(np.asarray(q_re, dtype=np.float64))
    q_im = np.atleast_1d(np.asarray(q_im, dtype=np.float64))
    n = im_sorted.size
    best = np.full(q_im.shape, np.inf)
    if n == 0:
        return best
    pos = np.searchsorted(im_sorted, q_im)
    width = 4
    active = np.arange(q_im.size)
    done_lo = np.zeros(q_im.size, dtype=np.int64)
    done_hi = np.zeros(q_im.size, dtype=np.int64)
    while active.size:
        lo = np.maximum(pos[active] - width, 0)
        hi = np.minimum(pos[active] + width, n)
        span = np.arange(2 * width)
        idx = lo[:, None] + span[None, :]
        valid = idx < hi[:, None]
        idx = np.where(valid, idx, 0)
        d = np.hypot(re_sorted[idx] - q_re[active, None], im_sorted[idx] - q_im[active, None])
        d = np.where(valid, d, np.inf)
        best[active] = np.minimum(best[active], d.min(axis=1))
        done_lo[active] = lo
        done_hi[active] = hi
        # a neighbour outside the window can only win if its imaginary gap is smaller
        gap_lo = np.where(lo > 0, q_im[active] - im_sorted[np.maximum(lo - 1, 0)], np.inf)
        gap_hi = np.where(hi < n, im_sorted[np.minimum(hi, n - 1)] - q_im[active], np.inf)
        keep = (gap_lo < best[active]) | (gap_hi < best[active])
        active = active[keep]
        width *= 2
    return best


def _nearest_distance_loop(re_sorted, im_sorted, q_re, q_im):
    n = im_sorted.shape[0]
    nq = q_im.shape[0]
    out = np.empty(nq)
    for j in range(nq):
        x = q_re[j]
        y = q_im[j]
        # first index with im >= y
        lo = 0
        hi = n
        while lo < hi:
            mid = (lo + hi) // 2
            if im_sorted[mid] < y:
                lo = mid + 1
            else:
                hi = mid
        best = np.inf
        i = lo
        while i < n:
            dy = im_sorted[i] - y
            if dy >= best:
                break
            d = np.hypot(re_sorted[i] - x, dy)
            if d < best:
                best = d
            i += 1
        i = lo - 1
        while i >= 0:
            dy = y - im_sorted[i]
            if dy >= best:
                break
            d = np.hypot(re_sorted[i] - x, dy)
            if d < best:
                best = d
            i -= 1
        out[j] = best
    return out


if HAVE_NUMBA:
    _sup_weighted_decay_jit = numba.njit(cache=True)(_sup_weighted_decay_loop)
    _nearest_distance_jit = numba.njit(cache=True)(_nearest_distance_loop)

    def sup_weighted_decay_numba(re, weights, times):
        return _sup_weighted_decay_jit(
            np.ascontiguousarray(re, dtype=np.float64),
            np.ascontiguousarray(weights, dtype=np.float64),
            np.ascontiguousarray(times, dtype=np.float64),
        )

    def nearest_distance_numba(re_sorted, im_sorted, q_re, q_im):
        return _nearest_distance_jit(
            np.ascontiguousarray(re_sorted, dtype=np.float64),
            np.ascontiguousarray(im_sorted, dtype=np.float64),
            np.ascontiguousarray(np.atleast_1d(q_re), dtype=np.float64),
            np.ascontiguousarray(np.atleast_1d(q_im), dtype=np.float64),
        )
else:  # pragma: no cover
    sup_weighted_decay_numba = None
    nearest_distance_numba = None


if USE_NUMBA:
    sup_weighted_decay = sup_weighted_decay_numba
    nearest_distance = nearest_distance_numba
else:
    sup_weighted_decay = sup_weighted_decay_numpy
    nearest_distance = nearest_distance_numpy
