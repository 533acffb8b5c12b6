"""Semigroup generators and the operator norms built from them.

Two models are supported:

* :class:`DiagonalOperator` -- a normal generator given by its eigenvalues.
  Every norm is an exact supremum over the eigenvalue family, so families of
  10^6 eigenvalues can stand in for infinite-dimensional examples.
* :class:`MatrixOperator` -- a dense complex matrix. Norms are largest
  singular values, the semigroup is a matrix exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy.special import gammaincc

from . import _kernels
from .errors import (
    InvalidOperator,
    LaplaceDomain,
    NegativeTime,
    SingularMatrix,
    SpectrumHit,
    TailUnbounded,
)
from .linalg import expm, sigma_max, spectral_abscissa
from .measures import BoundedMeasure, laplace

SPECTRUM_TOL = 1e-14


def _readonly(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiagonalOperator:
    eigenvalues: np.ndarray
    label: str = ""
    profile: str | None = None

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.eigenvalues, dtype=complex)).ravel()
        if lam.size == 0:
            raise InvalidOperator("a diagonal operator needs at least one eigenvalue")
        if not np.all(np.isfinite(lam)):
            raise InvalidOperator("eigenvalues must be finite")
        if np.any(lam.real > 0):
            worst = lam[np.argmax(lam.real)]
            raise InvalidOperator(f"eigenvalue {worst} has positive real part")
        # np.unique sorts lexicographically (real, imag); also removes repeated zeros
        lam = np.unique(lam)
        object.__setattr__(self, "eigenvalues", _readonly(lam))

    @property
    def n(self):
        return self.eigenvalues.size

    def __repr__(self):
        name = self.label or self.profile or "diagonal"
        return f"DiagonalOperator({name!r}, n={self.n})"

    @cached_property
    def _by_imag(self):
        order = np.argsort(self.eigenvalues.imag, kind="stable")
        lam = self.eigenvalues[order]
        return _readonly(lam.real), _readonly(lam.imag)

    @cached_property
    def kt_weights(self):
        """|lambda / (1 - lambda)| per eigenvalue."""
        lam = self.eigenvalues
        return _readonly(np.abs(lam / (1.0 - lam)))

    @cached_property
    def _memo(self):
        return {}

    def distance_to_spectrum(self, z):
        """min_k |z - lambda_k| for an array of complex points."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        re, im = self._by_imag
        return _kernels.nearest_distance(re, im, z.real, z.imag)

    def contains_zero(self):
        return bool(np.any(self.eigenvalues == 0))


@dataclass(frozen=True, eq=False)
class MatrixOperator:
    entries: np.ndarray
    raw: bool = False
    label: str = ""

    def __post_init__(self):
        A = np.asarray(self.entries, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise InvalidOperator(f"matrix generator must be square and nonempty, got {A.shape}")
        if not np.all(np.isfinite(A)):
            raise InvalidOperator("matrix entries must be finite")
        object.__setattr__(self, "entries", _readonly(A))

    @classmethod
    def bounded(cls, entries, tol=1e-10, label=""):
        """Constructor enforcing spectral abscissa <= tol * max(1, ||A||)."""
        op = cls(entries, raw=False, label=label)
        scale = max(1.0, np.linalg.norm(op.entries, 2))
        if op.spectral_abscissa > tol * scale:
            raise InvalidOperator(
                f"spectral abscissa {op.spectral_abscissa:.3g} > 0; use MatrixOperator.raw"
            )
        return op

    @classmethod
    def from_raw(cls, entries, label=""):
        return cls(entries, raw=True, label=label)

    @property
    def n(self):
        return self.entries.shape[0]

    def __repr__(self):
        return f"MatrixOperator({self.label!r}, n={self.n}, raw={self.raw})"

    @cached_property
    def spectrum(self):
        return _readonly(np.linalg.eigvals(self.entries))

    @cached_property
    def spectral_abscissa(self):
        return float(np.max(self.spectrum.real))

    @cached_property
    def eig_tol(self):
        """Tolerance for deciding that a computed eigenvalue is 0 or on iR."""
        return 1e-10 * max(1.0, np.linalg.norm(self.entries, 2))

    @cached_property
    def kt_factor(self):
        """A (I - A)^{-1}, computed as (I - A)^{-1} A."""
        ident = np.eye(self.n)
        try:
            return _readonly(np.linalg.solve(ident - self.entries, self.entries))
        except np.linalg.LinAlgError as exc:
            raise SingularMatrix("I - A is singular") from exc

    def contains_zero(self):
        return bool(np.any(np.abs(self.spectrum) <= self.eig_tol))

    def propagator(self, t):
        return expm(t * self.entries)


OperatorModel = Union[DiagonalOperator, MatrixOperator]


def embed(op: DiagonalOperator) -> MatrixOperator:
    """The same generator as a dense diagonal matrix."""
    return MatrixOperator(np.diag(op.eigenvalues), label=op.label or (op.profile or ""))


def eigenvalues(op: OperatorModel) -> np.ndarray:
    if isinstance(op, DiagonalOperator):
        return op.eigenvalues
    return op.spectrum


def on_axis(op: OperatorModel) -> np.ndarray:
    """Eigenvalues on the imaginary axis (exactly for diagonal, within eig_tol for matrices)."""
    lam = eigenvalues(op)
    if isinstance(op, DiagonalOperator):
        return lam[lam.real == 0]
    return lam[np.abs(lam.real) <= op.eig_tol]


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def polynomial_profile(alpha, N, zero=True):
    """lambda_k = -k^-alpha + i/k, k = 1..N (resolvent ~ s^-alpha near 0)."""
    k = np.arange(1, int(N) + 1, dtype=float)
    lam = -(k ** -float(alpha)) + 1j / k
    if zero:
        lam = np.append(lam, 0.0)
    return DiagonalOperator(lam, profile=f"polynomial(alpha={alpha:g}, N={int(N)}, zero={int(zero)})")


def exponential_profile(N=40, zero=True):
    """lambda_k = -e^-k + i/k (resolvent ~ exp(1/s), logarithmic decay)."""
    k = np.arange(1, int(N) + 1, dtype=float)
    lam = -np.exp(-k) + 1j / k
    if zero:
        lam = np.append(lam, 0.0)
    return DiagonalOperator(lam, profile=f"exponential(N={int(N)}, zero={int(zero)})")


def lacunary_profile(J=8, base=1.5, zero=True):
    """lambda_j = -exp(-base^j) + i base^-j: a lacunary family decaying like 1/log t."""
    j = np.arange(1, int(J) + 1, dtype=float)
    re = -np.exp(-(base ** j))
    if np.any(re == 0):
        raise InvalidOperator("lacunary profile underflows; lower J or base")
    lam = re + 1j * base ** -j
    if zero:
        lam = np.append(lam, 0.0)
    return DiagonalOperator(lam, profile=f"lacunary(J={int(J)}, base={base:g}, zero={int(zero)})")


def ladder_profile(N=30):
    """lambda_k = -e^-k + i k: resolvent unbounded along iR (not asymptotically analytic)."""
    k = np.arange(1, int(N) + 1, dtype=float)
    return DiagonalOperator(-np.exp(-k) + 1j * k, profile=f"ladder(N={int(N)})")


def random_bounded_matrix(n, rng, abscissa=-0.1):
    """Complex Gaussian matrix shifted so its spectral abscissa equals ``abscissa``."""
    G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)
    A = G - (spectral_abscissa(G) - abscissa) * np.eye(n)
    return MatrixOperator.bounded(A)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def _times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise NegativeTime(f"time must be >= 0, got {t[t < 0] if t.ndim else t}")
    return t


def _scalar_or_array(values, like):
    return float(values[0]) if np.ndim(like) == 0 else values


def resolvent_norm(op: OperatorModel, s):
    """||R(is, A)||; ``s`` may be a scalar or an array."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if isinstance(op, DiagonalOperator):
        d = op.distance_to_spectrum(1j * s_arr)
        if np.any(d <= SPECTRUM_TOL):
            bad = s_arr[np.argmin(d)]
            raise SpectrumHit(f"is = {bad}i lies within {SPECTRUM_TOL} of the spectrum")
        return _scalar_or_array(1.0 / d, s)
    out = np.empty(s_arr.size)
    lam = op.spectrum
    ident = np.eye(op.n)
    for j, sj in enumerate(s_arr):
        if np.min(np.abs(1j * sj - lam)) <= SPECTRUM_TOL:
            raise SpectrumHit(f"is = {sj}i lies within {SPECTRUM_TOL} of an eigenvalue")
        sv = np.linalg.svd(1j * sj * ident - op.entries, compute_uv=False)
        if sv[-1] == 0.0:
            raise SingularMatrix(f"isI - A is singular at s = {sj}")
        out[j] = 1.0 / sv[-1]
    return _scalar_or_array(out, s)


def propagator_norm(op: OperatorModel, t):
    """||T(t)||."""
    t_arr = np.atleast_1d(_times(t))
    if isinstance(op, DiagonalOperator):
        out = np.exp(t_arr * np.max(op.eigenvalues.real))
    else:
        out = np.array([sigma_max(op.propagator(tj)) for tj in t_arr])
    return _scalar_or_array(out, t)


def kt_observable(op: OperatorModel, t):
    """||T(t) A R(1, A)||, the quantity whose decay the rate theorems describe."""
    t_arr = np.atleast_1d(_times(t))
    if isinstance(op, DiagonalOperator):
        key = ("kt", t_arr.tobytes())
        out = op._memo.get(key)
        if out is None:
            out = _kernels.sup_weighted_decay(op.eigenvalues.real, op.kt_weights, t_arr)
            out.setflags(write=False)
            op._memo[key] = out
    else:
        B = op.kt_factor
        out = np.array([sigma_max(op.propagator(tj) @ B) for tj in t_arr])
    return _scalar_or_array(out, t)


def _check_laplace_domain(op, mu):
    if not mu.densities:
        return
    a = mu.min_decay
    s = float(np.max(eigenvalues(op).real))
    if not s < a:
        raise LaplaceDomain(f"spectral abscissa {s} not below density decay {a}")


def diagonal_multipliers(op: DiagonalOperator, mu: BoundedMeasure) -> np.ndarray:
    """int exp(lambda_k t) dmu(t) = L(mu)(-lambda_k) for every eigenvalue."""
    _check_laplace_domain(op, mu)
    return np.atleast_1d(laplace(mu, -op.eigenvalues))


def hat_mu(op: OperatorModel, mu: BoundedMeasure, method="closed"):
    """The operator int T(t) dmu(t).

    For a :class:`MatrixOperator` a dense matrix is returned. For a
    :class:`DiagonalOperator` the result is diagonal and is returned as the
    1-D array of its diagonal entries.

    ``method="quadrature"`` integrates the densities numerically (matrices
    only) and exists to cross-check the closed form.
    """
    if isinstance(op, DiagonalOperator):
        if method != "closed":
            raise ValueError("quadrature path is only implemented for matrices")
        return diagonal_multipliers(op, mu)
    _check_laplace_domain(op, mu)
    if method == "quadrature":
        return hat_mu_quadrature(op, mu)
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    n = op.n
    ident = np.eye(n, dtype=complex)
    out = np.zeros((n, n), dtype=complex)
    for t, w in mu.atoms:
        out += w * (ident if t == 0 else op.propagator(t))
    for term in mu.densities:
        R = np.linalg.solve(term.decay * ident - op.entries, ident)
        acc = np.zeros((n, n), dtype=complex)
        P = R
        for mom in term.moments():
            acc += mom * P
            P = P @ R
        if term.shift:
            acc = op.propagator(term.shift) @ acc
        out += acc
    return out


def mu_observable(op: OperatorModel, mu: BoundedMeasure, t):
    """||T(t) hat_mu(T)||."""
    t_arr = np.atleast_1d(_times(t))
    if isinstance(op, DiagonalOperator):
        weights = np.abs(diagonal_multipliers(op, mu))
        out = _kernels.sup_weighted_decay(op.eigenvalues.real, weights, t_arr)
    else:
        H = hat_mu(op, mu)
        out = np.array([sigma_max(op.propagator(tj) @ H) for tj in t_arr])
    return _scalar_or_array(out, t)


# ---------------------------------------------------------------------------
# quadrature cross-check for hat_mu
# ---------------------------------------------------------------------------

_GL_ORDER = 8


def _tail_moment(n, beta, T):
    return math.factorial(n) / beta ** (n + 1) * gammaincc(n + 1, beta * T)


def semigroup_bound(op: MatrixOperator, horizon=64.0, step=0.25):
    """sup ||T(t)|| estimated on a uniform grid over [0, horizon]."""
    P = op.propagator(step)
    X = np.eye(op.n, dtype=complex)
    best = 1.0
    for _ in range(int(round(horizon / step))):
        X = X @ P
        best = max(best, sigma_max(X))
    if op.spectral_abscissa >= 0 and sigma_max(X) > (1 + 1e-6) * sigma_max(op.propagator(horizon / 2)):
        raise TailUnbounded("semigroup still growing at the end of the estimation window")
    return best


def _panel_sum(op, term, h, T_cut):
    x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    x = 0.5 * h * (x + 1.0)
    w = 0.5 * h * w
    nodes = [op.propagator(xk) for xk in x]
    P = op.propagator(h)
    n = op.n
    acc = np.zeros((n, n), dtype=complex)
    Pj = np.eye(n, dtype=complex)
    coeffs = np.array(term.coeffs)
    for j in range(int(round(T_cut / h))):
        u = j * h + x
        f = np.polynomial.polynomial.polyval(u, coeffs) * np.exp(-term.decay * u) * w
        S = sum(fk * Nk for fk, Nk in zip(f, nodes))
        acc += Pj @ S
        Pj = Pj @ P
    return acc


def hat_mu_quadrature(op: MatrixOperator, mu: BoundedMeasure, tol=1e-10):
    """Composite Gauss-Legendre evaluation of int T(t) dmu(t).

    Atoms are exact. Each density is integrated on [0, T_cut], with T_cut
    chosen so that M * int_{T_cut}^inf |density| < tol, M = sup ||T(t)||;
    panels are halved until two successive sums agree.
    """
    n = op.n
    ident = np.eye(n, dtype=complex)
    out = np.zeros((n, n), dtype=complex)
    for t, w in mu.atoms:
        out += w * (ident if t == 0 else op.propagator(t))
    if not mu.densities:
        return out
    M = semigroup_bound(op)
    for term in mu.densities:
        beta = term.decay.real
        absc = [abs(c) for c in term.coeffs]

        def tail(T):
            return M * sum(c * _tail_moment(k, beta, T) for k, c in enumerate(absc) if c)

        T_cut = 1.0
        while tail(T_cut) >= tol:
            T_cut *= 2.0
        h = 1.0
        prev = _panel_sum(op, term, h, math.ceil(T_cut / h) * h)
        while True:
            h /= 2.0
            cur = _panel_sum(op, term, h, math.ceil(T_cut / h) * h)
            scale = max(1.0, np.linalg.norm(cur, 2))
            if np.linalg.norm(cur - prev, 2) <= 1e-12 * scale or h < 1.0 / 64:
                break
            prev = cur
        if term.shift:
            cur = op.propagator(term.shift) @ cur
        out += cur
    return out
