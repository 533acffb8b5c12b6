"""Bounded measures on [0, inf): atoms plus exponential-polynomial densities.

A measure is a finite sum of point masses ``w * delta_t`` and density terms

    (c_0 + c_1 u + ... + c_d u^d) exp(-a u),   u = t - shift >= 0,

with ``Re a > 0``. Every Fourier and Laplace transform in the class has a
closed form, and the class is closed under convolution (up to a degree cap).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc

from .errors import InvalidMeasure, LaplaceDomain, NotRepresentable, ParseError

MAX_DEGREE = 16
_CONFLUENT_TOL = 1e-12


@dataclass(frozen=True)
class DensityTerm:
    """``sum_n coeffs[n] u^n exp(-decay u)`` for ``u = t - shift >= 0``."""

    coeffs: tuple
    decay: complex
    shift: float = 0.0

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "decay", complex(self.decay))
        object.__setattr__(self, "shift", float(self.shift))
        if not coeffs:
            raise InvalidMeasure("density term needs at least one coefficient")
        if not self.decay.real > 0:
            raise InvalidMeasure(f"density decay rate must have Re a > 0, got {self.decay}")
        if not (self.shift >= 0 and math.isfinite(self.shift)):
            raise InvalidMeasure(f"density shift must be finite and >= 0, got {self.shift}")
        if not all(np.isfinite(c.real) and np.isfinite(c.imag) for c in coeffs):
            raise InvalidMeasure("density coefficients must be finite")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def moments(self):
        """``c_n * n!`` for each n (the weights of ``1/(z+a)^(n+1)``)."""
        return [c * math.factorial(n) for n, c in enumerate(self.coeffs)]

    def scaled(self, w):
        return DensityTerm(tuple(w * c for c in self.coeffs), self.decay, self.shift)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        u = t - self.shift
        poly = np.polynomial.polynomial.polyval(np.maximum(u, 0.0), np.array(self.coeffs))
        return np.where(u >= 0, poly * np.exp(-self.decay * np.maximum(u, 0.0)), 0.0)


@dataclass(frozen=True)
class BoundedMeasure:
    """Immutable measure; use the module constructors rather than this class directly.

    Atoms at equal locations and density terms with equal (decay, shift) are
    merged on construction, and both lists are kept in a canonical order so
    that equal measures compare equal.
    """

    atoms: tuple = ()
    densities: tuple = field(default=())

    def __post_init__(self):
        merged = {}
        for t, w in self.atoms:
            t = float(t)
            w = complex(w)
            if not (t >= 0 and math.isfinite(t)):
                raise InvalidMeasure(f"atom location must be finite and >= 0, got {t}")
            if not (np.isfinite(w.real) and np.isfinite(w.imag)):
                raise InvalidMeasure("atom weight must be finite")
            merged[t] = merged.get(t, 0j) + w
        atoms = tuple((t, w) for t, w in sorted(merged.items()) if w != 0)

        groups = {}
        for term in self.densities:
            if not isinstance(term, DensityTerm):
                term = DensityTerm(*term)
            key = (term.shift, term.decay.real, term.decay.imag)
            if key in groups:
                old = groups[key].coeffs
                n = max(len(old), len(term.coeffs))
                c = [0j] * n
                for i, v in enumerate(old):
                    c[i] += v
                for i, v in enumerate(term.coeffs):
                    c[i] += v
                groups[key] = DensityTerm(tuple(c), term.decay, term.shift)
            else:
                groups[key] = term
        densities = tuple(groups[k] for k in sorted(groups) if not groups[k].is_zero())
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "densities", densities)

    def __add__(self, other):
        if not isinstance(other, BoundedMeasure):
            return NotImplemented
        return BoundedMeasure(self.atoms + other.atoms, self.densities + other.densities)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        if not isinstance(other, BoundedMeasure):
            return NotImplemented
        return self + (-other)

    def __mul__(self, w):
        w = complex(w)
        return BoundedMeasure(
            tuple((t, w * x) for t, x in self.atoms),
            tuple(d.scaled(w) for d in self.densities),
        )

    __rmul__ = __mul__

    @property
    def min_decay(self):
        """Smallest Re a over the density terms (inf when there are none)."""
        return min((d.decay.real for d in self.densities), default=math.inf)

    def __str__(self):
        return format_measure(self)


# -- constructors -----------------------------------------------------------

def dirac(t=0.0, weight=1.0):
    return BoundedMeasure(atoms=((t, weight),))


def exp_density(decay, coeffs=(1.0,), shift=0.0):
    return BoundedMeasure(densities=(DensityTerm(tuple(coeffs), decay, shift),))


def exponential():
    """The density e(t) = exp(-t)."""
    return exp_density(1.0, (1.0,))


def kt_measure():
    """e - delta_0, whose functional calculus gives A R(1, A)."""
    return exponential() - dirac(0.0)


def zero_measure():
    return BoundedMeasure()


# -- transforms -------------------------------------------------------------

def laplace(mu: BoundedMeasure, z):
    """Laplace transform ``int exp(-z t) dmu(t)``; vectorised over ``z``."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    for t, w in mu.atoms:
        out += w * np.exp(-z * t)
    for term in mu.densities:
        zz = z + term.decay
        if np.any(zz.real <= 0):
            raise LaplaceDomain(
                f"Laplace transform requested at Re z <= -Re a = {-term.decay.real}"
            )
        acc = np.zeros(z.shape, dtype=complex)
        inv = 1.0 / zz
        p = inv.copy()
        for mom in term.moments():
            acc += mom * p
            p = p * inv
        if term.shift:
            acc = acc * np.exp(-z * term.shift)
        out += acc
    return out if out.ndim else complex(out)


def fourier(mu: BoundedMeasure, s):
    """``(F mu)(s) = int exp(-i s t) dmu(t)``, the e^{-ist} sign convention."""
    s = np.asarray(s, dtype=float)
    return laplace(mu, 1j * s)


# -- convolution ------------------------------------------------------------

def _partial_fractions(a, p, b, q):
    """Coefficients of 1/((z+a)^p (z+b)^q) over the powers 1/(z+a)^j, 1/(z+b)^j."""
    d = b - a
    A = {}
    B = {}
    for k in range(p):
        A[p - k] = (-1) ** k * math.comb(q + k - 1, k) * d ** (-q - k)
    for k in range(q):
        B[q - k] = (-1) ** k * math.comb(p + k - 1, k) * (-d) ** (-p - k)
    return A, B


def _convolve_terms(f: DensityTerm, g: DensityTerm):
    shift = f.shift + g.shift
    a, b = f.decay, g.decay
    scale = max(1.0, abs(a), abs(b))
    confluent = abs(a - b) <= _CONFLUENT_TOL * scale
    # accumulate Laplace-side weights of 1/(z+decay)^j, then map back
    fa = {}
    fb = {}
    for m, cm in enumerate(f.moments()):
        if cm == 0:
            continue
        for n, dn in enumerate(g.moments()):
            if dn == 0:
                continue
            w = cm * dn
            if confluent:
                j = m + n + 2
                fa[j] = fa.get(j, 0j) + w
            else:
                A, B = _partial_fractions(a, m + 1, b, n + 1)
                for j, v in A.items():
                    fa[j] = fa.get(j, 0j) + w * v
                for j, v in B.items():
                    fb[j] = fb.get(j, 0j) + w * v
    out = []
    for decay, weights in ((a, fa), (b, fb)):
        if not weights:
            continue
        deg = max(weights) - 1
        if deg > MAX_DEGREE:
            raise NotRepresentable(
                f"convolution needs polynomial degree {deg} > cap {MAX_DEGREE}"
            )
        coeffs = [0j] * (deg + 1)
        for j, v in weights.items():
            coeffs[j - 1] += v / math.factorial(j - 1)
        out.append(DensityTerm(tuple(coeffs), decay, shift))
    return out


def convolve(mu: BoundedMeasure, nu: BoundedMeasure) -> BoundedMeasure:
    """Convolution; the transform of the result is the product of transforms.

    Equal decay rates are handled by degree growth; results above degree
    ``MAX_DEGREE`` raise :class:`NotRepresentable`.
    """
    atoms = []
    terms = []
    for s, v in mu.atoms:
        for t, w in nu.atoms:
            atoms.append((s + t, v * w))
        for g in nu.densities:
            terms.append(DensityTerm(tuple(v * c for c in g.coeffs), g.decay, g.shift + s))
    for f in mu.densities:
        for t, w in nu.atoms:
            terms.append(DensityTerm(tuple(w * c for c in f.coeffs), f.decay, f.shift + t))
        for g in nu.densities:
            terms.extend(_convolve_terms(f, g))
    return BoundedMeasure(tuple(atoms), tuple(terms))


convolve_atoms = convolve


# -- total variation --------------------------------------------------------

def _moment_integral(n, beta, lo, hi):
    """int_lo^hi t^n exp(-beta t) dt for beta > 0, 0 <= lo <= hi <= inf."""
    full = math.factorial(n) / beta ** (n + 1)
    q_lo = gammaincc(n + 1, beta * lo)
    q_hi = 0.0 if math.isinf(hi) else gammaincc(n + 1, beta * hi)
    return full * (q_lo - q_hi)


def _term_variation(term: DensityTerm):
    beta = term.decay.real
    c = np.array(term.coeffs)
    # common phase -> |p(u)| is |real polynomial|, integrate it exactly
    pivot = c[np.argmax(np.abs(c))]
    real = c / (pivot / abs(pivot))
    if np.all(np.abs(real.imag) <= 1e-14 * np.max(np.abs(real))):
        r = real.real
        roots = np.roots(r[::-1]) if len(r) > 1 else np.array([])
        cuts = sorted(
            float(x.real) for x in roots
            if abs(x.imag) <= 1e-10 * max(1.0, abs(x)) and x.real > 0
        )
        edges = [0.0] + cuts + [math.inf]
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            seg = sum(rn * _moment_integral(n, beta, lo, hi) for n, rn in enumerate(r))
            total += abs(seg)
        return total
    return float(sum(abs(cn) * math.factorial(n) / beta ** (n + 1) for n, cn in enumerate(c)))


def total_variation(mu: BoundedMeasure) -> float:
    """Upper bound on |mu|([0, inf)); exact when at most one density term is present
    and its polynomial has coefficients of a common phase."""
    return float(sum(abs(w) for _, w in mu.atoms) + sum(_term_variation(d) for d in mu.densities))


# -- text grammar -----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<op>[+-])|(?P<name>[A-Za-z_]\w*)\s*\((?P<args>[^()]*)\))")


def _number(text, what):
    text = text.strip().replace(" ", "")
    try:
        return complex(text)
    except ValueError:
        raise ParseError(f"bad number {text!r} in {what}") from None


def _real(text, what):
    v = _number(text, what)
    if v.imag:
        raise ParseError(f"{what} must be real, got {text!r}")
    return v.real


def _primary(name, args):
    if name == "atom":
        parts = [p for p in args.split(",")]
        if len(parts) != 3:
            raise ParseError(f"atom(t, re, im) takes 3 arguments, got {len(parts)}")
        t = _real(parts[0], "atom location")
        w = complex(_real(parts[1], "atom weight"), _real(parts[2], "atom weight"))
        return dirac(t, w)
    if name == "expdensity":
        sections = args.split(";")
        if len(sections) not in (2, 3):
            raise ParseError("expdensity(a_re, a_im; c0, c1, ...[; shift]) expected")
        head = sections[0].split(",")
        if len(head) != 2:
            raise ParseError("expdensity needs a_re, a_im before ';'")
        a = complex(_real(head[0], "decay"), _real(head[1], "decay"))
        coeffs = [_number(c, "coefficient") for c in sections[1].split(",") if c.strip()]
        if not coeffs:
            raise ParseError("expdensity needs at least one coefficient")
        shift = _real(sections[2], "shift") if len(sections) == 3 else 0.0
        return exp_density(a, coeffs, shift)
    raise ParseError(f"unknown measure primitive {name!r}")


def parse_measure(text: str) -> BoundedMeasure:
    """Parse ``atom(t, re, im)`` / ``expdensity(a_re, a_im; c0, c1, ...)`` sums.

    An optional third section ``; shift`` in ``expdensity`` delays the density.
    """
    text = text.strip()
    if not text:
        raise ParseError("empty measure text")
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"cannot parse measure near {text[pos:]!r}")
        pos = m.end()
        tokens.append(m)
    total = zero_measure()
    sign = 1
    expect_term = True
    for i, tok in enumerate(tokens):
        op = tok.group("op")
        if op:
            if not expect_term:
                sign = -1 if op == "-" else 1
                expect_term = True
            elif i == 0:
                sign = -1 if op == "-" else 1
            else:
                raise ParseError("two operators in a row in measure")
            continue
        if not expect_term:
            raise ParseError("missing '+' or '-' between measure terms")
        try:
            term = _primary(tok.group("name"), tok.group("args"))
        except InvalidMeasure as exc:
            raise ParseError(str(exc)) from None
        total = total + term * sign
        expect_term = False
    if expect_term:
        raise ParseError("measure text ends with an operator")
    return total


def _fmt(x):
    return repr(float(x))


def _fmt_complex(c):
    if not c.imag:
        return _fmt(c.real)
    sign = "-" if c.imag < 0 else "+"
    return f"{_fmt(c.real)}{sign}{_fmt(abs(c.imag))}j"


def format_measure(mu: BoundedMeasure) -> str:
    """Inverse of :func:`parse_measure` (up to merging and ordering)."""
    parts = []
    for t, w in mu.atoms:
        parts.append(f"atom({_fmt(t)}, {_fmt(w.real)}, {_fmt(w.imag)})")
    for d in mu.densities:
        cs = ", ".join(_fmt_complex(c) for c in d.coeffs)
        tail = f"; {_fmt(d.shift)}" if d.shift else ""
        parts.append(f"expdensity({_fmt(d.decay.real)}, {_fmt(d.decay.imag)}; {cs}{tail})")
    return " + ".join(parts) if parts else "0"
