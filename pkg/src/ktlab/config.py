"""Scenario files: flat ``key = value`` lines grouped under ``[name]`` headers.

Keys that appear before the first header belong to a scenario named after the
file stem. ``#`` starts a comment. Example::

    [alpha2]
    operator = diagonal polynomial(alpha=2, N=1000000)
    checks = Dichotomy_2_2, LowerBound_2_4, UpperBound_3_5
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .dominating import FrequencyGrid, TimeGrid, spectral_candidates
from .errors import KTLabError, ParseError, RangeError, UnknownKey
from .measures import kt_measure, parse_measure
from .operators import (
    DiagonalOperator,
    MatrixOperator,
    exponential_profile,
    lacunary_profile,
    ladder_profile,
    polynomial_profile,
    random_bounded_matrix,
)
from .verify import THEOREM_IDS

DEFAULT_MEASURE = "expdensity(1, 0; 1) - atom(0, 1, 0)"

_PROFILES = {
    "polynomial": (polynomial_profile, {"alpha": float, "N": int, "zero": int}, {"alpha", "N"}),
    "exponential": (exponential_profile, {"N": int, "zero": int}, set()),
    "lacunary": (lacunary_profile, {"J": int, "base": float, "zero": int}, set()),
    "ladder": (ladder_profile, {"N": int}, set()),
}

_CALL = re.compile(r"^(?P<name>[A-Za-z_]\w*)\s*\((?P<args>.*)\)$", re.S)


@dataclass(frozen=True)
class OperatorSpec:
    kind: str  # "diagonal" or "matrix"
    form: str  # profile name, "eigenvalues", "entries" or "random"
    args: tuple  # ((key, value), ...) or positional values
    text: str

    def build(self, seed=0):
        kw = dict(self.args) if self.form not in ("eigenvalues", "entries") else None
        if self.kind == "diagonal":
            if self.form == "eigenvalues":
                return DiagonalOperator(np.array(self.args, dtype=complex), label=self.text)
            fn = _PROFILES[self.form][0]
            return fn(**{k: bool(v) if k == "zero" else v for k, v in kw.items()})
        if self.form == "entries":
            return MatrixOperator(np.array(self.args, dtype=complex), label=self.text)
        rng = np.random.default_rng(kw.get("seed", seed))
        return random_bounded_matrix(kw["n"], rng, kw.get("abscissa", -0.1))


def _kwargs(args, types, required, what):
    out = {}
    for part in filter(None, (p.strip() for p in args.split(","))):
        if "=" not in part:
            raise ValueError(f"{what}: expected key=value, got {part!r}")
        k, v = (x.strip() for x in part.split("=", 1))
        if k not in types:
            raise ValueError(f"{what}: unknown argument {k!r}")
        try:
            out[k] = types[k](float(v)) if types[k] is int else types[k](v)
        except ValueError:
            raise ValueError(f"{what}: bad value {v!r} for {k}") from None
        if types[k] is int and float(v) != int(float(v)):
            raise ValueError(f"{what}: {k} must be an integer")
    missing = required - out.keys()
    if missing:
        raise ValueError(f"{what}: missing {', '.join(sorted(missing))}")
    return tuple(sorted(out.items()))


def parse_operator(text: str) -> OperatorSpec:
    """Parse an operator descriptor such as ``diagonal polynomial(alpha=2, N=1000)``."""
    text = text.strip()
    kind, _, rest = text.partition(" ")
    rest = rest.strip()
    if kind == "diagonal":
        m = _CALL.match(rest)
        if not m:
            raise ValueError(f"bad diagonal descriptor {rest!r}")
        name, args = m["name"], m["args"]
        if name == "eigenvalues":
            vals = tuple(complex(a.replace(" ", "")) for a in args.split(",") if a.strip())
            if not vals:
                raise ValueError("eigenvalues() needs at least one value")
            return OperatorSpec(kind, name, vals, text)
        if name not in _PROFILES:
            raise ValueError(f"unknown diagonal profile {name!r}")
        _, types, required = _PROFILES[name]
        return OperatorSpec(kind, name, _kwargs(args, types, required, name), text)
    if kind == "matrix":
        if rest.startswith("["):
            try:
                rows = ast.literal_eval(rest)
            except (ValueError, SyntaxError):
                raise ValueError(f"bad matrix literal {rest!r}") from None
            arr = np.array(rows, dtype=complex)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.size == 0:
                raise ValueError("matrix literal must be a nonempty square list of rows")
            return OperatorSpec(kind, "entries", tuple(map(tuple, arr.tolist())), text)
        m = _CALL.match(rest)
        if not m or m["name"] != "random":
            raise ValueError(f"bad matrix descriptor {rest!r}")
        args = _kwargs(m["args"], {"n": int, "seed": int, "abscissa": float}, {"n"}, "random")
        return OperatorSpec(kind, "random", args, text)
    raise ValueError(f"operator must start with 'diagonal' or 'matrix', got {kind!r}")


@dataclass(frozen=True)
class Scenario:
    name: str
    operator: OperatorSpec
    measure: str = DEFAULT_MEASURE
    checks: tuple = ()
    epsilon: float = 0.1
    c: float = 0.5
    log_c: float = 1.0
    C_scan: tuple = (0.1, 1.0, 10.0)
    T_max: float = 1e6
    S_min: float = 1e-6
    points_per_decade: int = 16
    dominating: str = "minimal"
    strict: bool = False
    description: str = ""

    def build_operator(self, seed=0):
        return self.operator.build(seed)

    def build_measure(self):
        return parse_measure(self.measure) if self.measure else kt_measure()

    def time_grid(self):
        return TimeGrid(t_max=self.T_max, points_per_decade=self.points_per_decade)

    def frequency_grid(self, op=None):
        """Log grid on [S_min, 1]; with ``op``, small spectra add their imaginary parts."""
        grid = FrequencyGrid(s_min=self.S_min, points_per_decade=self.points_per_decade)
        return grid if op is None else grid.with_candidates(spectral_candidates(op, grid))

    def refined(self):
        return replace(self, points_per_decade=2 * self.points_per_decade)


def _floats(v):
    return tuple(float(x) for x in v.split(",") if x.strip())


def _bool(v):
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


def _checks(v):
    out = tuple(x.strip() for x in v.split(",") if x.strip())
    for c in out:
        if c not in THEOREM_IDS:
            raise ValueError(f"unknown check {c!r}; known: {', '.join(THEOREM_IDS)}")
    return out


def _dominating(v):
    v = v.strip()
    if v not in ("minimal", "log"):
        raise ValueError("dominating must be 'minimal' or 'log'")
    return v


_KEYS = {
    "operator": parse_operator,
    "measure": lambda v: (parse_measure(v), v.strip())[1],
    "checks": _checks,
    "epsilon": float,
    "c": float,
    "log_c": float,
    "C_scan": _floats,
    "T_max": float,
    "S_min": float,
    "points_per_decade": lambda v: int(v.strip()),
    "dominating": _dominating,
    "strict": _bool,
    "description": str.strip,
}

_RANGES = {
    "epsilon": (lambda x: 0 < x < 1, "epsilon must lie in (0, 1)"),
    "c": (lambda x: 0 < x < 1, "c must lie in (0, 1)"),
    "log_c": (lambda x: x > 0, "log_c must be positive"),
    "C_scan": (lambda xs: len(xs) > 0 and all(x > 0 for x in xs), "C_scan needs positive values"),
    "T_max": (lambda x: x > 1, "T_max must exceed 1"),
    "S_min": (lambda x: 0 < x < 1, "S_min must lie in (0, 1)"),
    "points_per_decade": (lambda x: x >= 4, "points_per_decade must be >= 4"),
}


def _finish(name, entries, line):
    if "operator" not in entries:
        raise ParseError(f"scenario [{name}] has no operator", line)
    return Scenario(name=name, **{k: v for k, (v, _) in entries.items()})


def parse_config_text(text: str, default_name="default"):
    scenarios = []
    names = set()
    current, entries, start = None, {}, 0

    def close():
        if current is None and not entries:
            return
        name = current if current is not None else default_name
        if name in names:
            raise ParseError(f"duplicate scenario name {name!r}", start)
        names.add(name)
        scenarios.append(_finish(name, entries, start))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or not line[1:-1].strip():
                raise ParseError(f"bad section header {raw.strip()!r}", lineno)
            close()
            current, entries, start = line[1:-1].strip(), {}, lineno
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (x.strip() for x in line.split("=", 1))
        if key not in _KEYS:
            raise UnknownKey(f"unknown key {key!r}", lineno)
        if key in entries:
            raise ParseError(f"key {key!r} given twice", lineno)
        if not entries and current is None:
            start = lineno
        try:
            parsed = _KEYS[key](value)
        except (ValueError, KTLabError) as exc:
            raise ParseError(f"{key}: {exc}", lineno) from None
        if key in _RANGES and not _RANGES[key][0](parsed):
            raise RangeError(_RANGES[key][1] + f", got {value}", lineno)
        entries[key] = (parsed, lineno)
    close()
    return scenarios


def parse_config(path) -> list:
    """Read a scenario file; defaults fill every key that is not given."""
    path = Path(path)
    return parse_config_text(path.read_text(), default_name=path.stem)
