"""Command-line scenario runner.

Exit codes: 0 success, 1 configuration or scenario error, 2 some check
inconsistent, 3 some check inconclusive (only under ``--strict`` or a
scenario's ``strict = true``), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .config import Scenario, parse_config
from .dominating import (
    SampledMonotoneFunction,
    exact_minimal_m,
    format_float,
    minimal_m,
    minimal_omega,
)
from .errors import ConfigError, KTLabError
from .operators import DiagonalOperator, kt_observable, mu_observable, resolvent_norm
from .verify import (
    DICHOTOMY,
    INCONCLUSIVE,
    INCONSISTENT,
    LOG_CHARACTERIZATION,
    LOWER_BOUND,
    M_LOWER,
    MU_DECAY,
    RESOLVENT_BOUND,
    S0_PROXY,
    UPPER_BOUND,
    RateFitReport,
    check_dichotomy,
    check_log_characterization,
    check_lower_bound,
    check_m_lower,
    check_mu_decay,
    check_resolvent_bound,
    check_upper_bound,
    estimate_s0_proxy,
    order_reports,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONSISTENT = 2
EXIT_INCONCLUSIVE = 3
EXIT_IO = 4

# worst code wins when several scenarios run
_SEVERITY = (EXIT_OK, EXIT_INCONCLUSIVE, EXIT_INCONSISTENT, EXIT_ERROR, EXIT_IO)

REPORT_HEADER = ["theorem_id", "verdict", "observed_exponent", "residual", "constants"]


def log_dominating(grid_points):
    """The slowly varying m(s) = log(1/s) + 1 sampled on the frequency grid."""
    s = np.asarray(grid_points, dtype=float)
    return SampledMonotoneFunction(s, np.log(1.0 / s) + 1.0)


class ScenarioResult:
    def __init__(self, scenario, op, mu, m, omega, reports):
        self.scenario = scenario
        self.op = op
        self.mu = mu
        self.m = m
        self.omega = omega
        self.reports = reports

    def exit_code(self, strict=False):
        verdicts = {r.verdict for r in self.reports}
        if INCONSISTENT in verdicts:
            return EXIT_INCONSISTENT
        if INCONCLUSIVE in verdicts and (strict or self.scenario.strict):
            return EXIT_INCONCLUSIVE
        return EXIT_OK


def _exact_m(sc: Scenario, op):
    if sc.dominating != "minimal" or not isinstance(op, DiagonalOperator):
        return None
    return lambda s: exact_minimal_m(op, s)


def _run_check(tid, sc: Scenario, op, mu, m, omega, tg, fg) -> RateFitReport:
    calls = {
        M_LOWER: lambda: check_m_lower(m, op),
        DICHOTOMY: lambda: check_dichotomy(op, tg),
        RESOLVENT_BOUND: lambda: check_resolvent_bound(op, omega, sc.c, fg),
        LOWER_BOUND: lambda: check_lower_bound(op, m, tg, sc.C_scan),
        LOG_CHARACTERIZATION: lambda: check_log_characterization(
            m, op, sc.log_c, tg, m_exact=_exact_m(sc, op)),
        S0_PROXY: lambda: estimate_s0_proxy(op, 1.0),
        MU_DECAY: lambda: check_mu_decay(op, mu, tg),
        UPPER_BOUND: lambda: check_upper_bound(op, m, sc.epsilon, tg),
    }
    try:
        return calls[tid]()
    except KTLabError as exc:
        return RateFitReport(tid, INCONCLUSIVE, {}, None, 0.0, f"{type(exc).__name__}: {exc}")


def evaluate(sc: Scenario, seed=0) -> ScenarioResult:
    """Build the operator and dominating functions, then run the requested checks."""
    op = sc.build_operator(seed)
    mu = sc.build_measure()
    tg = sc.time_grid()
    fg = sc.frequency_grid(op)
    m = log_dominating(fg.points()) if sc.dominating == "log" else minimal_m(op, fg)
    omega = minimal_omega(op, tg)
    reports = order_reports(_run_check(tid, sc, op, mu, m, omega, tg, fg) for tid in dict.fromkeys(sc.checks))
    return ScenarioResult(sc, op, mu, m, omega, reports)


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_outputs(res: ScenarioResult, directory: Path):
    sc = res.scenario
    directory.mkdir(parents=True, exist_ok=True)
    t = sc.time_grid().with_zero()
    kt = np.atleast_1d(kt_observable(res.op, t))
    mo = np.atleast_1d(mu_observable(res.op, res.mu, t))
    _write_rows(directory / "decay.csv", ["t", "kt_observable", "mu_observable"],
                [[format_float(a), format_float(b), format_float(c)] for a, b, c in zip(t, kt, mo)])
    s = sc.frequency_grid(res.op).points()
    rn = np.atleast_1d(resolvent_norm(res.op, s))
    _write_rows(directory / "resolvent.csv", ["s", "resolvent_norm"],
                [[format_float(a), format_float(b)] for a, b in zip(s, rn)])
    res.m.to_csv(directory / "m.csv")
    res.omega.to_csv(directory / "omega.csv")
    _write_rows(directory / "report.csv", REPORT_HEADER, [r.csv_row() for r in res.reports])
    head = [
        f"scenario: {sc.name}",
        f"operator: {sc.operator.text}",
        f"measure: {sc.measure}",
        f"grids: T_max={sc.T_max:g}, S_min={sc.S_min:g}, points_per_decade={sc.points_per_decade}",
        f"dominating: {sc.dominating}",
    ]
    if sc.description:
        head.append(f"description: {sc.description}")
    body = "\n\n".join(r.text_block() for r in res.reports) or "(no checks requested)"
    (directory / "report.txt").write_text("\n".join(head) + "\n\n" + body + "\n")


def run(scenarios, output_dir, strict=False, refine=False, seed=0, echo=None) -> int:
    """Run every scenario and write its outputs under ``output_dir/<name>``."""
    code = EXIT_OK
    out = Path(output_dir)
    for sc in scenarios:
        if refine:
            sc = sc.refined()
        try:
            res = evaluate(sc, seed)
        except KTLabError as exc:
            print(f"{sc.name}: {type(exc).__name__}: {exc}", file=sys.stderr)
            code = max(code, EXIT_ERROR, key=_SEVERITY.index)
            continue
        try:
            write_outputs(res, out / sc.name)
        except OSError as exc:
            print(f"{sc.name}: cannot write outputs: {exc}", file=sys.stderr)
            code = max(code, EXIT_IO, key=_SEVERITY.index)
            continue
        if echo is not None:
            for r in res.reports:
                echo(f"{sc.name:<16} {r.theorem_id:<24} {r.verdict}" + (f" ({r.branch})" if r.branch else ""))
        code = max(code, res.exit_code(strict), key=_SEVERITY.index)
    return code


def build_parser():
    p = argparse.ArgumentParser(prog="ktlab", description="Decay-rate laboratory for semigroup scenarios.")
    p.add_argument("--config", required=True, action="append", help="scenario file (repeatable)")
    p.add_argument("--out", default="ktlab-out", help="output directory")
    p.add_argument("--scenario", action="append", help="run only the named scenario (repeatable)")
    p.add_argument("--strict", action="store_true", help="inconclusive checks give exit code 3")
    p.add_argument("--refine", action="store_true", help="double points_per_decade")
    p.add_argument("--seed", type=int, default=0, help="seed for random matrix operators")
    p.add_argument("--quiet", action="store_true", help="do not print verdicts")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed < 0 or args.seed >= 2 ** 64:
        print("--seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_ERROR
    scenarios = []
    try:
        for path in args.config:
            scenarios.extend(parse_config(path))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    names = [s.name for s in scenarios]
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        print(f"config error: duplicate scenario names {sorted(dupes)}", file=sys.stderr)
        return EXIT_ERROR
    if args.scenario:
        unknown = set(args.scenario) - set(names)
        if unknown:
            print(f"unknown scenario(s): {', '.join(sorted(unknown))}", file=sys.stderr)
            return EXIT_ERROR
        scenarios = [s for s in scenarios if s.name in args.scenario]
    echo = None if args.quiet else print
    return run(scenarios, args.out, strict=args.strict, refine=args.refine, seed=args.seed, echo=echo)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
