"""Batch front end: config ingestion, command dispatch, report emission.

Reports are JSON objects (default) or CSV rows per quantity, with all
numbers at 12 significant digits and plot-ready arrays under a "series" key
so external tools can chart without any bundled UI.  Exit codes: 0 all
checks pass, 2 configuration error, 3 hypothesis violation, 4 numerical
degeneration, 5 a bracketing verdict failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, bounds, expr, iterate, measures, oracle
from .errors import (
    ConfigError,
    CriterionDegenerateError,
    DegenerationError,
    DivergenceError,
    DomainError,
    EigenboundError,
    HypothesisViolationError,
    LexError,
    ParseError,
    RangeError,
)

_ENV_TOLERANCE = "EIGENBOUND_TOLERANCE"

_KNOWN_KEYS = {
    "a", "b", "preset", "D", "case", "grid_size", "n_max",
    "format", "out", "eps_quadrature", "eps_bound", "eps_oracle",
    "truncation_schedule",
}

_PROVENANCE = {
    "delta": "positivity criterion: the eigenvalue is positive iff this constant is finite",
    "lower_basic": "basic two-sided estimate, lower side: 1/(4*delta)",
    "upper_basic": "basic two-sided estimate, upper side: 1/delta",
    "delta1": "first-step improved lower constant (seed square root under the double integral)",
    "delta1_prime": "first-step improved upper constant; always within [delta, 2*delta]",
    "lower_improved": "improved lower estimate 1/delta1",
    "upper_improved": "improved upper estimate 1/delta1'",
    "delta_n": "iterated lower-bound constants; reciprocals are certified lower bounds",
    "delta_n_prime": "iterated localized upper-bound constants; reciprocals are upper bounds",
    "dbar_n": "Rayleigh-quotient companions of the localized iterates",
    "eta_n": "centered-iterate constants; reciprocals bound the spectral gap from below",
    "lambda": "finite-volume eigensolver (independent oracle) on the measure grid",
    "duality": "measure-swapped dual problem has the same principal eigenvalue",
}


@dataclass
class RunConfig:
    """One resolved run: problem description plus command parameters."""

    a: str | None = None
    b: str | None = None
    preset: str | None = None
    D: list[float] = field(default_factory=lambda: [1.0])
    case: str = "ND"
    grid_size: int = 2000
    n_max: int = 3
    format: str = "json"
    out: str | None = None
    eps_quadrature: float = 1e-10
    eps_bound: float = 1e-6
    eps_oracle: float = 1e-4
    truncation_schedule: tuple[float, ...] | None = None

    def validate(self) -> None:
        if self.case not in ("ND", "DN", "NN"):
            raise ConfigError(f"case must be one of ND, DN, NN (got {self.case!r})")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv (got {self.format!r})")
        if self.n_max < 1:
            raise ConfigError("n_max must be a positive integer")
        if self.grid_size < 16:
            raise ConfigError("grid_size must be at least 16")
        if not (self.eps_quadrature > 0 and self.eps_bound > 0 and self.eps_oracle > 0):
            raise ConfigError("tolerances must be positive")
        if self.preset is None and (self.a is None or self.b is None):
            raise ConfigError("give either preset=... or both a=... and b=...")
        if self.preset is not None and self.preset not in expr.PRESETS:
            raise ConfigError(
                f"unknown preset {self.preset!r}; available: {sorted(expr.PRESETS)}"
            )
        for d in self.D:
            if not d > 0:
                raise ConfigError("D values must be positive (or inf)")
        # surface expression problems as configuration errors up front
        if self.preset is None:
            for name, text in (("a", self.a), ("b", self.b)):
                try:
                    expr.parse_expression(text)
                except (LexError, ParseError) as exc:
                    raise ConfigError(f"coefficient {name}: {exc}") from exc

    def problems(self) -> list[measures.ProblemSpec]:
        tol = measures.Tolerances(
            quadrature=self.eps_quadrature,
            bound_refine=self.eps_bound,
            oracle=self.eps_oracle,
        )
        return [
            measures.make_problem(
                a=self.a,
                b=self.b,
                preset=self.preset,
                D=d,
                case=self.case,
                grid_size=self.grid_size,
                truncation_schedule=self.truncation_schedule,
                tolerances=tol,
            )
            for d in self.D
        ]

    def echo(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "preset": self.preset,
            "D": ["inf" if math.isinf(d) else d for d in self.D],
            "case": self.case,
            "grid_size": self.grid_size,
            "n_max": self.n_max,
            "format": self.format,
            "eps_quadrature": self.eps_quadrature,
            "eps_bound": self.eps_bound,
            "eps_oracle": self.eps_oracle,
        }


def _parse_number_list(text: str) -> list[float]:
    vals = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        vals.append(math.inf if item in ("inf", "infinity") else float(item))
    if not vals:
        raise ConfigError("empty numeric list")
    return vals


def parse_config(path: str | None, text: str | None = None) -> RunConfig:
    """Flat key=value configuration with optional [section] headers.

    Values may be quoted; D accepts a comma-separated sweep list and the
    word inf.  Unknown keys are rejected with their line number.
    """
    cfg = RunConfig()
    if path is None and text is None:
        return cfg
    if text is None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    problems: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            continue  # section headers are organizational only
        if "=" not in line:
            problems.append(f"line {lineno}: expected key=value, got {line!r}")
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip().strip("\"'")
        if key not in _KNOWN_KEYS:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        try:
            if key in ("a", "b", "preset", "case", "format", "out"):
                setattr(cfg, key, value)
            elif key == "D":
                cfg.D = _parse_number_list(value)
            elif key in ("grid_size", "n_max"):
                setattr(cfg, key, int(value))
            elif key == "truncation_schedule":
                cfg.truncation_schedule = tuple(_parse_number_list(value))
            else:
                setattr(cfg, key, float(value))
        except (ValueError, ConfigError) as exc:
            problems.append(f"line {lineno}: bad value for {key!r}: {exc}")
    if problems:
        raise ConfigError("; ".join(problems))
    return cfg


def _apply_cli_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.a is not None:
        cfg.a, cfg.preset = args.a, None if args.a else cfg.preset
    if args.b is not None:
        cfg.b = args.b
    if args.D is not None:
        cfg.D = _parse_number_list(args.D)
    if args.case is not None:
        cfg.case = args.case
    if args.n_max is not None:
        cfg.n_max = args.n_max
    if args.format is not None:
        cfg.format = args.format
    if args.out is not None:
        cfg.out = args.out
    if args.grid_size is not None:
        cfg.grid_size = args.grid_size
    env_tol = os.environ.get(_ENV_TOLERANCE)
    if env_tol:
        try:
            cfg.eps_bound = float(env_tol)
        except ValueError as exc:
            raise ConfigError(f"bad {_ENV_TOLERANCE} value {env_tol!r}") from exc
    return cfg


# ---------------------------------------------------------------------------
# number formatting and emission


def _round12(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return float(f"{obj:.12g}")
    if isinstance(obj, (np.floating,)):
        return _round12(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_round12(float(v)) for v in obj.tolist()]
    return obj


def _flatten_csv(prefix: str, obj, rows: list[tuple[str, str]]):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten_csv(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten_csv(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, str(obj)))


def render_report(report, fmt: str) -> str:
    cooked = _round12(report)
    if fmt == "json":
        return json.dumps(cooked, indent=2)
    rows: list[tuple[str, str]] = []
    reports = cooked if isinstance(cooked, list) else [cooked]
    lines = ["quantity,value"]
    for i, rep in enumerate(reports):
        rows = []
        _flatten_csv("", {k: v for k, v in rep.items() if k != "series"}, rows)
        tag = f"run{i}." if len(reports) > 1 else ""
        lines.extend(f"{tag}{name},{value}" for name, value in rows)
    return "\n".join(lines) + "\n"


def _decimate(arr: np.ndarray, cap: int = 512) -> list[float]:
    arr = np.asarray(arr, dtype=float)
    if len(arr) <= cap:
        return arr.tolist()
    idx = np.linspace(0, len(arr) - 1, cap).round().astype(int)
    return arr[np.unique(idx)].tolist()


# ---------------------------------------------------------------------------
# command implementations


def _stable_table(problem: measures.ProblemSpec):
    """Finite interval: one table.  Infinite: walk the truncation schedule
    until the criterion constant stabilizes; returns (table, delta_trace)."""
    if not problem.is_infinite:
        return measures.build_tables(problem, problem.D), []
    eps = problem.tolerances.bound_refine
    trace = []
    prev = None
    table = None
    for p in problem.truncation_schedule:
        try:
            cand = measures.build_tables(problem, p)
        except (DivergenceError, HypothesisViolationError):
            break
        d, _ = bounds.delta(problem.case, cand)
        trace.append({"p": p, "delta": d})
        table = cand
        if math.isinf(d):
            break
        if prev is not None and abs(d - prev) <= 100 * eps * max(d, 1.0):
            break
        prev = d
    if table is None:
        raise DegenerationError("no truncation of the infinite interval could be tabulated")
    return table, trace


def _hypothesis_summary(rep: measures.HypothesisReport) -> dict:
    return {
        "positivity_of_a": rep.positivity.passed,
        "locally_integrable_near_0": rep.integrable_near_zero,
        "locally_integrable_near_right": rep.integrable_near_right,
        "criterion_zero": rep.criterion_zero,
        "criterion_zero_reason": rep.criterion_zero_reason,
        "notes": rep.notes,
    }


def cmd_bounds(cfg: RunConfig) -> list[dict]:
    def run_one(problem: measures.ProblemSpec) -> dict:
        hyp = measures.hypothesis_check(problem)
        if not hyp.positivity.passed:
            raise HypothesisViolationError(hyp.positivity.detail)
        report: dict = {
            "command": "bounds",
            "version": __version__,
            "config": cfg.echo() | {"D": "inf" if problem.is_infinite else problem.D},
            "hypothesis": _hypothesis_summary(hyp),
            "provenance": {k: _PROVENANCE[k] for k in (
                "delta", "lower_basic", "upper_basic", "delta1", "delta1_prime",
                "lower_improved", "upper_improved")},
        }
        if problem.is_infinite and hyp.criterion_zero:
            report["results"] = bounds.BoundsReport(
                case=problem.case, delta=math.inf, lower_basic=0.0, upper_basic=0.0,
                delta1=None, delta1_prime=None, lower_improved=None,
                upper_improved=None, argmax_x={}, positivity="zero",
            ).to_dict()
            report["series"] = {}
            return report
        table, trace = _stable_table(problem)
        rep = bounds.compute_report(problem.case, table)
        report["results"] = rep.to_dict()
        if trace:
            report["results"]["delta_truncation_trace"] = trace
            report["results"]["right_end_used"] = table.right_end
        if rep.positivity == "positive" and problem.case == "ND":
            curve = table.mu_cum * table.nu_tail
        elif rep.positivity == "positive":
            curve = table.nu_cum * table.mu_tail
        else:
            curve = np.zeros_like(table.grid)
        report["series"] = {
            "x": _decimate(table.grid),
            "criterion_product": _decimate(curve),
        }
        return report

    return _fan_out(run_one, cfg.problems())


def cmd_iterate(cfg: RunConfig) -> list[dict]:
    def run_one(problem: measures.ProblemSpec) -> dict:
        hyp = measures.hypothesis_check(problem)
        if not hyp.positivity.passed:
            raise HypothesisViolationError(hyp.positivity.detail)
        report: dict = {
            "command": "iterate",
            "version": __version__,
            "config": cfg.echo() | {"D": "inf" if problem.is_infinite else problem.D},
            "hypothesis": _hypothesis_summary(hyp),
            "provenance": {k: _PROVENANCE[k] for k in ("delta_n", "delta_n_prime", "dbar_n", "eta_n")},
        }
        if problem.is_infinite and hyp.criterion_zero:
            report["results"] = {"positivity": "zero", "note": "eigenvalue is 0; sequences undefined"}
            report["series"] = {}
            return report
        table, trace = _stable_table(problem)
        results: dict = {"right_end_used": table.right_end}
        series: dict = {}
        if problem.case in ("ND", "DN"):
            low = iterate.lower_sequence(problem.case, table, cfg.n_max)
            results["delta_n"] = low.values
            results["delta_n_monotonicity"] = low.monotonicity
            results["lower_bounds"] = low.bounds()
            series["delta_n"] = low.values
            if problem.case == "ND":
                up = iterate.upper_sequence_nd(table, cfg.n_max)
                results["dbar_n"] = up.companion_dbar
                series["dbar_n"] = up.companion_dbar
            else:
                up = iterate.upper_sequence_dn(table, cfg.n_max)
            results["delta_n_prime"] = up.values
            results["delta_n_prime_monotonicity"] = up.monotonicity
            results["upper_bounds"] = up.bounds()
            results["window_locations"] = up.pair_locations
            series["delta_n_prime"] = up.values
        else:
            eta = iterate.eta_sequence(table, cfg.n_max)
            results["eta_n"] = eta.values
            results["eta_n_monotonicity"] = eta.monotonicity
            results["gap_lower_bounds"] = eta.bounds()
            results["sign_changes"] = eta.sign_changes
            results["notes"] = eta.notes
            series["eta_n"] = eta.values
        if trace:
            results["delta_truncation_trace"] = trace
        report["results"] = results
        report["series"] = series
        return report

    return _fan_out(run_one, cfg.problems())


def cmd_oracle(cfg: RunConfig) -> list[dict]:
    def run_one(problem: measures.ProblemSpec) -> dict:
        hyp = measures.hypothesis_check(problem)
        if not hyp.positivity.passed:
            raise HypothesisViolationError(hyp.positivity.detail)
        report: dict = {
            "command": "oracle",
            "version": __version__,
            "config": cfg.echo() | {"D": "inf" if problem.is_infinite else problem.D},
            "hypothesis": _hypothesis_summary(hyp),
            "provenance": {"lambda": _PROVENANCE["lambda"]},
        }
        if problem.is_infinite:
            if hyp.criterion_zero:
                report["results"] = {
                    "lambda": 0.0,
                    "positivity": "zero",
                    "note": hyp.criterion_zero_reason,
                }
                report["series"] = {}
                return report
            lam, tr = oracle.infinite_domain_limit(problem)
            report["results"] = {
                "lambda": lam,
                "trace": [[p, v] for p, v in zip(tr.points, tr.values)],
                "converged": tr.converged,
                "monotone_decreasing": tr.monotone_decreasing,
                "stop_reason": tr.stop_reason,
            }
            report["series"] = {"p": tr.points, "lambda_p": tr.values}
            return report
        sol = oracle.fd_eigensolve(problem)
        resid = oracle.eigen_residuals(sol)
        report["results"] = {
            "lambda": sol.lambda_,
            "residual": sol.residual,
            "N": sol.N,
            "identity_deviations": {
                "single_integral": resid.get("i_deviation"),
                "double_integral": resid.get("ii_deviation"),
            },
            "diagnostics": {k: v for k, v in resid.items() if k not in ("i_deviation", "ii_deviation")},
        }
        g = sol.eigenfunction
        report["series"] = {
            "x": _decimate(g.table.grid),
            "eigenfunction": _decimate(g.values),
        }
        return report

    return _fan_out(run_one, cfg.problems())


def _verdict(name: str, ok: bool, detail: str) -> dict:
    return {"check": name, "pass": bool(ok), "detail": detail}


def cmd_verify(cfg: RunConfig) -> tuple[list[dict], bool]:
    def run_one(problem: measures.ProblemSpec) -> dict:
        hyp = measures.hypothesis_check(problem)
        if not hyp.positivity.passed:
            raise HypothesisViolationError(hyp.positivity.detail)
        eps_b = problem.tolerances.bound_refine
        verdicts: list[dict] = []
        report: dict = {
            "command": "verify",
            "version": __version__,
            "config": cfg.echo() | {"D": "inf" if problem.is_infinite else problem.D},
            "hypothesis": _hypothesis_summary(hyp),
            "provenance": dict(_PROVENANCE),
        }

        if problem.is_infinite and hyp.criterion_zero:
            # nothing to bracket; the criterion decides the value
            sub = measures.truncate(problem, problem.truncation_schedule[2])
            lam_tr = oracle.fd_eigensolve(sub).lambda_
            verdicts.append(_verdict(
                "criterion_zero",
                True,
                f"flagged mass diverges; truncation eigenvalue {lam_tr:.6g} with "
                "no positive limit claimed",
            ))
            report["results"] = {"positivity": "zero", "verdicts": verdicts}
            report["series"] = {}
            report["all_pass"] = True
            return report

        if problem.is_infinite:
            lam, tr = oracle.infinite_domain_limit(problem)
            work = measures.truncate(problem, tr.points[-1])
            verdicts.append(_verdict(
                "truncation_limit_converged", tr.converged, tr.stop_reason
            ))
        else:
            lam = None
            work = problem

        table = measures.build_tables(work, work.D)
        sol = oracle.fd_eigensolve(work)
        lam_work = sol.lambda_
        resid = oracle.eigen_residuals(sol)
        brep = bounds.compute_report(work.case, table)

        results: dict = {
            "lambda_oracle": lam_work,
            "bounds": brep.to_dict(),
            "residual": sol.residual,
        }
        if lam is not None:
            results["lambda_infinite_limit"] = lam

        if work.case in ("ND", "DN"):
            verdicts.append(_verdict(
                "basic_bracket",
                brep.lower_basic - 1e-6 <= lam_work <= brep.upper_basic + 1e-6,
                f"{brep.lower_basic:.9g} <= {lam_work:.9g} <= {brep.upper_basic:.9g}",
            ))
            chain_ok = (
                brep.lower_basic <= brep.lower_improved + 10 * eps_b
                and brep.lower_improved <= lam_work + 10 * eps_b
                and lam_work <= brep.upper_improved + 10 * eps_b
                and brep.upper_improved <= brep.upper_basic + 10 * eps_b
            )
            verdicts.append(_verdict(
                "improved_chain",
                chain_ok,
                f"{brep.lower_basic:.9g} <= {brep.lower_improved:.9g} <= {lam_work:.9g}"
                f" <= {brep.upper_improved:.9g} <= {brep.upper_basic:.9g}",
            ))
            verdicts.append(_verdict(
                "delta1_prime_containment",
                brep.delta - 10 * eps_b <= brep.delta1_prime <= 2 * brep.delta + 10 * eps_b,
                f"{brep.delta:.9g} <= {brep.delta1_prime:.9g} <= {2 * brep.delta:.9g}",
            ))
            low = iterate.lower_sequence(work.case, table, cfg.n_max)
            up = (
                iterate.upper_sequence_nd(table, cfg.n_max)
                if work.case == "ND"
                else iterate.upper_sequence_dn(table, cfg.n_max)
            )
            results["delta_n"] = low.values
            results["delta_n_prime"] = up.values
            if up.companion_dbar:
                results["dbar_n"] = up.companion_dbar
            bracket_ok = all(
                lb <= lam_work * (1 + 1e-2) for lb in low.bounds()
            ) and all(ub >= lam_work * (1 - 1e-2) for ub in up.bounds())
            verdicts.append(_verdict(
                "iterated_bracket",
                bracket_ok,
                f"lower {max(low.bounds()):.9g} <= lambda <= upper {min(up.bounds()):.9g}"
                " (1e-2 relative slack)",
            ))
            verdicts.append(_verdict(
                "lower_sequence_monotone",
                low.monotonicity in ("non-increasing", "constant", "single"),
                f"delta_n: {low.monotonicity}",
            ))
            if work.case == "DN":
                verdicts.append(_verdict(
                    "upper_sequence_monotone",
                    up.monotonicity in ("non-decreasing", "constant", "single"),
                    f"delta_n_prime: {up.monotonicity}",
                ))
            verdicts.append(_verdict(
                "eigen_identities",
                max(resid.get("i_deviation", 0.0), resid.get("ii_deviation", 0.0)) <= 5e-3,
                f"sup |lambda*I(g)-1| = {resid.get('i_deviation'):.3g}, "
                f"sup |lambda*II(g)-1| = {resid.get('ii_deviation'):.3g}",
            ))
            if not problem.is_infinite:
                # the dual swaps the measures and the boundary labels, so the
                # posed eigenvalue is compared against the opposite
                # orientation on the column-swapped table
                dual = oracle.dual_table(table)
                dual_case = "DN" if work.case == "ND" else "ND"
                lam_dual = oracle.solve_on_table(dual, dual_case).lambda_
                d_primal, _ = bounds.delta(work.case, table)
                d_dual, _ = bounds.delta(dual_case, dual)
                results["duality"] = {
                    "lambda": lam_work,
                    "lambda_dual": lam_dual,
                    "delta": d_primal,
                    "delta_dual": d_dual,
                }
                verdicts.append(_verdict(
                    "duality",
                    abs(lam_work - lam_dual) <= 1e-3 * max(abs(lam_work), 1e-300)
                    and abs(d_primal - d_dual) <= 10 * eps_b,
                    f"lambda: {lam_work:.9g} vs dual {lam_dual:.9g}; delta: "
                    f"{d_primal:.9g} vs {d_dual:.9g}",
                ))
        else:  # NN
            eta = iterate.eta_sequence(table, cfg.n_max)
            results["eta_n"] = eta.values
            results["eta_monotonicity"] = eta.monotonicity
            gap_ok = all(b <= lam_work * (1 + 1e-2) for b in eta.bounds())
            verdicts.append(_verdict(
                "gap_lower_bounds",
                gap_ok,
                f"max lower bound {max(eta.bounds()):.9g} vs gap {lam_work:.9g}",
            ))
            verdicts.append(_verdict(
                "eta_direction_consistent",
                eta.monotonicity in ("non-increasing", "non-decreasing", "constant", "single"),
                f"eta_n: {eta.monotonicity}",
            ))
        verdicts.append(_verdict(
            "oracle_residual",
            sol.residual <= work.tolerances.oracle,
            f"relative defect {sol.residual:.3g}",
        ))
        report["results"] = results
        report["results"]["verdicts"] = verdicts
        report["all_pass"] = all(v["pass"] for v in verdicts)
        report["series"] = {
            "x": _decimate(sol.eigenfunction.table.grid),
            "eigenfunction": _decimate(sol.eigenfunction.values),
        }
        return report

    reports = _fan_out(run_one, cfg.problems())
    return reports, all(r.get("all_pass", False) for r in reports)


def _fan_out(fn, problems: list[measures.ProblemSpec]) -> list[dict]:
    if len(problems) == 1:
        return [fn(problems[0])]
    with ThreadPoolExecutor(max_workers=min(len(problems), 8)) as pool:
        return list(pool.map(fn, problems))


# ---------------------------------------------------------------------------
# entry point


def _build_argparser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigenbound",
        description="Certified two-sided bounds, approximation sequences, and an "
        "independent eigensolver for mixed principal eigenvalues of "
        "a(x) f'' + b(x) f' on (0, D).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("bounds", "criterion constant and basic/improved two-sided estimates"),
        ("iterate", "monotone bound sequences (lower, localized upper, centered)"),
        ("oracle", "finite-volume eigensolver / truncation limit"),
        ("verify", "run everything and check every bracketing verdict"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--a", help="diffusion coefficient a(x) as expression text")
        p.add_argument("--b", help="drift coefficient b(x) as expression text")
        p.add_argument("--D", help="right endpoint (number, 'inf', or comma list to sweep)")
        p.add_argument("--case", choices=("ND", "DN", "NN"))
        p.add_argument("--n-max", dest="n_max", type=int)
        p.add_argument("--grid-size", dest="grid_size", type=int)
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--out")
    return parser


def _emit(payload: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload if payload.endswith("\n") else payload + "\n")


def _error_payload(exc: Exception, code: int) -> str:
    return json.dumps(
        {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}},
        indent=2,
    )


_VALUE_FLAGS = ("--config", "--a", "--b", "--D", "--case", "--n-max", "--grid-size", "--format", "--out")


def _join_flag_values(argv: list[str]) -> list[str]:
    """Merge '--b -x' into '--b=-x' so coefficient text may start with '-'."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = _build_argparser()
    args = parser.parse_args(_join_flag_values(list(argv if argv is not None else sys.argv[1:])))
    try:
        cfg = parse_config(args.config)
        cfg = _apply_cli_overrides(cfg, args)
        cfg.validate()
    except ConfigError as exc:
        _emit(_error_payload(exc, 2), None)
        return 2
    try:
        ok = True
        if args.command == "bounds":
            reports = cmd_bounds(cfg)
        elif args.command == "iterate":
            reports = cmd_iterate(cfg)
        elif args.command == "oracle":
            reports = cmd_oracle(cfg)
        else:
            reports, ok = cmd_verify(cfg)
        payload_obj = reports[0] if len(reports) == 1 else reports
        _emit(render_report(payload_obj, cfg.format), cfg.out)
        if cfg.out and cfg.format == "csv" and args.command in ("bounds", "verify"):
            # debugging dump of the measure table next to the delimited report
            try:
                prob = cfg.problems()[0]
                table, _ = _stable_table(prob)
                table.to_csv(cfg.out + ".table.csv")
            except EigenboundError:
                pass
        return 0 if ok else 5
    except (LexError, ParseError, RangeError, ConfigError) as exc:
        _emit(_error_payload(exc, 2), cfg.out)
        return 2
    except HypothesisViolationError as exc:
        _emit(_error_payload(exc, 3), cfg.out)
        return 3
    except (DegenerationError, DivergenceError, CriterionDegenerateError, DomainError) as exc:
        _emit(_error_payload(exc, 4), cfg.out)
        return 4


if __name__ == "__main__":
    sys.exit(main())
