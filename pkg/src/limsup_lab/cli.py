"""Command-line interface: deterministic reports over instance configs.

Subcommands
    criteria    series block sums, convergence classifications, verdicts,
                and (for rectangle modes) the Hausdorff cost-exponent scan
    dims        closed-form dimensions: Rynne-Dickinson, scalar spectrum
                value, critical exponents, Fourier dimension
    fourier     Fourier dimension with its hypothesis audit
    measure     resonant-set measures per norm with Lebesgue bound ratios
    decompose   dyadic index decomposition and the star-sandwich check
    cover       per-dyadic-block tail moments and the stage-union coverage
    quasi       pairwise quasi-independence constant for a stage family
    verify      the full oracle/acceptance suite (exit 1 on any failure)

Every command reads a JSON config (see limsup_lab.config), emits a Report
as JSON (or CSV for the tabular part), and is byte-deterministic for a
fixed (config, seed, version) regardless of worker count.  Wall-clock
timings go to stderr only, never into the report.  Exit codes: 0 success,
1 verification failure, 2 config error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
import time

from . import __version__
from .config import ConfigError, ParsedConfig, config_sha256, load_config
from .criteria import InapplicableError, critical_exponent
from .estimators import StageUnion, coverage_fraction, tail_first_moment
from .formulas import (
    ProblemInstance,
    TauSpectrum,
    dim_rynne_dickinson,
    dim_wang_wu,
    fourier_dim,
    hausdorff_verdict,
    lebesgue_verdict,
    tau_exponent,
)
from .resonant import (
    LatticePoint,
    dyadic_decompose,
    measure_exact,
    mult_star,
    quasi_independence_report,
    sandwich_check,
    weighted_rect,
)


def _canonical(obj):
    """Recursively convert a result payload to canonical JSON-ready form.

    Floats are rounded to 12 significant digits (masking the bit-level
    jitter reduction order could introduce), non-finite floats become
    strings, complex numbers become {"re", "im"} pairs, tuples become
    lists, and dataclasses become field dicts.
    """
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return float(f"{obj:.12g}")
    if isinstance(obj, complex):
        return {"re": _canonical(obj.real), "im": _canonical(obj.imag)}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _canonical(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _canonical(obj.item())
    return str(obj)


def build_report(command: str, raw_config: dict, results: dict, seed: int) -> dict:
    return {
        "command": command,
        "config": raw_config,
        "config_sha256": config_sha256(raw_config),
        "results": _canonical(results),
        "timing": None,
        "seed": seed,
        "version": __version__,
    }


def emit_report(report: dict, fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        table = report["results"].get("table")
        if not table:
            raise InapplicableError(
                f"command {report['command']!r} produced no table; use --format json"
            )
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table["columns"])
        for row in table["rows"]:
            writer.writerow(row)
        text = buf.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _series_payload(estimate) -> dict:
    cls = estimate.classification
    return {
        "kind": estimate.kind,
        "block_sums": list(estimate.block_sums),
        "partial_sum": estimate.partial_sum,
        "growth_exponent": estimate.growth_exponent,
        "residual": estimate.residual,
        "classification": cls,
        "converges": estimate.converges,
        "symbolic": estimate.symbolic,
        "skipped": estimate.skipped,
        "overflow": estimate.overflow,
    }


def _verdict_payload(verdict) -> dict:
    return {
        "outcome": verdict.outcome,
        "reason": verdict.reason,
        "would_be": verdict.would_be,
        "hypothesis_audit": dict(verdict.hypothesis_audit),
    }


def _instance_taus(inst: ProblemInstance) -> list[float]:
    if inst.mode == "weighted":
        return [tau_exponent(c) for c in inst.weights.components]
    return [tau_exponent(inst.psi)] * inst.m


# -- subcommand bodies -------------------------------------------------------


def cmd_criteria(parsed: ParsedConfig) -> dict:
    inst = parsed.instance
    Kmax = parsed.run.Kmax
    series = {}
    leb = lebesgue_verdict(inst, Kmax=Kmax)
    series[leb.series.kind] = _series_payload(leb.series)
    results: dict = {"verdicts": {"lebesgue": _verdict_payload(leb)}}
    if inst.f is not None:
        hd = hausdorff_verdict(inst, Kmax=Kmax)
        series[hd.series.kind] = _series_payload(hd.series)
        results["verdicts"]["hausdorff"] = _verdict_payload(hd)
    if inst.mode != "multiplicative":
        from .estimators import hausdorff_cost_exponent

        ce = hausdorff_cost_exponent(inst, Kmax=max(Kmax, 16))
        results["cost_exponent"] = {
            "value": ce.value,
            "window": list(ce.window) if ce.window else None,
            "status": ce.status,
        }
    results["series"] = series
    rows = []
    for kind, payload in sorted(series.items()):
        cumulative = 0.0
        for k, block in payload["block_sums"]:
            cumulative += block
            rows.append([kind, k, block, cumulative])
    results["table"] = {"columns": ["kind", "k", "block_sum", "cumulative"], "rows": rows}
    return results


def cmd_dims(parsed: ParsedConfig) -> dict:
    inst = parsed.instance
    taus = _instance_taus(inst)
    results: dict = {"tau": taus}
    if inst.mode == "multiplicative":
        results["rynne_dickinson"] = {
            "value": None,
            "reason": "rectangle modes only",
        }
    else:
        try:
            results["rynne_dickinson"] = {
                "value": dim_rynne_dickinson(inst.n, inst.m, taus),
                "reason": "",
            }
        except ValueError as exc:
            results["rynne_dickinson"] = {"value": None, "reason": str(exc)}
    if inst.n == 1 and inst.mode != "multiplicative":
        ww = dim_wang_wu(inst.m, TauSpectrum((tuple(taus),)))
        results["wang_wu"] = {"value": ww.value, "all_infinite": ww.all_infinite}
    crits = {}
    try:
        crits["s_Psi"] = critical_exponent("s_Psi", inst.n, inst.m, taus)
    except ValueError as exc:
        crits["s_Psi"] = str(exc)
    if inst.mode == "multiplicative":
        crits["tau_psi"] = critical_exponent("tau_psi", inst.n, inst.m, taus[0])
    elif inst.m == 1 or len(set(taus)) == 1:
        crits["s_psi"] = critical_exponent("s_psi", inst.n, inst.m, taus[0])
    results["critical_exponents"] = crits
    fr = fourier_dim(inst, Kmax=parsed.run.Kmax)
    results["fourier_dim"] = {
        "value": fr.value,
        "applicable": fr.applicable,
        "reason": fr.reason,
        "audit": dict(fr.audit),
    }
    rows = [["rynne_dickinson", results["rynne_dickinson"]["value"]]]
    if "wang_wu" in results:
        rows.append(["wang_wu", results["wang_wu"]["value"]])
    for name, value in sorted(crits.items()):
        rows.append([name, value])
    rows.append(["fourier_dim", fr.value])
    results["table"] = {"columns": ["name", "value"], "rows": rows}
    return results


def cmd_fourier(parsed: ParsedConfig) -> dict:
    fr = fourier_dim(parsed.instance, Kmax=parsed.run.Kmax)
    results = {
        "value": fr.value,
        "applicable": fr.applicable,
        "reason": fr.reason,
        "audit": dict(fr.audit),
        "table": {
            "columns": ["name", "value"],
            "rows": [["fourier_dim", fr.value]],
        },
    }
    return results


def cmd_measure(parsed: ParsedConfig) -> dict:
    inst = parsed.instance
    run = parsed.run
    rows = []
    for qn in range(1, run.Qmax + 1):
        q = LatticePoint((qn,) + (0,) * (inst.n - 1))
        if inst.mode == "multiplicative":
            delta = run.delta if run.delta is not None else inst.psi(q.coords)
            cap = 2.0**-inst.m
            if not 0 < delta <= cap:
                rows.append([qn, delta, None, "delta outside (0, 2^-m]"])
                continue
            desc = mult_star(q, inst.m, delta)
            rows.append([qn, delta, measure_exact(desc), ""])
        else:
            weights = inst.as_weight_system()
            deltas = [min(c(q.coords), 0.5) for c in weights.components]
            desc = weighted_rect(q, deltas)
            rows.append([qn, float(min(deltas)), measure_exact(desc), ""])
    results = {
        "table": {"columns": ["q", "delta", "measure", "note"], "rows": rows},
        "mode": inst.mode,
    }
    return results


def cmd_decompose(parsed: ParsedConfig) -> dict:
    inst = parsed.instance
    run = parsed.run
    m = inst.m
    delta = run.delta if run.delta is not None else 2.0 ** -(m + 3)
    if not 0 < delta <= 2.0**-m:
        raise ConfigError(f"run.delta: decomposition needs delta in (0, 2^-{m}], got {delta}")
    dec = dyadic_decompose(m, delta)
    coords = run.q if run.q is not None else (5,) + (0,) * (inst.n - 1)
    q = LatticePoint(coords)
    samples = min(run.samples, 100_000)
    sandwich = sandwich_check(q, m, delta, n_points=samples, seed=run.seed)
    results = {
        "delta": delta,
        "scale_N": dec.N,
        "cardinality": dec.cardinality,
        "indices": [list(ix) for ix in dec.indices],
        "sandwich": {
            "ok": sandwich.ok,
            "points": sandwich.points,
            "inner_violations": sandwich.inner_violations,
            "outer_violations": sandwich.outer_violations,
        },
        "table": {
            "columns": [f"k{i + 1}" for i in range(m)],
            "rows": [list(ix) for ix in dec.indices],
        },
    }
    return results


def cmd_cover(parsed: ParsedConfig) -> dict:
    inst = parsed.instance
    run = parsed.run
    Qlo, Qhi = run.Qlo, run.Qhi
    rows = []
    cumulative = 0.0
    k = int(math.floor(math.log2(Qlo)))
    while 2**k <= Qhi:
        lo = max(Qlo, 2**k)
        hi = min(Qhi, 2 ** (k + 1) - 1)
        if lo <= hi:
            moment = tail_first_moment(inst, lo, hi)
            cumulative += moment
            rows.append([k, lo, hi, moment, cumulative])
        k += 1
    stage = StageUnion(inst, Qlo, Qhi)
    cov = coverage_fraction(stage, samples=run.samples, seed=run.seed)
    results = {
        "coverage": {
            "value": cov.value,
            "half_width": cov.half_width,
            "method": cov.method,
            "samples": cov.samples,
        },
        "first_moment": cumulative,
        "table": {
            "columns": ["k", "Qlo", "Qhi", "block_moment", "cumulative_moment"],
            "rows": rows,
        },
    }
    return results


def cmd_quasi(parsed: ParsedConfig) -> dict:
    inst = parsed.instance
    run = parsed.run
    width = 50 if inst.n == 1 else 12
    hi = min(run.Qhi, run.Qlo + width - 1)
    descs = []
    for qn in range(run.Qlo, hi + 1):
        q = LatticePoint((qn,) + (0,) * (inst.n - 1))
        if inst.mode == "multiplicative":
            delta = run.delta if run.delta is not None else min(
                inst.psi(q.coords), 2.0**-inst.m
            )
            descs.append(mult_star(q, inst.m, delta))
        else:
            weights = inst.as_weight_system()
            deltas = [min(c(q.coords), 0.4999) for c in weights.components]
            descs.append(weighted_rect(q, deltas))
    rep = quasi_independence_report(
        descs, mc_samples=min(run.samples, 200_000), seed=run.seed
    )
    results = {
        "C": rep.C,
        "lamperti_lower": rep.lamperti_lower,
        "pairs": rep.pairs,
        "skipped_null": rep.skipped_null,
        "method": rep.method,
        "worst_pair": list(rep.worst_pair) if rep.worst_pair else None,
        "norm_range": [run.Qlo, hi],
        "table": {
            "columns": ["name", "value"],
            "rows": [["C", rep.C], ["lamperti_lower", rep.lamperti_lower]],
        },
    }
    return results


def cmd_verify_results(suite: str | None, seed: int) -> tuple[dict, bool]:
    from .verify import run_suite

    criteria = run_suite(selector=suite, seed=seed)
    all_passed = all(c.passed for c in criteria)
    rows = []
    for c in criteria:
        rows.append([c.number, c.name, "pass" if c.passed else "FAIL", c.measured, c.expected, c.tolerance])
        print(
            f"criterion {c.number:2d} {c.name:<24s} "
            f"{'pass' if c.passed else 'FAIL'}  ({c.seconds:.2f}s)",
            file=sys.stderr,
        )
    results = {
        "criteria": [
            {
                "number": c.number,
                "name": c.name,
                "passed": c.passed,
                "measured": c.measured,
                "expected": c.expected,
                "tolerance": c.tolerance,
            }
            for c in criteria
        ],
        "all_passed": all_passed,
        "table": {
            "columns": ["number", "name", "status", "measured", "expected", "tolerance"],
            "rows": rows,
        },
    }
    return results, all_passed


_COMMANDS = {
    "criteria": cmd_criteria,
    "dims": cmd_dims,
    "fourier": cmd_fourier,
    "measure": cmd_measure,
    "decompose": cmd_decompose,
    "cover": cmd_cover,
    "quasi": cmd_quasi,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limsup-lab",
        description="limsup-set criteria: series, dimensions, measures, coverage",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*_COMMANDS, "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="path to a JSON instance config")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument("--samples", type=int, default=None, help="override run.samples")
        p.add_argument("--Kmax", type=int, default=None, help="override run.Kmax")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if name == "verify":
            p.add_argument("--suite", default=None, help="run only criteria whose name contains this")
    return parser


def _apply_overrides(parsed: ParsedConfig, args) -> ParsedConfig:
    run = parsed.run
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.samples is not None:
        if args.samples < 1:
            raise ConfigError("--samples must be positive")
        updates["samples"] = args.samples
    if args.Kmax is not None:
        if args.Kmax < 2:
            raise ConfigError("--Kmax must be at least 2")
        updates["Kmax"] = args.Kmax
    if updates:
        run = dataclasses.replace(run, **updates)
    return ParsedConfig(instance=parsed.instance, run=run, raw=parsed.raw)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        if args.command == "verify":
            seed = args.seed if args.seed is not None else 0
            results, all_passed = cmd_verify_results(args.suite, seed)
            raw_config = {"suite": args.suite, "seed": seed}
            report = build_report("verify", raw_config, results, seed)
            emit_report(report, args.format, args.out)
            print(f"verify: {time.perf_counter() - start:.2f}s", file=sys.stderr)
            return 0 if all_passed else 1
        if not args.config:
            print("error: --config is required", file=sys.stderr)
            return 2
        parsed = _apply_overrides(load_config(args.config), args)
        results = _COMMANDS[args.command](parsed)
        report = build_report(args.command, parsed.raw, results, parsed.run.seed)
        emit_report(report, args.format, args.out)
        print(f"{args.command}: {time.perf_counter() - start:.2f}s", file=sys.stderr)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (InapplicableError, ValueError, ArithmeticError, AssertionError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
