"""Command-line driver: ``garnierlab verify|flow|fibers|rh-rank|report``.

Every verb prints (or writes) a report and exits 0 exactly when it passed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .darboux import DarbouxPoint, psi, psi_inverse
from .errors import ConfigError, GarnierLabError
from .experiments import (
    DEFAULT_THRESHOLDS,
    EXPERIMENTS,
    Case,
    ExperimentConfig,
    Report,
    aggregate_cases,
    emit_report,
    load_config,
    run_experiment,
)
from .fuchsian import FuchsianSystem, PoleConfig
from .garnier import isomonodromic_flow
from .genus2 import Genus2System, QuadraticDifferential, self_intersection_report, twelve_special_fibers
from .monodromy import (
    DEFAULT_WORDS,
    choose_basepoint,
    even_word_traces,
    fuchsian_monodromy,
    rh_jacobian_rank,
    standard_loops,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _complex_list(n: int):
    def parse(text: str) -> list[complex]:
        try:
            vals = [complex(v.strip().replace(" ", "")) for v in text.split(",")]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad complex list {text!r}") from exc
        if len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated values, got {len(vals)}")
        return vals

    return parse


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--tol-ode", type=float)
    p.add_argument("--tol-alg", type=float)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv-summary"))
    p.add_argument("--config", help="JSON file mirroring ExperimentConfig")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="garnierlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"garnierlab {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True)

    v = sub.add_parser("verify", help="run one verification experiment")
    v.add_argument("experiment", choices=EXPERIMENTS)
    _common(v)

    r = sub.add_parser("report", help="run every experiment and emit one combined report")
    _common(r)

    f = sub.add_parser("flow", help="Garnier flow from a Fuchsian system, checking trace invariance")
    f.add_argument("--t", type=_complex_list(3), required=True, metavar="T1,T2,T3")
    f.add_argument("--z", type=_complex_list(3), required=True, metavar="Z1,Z2,Z3")
    f.add_argument("--c", type=_complex_list(3), required=True, metavar="C1,C2,C3")
    f.add_argument("--to", type=_complex_list(3), required=True, metavar="T1,T2,T3")
    _common(f)

    g = sub.add_parser("fibers", help="special fibers and self-intersection of a normal-form system")
    g.add_argument("--t", type=_complex_list(3), required=True, metavar="T1,T2,T3")
    g.add_argument("--beta", type=_complex_list(2), required=True, metavar="B0,B1")
    g.add_argument("--gamma", type=_complex_list(2), required=True, metavar="G0,G1")
    _common(g)

    k = sub.add_parser("rh-rank", help="rank of the Riemann-Hilbert trace Jacobian at (t, nu)")
    k.add_argument("--t", type=_complex_list(3), required=True, metavar="T1,T2,T3")
    k.add_argument("--nu", type=_complex_list(3), required=True, metavar="NU0,NU1,NU2")
    _common(k)
    return ap


def _config(args, experiment: str) -> ExperimentConfig:
    over = {
        "seed": args.seed,
        "samples": args.samples,
        "tol_ode": args.tol_ode,
        "tol_alg": args.tol_alg,
        "out": args.out,
        "format": args.format,
    }
    if args.config:
        over["experiment"] = experiment
        return load_config(args.config, **over)
    return ExperimentConfig(experiment, **{k: v for k, v in over.items() if v is not None})


def _single(name: str, args, body) -> Report:
    """Wrap a one-off computation as a single-case report."""
    tol = args.tol_ode if args.tol_ode is not None else 1e-10
    if not tol > 0:
        raise ConfigError("tol-ode must be positive")
    case = Case(0, name)
    try:
        body(case, tol)
    except GarnierLabError as exc:
        case.error = f"{type(exc).__name__}: {exc}"
    cases = [case.to_dict()]
    config = {"experiment": name, "tol_ode": tol, "thresholds": dict(DEFAULT_THRESHOLDS)}
    return Report(config, cases, aggregate_cases(cases), __version__, {})


def _flow(args) -> Report:
    t0, t1 = PoleConfig(*args.t), PoleConfig(*args.to)

    def body(case, tol):
        case.inputs = {"t": t0, "z": args.z, "c": args.c, "to": t1}
        d0 = psi_inverse(t0, args.z, args.c)
        d1 = isomonodromic_flow([t0, t1], d0, tol).end[1]
        b = choose_basepoint([t0, t1])

        def traces(t, d: DarbouxPoint):
            z, c = psi(t, d)
            rep = fuchsian_monodromy(FuchsianSystem(t, z, c), standard_loops(t, b), tol)
            return even_word_traces(rep, DEFAULT_WORDS)

        tr0, tr1 = traces(t0, d0), traces(t1, d1)
        z1, c1 = psi(t1, d1)
        case.outputs = {"q": d1.q, "p": d1.p, "z": z1, "c": c1, "traces": tr0}
        case.check("trace_change", float(np.max(np.abs(tr1 - tr0))), "<", DEFAULT_THRESHOLDS["isomonodromy"])

    return _single("flow", args, body)


def _fibers(args) -> Report:
    def body(case, tol):
        sys_ = Genus2System(PoleConfig(*args.t), *args.beta, *args.gamma)
        case.inputs = {"t": sys_.poles, "beta": args.beta, "gamma": args.gamma}
        fibers = twelve_special_fibers(sys_)
        rep = self_intersection_report(sys_)
        case.outputs = {
            "fibers": [{"w": str(f.w), "p": str(f.p), "multiplicity": f.multiplicity} for f in fibers],
            "self_intersection": rep.value,
            "c1_wedge": rep.c1_wedge,
            "generic": rep.generic,
        }
        case.check("special_fibers", sum(f.multiplicity for f in fibers), "==", 12)
        case.check("self_intersection", rep.value, "==", -4)

    return _single("fibers", args, body)


def _rh_rank(args) -> Report:
    def body(case, tol):
        t = PoleConfig(*args.t)
        nu = QuadraticDifferential(*args.nu)
        case.inputs = {"t": t, "nu": nu.vector()}
        r = rh_jacobian_rank(t, nu, DEFAULT_WORDS, tol=tol)
        case.outputs = {"rank": r.rank, "singular_values": r.singular_values, "jacobian": r.jacobian}
        case.check("rank", r.rank, "==", 6)
        case.check("sigma_ratio", r.condition_ratio, ">", DEFAULT_THRESHOLDS["rank_ratio"])

    return _single("rh-rank", args, body)


def _report(args) -> Report:
    cases, aggregates, configs, timings = [], {}, [], {}
    for name in EXPERIMENTS:
        rep = run_experiment(_config(args, name))
        configs.append(rep.config)
        aggregates[name] = rep.aggregates
        timings[name] = rep.timings.get("wall_seconds")
        for c in rep.cases:
            cases.append(dict(c, index=len(cases), kind=f"{name}/{c['kind']}"))
    agg = aggregate_cases(cases)
    agg["experiments"] = aggregates
    agg["pass"] = all(a["pass"] for a in aggregates.values())
    return Report({"experiment": "report", "experiments": configs}, cases, agg, __version__, timings)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "verify":
            cfg = _config(args, args.experiment)
            report = run_experiment(cfg)
            fmt, out = cfg.format, cfg.out
        else:
            report = {"flow": _flow, "fibers": _fibers, "rh-rank": _rh_rank, "report": _report}[args.verb](args)
            fmt, out = args.format or "json", args.out
        emit_report(report, fmt, out)
    except ConfigError as exc:
        print(f"garnierlab: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GarnierLabError as exc:
        print(f"garnierlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"garnierlab: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
