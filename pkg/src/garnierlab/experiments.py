"""Seeded verification experiments and their machine-readable reports."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .darboux import (
    DarbouxPoint,
    admissible,
    psi,
    psi_inverse,
    sigma_darb_to_sigma,
    sigma_to_sigma_darb,
    symplectic_defect,
)
from .errors import ConfigError, GarnierLabError
from .fuchsian import ALL_POLES, FuchsianSystem, PoleConfig, q_invariants, sigma_system
from .garnier import isomonodromic_flow
from .genus2 import (
    Genus2System,
    QuadraticDifferential,
    det_quadratic,
    phi_lift,
    section_phi,
    self_intersection_report,
    tangency_points,
    twelve_special_fibers,
)
from .monodromy import (
    DEFAULT_WORDS,
    choose_basepoint,
    even_word_traces,
    fuchsian_monodromy,
    hyperelliptic_continuation,
    is_irreducible,
    rh_jacobian_rank,
    rh_trace_map,
    standard_loops,
    two_point_loop,
)
from .transversality import (
    reducible_residual_sigma,
    reducible_z,
    tangent_cone_conic,
    transversality_det_closed_scaled,
    transversality_det_numeric,
)

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "Report",
    "Sampler",
    "run_experiment",
    "emit_report",
    "load_config",
]

EXPERIMENTS = (
    "identities",
    "transversality",
    "monodromy-invariants",
    "isomonodromy",
    "rh-rank",
    "riccati-geometry",
    "double-cover",
)

DEFAULT_SAMPLES = {
    "identities": 100,
    "transversality": 100,
    "monodromy-invariants": 10,
    "isomonodromy": 5,
    "rh-rank": 10,
    "riccati-geometry": 20,
    "double-cover": 3,
}

DEFAULT_THRESHOLDS = {
    "roundtrip": 1e-9,
    "symplectic": 1e-6,
    "discriminant": 1e-12,
    "sigma_membership": 1e-10,
    "det_agreement": 1e-6,
    "vanish": 1e-8,
    "nonvanish": 1e-3,
    "trace": 1e-6,
    "det": 1e-8,
    "product": 1e-6,
    "isomonodromy": 1e-6,
    "loop_return": 1e-6,
    "order_swap": 1e-6,
    "rank_ratio": 1e-6,
    "sweep_drop": 1e2,
    "branch_swap": 1e-8,
    "hyperelliptic": 1e-6,
}

# the isomonodromy and double-cover suites compare independently computed
# traces; a tighter integrator tolerance keeps their noise below threshold
DEFAULT_TOL_ODE = {"double-cover": 1e-12, "isomonodromy": 1e-11}


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 0
    samples: int | None = None
    tol_ode: float | None = None
    tol_alg: float = 1e-10
    guard: float = 1e-6
    t_box: float = 3.0
    t_guard: float = 0.3
    unit_box: float = 0.5  # half-width of the sampling box for z, c, nu, ...
    flow_step: float = 0.1
    sweep: tuple = (1e-1, 1e-2, 1e-3)
    thresholds: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.samples is None:
            self.samples = DEFAULT_SAMPLES[self.experiment]
        if self.tol_ode is None:
            self.tol_ode = DEFAULT_TOL_ODE.get(self.experiment, 1e-10)
        if not isinstance(self.samples, int) or self.samples < 1:
            raise ConfigError("samples must be a positive integer")
        for name in ("tol_ode", "tol_alg", "guard", "unit_box", "flow_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 < self.t_guard < 0.5 or self.t_box <= 1 + self.t_guard:
            raise ConfigError("the t sampling box must leave room around 0 and 1")
        if self.format not in ("json", "csv-summary"):
            raise ConfigError("format must be json or csv-summary")
        self.sweep = tuple(float(e) for e in self.sweep)
        if len(self.sweep) < 2 or any(e <= 0 for e in self.sweep):
            raise ConfigError("sweep needs at least two positive values")
        merged = dict(DEFAULT_THRESHOLDS)
        unknown = set(self.thresholds) - set(merged)
        if unknown:
            raise ConfigError(f"unknown thresholds: {sorted(unknown)}")
        merged.update({k: float(v) for k, v in self.thresholds.items()})
        if any(not v > 0 for v in merged.values()):
            raise ConfigError("thresholds must be positive")
        self.thresholds = merged
        self.seed = int(self.seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sweep"] = list(self.sweep)
        return d


def load_config(path: str, **overrides) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


class Sampler:
    """Seeded sampling of pole configurations and unit-box coordinates."""

    def __init__(self, cfg: ExperimentConfig, stream: int = 0):
        self.cfg = cfg
        self.rng = np.random.default_rng([cfg.seed, stream])

    def complex(self, n: int | None = None, half: float | None = None):
        h = self.cfg.unit_box if half is None else half
        re = self.rng.uniform(-h, h, n)
        im = self.rng.uniform(-h, h, n)
        return re + 1j * im

    def poles(self) -> PoleConfig:
        b, g = self.cfg.t_box, self.cfg.t_guard
        for _ in range(10000):
            t = self.rng.uniform(-b, b, 3) + 1j * self.rng.uniform(-b, b, 3)
            pts = [0, 1, *t]
            if min(abs(x - y) for i, x in enumerate(pts) for y in pts[i + 1 :]) > g:
                return PoleConfig(*t)
        raise ConfigError("could not sample an admissible pole configuration")


def _cx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        return _cx(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, PoleConfig):
        return [_cx(v) for v in x.t]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not np.isfinite(x):
        return str(x)
    return x


# ---------------------------------------------------------------------------
# cases and reports
# ---------------------------------------------------------------------------


class Case:
    def __init__(self, index: int, kind: str):
        self.index = index
        self.kind = kind
        self.inputs: dict = {}
        self.outputs: dict = {}
        self.checks: list = []
        self.error: str | None = None

    def check(self, name: str, value: float, op: str, threshold: float) -> bool:
        value = float(value)
        if op == "<":
            ok = value < threshold
        elif op == ">":
            ok = value > threshold
        elif op == "==":
            ok = value == threshold
        else:  # pragma: no cover
            raise ValueError(op)
        self.checks.append(
            {"name": name, "value": value, "op": op, "threshold": float(threshold), "pass": bool(ok)}
        )
        return ok

    @property
    def passed(self) -> bool:
        return self.error is None and all(c["pass"] for c in self.checks)

    def to_dict(self) -> dict:
        return _jsonable(
            {
                "index": self.index,
                "kind": self.kind,
                "inputs": self.inputs,
                "outputs": self.outputs,
                "checks": self.checks,
                "pass": self.passed,
                "error": self.error,
            }
        )


@dataclass
class Report:
    config: dict
    cases: list
    aggregates: dict
    version: str = __version__
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.aggregates.get("pass", False))

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "cases": self.cases,
            "aggregates": self.aggregates,
            "version": self.version,
            "timings": self.timings,
        }

    def content(self) -> dict:
        """Everything except wall-clock timings (the deterministic part)."""
        d = self.to_dict()
        d.pop("timings")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(d["config"], d["cases"], d["aggregates"], d["version"], d.get("timings", {}))

    def __eq__(self, other):
        return isinstance(other, Report) and self.to_dict() == other.to_dict()


def aggregate_cases(cases: list) -> dict:
    worst: dict = {}
    for c in cases:
        for chk in c["checks"]:
            name, v = chk["name"], chk["value"]
            if name not in worst:
                worst[name] = v
            elif chk["op"] == "<":
                worst[name] = max(worst[name], v)
            elif chk["op"] == ">":
                worst[name] = min(worst[name], v)
    n_pass = sum(1 for c in cases if c["pass"])
    return {
        "cases": len(cases),
        "passed": n_pass,
        "failed": len(cases) - n_pass,
        "errors": sum(1 for c in cases if c["error"]),
        "worst": worst,
        "pass": len(cases) > 0 and n_pass == len(cases),
    }


def _run_case(cases: list, index: int, kind: str, body: Callable[[Case], None]) -> Case:
    case = Case(index, kind)
    try:
        body(case)
    except GarnierLabError as exc:
        case.error = f"{type(exc).__name__}: {exc}"
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        case.error = f"{type(exc).__name__}: {exc}"
    cases.append(case)
    return case


def run_experiment(cfg: ExperimentConfig) -> Report:
    start = time.perf_counter()
    cases: list[Case] = []
    extra: dict = {}
    _SUITES[cfg.experiment](cfg, cases, extra)
    case_dicts = [c.to_dict() for c in sorted(cases, key=lambda c: c.index)]
    agg = aggregate_cases(case_dicts)
    agg.update(_jsonable(extra))
    elapsed = time.perf_counter() - start
    return Report(cfg.to_dict(), case_dicts, agg, __version__, {"wall_seconds": elapsed})


def emit_report(report: Report, fmt: str = "json", path: str | None = None) -> int:
    """Write the report as JSON or as a CSV summary; returns bytes written.

    With ``path=None`` the text goes to standard output.
    """
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=False) + "\n"
    elif fmt == "csv-summary":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "kind", "pass", "checks", "failed_checks", "error"])
        for c in report.cases:
            failed = [chk["name"] for chk in c["checks"] if not chk["pass"]]
            w.writerow([c["index"], c["kind"], c["pass"], len(c["checks"]), ";".join(failed), c["error"] or ""])
        text = buf.getvalue()
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    data = text.encode()
    if path is None:
        import sys

        sys.stdout.write(text)
        sys.stdout.flush()
        return len(data)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return len(data)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def _rel(a, b) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def _suite_identities(cfg: ExperimentConfig, cases: list, extra: dict) -> None:
    th = cfg.thresholds
    s = Sampler(cfg)
    for k in range(cfg.samples):
        t = s.poles()
        # psi o psi^-1 on a random chart point outside the guard bands
        for _ in range(1000):
            z, c = s.complex(3), s.complex(3)
            try:
                d = psi_inverse(t, z, c)
            except GarnierLabError:
                continue
            if admissible(t, d, cfg.guard):
                break
        zs, c1, c2 = s.complex(), s.complex(), s.complex()
        pd = s.complex(3)
        beta, gamma = s.complex(2), s.complex(2)

        def body(case, t=t, z=z, c=c, d=d, zs=zs, c1=c1, c2=c2, pd=pd, beta=beta, gamma=gamma):
            case.inputs = {"t": t, "z": z, "c": c}
            z2, c2_ = psi(t, d)
            case.check("psi_roundtrip", _rel(np.r_[z2, c2_], np.r_[z, c]), "<", th["roundtrip"])
            d2 = psi_inverse(t, z2, c2_)
            case.check("psi_inverse_roundtrip", _rel(d2.vector(), d.vector()), "<", th["roundtrip"])
            case.check("symplectic_defect", symplectic_defect(t, d), "<", th["symplectic"])
            # Sigma -> Sigma^Darb -> Sigma
            sig = np.array([zs, c1, c2, -c1 - c2])
            darb = sigma_to_sigma_darb(t, *sig)
            back = sigma_darb_to_sigma(t, *darb)
            case.check("sigma_roundtrip", _rel(back, sig), "<", th["roundtrip"])
            # Sigma^Darb -> Sigma -> Sigma^Darb
            p1, p2, q3 = pd[0], pd[1], pd[2] + 2.0  # keep q3 clear of 0 and 1
            img = sigma_darb_to_sigma(t, p1, p2, q3)
            scale = max(1.0, float(np.max(np.abs(img[1:]))))
            case.check("sigma_membership", abs(sum(img[1:])) / scale, "<", th["sigma_membership"])
            again = sigma_to_sigma_darb(t, *img)
            case.check("sigma_darb_roundtrip", _rel(again, [p1, p2, q3]), "<", th["roundtrip"])
            # discriminant identity
            g = Genus2System(t, beta[0], beta[1], gamma[0], gamma[1])
            nu = det_quadratic(g)
            case.check(
                "discriminant_identity", abs(nu.discriminant - g.resultant**2), "<", th["discriminant"]
            )

        _run_case(cases, k, "identities", body)


def _suite_transversality(cfg: ExperimentConfig, cases: list, extra: dict) -> None:
    th = cfg.thresholds
    s = Sampler(cfg)
    idx = 0
    for _ in range(cfg.samples):
        t = s.poles()
        p1, p2 = s.complex(), s.complex()
        q3 = s.complex(half=2.0)
        while min(abs(q3), abs(q3 - 1)) < 0.1:
            q3 = s.complex(half=2.0)

        def body(case, t=t, p1=p1, p2=p2, q3=q3):
            case.inputs = {"t": t, "p1": p1, "p2": p2, "q3": q3}
            closed = transversality_det_closed_scaled(t, p1, p2, q3).value
            halfd = transversality_det_numeric(t, p1, p2, q3, form="half-derivative")
            iso = transversality_det_numeric(t, p1, p2, q3)
            case.outputs = {"closed": closed, "numeric_half_derivative": halfd, "numeric_isomonodromic": iso}
            den = abs(closed)
            case.check("det_agreement", abs(halfd - closed) / den, "<", th["det_agreement"])
            # the isomonodromic fields reproduce the closed form up to sign
            case.check("det_agreement_isomonodromic", abs(iso + closed) / den, "<", th["det_agreement"])

        _run_case(cases, idx, "agreement", body)
        idx += 1

    n_locus = max(1, cfg.samples // 5)
    for kind in ("reducible", "generic"):
        for _ in range(n_locus):
            for _attempt in range(1000):
                t = s.poles()
                c1, c2 = s.complex(), s.complex()
                c3 = -c1 - c2
                z = reducible_z(t, c1, c2, c3) if kind == "reducible" else s.complex()
                Q0, Q1, Qinf = q_invariants(t, [c1, c2, c3])
                ref = max(abs(c1), abs(c2), abs(c3)) * t.scale() ** 2
                if min(abs(Q0), abs(Q1), abs(Qinf)) > cfg.guard * ref:
                    break

            def body(case, t=t, z=z, c1=c1, c2=c2, c3=c3, kind=kind):
                case.inputs = {"t": t, "z": z, "c": [c1, c2, c3]}
                p1, p2, q3 = sigma_to_sigma_darb(t, z, c1, c2, c3)
                dv = transversality_det_closed_scaled(t, p1, p2, q3)
                conic = tangent_cone_conic(t, z, c1, c2)
                res = reducible_residual_sigma(t, z, c1, c2, c3)
                case.outputs = {
                    "p1": p1, "p2": p2, "q3": q3,
                    "det": dv.value, "conic_det": conic.det, "residual": res,
                }
                crel = abs(conic.det) / conic.scale
                if kind == "reducible":
                    case.check("closed_det_vanishes", dv.relative, "<", th["vanish"])
                    case.check("conic_det_vanishes", crel, "<", th["vanish"])
                else:
                    case.check("closed_det_nonzero", dv.relative, ">", th["nonvanish"])
                    case.check("conic_det_nonzero", crel, ">", th["nonvanish"])

            _run_case(cases, idx, kind, body)
            idx += 1


def _suite_monodromy(cfg: ExperimentConfig, cases: list, extra: dict) -> None:
    th = cfg.thresholds
    s = Sampler(cfg)
    for k in range(cfg.samples):
        t = s.poles()
        z, c = s.complex(3), s.complex(3)

        def body(case, t=t, z=z, c=c):
            case.inputs = {"t": t, "z": z, "c": c}
            rep = fuchsian_monodromy(FuchsianSystem(t, z, c), tol=cfg.tol_ode)
            r = rep.invariant_residuals()
            case.outputs = {
                "traces": [np.trace(M) for M in rep.matrices],
                "order": [p.value for p in rep.order],
                "max_entry": float(np.max(np.abs(rep.matrices))),
                "square_traces": [np.trace(M @ M) for M in rep.matrices],
            }
            case.check("max_abs_trace", r["max_abs_trace"], "<", th["trace"])
            case.check("max_det_plus_one", r["max_det_plus_one"], "<", th["det"])
            case.check("product_defect", r["product_defect"], "<", th["product"])

        _run_case(cases, k, "monodromy", body)


def _irreducible_sigma_point(s: Sampler, cfg: ExperimentConfig):
    for _ in range(1000):
        t = s.poles()
        z, c1, c2 = s.complex(), s.complex(), s.complex()
        c3 = -c1 - c2
        Q0, Q1, Qinf = q_invariants(t, [c1, c2, c3])
        ref = max(abs(c1), abs(c2), abs(c3)) * t.scale() ** 2
        if min(abs(Q0), abs(Q1), abs(Qinf)) <= cfg.guard * ref:
            continue
        res = reducible_residual_sigma(t, z, c1, c2, c3)
        if abs(res) > 1e-3 * ref:
            return t, z, c1, c2, c3
    raise ConfigError("could not sample an irreducible Sigma point")


def _shift(t: PoleConfig, i: int, dt: complex) -> PoleConfig:
    v = t.t.copy()
    v[i] += dt
    return PoleConfig(*v)


def _suite_isomonodromy(cfg: ExperimentConfig, cases: list, extra: dict) -> None:
    th = cfg.thresholds
    s = Sampler(cfg)
    dt = cfg.flow_step
    tol = cfg.tol_ode
    for k in range(cfg.samples):
        t, z, c1, c2, c3 = _irreducible_sigma_point(s, cfg)

        def body(case, t=t, z=z, c1=c1, c2=c2, c3=c3):
            case.inputs = {"t": t, "z": z, "c": [c1, c2, c3]}
            d0 = psi_inverse(t, [z] * 3, [c1, c2, c3])
            ends = [_shift(t, i, dt) for i in range(3)] + [_shift(_shift(t, 0, dt), 1, dt)]
            b = choose_basepoint([t, *ends])

            def traces(tt, d):
                zz, cc = psi(tt, d)
                rep = fuchsian_monodromy(FuchsianSystem(tt, zz, cc), standard_loops(tt, b), tol)
                return rep, even_word_traces(rep, DEFAULT_WORDS)

            rep0, tr0 = traces(t, d0)
            case.check("irreducible", float(is_irreducible(rep0)), "==", 1.0)
            case.outputs["traces"] = tr0
            for i in range(3):
                t1 = _shift(t, i, dt)
                d1 = isomonodromic_flow([t, t1], d0, tol).end[1]
                _, tr1 = traces(t1, d1)
                case.check(f"trace_change_t{i + 1}", float(np.max(np.abs(tr1 - tr0))), "<", th["isomonodromy"])
            # closed square in (t1, t2)
            a, b1 = _shift(t, 0, dt), _shift(_shift(t, 0, dt), 1, dt)
            square = [t, a, b1, _shift(t, 1, dt), t]
            dl = isomonodromic_flow(square, d0, tol).end[1]
            case.check("loop_return", float(np.max(np.abs(dl.vector() - d0.vector()))), "<", th["loop_return"])
            # order swap: t1 then t2 versus t2 then t1
            e12 = isomonodromic_flow([t, a, b1], d0, tol).end[1]
            e21 = isomonodromic_flow([t, _shift(t, 1, dt), b1], d0, tol).end[1]
            case.check("order_swap", float(np.max(np.abs(e12.vector() - e21.vector()))), "<", th["order_swap"])

        _run_case(cases, k, "isomonodromy", body)


def _degenerate_nu(nu1: complex, nu2: complex, eps: float) -> QuadraticDifferential:
    return QuadraticDifferential((nu1 * nu1 - eps) / (4 * nu2), nu1, nu2)


def _suite_rh_rank(cfg: ExperimentConfig, cases: list, extra: dict) -> None:
    th = cfg.thresholds
    s = Sampler(cfg)
    for k in range(cfg.samples):
        t = s.poles()
        nu = QuadraticDifferential(*s.complex(3))

        def body(case, t=t, nu=nu):
            case.inputs = {"t": t, "nu": nu.vector()}
            r = rh_jacobian_rank(t, nu, DEFAULT_WORDS, tol=cfg.tol_ode, rel_threshold=th["rank_ratio"])
            case.outputs = {"rank": r.rank, "singular_values": r.singular_values}
            case.check("rank", r.rank, "==", 6)
            case.check("sigma_ratio", r.condition_ratio, ">", th["rank_ratio"])

        _run_case(cases, k, "rank", body)

    s2 = Sampler(cfg, stream=1)
    t = s2.poles()
    nu1, nu2 = s2.complex(), s2.complex()

    def sweep(case):
        case.inputs = {"t": t, "nu1": nu1, "nu2": nu2, "eps": list(cfg.sweep)}
        smin = []
        for eps in cfg.sweep:
            r = rh_jacobian_rank(t, _degenerate_nu(nu1, nu2, eps), DEFAULT_WORDS, tol=cfg.tol_ode)
            smin.append(float(r.singular_values[-1]))
        case.outputs = {"sigma_min": smin}
        steps = [smin[i + 1] / smin[i] for i in range(len(smin) - 1)]
        case.check("monotone", float(max(steps)), "<", 1.0)
        case.check("sweep_drop", smin[0] / smin[-1], ">", th["sweep_drop"])

    _run_case(cases, cfg.samples, "sweep", sweep)


def _suite_riccati(cfg: ExperimentConfig, cases: list, extra: dict) -> None:
    s = Sampler(cfg)
    for k in range(cfg.samples):
        t = s.poles()
        while True:
            b, g = s.complex(2), s.complex(2)
            sys = Genus2System(t, b[0], b[1], g[0], g[1])
            if abs(sys.resultant) > 1e-3 * sys.scale() ** 2:
                break
        heights = s.complex(5)

        def body(case, sys=sys, heights=heights):
            case.inputs = {"t": sys.poles, "beta": [sys.beta0, sys.beta1], "gamma": [sys.gamma0, sys.gamma1], "p": heights}
            counts = [sum(pt.multiplicity for pt in tangency_points(sys, p)) for p in heights]
            case.outputs["tangency_counts"] = counts
            for j, n in enumerate(counts):
                case.check(f"tangency_count_{j}", n, "==", 2)
            fibers = twelve_special_fibers(sys)
            total = sum(f.multiplicity for f in fibers)
            case.check("special_fibers", total, "==", 12)
            for f in fibers:
                pts = tangency_points(sys, f.p)
                if not (len(pts) == 1 and pts[0].multiplicity == 2):
                    case.check("special_fiber_double_point", 0, "==", 1)
            rep = self_intersection_report(sys)
            case.outputs.update(
                {"self_intersection": rep.value, "c1_wedge": rep.c1_wedge, "generic": rep.generic}
            )
            case.check("c1_wedge", rep.c1_wedge, "==", -2)
            case.check("self_intersection", rep.value, "==", -4)

        _run_case(cases, k, "riccati", body)


def _sample_nu(s: Sampler) -> QuadraticDifferential:
    for _ in range(1000):
        nu = QuadraticDifferential(*s.complex(3))
        if abs(nu.discriminant) > 1e-2 * nu.scale() ** 2 and abs(nu.nu2) > 1e-2:
            return nu
    raise ConfigError("could not sample an irreducible nu")


def _suite_double_cover(cfg: ExperimentConfig, cases: list, extra: dict) -> None:
    th = cfg.thresholds
    s = Sampler(cfg)
    tol = cfg.tol_ode
    for k in range(cfg.samples):
        t = s.poles()
        nu = _sample_nu(s)

        def body(case, t=t, nu=nu):
            case.inputs = {"t": t, "nu": nu.vector()}
            b = choose_basepoint([t])
            tr = [rh_trace_map(t, nu, DEFAULT_WORDS, tol, root_choice=r, basepoint=b) for r in (0, 1)]
            case.outputs["traces"] = tr[0]
            case.check("branch_swap", float(np.max(np.abs(tr[0] - tr[1]))), "<", th["branch_swap"])
            z, c1, c2, c3 = section_phi(t, nu, 0)
            back = det_quadratic(phi_lift(t, z, c1, c2, c3))
            case.check("section_roundtrip", _rel(back.vector(), nu.vector()), "<", th["roundtrip"])
            rep = fuchsian_monodromy(sigma_system(t, z, c1, c2), standard_loops(t, b), tol)
            g2 = phi_lift(t, z, c1, c2, c3)
            worst = 0.0
            sheets = []
            for w in (w for w in DEFAULT_WORDS if len(w) == 2):
                j, l = ALL_POLES[w[0] - 1], ALL_POLES[w[1] - 1]
                H = hyperelliptic_continuation(g2, two_point_loop(rep.loops, j, l), 1, tol)
                sheets.append(H.sheet)
                ref = even_word_traces(rep, [w])[0]
                worst = max(worst, abs(np.trace(H.matrix) - ref))
            case.check("hyperelliptic", worst, "<", th["hyperelliptic"])
            case.check("sheet_preserved", float(all(sh == 1 for sh in sheets)), "==", 1.0)

        _run_case(cases, k, "double-cover", body)


_SUITES = {
    "identities": _suite_identities,
    "transversality": _suite_transversality,
    "monodromy-invariants": _suite_monodromy,
    "isomonodromy": _suite_isomonodromy,
    "rh-rank": _suite_rh_rank,
    "riccati-geometry": _suite_riccati,
    "double-cover": _suite_double_cover,
}
