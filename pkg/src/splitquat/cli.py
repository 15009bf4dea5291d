"""Command line runner for the named verification experiments.

Usage::

    splitquat run --experiment sphere-kernel-integral --set eps=1,0.1 --out out.csv
    splitquat run --config run.json

A config file is a flat JSON object holding ``experiment``, optionally
``out`` and ``format``, and any experiment parameters.  ``--set`` overrides
single keys.  Exit status: 0 when every case meets its tolerance, 1 when
one does not, 2 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .algebra import E0, Biquaternion, identity_residuals, inverse, mul
from .calculus import kernel, reciprocal_n, regularity_residual, wave_operator
from .errors import ConfigError
from .fueter import (
    EpsSchedule,
    classical_values,
    deformed_values,
    eps_extrapolate,
    homotopy_check,
    regularized_values,
    sphere_kernel_integral,
    sphere_kernel_reference,
    theta_regularized,
)
from .geometry import box_boundary_HR, restriction_check, sphere_H, sphere_HR
from .regions import in_gamma0, in_gamma0_bar, omega_margin, random_gamma0

COMPONENTS = ("z0", "z1", "z2", "z3")
VALUE_COLUMNS = [f"value_{c}_{p}" for c in COMPONENTS for p in ("re", "im")]
REFERENCE_COLUMNS = [f"ref_{c}_{p}" for c in COMPONENTS for p in ("re", "im")]
COLUMNS = ["case_id", *VALUE_COLUMNS, *REFERENCE_COLUMNS, "abs_error", "resolution", "epsilon", "wall_ms"]
PROVENANCE = ("closed-form", "oracle", "none")


@dataclass
class Row:
    case_id: str
    value: np.ndarray
    reference: np.ndarray | None = None
    provenance: str = "none"
    tolerance: float | None = None
    resolution: str = ""
    epsilon: float | None = None
    wall_ms: float = 0.0
    passed: bool | None = None

    def __post_init__(self):
        self.value = _coeffs(self.value)
        if self.reference is not None:
            self.reference = _coeffs(self.reference)
        if self.provenance not in PROVENANCE:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.passed is None and self.tolerance is not None and self.reference is not None:
            self.passed = bool(self.abs_error <= self.tolerance)

    @property
    def abs_error(self) -> float | None:
        if self.reference is None:
            return None
        return float(np.sqrt(np.sum(np.abs(self.value - self.reference) ** 2)))

    def record(self) -> dict:
        out = {"case_id": self.case_id}
        out.update(_split(self.value, VALUE_COLUMNS))
        out.update(_split(self.reference, REFERENCE_COLUMNS))
        out["abs_error"] = self.abs_error
        out["resolution"] = self.resolution
        out["epsilon"] = self.epsilon
        out["wall_ms"] = self.wall_ms
        return out


@dataclass
class RunReport:
    experiment: str
    config: dict
    rows: list

    @property
    def ok(self) -> bool:
        return all(r.passed is not False for r in self.rows)


def _coeffs(v) -> np.ndarray:
    if isinstance(v, Biquaternion):
        return v.coeffs
    arr = np.asarray(v, dtype=complex)
    if arr.ndim == 0:
        return np.array([complex(arr), 0, 0, 0])
    return arr.reshape(4)


def _split(v, names) -> dict:
    if v is None:
        return {n: None for n in names}
    flat = np.column_stack([v.real, v.imag]).ravel()
    return {n: float(x) for n, x in zip(names, flat)}


# ----------------------------------------------------------------------------
# parameters


def _floats(s) -> tuple[float, ...]:
    if isinstance(s, (list, tuple)):
        return tuple(float(x) for x in s)
    if isinstance(s, (int, float)):
        return (float(s),)
    return tuple(float(x) for x in str(s).split(",") if x.strip())


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    if str(s).lower() in ("1", "true", "yes", "on"):
        return True
    if str(s).lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _choice(*options):
    def parse(s):
        s = str(s)
        if s not in options:
            raise ValueError(f"expected one of {options}, got {s!r}")
        return s

    return parse


COMMON = {"seed": (int, 0), "timing": (_bool, True), "threads": (int, 0)}

_FUNCTION = {
    "f": (_choice("const", "kernel"), "const"),
    "c": (float, 1.0),
    "y": (_floats, (5.0, 0.0, 0.0, 0.0)),
    "side": (_choice("left", "right"), "left"),
}

PARAMETERS: dict[str, dict[str, tuple[Callable, object]]] = {
    "algebra-identities": {"count": (int, 10_000), "tol": (float, 1e-13)},
    "kernel-regularity": {"count": (int, 100), "h": (float, 1e-3), "wave_h": (float, 1e-3), "order": (int, 4),
                          "tol": (float, 1e-5), "wave_tol": (float, 1e-4), "min_ratio": (float, 3.5),
                          "min_n": (float, 0.5)},
    "restriction-lemma": {"samples": (int, 500), "r": (float, 1.0), "patch": (float, 1.0), "tol": (float, 1e-10)},
    "sphere-kernel-integral": {"r": (_floats, (1.0, 2.0)), "eps": (_floats, (1.0, 0.1, 0.01)),
                               "res": (int, 16), "rtol": (float, 1e-6)},
    "fueter-classical": {**_FUNCTION, "x0": (_floats, (0.2, 0.1, -0.3, 0.1)), "r": (float, 1.0),
                         "res": (int, 0), "tol": (float, 1e-6)},
    "fueter-deformed": {**_FUNCTION, "x0": (_floats, (0.3, -0.4, 0.2, 0.5)),
                        "boundary": (_choice("sphere", "box"), "sphere"), "r": (float, 1.0),
                        "half_widths": (_floats, (1.2, 1.0, 0.9, 1.1)),
                        "eps": (_floats, (0.05, 0.1, 0.2, -0.05, -0.1, -0.2)), "res": (int, 0),
                        "tol": (float, 1e-5), "spread_tol": (float, 1e-6)},
    "fueter-regularized": {**_FUNCTION, "x0": (_floats, (0.0, 0.0, 0.0, 0.0)),
                           "boundary": (_choice("sphere", "box"), "sphere"), "r": (float, 1.0),
                           "half_widths": (_floats, (1.2, 1.0, 0.9, 1.1)),
                           "eps": (_floats, (0.2, 0.1, 0.05)), "res": (int, 0), "tol": (float, 1e-6)},
    "eps-sweep": {**_FUNCTION, "x0": (_floats, (0.0, 0.0, 0.0, 0.0)),
                  "boundary": (_choice("sphere", "box"), "sphere"), "r": (float, 1.0),
                  "half_widths": (_floats, (1.2, 1.0, 0.9, 1.1)),
                  "eps": (_floats, (0.2, 0.1, 0.05, 0.025, 0.0125)), "order": (int, 2), "power": (int, 1),
                  "res": (int, 0), "tol": (float, 1e-3), "model_tol": (float, 1e-6)},
    "theta-distribution": {"n": (int, 2), "eps": (_floats, (0.1, 0.01, 0.001)), "deg": (int, 64),
                           "window": (float, np.pi / 8), "tol": (float, 1e-8)},
    "homotopy-check": {"x0": (_floats, (0.3, -0.4, 0.2, 0.5)), "boundary": (_choice("sphere", "box"), "sphere"),
                       "r": (float, 1.0), "half_widths": (_floats, (1.2, 1.0, 0.9, 1.1)),
                       "eps": (float, 0.1), "sphere_r": (float, 0.3), "res": (int, 0), "tol": (float, 1e-6)},
    "region-classify": {"t_max": (float, 6.0), "grid": (int, 64), "pairs": (int, 100),
                        "margin_tol": (float, 1e-3)},
}

EXPERIMENTS = tuple(PARAMETERS)


def resolve_config(experiment: str, raw: dict) -> dict:
    """Parse and default the parameters of ``experiment``; unknown keys are errors."""
    if experiment not in PARAMETERS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    table = {**COMMON, **PARAMETERS[experiment]}
    unknown = sorted(set(raw) - set(table))
    if unknown:
        raise ConfigError(f"unknown keys for {experiment}: {', '.join(unknown)}")
    out = {}
    for key, (parse, default) in table.items():
        try:
            out[key] = parse(raw[key]) if key in raw else default
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from None
    return out


# ----------------------------------------------------------------------------
# experiments


class _Timer:
    def __init__(self, enabled: bool):
        self.enabled = enabled

    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = round(1e3 * (time.perf_counter() - self.t), 3) if self.enabled else 0.0


def _res_text(shape) -> str:
    return "x".join(str(int(s)) for s in shape) if shape else ""


def _res_arg(p):
    return None if p["res"] <= 0 else (p["res"],) * 3


def _threads(p):
    return p["threads"] or None


def _function(p, form: str):
    if p["f"] == "const":
        return Biquaternion(p["c"])
    return kernel(Biquaternion.from_coords(p["y"], form))


def _split_boundary(p):
    if p["boundary"] == "sphere":
        return sphere_HR((0.0, 0.0, 0.0, 0.0), p["r"]), float(np.linalg.norm(p["x0"])) < p["r"]
    hw = np.asarray(p["half_widths"], dtype=float)
    return box_boundary_HR((0.0, 0.0, 0.0, 0.0), hw), bool(np.all(np.abs(p["x0"]) < hw))


def _expected(f, x0, inside: bool):
    if not inside:
        return np.zeros(4, dtype=complex), "closed-form"
    if isinstance(f, Biquaternion):
        return f.coeffs, "closed-form"
    return f(x0).coeffs, "oracle"


def exp_algebra_identities(p):
    with _Timer(p["timing"]) as tm:
        res = identity_residuals(np.random.default_rng(p["seed"]), p["count"])
    return [Row(name, v, 0.0, "closed-form", p["tol"], str(p["count"]), None, tm.ms) for name, v in res.items()]


def _regularity_points(rng, count, min_n):
    # unit-scale HR points off the cone: the box [-1, 1]^4 with |N| >= min_n
    pts = []
    while len(pts) < count:
        x = rng.uniform(-1.0, 1.0, 4)
        n = x[0] ** 2 - x[1] ** 2 - x[2] ** 2 + x[3] ** 2
        if abs(n) >= min_n:
            pts.append(Biquaternion.from_coords(x, "HR"))
    return pts


def exp_kernel_regularity(p):
    rng = np.random.default_rng(p["seed"])
    pts = _regularity_points(rng, p["count"], p["min_n"])
    k = kernel()
    inv_n = reciprocal_n()
    rows = []
    for side in ("left", "right"):
        with _Timer(p["timing"]) as tm:
            r1 = np.array([regularity_residual(k, x, "HR", side, p["h"], p["order"]) for x in pts])
            r2 = np.array([regularity_residual(k, x, "HR", side, p["h"] / 2, p["order"]) for x in pts])
        rows.append(Row(f"{side}_residual", r1.max(), 0.0, "closed-form", p["tol"], f"order={p['order']}", None, tm.ms))
        ratio = float(np.min(r1 / r2))
        rows.append(Row(f"{side}_halving_ratio", ratio, None, "none", None, "", None, 0.0,
                        passed=ratio >= p["min_ratio"]))
    with _Timer(p["timing"]) as tm:
        w = max(float(np.linalg.norm(wave_operator(inv_n, x, p["wave_h"], "HR", p["order"]).coeffs)) for x in pts)
    rows.append(Row("wave_reciprocal_N", w, 0.0, "closed-form", p["wave_tol"], "", None, tm.ms))
    return rows


def exp_restriction_lemma(p):
    rows = []
    for kind in ("norm_level", "N_level"):
        with _Timer(p["timing"]) as tm:
            dev = restriction_check(kind, p["r"], p["samples"], p["seed"], patch=p["patch"])
        rows.append(Row(kind, dev, 0.0, "closed-form", p["tol"], str(p["samples"]), None, tm.ms))
    return rows


def exp_sphere_kernel_integral(p):
    rows = []
    res = (p["res"],) * 3
    for r in p["r"]:
        for eps in p["eps"]:
            with _Timer(p["timing"]) as tm:
                out = sphere_kernel_integral(r, eps, res, full=True)
            ref = sphere_kernel_reference(eps)
            rows.append(Row(f"r={r:g},eps={eps:g}", out.value, ref, "closed-form", p["rtol"] * abs(ref),
                            _res_text(out.resolution), eps, tm.ms))
    return rows


def exp_fueter_classical(p):
    x0 = Biquaternion.from_coords(p["x0"], "H")
    f = _function(p, "H")
    inside = float(np.linalg.norm(p["x0"])) < p["r"]
    with _Timer(p["timing"]) as tm:
        out = classical_values(sphere_H(Biquaternion(), p["r"]), x0, [f], p["side"], _res_arg(p),
                               threads=_threads(p))[0]
    ref, prov = _expected(f, x0, inside)
    case = f"{p['f']},{'inside' if inside else 'outside'}"
    return [Row(case, out.value, ref, prov, p["tol"], _res_text(out.resolution), None, tm.ms)]


def exp_fueter_deformed(p):
    x0 = Biquaternion.from_coords(p["x0"], "HR")
    f = _function(p, "HR")
    boundary, inside = _split_boundary(p)
    ref, prov = _expected(f, x0, inside)
    rows, by_sign = [], {1: [], -1: []}
    for eps in p["eps"]:
        with _Timer(p["timing"]) as tm:
            out = deformed_values(boundary, x0, [f], eps, p["side"], _res_arg(p), threads=_threads(p))[0]
        by_sign[1 if eps > 0 else -1].append(out.value.coeffs)
        rows.append(Row(f"{p['f']},eps={eps:g}", out.value, ref, prov, p["tol"],
                        _res_text(out.resolution), eps, tm.ms))
    for sign, vals in by_sign.items():
        if len(vals) > 1:
            v = np.array(vals)
            spread = float(max(np.linalg.norm(a - b) for a in v for b in v))
            rows.append(Row(f"spread,sign={'+' if sign > 0 else '-'}", spread, 0.0, "closed-form",
                            p["spread_tol"]))
    return rows


def _model_reference(p, f, eps):
    # the sphere lemma gives c / (1 + eps^2) for constants at the centre
    centred = p["boundary"] == "sphere" and not np.any(p["x0"])
    if isinstance(f, Biquaternion) and centred:
        return f.coeffs / (1.0 + eps * eps), "closed-form"
    return None, "none"


def exp_fueter_regularized(p):
    x0 = Biquaternion.from_coords(p["x0"], "HR")
    f = _function(p, "HR")
    boundary, _ = _split_boundary(p)
    rows = []
    for eps in p["eps"]:
        with _Timer(p["timing"]) as tm:
            out = regularized_values(boundary, x0, [f], eps, p["side"], _res_arg(p), threads=_threads(p))[0]
        ref, prov = _model_reference(p, f, eps)
        rows.append(Row(f"{p['f']},eps={eps:g}", out.value, ref, prov, p["tol"] if ref is not None else None,
                        _res_text(out.resolution), eps, tm.ms))
    return rows


def exp_eps_sweep(p):
    x0 = Biquaternion.from_coords(p["x0"], "HR")
    f = _function(p, "HR")
    boundary, inside = _split_boundary(p)
    rows, samples, total = [], [], 0.0
    for eps in p["eps"]:
        with _Timer(p["timing"]) as tm:
            out = regularized_values(boundary, x0, [f], eps, p["side"], _res_arg(p), threads=_threads(p))[0]
        total += tm.ms
        samples.append((eps, out.value))
        ref, prov = _model_reference(p, f, eps)
        rows.append(Row(f"{p['f']},eps={eps:g}", out.value, ref, prov,
                        p["model_tol"] if ref is not None else None, _res_text(out.resolution), eps, tm.ms))
    schedule = EpsSchedule(tuple(sorted(p["eps"], reverse=True)), p["order"], p["power"], tol=math.inf)
    ex = eps_extrapolate(samples, schedule)
    ref, prov = _expected(f, x0, inside)
    rows.append(Row(f"{p['f']},extrapolated", ex.value, ref, prov, p["tol"], rows[-1].resolution, 0.0,
                    round(total, 3)))
    return rows


def exp_theta_distribution(p):
    rows = []
    n = p["n"]

    def sin2(t):
        return np.sin(2 * t)

    for eps in p["eps"]:
        with _Timer(p["timing"]) as tm:
            v = theta_regularized(sin2, 2, eps, (0.0, np.pi / 2), p["deg"])
        rows.append(Row(f"sin2t,n=2,eps={eps:g}", v, -1.0 / (1.0 + eps * eps), "closed-form", p["tol"],
                        str(p["deg"]), eps, tm.ms))

    def one(t):
        return np.ones_like(np.asarray(t, dtype=float))

    with _Timer(p["timing"]) as tm:
        up = theta_regularized(one, 1, 0.0, p["window"], p["deg"])
        jump = up - theta_regularized(one, 1, -0.0, p["window"], p["deg"])
    rows.append(Row("jump,g=1,n=1", jump, -np.pi * 1j, "closed-form", p["tol"], str(p["deg"]), 0.0, tm.ms))
    for eps in p["eps"]:
        with _Timer(p["timing"]) as tm:
            v = theta_regularized(one, n, eps, p["window"], p["deg"])
        rows.append(Row(f"g=1,n={n},eps={eps:g}", v, None, "none", None, str(p["deg"]), eps, tm.ms))
    return rows


def exp_homotopy_check(p):
    x0 = Biquaternion.from_coords(p["x0"], "HR")
    boundary, inside = _split_boundary(p)
    with _Timer(p["timing"]) as tm:
        dev = homotopy_check(boundary, x0, p["eps"], p["sphere_r"], inside=inside, res=_res_arg(p))
    case = f"{p['boundary']},{'inside' if inside else 'outside'}"
    return [Row(case, dev, 0.0, "closed-form", p["tol"], "", p["eps"], tm.ms)]


def exp_region_classify(p):
    rng = np.random.default_rng(p["seed"])
    grid = (p["grid"],) * 3
    rows = []
    diag = Biquaternion.from_matrix(np.diag([2.0, 0.5]))
    rows.append(Row("gamma0:diag(2,1/2)", float(in_gamma0(diag)), 1.0, "closed-form", 0.0))
    rows.append(Row("neither:e0", float(in_gamma0(E0) or in_gamma0_bar(E0)), 0.0, "closed-form", 0.0))
    with _Timer(p["timing"]) as tm:
        fails = sum(not in_gamma0(mul(random_gamma0(rng), random_gamma0(rng))) for _ in range(p["pairs"]))
    rows.append(Row("semigroup_closure_failures", float(fails), 0.0, "closed-form", 0.0, str(p["pairs"]), None, tm.ms))
    with _Timer(p["timing"]) as tm:
        fails = sum(not in_gamma0_bar(inverse(random_gamma0(rng))) for _ in range(p["pairs"]))
    rows.append(Row("inverse_relation_failures", float(fails), 0.0, "closed-form", 0.0, str(p["pairs"]), None, tm.ms))
    for name, x0, ref, tol in (("margin:0", Biquaternion(), 1.0, 0.0),
                               ("margin:2e0", 2.0 * E0, 0.0, p["margin_tol"]),
                               ("margin:5ie0", 5j * E0, 24.0, 1e-9)):
        with _Timer(p["timing"]) as tm:
            m = omega_margin(x0, p["t_max"], grid)
        rows.append(Row(name, m, ref, "closed-form", tol, _res_text(grid), None, tm.ms))
    return rows


RUNNERS = {
    "algebra-identities": exp_algebra_identities,
    "kernel-regularity": exp_kernel_regularity,
    "restriction-lemma": exp_restriction_lemma,
    "sphere-kernel-integral": exp_sphere_kernel_integral,
    "fueter-classical": exp_fueter_classical,
    "fueter-deformed": exp_fueter_deformed,
    "fueter-regularized": exp_fueter_regularized,
    "eps-sweep": exp_eps_sweep,
    "theta-distribution": exp_theta_distribution,
    "homotopy-check": exp_homotopy_check,
    "region-classify": exp_region_classify,
}


def run(experiment: str, params: dict | None = None) -> RunReport:
    config = resolve_config(experiment, params or {})
    rows = RUNNERS[experiment](config)
    return RunReport(experiment, config, rows)


# ----------------------------------------------------------------------------
# output


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, np.generic):
        return v.item()
    return v


def emit(report: RunReport, path, fmt: str = "csv") -> tuple[Path, Path]:
    """Write the rows as CSV or JSON plus a ``<path>.meta.json`` sidecar."""
    path = Path(path)
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown format {fmt!r}")
    records = [r.record() for r in report.rows]
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COLUMNS)
            for rec in records:
                w.writerow([_cell(rec[c]) for c in COLUMNS])
    else:
        for rec, row in zip(records, report.rows):
            rec["provenance"] = row.provenance
            rec["tolerance"] = row.tolerance
            rec["passed"] = row.passed
        path.write_text(json.dumps(records, indent=1) + "\n")
    meta = {
        "experiment": report.experiment,
        "config": {k: _jsonable(v) for k, v in report.config.items()},
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "columns": COLUMNS,
        "cases": [{"case_id": r.case_id, "provenance": r.provenance, "tolerance": r.tolerance,
                   "passed": r.passed} for r in report.rows],
        "ok": report.ok,
    }
    meta_path = path.with_name(path.name + ".meta.json")
    meta_path.write_text(json.dumps(meta, indent=1) + "\n")
    return path, meta_path


def read_csv(path) -> list[dict]:
    """Parse an emitted CSV back into records (floats, None for empty cells)."""
    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            parsed = {}
            for k, v in rec.items():
                if k in ("case_id", "resolution"):
                    parsed[k] = v
                else:
                    parsed[k] = float(v) if v != "" else None
            out.append(parsed)
    return out


# ----------------------------------------------------------------------------
# entry point


def _parse_sets(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splitquat", description="Run split-quaternion verification experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one experiment")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="flat JSON config file")
    src.add_argument("--experiment", help=f"one of: {', '.join(EXPERIMENTS)}")
    r.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a parameter")
    r.add_argument("--out", help="output path (the sidecar goes next to it)")
    r.add_argument("--format", choices=("csv", "json"), default=None)
    r.add_argument("--threads", type=int, default=None, help="worker threads for the quadrature")
    sub.add_parser("list", help="list experiments and their parameters")
    return parser


def _load_config(args) -> tuple[str, dict, str | None, str]:
    params: dict = {}
    out, fmt = args.out, args.format
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise OSError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a flat JSON object")
        raw = dict(raw)
        experiment = raw.pop("experiment", None)
        out = out or raw.pop("out", None)
        raw.pop("out", None)
        fmt = fmt or raw.pop("format", None)
        raw.pop("format", None)
        nested = [k for k, v in raw.items() if isinstance(v, dict)]
        if nested:
            raise ConfigError(f"config must be flat; nested keys: {', '.join(nested)}")
        params.update(raw)
        if experiment is None:
            raise ConfigError("config has no 'experiment' key")
    else:
        experiment = args.experiment
    params.update(_parse_sets(args.set))
    if args.threads is not None:
        params["threads"] = args.threads
    return experiment, params, out, fmt or "csv"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        for name, table in PARAMETERS.items():
            keys = ", ".join(f"{k}={_cell(v[1]) if not isinstance(v[1], tuple) else ','.join(map(repr, v[1]))}"
                             for k, v in {**table, **COMMON}.items())
            print(f"{name}: {keys}")
        return 0
    try:
        experiment, params, out, fmt = _load_config(args)
        config = resolve_config(experiment, params)
        if out is None:
            raise ConfigError("no output path given (--out or 'out' in the config)")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {fmt!r}")
        report = RunReport(experiment, config, RUNNERS[experiment](config))
        emit(report, out, fmt)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for row in report.rows:
        status = {True: "ok", False: "FAIL", None: "--"}[row.passed]
        err = "" if row.abs_error is None else f" abs_error={row.abs_error:.3e}"
        print(f"[{status}] {row.case_id}{err}")
    return 0 if report.ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
