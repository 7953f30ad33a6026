"""Command-line front end: state files in, witness reports out.

State files are TOML::

    schema_version = 1

    [basis]
    n_max_a = 3
    n_max_b = 3

    [state]
    kind = "pure"                      # pure | mixture | separable | werner | tmsv
    amplitudes = [[1, 0, 0.8660254037844386, 0.0], [0, 1, 0.5, 0.0]]

    [options]
    steered = "B"                      # A | B | both
    theta_points = 64
    epsilon = 1e-9

Exit codes of ``report``/``werner``: 0 ran with no classification, 2 steering
detected, 3 entanglement detected but no steering, 4 inconclusive.  Input
errors exit with 10 (syntax), 11 (schema), 12 (constructor precondition) or
13 (anything else).
"""
from __future__ import annotations

import argparse
import concurrent.futures
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import tomlkit
from tomlkit.exceptions import ParseError

from .errors import SteeringError
from .fock import fock
from .lhv import cat2_predicted_moments, sample_cat2_model, verify_cat2_bounds
from .states import (
    Category,
    DensityOperator,
    SeparableSpec,
    WernerSpec,
    local_state,
    mixture,
    pure_state,
    random_separable_ssr_state,
    separable_state,
    two_mode_squeezed_vacuum,
    werner_boundaries,
    werner_classify,
)
from .witnesses import EPSILON, INCONCLUSIVE, STEERABLE, evaluate_all, evaluate_moments, generalized_hz_test

SCHEMA_VERSION = 1
KINDS = ("pure", "mixture", "separable", "werner", "tmsv")
STEERED = ("A", "B", "both")

EXIT_RAN, EXIT_STEERABLE, EXIT_ENTANGLED, EXIT_INCONCLUSIVE = 0, 2, 3, 4
EXIT_SYNTAX, EXIT_SCHEMA, EXIT_PRECONDITION, EXIT_OTHER = 10, 11, 12, 13
WEIGHT_TOL = 1e-12

CATEGORY_EXIT = {
    Category.CAT1_SEPARABLE: EXIT_INCONCLUSIVE,
    Category.CAT2_LHS_ENTANGLED: EXIT_ENTANGLED,
    Category.CAT3_STEERABLE: EXIT_STEERABLE,
    Category.CAT3_OR_4_STEERABLE: EXIT_STEERABLE,
    Category.BOUNDARY: EXIT_INCONCLUSIVE,
}


class SpecError(SteeringError):
    def __init__(self, code: str, exit_status: int, where: str, message: str, line: int | None = None):
        self.code, self.exit_status, self.where, self.line = code, exit_status, where, line
        loc = f"line {line}: " if line is not None else ""
        super().__init__(f"{code}: {loc}{where}: {message}")


def _schema(where: str, msg: str) -> SpecError:
    return SpecError("schema-violation", EXIT_SCHEMA, where, msg)


# state files


@dataclass(frozen=True)
class StateSpecFile:
    schema_version: int
    basis: dict | None
    state: dict
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"schema_version": self.schema_version}
        if self.basis is not None:
            d["basis"] = dict(self.basis)
        d["state"] = self.state
        if self.options:
            d["options"] = dict(self.options)
        return d

    def to_toml(self) -> str:
        return tomlkit.dumps(self.to_dict())


def _get(d: dict, key: str, where: str, types, default=...):
    if key not in d:
        if default is ...:
            raise _schema(where, f"missing key {key!r}")
        return default
    v = d[key]
    if isinstance(v, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise _schema(f"{where}.{key}", f"expected {types}, got bool")
    if not isinstance(v, types):
        raise _schema(f"{where}.{key}", f"expected {types}, got {type(v).__name__}")
    return v


def _real(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise _schema(where, "expected a number")
    if not math.isfinite(v):
        raise _schema(where, "expected a finite number")
    return float(v)


def _int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise _schema(where, "expected an integer")
    return int(v)


def _unknown(d: dict, allowed: set, where: str):
    extra = set(d) - allowed
    if extra:
        raise _schema(where, f"unknown keys {sorted(extra)}")


def _local_matrix(v, where: str) -> list:
    if not isinstance(v, list) or not v:
        raise _schema(where, "expected a non-empty list (diagonal) or list of rows")
    if all(isinstance(row, list) for row in v):
        return [[_real(x, f"{where}[{i}][{j}]") for j, x in enumerate(row)] for i, row in enumerate(v)]
    return [_real(x, f"{where}[{i}]") for i, x in enumerate(v)]


def _weights_ok(weights: list[float], where: str):
    if any(w <= 0 or w > 1 for w in weights):
        raise _schema(where, "weights must lie in (0, 1]")
    if abs(sum(weights) - 1.0) > WEIGHT_TOL:
        raise _schema(where, f"weights sum to {sum(weights)!r}, not 1")


def _norm_state(d: Any, where: str, nested: bool = False) -> dict:
    if not isinstance(d, dict):
        raise _schema(where, "expected a table")
    kind = _get(d, "kind", where, str)
    if kind not in KINDS or (nested and kind in ("mixture", "werner")):
        raise _schema(f"{where}.kind", f"unsupported kind {kind!r}")
    extra = {"weight"} if nested else set()
    if kind == "pure":
        _unknown(d, {"kind", "amplitudes"} | extra, where)
        amps = _get(d, "amplitudes", where, list)
        if not amps:
            raise _schema(f"{where}.amplitudes", "empty amplitude list")
        out = []
        for i, row in enumerate(amps):
            w = f"{where}.amplitudes[{i}]"
            if not isinstance(row, list) or len(row) not in (3, 4):
                raise _schema(w, "expected [n_a, n_b, re] or [n_a, n_b, re, im]")
            im = row[3] if len(row) == 4 else 0.0
            out.append([_int(row[0], w), _int(row[1], w), _real(row[2], w), _real(im, w)])
        return {"kind": kind, "amplitudes": out}
    if kind == "mixture":
        _unknown(d, {"kind", "components"}, where)
        comps = _get(d, "components", where, list)
        if not comps:
            raise _schema(f"{where}.components", "empty mixture")
        out = []
        for i, c in enumerate(comps):
            w = f"{where}.components[{i}]"
            sub = _norm_state(c, w, nested=True)
            out.append({"weight": _real(_get(c, "weight", w, (int, float)), f"{w}.weight"), **sub})
        _weights_ok([c["weight"] for c in out], f"{where}.components")
        return {"kind": kind, "components": out}
    if kind == "separable":
        _unknown(d, {"kind", "terms", "local_ssr"} | extra, where)
        terms = _get(d, "terms", where, list)
        if not terms:
            raise _schema(f"{where}.terms", "empty term list")
        out = []
        for i, t in enumerate(terms):
            w = f"{where}.terms[{i}]"
            if not isinstance(t, dict):
                raise _schema(w, "expected a table")
            _unknown(t, {"weight", "rho_a", "rho_b"}, w)
            out.append({
                "weight": _real(_get(t, "weight", w, (int, float)), f"{w}.weight"),
                "rho_a": _local_matrix(_get(t, "rho_a", w, list), f"{w}.rho_a"),
                "rho_b": _local_matrix(_get(t, "rho_b", w, list), f"{w}.rho_b"),
            })
        _weights_ok([t["weight"] for t in out], f"{where}.terms")
        return {"kind": kind, "local_ssr": _get(d, "local_ssr", where, bool, True), "terms": out}
    if kind == "werner":
        _unknown(d, {"kind", "d", "eta"}, where)
        return {"kind": kind, "d": _int(_get(d, "d", where, int), f"{where}.d"),
                "eta": _real(_get(d, "eta", where, (int, float)), f"{where}.eta")}
    _unknown(d, {"kind", "r"} | extra, where)
    return {"kind": kind, "r": _real(_get(d, "r", where, (int, float)), f"{where}.r")}


def _norm_options(d: Any) -> dict:
    if d is None:
        return {}
    if not isinstance(d, dict):
        raise _schema("options", "expected a table")
    _unknown(d, {"steered", "theta_points", "epsilon"}, "options")
    out = {}
    if "steered" in d:
        s = _get(d, "steered", "options", str)
        if s not in STEERED:
            raise _schema("options.steered", f"expected one of {STEERED}")
        out["steered"] = s
    if "theta_points" in d:
        n = _int(d["theta_points"], "options.theta_points")
        if n < 1:
            raise _schema("options.theta_points", "grid must be non-empty")
        out["theta_points"] = n
    if "epsilon" in d:
        e = _real(d["epsilon"], "options.epsilon")
        if e < 0:
            raise _schema("options.epsilon", "must be nonnegative")
        out["epsilon"] = e
    return out


def spec_from_dict(doc: dict) -> StateSpecFile:
    if not isinstance(doc, dict):
        raise _schema("<root>", "expected a table")
    _unknown(doc, {"schema_version", "basis", "state", "options"}, "<root>")
    version = _int(_get(doc, "schema_version", "<root>", int), "schema_version")
    if version != SCHEMA_VERSION:
        raise _schema("schema_version", f"unsupported version {version}")
    state = _norm_state(_get(doc, "state", "<root>", dict), "state")
    basis = None
    if "basis" in doc:
        b = _get(doc, "basis", "<root>", dict)
        _unknown(b, {"n_max_a", "n_max_b"}, "basis")
        basis = {k: _int(_get(b, k, "basis", int), f"basis.{k}") for k in ("n_max_a", "n_max_b")}
    elif state["kind"] != "werner":
        raise _schema("<root>", "missing [basis] table")
    spec = StateSpecFile(version, basis, state, _norm_options(doc.get("options")))
    try:
        build_state(spec)
    except SpecError:
        raise
    except SteeringError as e:
        raise SpecError("precondition-failure", EXIT_PRECONDITION, "state", str(e)) from e
    return spec


def parse_state_text(text: str) -> StateSpecFile:
    try:
        doc = tomlkit.parse(text).unwrap()
    except ParseError as e:
        raise SpecError("syntax-error", EXIT_SYNTAX, "<file>", str(e), line=e.line) from e
    return spec_from_dict(doc)


def parse_state_spec(path) -> StateSpecFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError("io-error", EXIT_OTHER, str(path), str(e)) from e
    return parse_state_text(text)


def _local(m: list, dim: int) -> DensityOperator:
    arr = np.asarray(m, dtype=float)
    if arr.ndim == 1:
        arr = np.pad(arr, (0, max(dim - len(arr), 0)))
    elif arr.shape[0] < dim:
        pad = dim - arr.shape[0]
        arr = np.pad(arr, ((0, pad), (0, pad)))
    return local_state(dim, arr)


def _build(state: dict, basis) -> DensityOperator:
    kind = state["kind"]
    if kind == "pure":
        return pure_state(basis, [(a, b, complex(re, im)) for a, b, re, im in state["amplitudes"]])
    if kind == "mixture":
        return mixture([(c["weight"], _build(c, basis)) for c in state["components"]])
    if kind == "separable":
        terms = tuple(
            (t["weight"], _local(t["rho_a"], basis.dim_a), _local(t["rho_b"], basis.dim_b))
            for t in state["terms"]
        )
        return separable_state(SeparableSpec(terms, local_ssr=state["local_ssr"]))
    return two_mode_squeezed_vacuum(basis, state["r"])


def build_state(spec: StateSpecFile) -> DensityOperator | WernerSpec:
    if spec.state["kind"] == "werner":
        return WernerSpec(spec.state["d"], spec.state["eta"])
    basis = fock(spec.basis["n_max_a"], spec.basis["n_max_b"])
    return _build(spec.state, basis)


# reports


def _resolve(spec: StateSpecFile, steered, theta_points, epsilon):
    # command-line flags override the file's [options]
    s = steered or spec.options.get("steered", "both")
    steered_list = ("A", "B") if s == "both" else (s,)
    points = theta_points or spec.options.get("theta_points", 64)
    eps = epsilon if epsilon is not None else spec.options.get("epsilon", EPSILON)
    return steered_list, points, eps


def run_report(spec: StateSpecFile, steered: str | None = None, theta_points: int | None = None,
               epsilon: float | None = None) -> tuple[dict, int]:
    """Report document plus the classification exit code."""
    steered_list, points, eps = _resolve(spec, steered, theta_points, epsilon)
    state = build_state(spec)
    doc: dict[str, Any] = {"report_version": 1, "state_spec": spec.to_dict()}
    if isinstance(state, WernerSpec):
        cat = werner_classify(state.d, state.eta)
        lo, hi = werner_boundaries(state.d)
        doc["metadata"] = {"kind": "werner", "d": state.d, "eta": state.eta, "phi": state.phi,
                           "category": cat.value, "boundaries": [lo, hi]}
        doc["witnesses"] = {"skipped": "qudit basis; the bosonic witnesses need a two-mode Fock basis"}
        doc["records"] = []
        code = CATEGORY_EXIT[cat]
        doc["summary"] = cat.value
    else:
        report = evaluate_all(state, eps=eps, theta_points=points, steered=steered_list)
        doc["metadata"] = {"kind": spec.state["kind"], "dim": state.basis.dim,
                           "n_max_a": state.basis.n_max_a, "n_max_b": state.basis.n_max_b,
                           "epsilon": eps, "theta_points": points, "steered": list(steered_list)}
        doc["ssr"] = {"status": state.ssr_status, "warning": report.ssr_warning}
        doc.update(report.to_dict())
        code = (EXIT_STEERABLE if report.steerable else EXIT_ENTANGLED if report.entangled
                else EXIT_INCONCLUSIVE)
    doc["exit_code"] = code
    return doc, code


def report_rows(doc: dict) -> list[list]:
    meta = doc["metadata"]
    if meta["kind"] == "werner":
        return [["d", "eta", "phi", "category"], [meta["d"], meta["eta"], meta["phi"], meta["category"]]]
    rows = [["test", "steered", "value", "bound", "margin", "verdict"]]
    for r in doc.get("records", []):
        rows.append([r["name"], r["steered"] or "", r["value"], r["bound"], r["margin"], r["verdict"]])
    return rows


# serialization


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x + 0.0, ".17g")  # folds -0.0 into 0.0


def to_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1)) if indent else ""
    end = " " * (indent * _level) if indent else ""
    nl = "\n" if indent else ""
    sep = ": " if indent else ":"
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}{sep}{to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{" + nl + ("," + nl).join(items) + nl + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[" + nl + ("," + nl).join(items) + nl + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(rows: list[list]) -> str:
    out = io.StringIO()
    for row in rows:
        cells = [fmt_float(float(c)) if isinstance(c, (float, np.floating)) else str(c) for c in row]
        out.write(",".join(cells) + "\n")
    return out.getvalue()


# sweeps


def sweep_werner(d: int, grid) -> list[list]:
    rows = [["eta", "phi", "category", "boundary"]]
    for eta in grid:
        spec = WernerSpec(d, float(eta))
        cat = werner_classify(d, float(eta))
        rows.append([float(eta), spec.phi, cat.value, cat is Category.BOUNDARY])
    return rows


def gen_hz_alpha_closed_form(alpha: float) -> float:
    c2, s2 = math.cos(alpha) ** 2, math.sin(alpha) ** 2
    return 0.5 * s2 - c2 * s2


def sweep_gen_hz(grid, epsilon: float = EPSILON) -> list[list]:
    """Generalized-HZ value (steered B) for cos(a)|1,0> + sin(a)|0,1>."""
    basis = fock(3, 3)
    rows = [["alpha", "value", "closed_form", "verdict"]]
    for alpha in grid:
        a = float(alpha)
        rho = pure_state(basis, [(1, 0, math.cos(a)), (0, 1, math.sin(a))])
        rec = generalized_hz_test(rho, steered="B", eps=epsilon)
        rows.append([a, rec.value, gen_hz_alpha_closed_form(a), rec.verdict])
    return rows


# Monte-Carlo certification

MC_BASIS = (4, 4)


def _cat1_sample(child, eps: float) -> tuple[int, float]:
    rng = np.random.default_rng(child)
    rho, _ = random_separable_ssr_state(fock(*MC_BASIS), rng, int(rng.integers(1, 5)))
    report = evaluate_all(rho, eps=eps)
    return len(report.fired()), min(-r.margin for r in report.records) + 0.0


def _cat2_sample(child, eps: float, index: int) -> tuple[int, int, float]:
    rng = np.random.default_rng(child)
    model = sample_cat2_model(rng, int(rng.integers(1, 7)), steered="B" if index % 2 == 0 else "A")
    bounds = verify_cat2_bounds(model)
    recs = evaluate_moments(cat2_predicted_moments(model), eps=eps, steered=(model.steered,))
    fired = sum(r.verdict == STEERABLE for r in recs)
    return len(bounds.violations), fired, bounds.min_slack


def _mc_chunk(kind: str, seed: int, start: int, stop: int, samples: int, eps: float):
    children = np.random.SeedSequence(seed).spawn(samples)[start:stop]
    if kind == "cat1":
        return [(0,) + _cat1_sample(c, eps) for c in children]
    return [_cat2_sample(c, eps, start + i) for i, c in enumerate(children)]


def mc_certify(kind: str, samples: int, seed: int, epsilon: float = EPSILON, workers: int = 1) -> dict:
    """Count bound violations and witness firings over seeded random samples.

    ``cat1``: random separable SSR states through every witness.  ``cat2``:
    random local-hidden-state models through the bound checks and the
    steering witnesses.  Results do not depend on ``workers``.
    """
    if kind not in ("cat1", "cat2"):
        raise SpecError("invalid-argument", EXIT_OTHER, "kind", f"unknown kind {kind!r}")
    if samples < 1:
        raise SpecError("invalid-argument", EXIT_OTHER, "samples", "need at least one sample")
    t0 = time.perf_counter()
    if workers > 1:
        step = math.ceil(samples / workers)
        bounds = [(s, min(s + step, samples)) for s in range(0, samples, step)]
        with concurrent.futures.ProcessPoolExecutor(workers) as ex:
            futures = [ex.submit(_mc_chunk, kind, seed, a, b, samples, epsilon) for a, b in bounds]
            results = [r for f in futures for r in f.result()]
    else:
        results = _mc_chunk(kind, seed, 0, samples, samples, epsilon)
    return {
        "kind": kind,
        "samples": samples,
        "seed": seed,
        "bound_violations": int(sum(r[0] for r in results)),
        "witness_firings": int(sum(r[1] for r in results)),
        "min_slack": float(min(r[2] for r in results)),
        "runtime_s": time.perf_counter() - t0,
    }


# demo states

DEMO_SPECS = {
    "asymmetric_n1": """\
schema_version = 1

[basis]
n_max_a = 3
n_max_b = 3

[state]
kind = "pure"
amplitudes = [[1, 0, 0.8660254037844386, 0.0], [0, 1, 0.5, 0.0]]
""",
    "symmetric_n1": """\
schema_version = 1

[basis]
n_max_a = 3
n_max_b = 3

[state]
kind = "pure"
amplitudes = [[0, 1, 1.0, 0.0], [1, 0, 1.0, 0.0]]
""",
    "separable": """\
schema_version = 1

[basis]
n_max_a = 3
n_max_b = 3

[state]
kind = "separable"

[[state.terms]]
weight = 0.5
rho_a = [1.0, 0.0]
rho_b = [0.0, 1.0]

[[state.terms]]
weight = 0.5
rho_a = [0.0, 1.0]
rho_b = [1.0, 0.0]
""",
    "tmsv": """\
schema_version = 1

[basis]
n_max_a = 20
n_max_b = 20

[state]
kind = "tmsv"
r = 0.5

[options]
theta_points = 64
""",
    "werner_d3": """\
schema_version = 1

[state]
kind = "werner"
d = 3
eta = 0.9
""",
}


def run_demo(epsilon=None, theta_points=None, steered=None) -> list[list]:
    rows = [["demo", "summary", "exit_code", "ssr_warning"]]
    for name, text in DEMO_SPECS.items():
        doc, code = run_report(parse_state_text(text), steered, theta_points, epsilon)
        rows.append([name, doc["summary"], code, doc.get("ssr", {}).get("warning", "")])
    return rows


# argument parsing


def _grid(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from e
    if not vals:
        raise argparse.ArgumentTypeError("grid must be non-empty")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=float, default=None, help=f"violation margin (default {EPSILON})")
    common.add_argument("--theta-points", type=int, default=None, help="quadrature angle grid size (default 64)")
    common.add_argument("--steered", choices=("A", "B"), default=None, help="steered subsystem (default both)")
    common.add_argument("--format", choices=("tree", "csv"), default="tree", help="JSON tree or flat CSV table")
    p = argparse.ArgumentParser(
        prog="epr-steering",
        description="Steering and entanglement witnesses for two-mode bosonic states.",
        epilog=("exit codes: 0 ran, 2 steering detected, 3 entangled but not steerable, "
                "4 inconclusive; 10 syntax error, 11 schema violation, 12 precondition failure, "
                "13 other error; mc-certify exits 1 when a violation is found"),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("report", parents=[common], help="run every witness on a state file")
    r.add_argument("file")
    w = sub.add_parser("werner", parents=[common], help="classify a Werner state")
    w.add_argument("--d", type=int, required=True)
    w.add_argument("--eta", type=float, required=True)
    sw = sub.add_parser("sweep-werner", parents=[common], help="category versus eta")
    sw.add_argument("--d", type=int, required=True)
    sw.add_argument("--grid", type=_grid, required=True, help="comma-separated eta values")
    sg = sub.add_parser("sweep-genhz", parents=[common], help="generalized HZ value versus mixing angle")
    sg.add_argument("--grid", type=_grid, required=True, help="comma-separated angles in radians")
    mc = sub.add_parser("mc-certify", parents=[common], help="Monte-Carlo soundness check")
    mc.add_argument("--kind", choices=("cat1", "cat2"), required=True)
    mc.add_argument("--samples", type=int, required=True)
    mc.add_argument("--seed", type=int, required=True)
    mc.add_argument("--workers", type=int, default=1)
    sub.add_parser("demo", parents=[common], help="report on the built-in demo states")
    return p


def _emit(obj, fmt: str, rows: list[list] | None, out):
    if fmt == "csv" and rows is not None:
        out.write(to_csv(rows))
    else:
        out.write(to_json(obj) + "\n")


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.command in ("report", "werner"):
            if args.command == "report":
                spec = parse_state_spec(args.file)
            else:
                spec = spec_from_dict({"schema_version": SCHEMA_VERSION,
                                       "state": {"kind": "werner", "d": args.d, "eta": args.eta}})
            doc, code = run_report(spec, args.steered, args.theta_points, args.epsilon)
            _emit(doc, args.format, report_rows(doc), out)
        elif args.command == "sweep-werner":
            try:
                rows = sweep_werner(args.d, args.grid)
            except SteeringError as e:
                raise SpecError("precondition-failure", EXIT_PRECONDITION, "grid", str(e)) from e
            _emit(_rows_to_records(rows), args.format, rows, out)
            code = EXIT_RAN
        elif args.command == "sweep-genhz":
            rows = sweep_gen_hz(args.grid, EPSILON if args.epsilon is None else args.epsilon)
            _emit(_rows_to_records(rows), args.format, rows, out)
            code = EXIT_RAN
        elif args.command == "mc-certify":
            summary = mc_certify(args.kind, args.samples, args.seed,
                                 EPSILON if args.epsilon is None else args.epsilon, args.workers)
            runtime = summary.pop("runtime_s")
            rows = [list(summary), list(summary.values())]
            if args.format == "csv":
                out.write(to_csv(rows))
            else:
                out.write(to_json(summary, indent=0) + "\n")
            err.write(f"runtime {runtime:.3f} s\n")
            code = 1 if summary["bound_violations"] or summary["witness_firings"] else EXIT_RAN
        else:
            rows = run_demo(args.epsilon, args.theta_points, args.steered)
            _emit(_rows_to_records(rows), args.format, rows, out)
            code = EXIT_RAN
    except SpecError as e:
        err.write(f"error: {e}\n")
        return e.exit_status
    except SteeringError as e:
        err.write(f"error: {e.code}: {e}\n")
        return EXIT_OTHER
    if args.command != "mc-certify":
        err.write(f"runtime {time.perf_counter() - t0:.3f} s\n")
    return code


def _rows_to_records(rows: list[list]) -> list[dict]:
    head = rows[0]
    return [dict(zip(head, r)) for r in rows[1:]]


if __name__ == "__main__":
    sys.exit(main())
