"""Config-driven verification runner.

A scenario is a TOML file naming a group, a length function, a base triple
with an action, and a list of checks to run.  Configs are validated
against the JSON schema shipped with the package (unknown keys are
rejected) before any computation starts.  Every check writes one JSON
report; tabular results additionally go to CSV and, optionally, SVG line
plots.  Outputs are written atomically and contain no timestamps, so a
rerun with the same seed is byte-identical.
"""

from __future__ import annotations

import csv
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import jsonschema

from .errors import BallSizeError, ValidationError
from .groups import GroupModel, difference_set, finite_cyclic, free_abelian, heisenberg3
from .lengths import (
    MatrixLengthFunction,
    check_length_axioms,
    load_tabulated_length,
    torus_length,
    word_length_function,
)
from .base import (
    FiniteSpectralTriple,
    GroupAction,
    OperatorSystemSpec,
    inner_action,
    lip_triple,
    matrix_triple,
    permutation_action,
    scalar_triple,
    trivial_action,
)
from .crossed import CrossedElement, CrossedProduct
from .linalg import smallest_singular_value, spectral_norm
from .seminorms import (
    d_vertical,
    parity_audit,
    resolvent_decay_profile,
    sandwich_check,
    vertical_seminorm,
)
from .berezin import (
    VectorFunctional,
    approximation_bound_check,
    approximation_identity_check,
    berezin_contraction_check,
    berezin_positivity_check,
    counit,
    cqms_finite_check,
    folner_convergence,
    mk_certificate,
    scalar_sector,
    slice_contraction_check,
    trace_state,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_CONFIG = 2
EXIT_RESOURCE_CAP = 3

CHECK_DESCRIPTIONS = {
    "folner-convergence": "surrogate distance of ball-averaging states to the counit decreases along the ball schedule",
    "berezin-contraction": "coefficient damping by overlap ratios never increases the vertical seminorm, at every truncation radius",
    "slice-contraction": "functional slices of the coaction never increase the vertical seminorm",
    "approximation-identity": "functional applied to the averaging defect equals the weight defect applied to the coaction slice, exactly",
    "approximation-bound": "averaging defect norm is dominated by the surrogate state distance times the vertical seminorm",
    "tensor-sum-sandwich": "tensor-sum commutator norm sits between max(vertical, horizontal) and twice that max at every radius",
    "spectral-triple-audit": "tensor-sum matrices are selfadjoint, grading relations hold, per-site doubled blocks are selfadjoint, resolvent truncations decay",
    "mk-distance": "supergradient-ascent distance lower bound stays below the closed-form upper surrogate",
    "cqms-finite": "seminorm kernels of the finite systems are exactly the scalars; diameter bounds are certified",
    "kernel-audit": "vertical seminorm vanishes exactly on the base and is bounded below off the base by the singular-value product",
}

_DEFAULT_PARAMS = {
    "radii": [1, 2, 3],
    "tolerance": 1e-8,
    "berezin_set_radius": 2,
    "folner_r": 2,
    "folner_n": [1, 2, 3, 4, 5, 6],
    "bound_support_radius": 2,
    "mk_support_radius": 2,
    "mk_budget": 800,
    "cqms_budget": 400,
    "contraction_slack": 1e-10,
    "identity_slack": 1e-10,
    "bound_slack": 1e-8,
    "slice_slack": 1e-6,
    "audit_tolerance": 1e-12,
}


def list_checks() -> dict[str, str]:
    """Stable name -> description table for every available check."""
    return dict(CHECK_DESCRIPTIONS)


# ---------------------------------------------------------------------------
# config loading and construction
# ---------------------------------------------------------------------------


def _schema() -> dict:
    text = resources.files("crossedqm").joinpath("schema/scenario.schema.json").read_text()
    return json.loads(text)


def load_config(path: str | Path) -> dict:
    """Parse and schema-validate a scenario file."""
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"invalid TOML: {exc}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, _schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ValidationError(f"config violates schema at '{path}': {exc.message}") from exc


def _complex_matrix(entries) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in entries], dtype=complex)


def _build_group(cfg: dict, ball_cap: int | None) -> GroupModel:
    spec = cfg["group"]
    cap = ball_cap or spec.get("ball_cap", 200_000)
    gens = [tuple(g) for g in spec["generators"]] if "generators" in spec else None
    family = spec["family"]
    if family == "z^d":
        if "rank" not in spec:
            raise ValidationError("group family 'z^d' requires 'rank'")
        return free_abelian(spec["rank"], gens, cap)
    if family == "heisenberg3":
        return heisenberg3(gens, cap)
    if "order" not in spec:
        raise ValidationError("group family 'cyclic' requires 'order'")
    return finite_cyclic(spec["order"], gens, cap)


def _build_length(cfg: dict, model: GroupModel, config_dir: Path) -> MatrixLengthFunction:
    spec = cfg["length"]
    if spec["kind"] == "word":
        return word_length_function(model)
    if spec["kind"] == "torus_z2":
        return torus_length(model)
    if "table" not in spec:
        raise ValidationError("tabulated length requires 'table'")
    return load_tabulated_length(model, config_dir / spec["table"],
                                 parity=spec.get("parity", 1))


def _build_base_and_action(cfg: dict, model: GroupModel) -> tuple[FiniteSpectralTriple, GroupAction]:
    base = cfg["base"]
    action = cfg["action"]
    if base["kind"] == "finite_metric":
        if "distance" not in base:
            raise ValidationError("finite_metric base requires 'distance'")
        distance = np.array(base["distance"], dtype=float)
        if "points" in base and base["points"] != distance.shape[0]:
            raise ValidationError("'points' disagrees with the distance matrix size")
        triple = lip_triple(distance, graded=base.get("graded", False))
    elif base["kind"] == "matrix_inner":
        if "k" not in base:
            raise ValidationError("matrix_inner base requires 'k'")
        dirac = _complex_matrix(base["dirac"]) if "dirac" in base else None
        triple = matrix_triple(base["k"], dirac)
    else:
        triple = scalar_triple()
    kind = action["kind"]
    if kind == "trivial":
        act = trivial_action(model, triple)
    elif kind == "permutation":
        if "permutation" not in action:
            raise ValidationError("permutation action requires 'permutation'")
        act = permutation_action(model, triple, action["permutation"], action.get("weights"))
    else:
        if "unitaries" not in action:
            raise ValidationError("inner action requires 'unitaries'")
        act = inner_action(model, triple, [_complex_matrix(u) for u in action["unitaries"]])
    return triple, act


@dataclass
class Scenario:
    """Fully constructed scenario: objects plus resolved parameters."""

    name: str
    seed: int
    model: GroupModel
    length: MatrixLengthFunction
    triple: FiniteSpectralTriple
    action: GroupAction
    ctx: CrossedProduct
    system: OperatorSystemSpec | None
    checks: list[str]
    params: dict
    sampler: dict
    outdir: Path
    plots: bool
    raw: dict = field(repr=False, default_factory=dict)

    def sample_elements(self, rng: np.random.Generator, count: int | None = None,
                        hermitian: bool = False) -> list[CrossedElement]:
        count = count if count is not None else self.sampler["count"]
        return [
            self.ctx.random_element(rng, self.sampler["support_radius"],
                                    terms=self.sampler["terms"], hermitian_coeffs=hermitian)
            for _ in range(count)
        ]


def build_scenario(cfg: dict, out: str | Path | None = None, seed: int | None = None,
                   max_ball: int | None = None, config_dir: str | Path | None = None) -> Scenario:
    validate_config(cfg)
    config_dir = Path(config_dir) if config_dir is not None else Path.cwd()
    model = _build_group(cfg, max_ball)
    length = _build_length(cfg, model, config_dir)
    triple, action = _build_base_and_action(cfg, model)
    ctx = CrossedProduct(model, triple, action)
    system = None
    if "operator_system" in cfg and "basis" in cfg["operator_system"]:
        basis = tuple(_complex_matrix(b) for b in cfg["operator_system"]["basis"])
        system = OperatorSystemSpec(basis, cfg["operator_system"].get("action_invariant", False))
        report = system.validate(triple, action)
        if not report["pass"]:
            raise ValidationError(f"operator system is invalid: {report}")
    params = dict(_DEFAULT_PARAMS)
    params.update(cfg.get("params", {}))
    sampler = {"count": 10, "support_radius": 2, "terms": 3}
    sampler.update(cfg.get("sampler", {}))
    out_cfg = cfg.get("output", {})
    outdir = Path(out) if out is not None else Path(
        out_cfg.get("directory", os.environ.get("CROSSEDQM_OUT", "crossedqm-out"))
    )
    return Scenario(
        name=cfg["name"],
        seed=int(seed if seed is not None else cfg.get("seed", 0)),
        model=model, length=length, triple=triple, action=action, ctx=ctx,
        system=system, checks=list(cfg["checks"]["run"]), params=params,
        sampler=sampler, outdir=outdir, plots=bool(out_cfg.get("plots", True)), raw=cfg,
    )


# ---------------------------------------------------------------------------
# deterministic output helpers
# ---------------------------------------------------------------------------


def _plain(obj):
    """Recursively convert report values to JSON-stable plain types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def _atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, report: dict) -> None:
    _atomic_write(path, json.dumps(_plain(report), sort_keys=True, indent=2) + "\n")


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_plain(v) for v in row])
    _atomic_write(path, buf.getvalue())


def write_svg_lines(path: Path, series: dict[str, list[tuple[float, float]]],
                    xlabel: str, ylabel: str, title: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with plt.rc_context({"svg.hashsalt": title}):
        fig, ax = plt.subplots(figsize=(5.0, 3.2))
        for label, pts in sorted(series.items()):
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            ax.plot(xs, ys, marker="o", markersize=3, label=label)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        if len(series) > 1:
            ax.legend(fontsize=7)
        fig.tight_layout()
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------


def _check_folner(sc: Scenario, rng: np.random.Generator) -> dict:
    table = folner_convergence(sc.model, sc.length, sc.params["folner_r"], sc.params["folner_n"])
    rows = [[row["n"], row["rho_hat"], sc.params["folner_r"], sc.model.family, sc.length.name]
            for row in table["rows"]]
    write_csv(sc.outdir / "folner-convergence.csv", ["n", "rho_hat", "r", "group", "length"], rows)
    if sc.plots:
        pts = [(row["n"], row["rho_hat"]) for row in table["rows"]]
        write_svg_lines(sc.outdir / "folner-convergence.svg", {"rho_hat": pts},
                        "n", "surrogate distance", f"{sc.name}: averaging convergence")
    return table


def _check_berezin_contraction(sc: Scenario, rng: np.random.Generator) -> dict:
    F = sc.model.ball(sc.params["berezin_set_radius"])
    rows = []
    ok = True
    for k, z in enumerate(sc.sample_elements(rng)):
        for r in sc.params["radii"]:
            rep = berezin_contraction_check(F, z, sc.length, r,
                                            slack=sc.params["contraction_slack"])
            rows.append({"element": k, **{key: rep[key] for key in ("lhs", "rhs", "radius", "pass")}})
            ok = ok and rep["pass"]
        pos = berezin_positivity_check(F, z, max(sc.params["radii"]))
        rows.append({"element": k, "min_eigenvalue": pos["min_eigenvalue"],
                     "radius": pos["radius"], "pass": pos["pass"]})
        ok = ok and pos["pass"]
    return {"check": "berezin-contraction", "set_radius": sc.params["berezin_set_radius"],
            "rows": rows, "pass": ok}


def _check_slice_contraction(sc: Scenario, rng: np.random.Generator) -> dict:
    radius = max(sc.params["radii"])
    rows = []
    ok = True
    for k, z in enumerate(sc.sample_elements(rng)):
        eta = VectorFunctional.random(sc.ctx, radius, rng)
        rep = slice_contraction_check(eta, z, sc.length, radius, radius + 1,
                                      slack=sc.params["slice_slack"])
        rows.append({"element": k, **{key: rep[key] for key in
                                      ("lhs", "rhs", "radius", "rhs_radius", "escalated", "pass")}})
        ok = ok and rep["pass"]
    return {"check": "slice-contraction", "rows": rows, "pass": ok}


def _check_approximation_identity(sc: Scenario, rng: np.random.Generator) -> dict:
    radius = max(sc.params["radii"])
    F = sc.model.ball(sc.params["berezin_set_radius"])
    rows = []
    ok = True
    for k, z in enumerate(sc.sample_elements(rng)):
        eta = VectorFunctional.random(sc.ctx, radius, rng)
        rep = approximation_identity_check(eta, F, z, tol=sc.params["identity_slack"])
        rows.append({"element": k, "difference": rep["difference"], "pass": rep["pass"]})
        ok = ok and rep["pass"]
    return {"check": "approximation-identity", "rows": rows, "pass": ok}


def _check_approximation_bound(sc: Scenario, rng: np.random.Generator) -> dict:
    radius = max(sc.params["radii"])
    F = sc.model.ball(sc.params["berezin_set_radius"])
    schedule = sc.params["radii"]
    rows = []
    trace_rows = []
    ok = True
    for k in range(sc.sampler["count"]):
        z = sc.ctx.random_element(rng, sc.params["bound_support_radius"],
                                  terms=sc.sampler["terms"])
        rep = approximation_bound_check(F, z, sc.length, radius, schedule,
                                        slack=sc.params["bound_slack"])
        rows.append({"element": k, **{key: rep[key] for key in
                                      ("lhs", "rhs", "support_radius", "distance_upper",
                                       "seminorm", "pass")}})
        seminorm_trace = vertical_seminorm(z, sc.length, schedule)
        for r, v in seminorm_trace.trace:
            trace_rows.append([k, r, v])
        ok = ok and rep["pass"]
    write_csv(sc.outdir / "approximation-bound-traces.csv",
              ["element", "radius", "vertical_seminorm"], trace_rows)
    if sc.plots:
        series = {}
        for k, r, v in trace_rows:
            series.setdefault(f"element {k}", []).append((r, v))
        write_svg_lines(sc.outdir / "approximation-bound-traces.svg", series,
                        "radius", "vertical seminorm", f"{sc.name}: seminorm traces")
    return {"check": "approximation-bound", "rows": rows, "pass": ok}


def _check_sandwich(sc: Scenario, rng: np.random.Generator) -> dict:
    rows = []
    ok = True
    csv_rows = []
    for k, z in enumerate(sc.sample_elements(rng)):
        rep = sandwich_check(z, sc.length, sc.params["radii"])
        ok = ok and rep["pass"]
        rows.append({"element": k, "rows": rep["rows"], "pass": rep["pass"]})
        for row in rep["rows"]:
            csv_rows.append([k, row["radius"], row["vertical"], row["horizontal"], row["tensor"]])
    write_csv(sc.outdir / "tensor-sum-sandwich.csv",
              ["element", "radius", "vertical", "horizontal", "tensor"], csv_rows)
    return {"check": "tensor-sum-sandwich",
            "parities": [sc.length.parity, sc.triple.parity], "rows": rows, "pass": ok}


def _check_triple_audit(sc: Scenario, rng: np.random.Generator) -> dict:
    radius = min(3, max(sc.params["radii"]))
    samples = sc.sample_elements(rng, count=3)
    audit = parity_audit(sc.length, sc.triple, radius, samples, tol=sc.params["audit_tolerance"])
    axioms = check_length_axioms(sc.length, sc.model.ball(radius))
    resolvent = resolvent_decay_profile(sc.length, sc.params["radii"])
    ok = audit["pass"] and axioms["pass"]
    return {"check": "spectral-triple-audit", "tensor_audit": audit,
            "length_axioms": axioms, "resolvent_profile": resolvent, "pass": ok}


def _check_mk_distance(sc: Scenario, rng: np.random.Generator) -> dict:
    scalars = CrossedProduct.scalars(sc.model)
    F = sc.model.ball(sc.params["berezin_set_radius"])
    cert = mk_certificate(scalars, sc.length, F, sc.params["mk_support_radius"],
                          budget=sc.params["mk_budget"], seed=sc.seed)
    cert_trace = mk_certificate(scalars, sc.length, None, sc.params["mk_support_radius"],
                                budget=sc.params["mk_budget"], seed=sc.seed + 1)
    ok = (cert.lower <= cert.upper + 1e-9) and (cert_trace.lower <= cert_trace.upper + 1e-9)
    return {
        "check": "mk-distance",
        "averaging_vs_counit": {"lower": cert.lower, "upper": cert.upper, "radius": cert.radius},
        "trace_vs_counit": {"lower": cert_trace.lower, "upper": cert_trace.upper,
                            "radius": cert_trace.radius},
        "pass": ok,
    }


def _check_cqms(sc: Scenario, rng: np.random.Generator) -> dict:
    scalars = CrossedProduct.scalars(sc.model)
    F = sc.model.ball(sc.params["berezin_set_radius"])
    S = difference_set(sc.model, F)
    # the identity-site column witnesses every lam_g once the ball covers S
    radius = max(max(sc.params["radii"]), 2 * sc.params["berezin_set_radius"])
    basis = [scalars.lam(g) for g in S]
    maps = [lambda b: d_vertical(b, sc.length, radius).matrix]
    space = scalar_sector(scalars, sc.length, sc.params["berezin_set_radius"] * 2, radius)
    pairs = [(trace_state(sc.model), counit(sc.model))]
    scalar_report = cqms_finite_check(basis, maps, space, pairs,
                                      budget=sc.params["cqms_budget"], seed=sc.seed)
    base_basis = list(sc.system.basis) if sc.system is not None else list(sc.triple.basis)
    base_report = cqms_finite_check(base_basis, [sc.triple.commutator])
    ok = scalar_report["pass"] and base_report["pass"]
    return {"check": "cqms-finite", "scalar_system": scalar_report,
            "base_system": base_report, "support_size": len(S), "pass": ok}


def _check_kernel_audit(sc: Scenario, rng: np.random.Generator) -> dict:
    radius = max(sc.params["radii"])
    ident = sc.model.identity()
    rows = []
    ok = True
    for k in range(sc.sampler["count"]):
        x = sc.triple.random_element(rng)
        on_base = spectral_norm(d_vertical(sc.ctx.embed(x), sc.length, radius).matrix, 1e-12)
        ok = ok and on_base == 0.0
        g = None
        ball = sc.model.ball(min(3, radius))
        pick = int(rng.integers(0, len(ball)))
        g = ball.elements[pick]
        if g == ident:
            g = ball.elements[(pick + 1) % len(ball)]
        value = spectral_norm(d_vertical(sc.ctx.element({g: x}), sc.length, radius).matrix, 1e-12)
        floor = 0.1 * smallest_singular_value(sc.length(g)) * smallest_singular_value(x)
        ok = ok and value > floor
        rows.append({"element": k, "on_base": on_base, "off_base": value,
                     "floor": floor, "coords": list(g.coords)})
    return {"check": "kernel-audit", "rows": rows, "pass": ok}


_CHECK_FUNCTIONS: dict[str, Callable[[Scenario, np.random.Generator], dict]] = {
    "folner-convergence": _check_folner,
    "berezin-contraction": _check_berezin_contraction,
    "slice-contraction": _check_slice_contraction,
    "approximation-identity": _check_approximation_identity,
    "approximation-bound": _check_approximation_bound,
    "tensor-sum-sandwich": _check_sandwich,
    "spectral-triple-audit": _check_triple_audit,
    "mk-distance": _check_mk_distance,
    "cqms-finite": _check_cqms,
    "kernel-audit": _check_kernel_audit,
}

_CHECK_ORDER = list(_CHECK_FUNCTIONS)


def _run_one(sc: Scenario, name: str) -> dict:
    seed = sc.seed + 1000 * (_CHECK_ORDER.index(name) + 1)
    rng = np.random.default_rng(seed)
    report = _CHECK_FUNCTIONS[name](sc, rng)
    report = {"scenario": sc.name, "description": CHECK_DESCRIPTIONS[name],
              "seed": seed, **report}
    write_json(sc.outdir / f"{name}.json", report)
    return report


def run_scenario(sc: Scenario, jobs: int = 1) -> tuple[int, dict[str, dict]]:
    """Run every configured check; returns (exit_code, reports by name)."""
    sc.outdir.mkdir(parents=True, exist_ok=True)
    reports: dict[str, dict] = {}
    try:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = {name: pool.submit(_run_one, sc, name) for name in sc.checks}
                for name, fut in futures.items():
                    reports[name] = fut.result()
        else:
            for name in sc.checks:
                reports[name] = _run_one(sc, name)
    except BallSizeError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE_CAP, reports
    failing = [name for name in sc.checks if not reports[name]["pass"]]
    summary = {
        "scenario": sc.name,
        "seed": sc.seed,
        "checks": {name: bool(reports[name]["pass"]) for name in sc.checks},
        "pass": not failing,
    }
    write_json(sc.outdir / "summary.json", summary)
    if failing:
        print("failing checks: " + ", ".join(sorted(failing)), file=sys.stderr)
        return EXIT_CHECK_FAILED, reports
    return EXIT_OK, reports


def run_file(path: str | Path, out=None, seed=None, max_ball=None, jobs: int = 1) -> int:
    """Load, build and run a scenario file; returns the process exit code."""
    try:
        cfg = load_config(path)
        sc = build_scenario(cfg, out=out, seed=seed, max_ball=max_ball,
                            config_dir=Path(path).parent)
    except ValidationError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except BallSizeError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE_CAP
    code, _ = run_scenario(sc, jobs=jobs)
    return code
