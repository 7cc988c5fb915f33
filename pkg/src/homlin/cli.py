"""Scenario-driven command line front end.

    homlin verify CONFIG [--override key=value ...]
    homlin export-algebra CONFIG
    homlin export-trajectories CONFIG
    homlin full-suite CONFIG

Exit codes: 0 pass, 1 check failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import copy
import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__

log = logging.getLogger("homlin")

REPORT_VERSION = "1"
CASES = {
    "kahler-pseudo": ("kahler", -1, "pseudo-kahler"),
    "kahler-para": ("kahler", 1, "para-kahler"),
    "quat-pseudo": ("quat", "pseudo", "pseudo-quat"),
    "quat-para": ("quat", "para", "para-quat"),
}
STAGES = ("theorem", "nomizu", "matrix", "chain", "geodesics")
DEFAULT_TOLERANCES = {
    "theorem": 1e-9,
    "control_floor": 1e-3,
    "nu": 1e-8,
    "jacobi": 1e-10,
    "brackets": 1e-10,
    "homomorphism": 1e-9,
    "membership": 1e-12,
    "trace": 1e-13,
    "involution": 1e-10,
    "wrong_scale_floor": 0.1,
    "bracket_width": 1e-4,
    "escape": 1e-3,
    "closed_form": 1e-6,
    "drift": 1e-8,
    "integrator": 1e-12,
}
DEFAULT_GEODESICS = [
    {"kind": "spacelike", "direction": "forward"},
    {"kind": "null", "direction": "forward"},
    {"kind": "timelike", "r": 0.6, "sign": -1, "direction": "backward"},
    {"kind": "stationary", "direction": "forward", "t_max": 100.0},
]
DEFAULT_SUITE = [
    {"case": "kahler-para", "n": 2, "xi": {"seed": 7}},
    {"case": "kahler-pseudo", "n": 4, "s": 1, "xi": "e1"},
    {"case": "quat-para", "n": 2, "xi": "e1"},
    {"case": "quat-pseudo", "n": 3, "s": 1, "xi": "e1"},
]


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    case: str
    n: int
    s: int = 0
    xi: object = "e1"
    zeta: object = None
    zetas: list = field(default_factory=lambda: [None, None, None])
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    stages: tuple = STAGES
    geodesics: list = field(default_factory=lambda: copy.deepcopy(DEFAULT_GEODESICS))
    output_path: str | None = None
    name: str | None = None

    @property
    def label(self):
        return self.name or f"{self.case}-n{self.n}-s{self.s}"

    def echo(self):
        return {"name": self.label, "case": self.case, "n": self.n, "s": self.s,
                "xi": self.xi, "zeta": self.zeta, "zetas": self.zetas,
                "stages": list(self.stages), "tolerances": self.tolerances,
                "geodesics": self.geodesics}


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw: dict, overrides) -> dict:
    out = copy.deepcopy(raw)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        node = out
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} descends into a non-object")
        node[parts[-1]] = _parse_value(value)
    return out


def scenario_from_dict(raw: dict) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("scenario must be a JSON object")
    case = raw.get("case")
    if case not in CASES:
        raise ConfigError(f"case must be one of {sorted(CASES)}, got {case!r}")
    n, s = raw.get("n"), raw.get("s", 0)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError(f"n must be a positive integer, got {n!r}")
    if not isinstance(s, int) or isinstance(s, bool) or s < 0:
        raise ConfigError(f"s must be a nonnegative integer, got {s!r}")
    kind = CASES[case][0]
    if kind == "quat" and 4 * n < 8:
        raise ConfigError(f"{case} needs dimension 4n >= 8, got n={n}")
    if kind == "kahler" and n < 2:
        raise ConfigError(f"{case} needs n >= 2")
    if case.endswith("pseudo") and s > n:
        raise ConfigError(f"split s={s} exceeds n={n}")
    tol = dict(DEFAULT_TOLERANCES)
    extra = raw.get("tolerances", {})
    if not isinstance(extra, dict):
        raise ConfigError("tolerances must be an object")
    unknown = set(extra) - set(tol)
    if unknown:
        raise ConfigError(f"unknown tolerances {sorted(unknown)}")
    tol.update({k: float(v) for k, v in extra.items()})
    stages = tuple(raw.get("stages", STAGES))
    bad = [x for x in stages if x not in STAGES]
    if bad:
        raise ConfigError(f"unknown stages {bad}")
    zetas = [raw.get(f"zeta{a}") for a in (1, 2, 3)]
    if "zetas" in raw:
        zetas = list(raw["zetas"])
        if len(zetas) != 3:
            raise ConfigError("zetas must have three entries")
    geos = raw.get("geodesics", copy.deepcopy(DEFAULT_GEODESICS))
    for gsp in geos:
        if gsp.get("kind") not in ("spacelike", "null", "timelike", "stationary"):
            raise ConfigError(f"unknown geodesic kind {gsp.get('kind')!r}")
        if gsp.get("direction", "forward") not in ("forward", "backward"):
            raise ConfigError(f"unknown direction {gsp.get('direction')!r}")
    return ScenarioConfig(case=case, n=n, s=s, xi=raw.get("xi", "e1"), zeta=raw.get("zeta"),
                          zetas=zetas, tolerances=tol, stages=stages, geodesics=geos,
                          output_path=raw.get("output_path"), name=raw.get("name"))


def load_config(path, overrides=()) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    return apply_overrides(raw, overrides)


def _vector(spec, space, what):
    d = space.dim
    if spec is None:
        return np.zeros(d)
    if isinstance(spec, str) and spec.startswith("e") and spec[1:].isdigit():
        i = int(spec[1:])
        if not 1 <= i <= d:
            raise ConfigError(f"{what}={spec} outside e1..e{d}")
        v = np.zeros(d)
        v[i - 1] = 1.0
        return v
    if isinstance(spec, dict) and "seed" in spec:
        from .pseudolinear import random_anisotropic_vector
        return random_anisotropic_vector(space, int(spec["seed"]))
    if isinstance(spec, list):
        if len(spec) != d:
            raise ConfigError(f"{what} has {len(spec)} components, expected {d}")
        return np.asarray(spec, dtype=float)
    raise ConfigError(f"cannot interpret {what}={spec!r}")


def build_data(cfg: ScenarioConfig):
    from .hypercomplex import PARA, PSEUDO
    from .lineartype import KahlerLinearData, QuatLinearData
    from .structures import SignatureError, make_standard_eps_complex, make_standard_eps_quat
    kind, eps, _ = CASES[cfg.case]
    try:
        if kind == "kahler":
            space, st = make_standard_eps_complex(cfg.n, cfg.s if eps == -1 else 0, eps)
        else:
            space, st = make_standard_eps_quat(cfg.n, cfg.s if eps == "pseudo" else 0,
                                               PSEUDO if eps == "pseudo" else PARA)
    except SignatureError as e:
        raise ConfigError(str(e)) from e
    xi = _vector(cfg.xi, space, "xi")
    if abs(space.inner(xi, xi)) < 1e-8:
        raise ConfigError("xi must be anisotropic (the nondegenerate case)")
    if kind == "kahler":
        return KahlerLinearData(xi, _vector(cfg.zeta, space, "zeta"), st)
    zetas = tuple(_vector(z, space, f"zeta{a + 1}") for a, z in enumerate(cfg.zetas))
    return QuatLinearData(xi, zetas, st)


def _f(x):
    """JSON-safe float."""
    x = float(x)
    return x if np.isfinite(x) else None


def _record(rep, prefix=""):
    return [{"name": prefix + c.name, "anchor": c.anchor, "residual": _f(c.residual),
             "tol": _f(c.tol), "pass": bool(c.passed)} for c in rep.checks]


def scenario_algebra(data):
    """Nomizu algebra of the scenario's own (S, R)."""
    from .curvature import R0_kahler, R0_quat
    from .lineartype import KahlerLinearData, build_S_kahler, build_S_quat
    from .nomizu import nomizu_build
    st = data.structure
    nx = float(st.space.inner(data.xi, data.xi))
    if isinstance(data, KahlerLinearData):
        return nomizu_build(build_S_kahler(data), -nx * R0_kahler(st)), 1
    return nomizu_build(build_S_quat(data), -nx * R0_quat(st)), 3


def _matrix_params(cfg, nx):
    """Case, split and xi-norm of the matrix model; negative norms use the anti-isometric model."""
    _, _, mcase = CASES[cfg.case]
    s = cfg.s if mcase.startswith("pseudo") else 0
    if nx < 0 and mcase.startswith("pseudo"):
        s = cfg.n - s
    return mcase, s, abs(nx)


def geodesic_runs(cfg: ScenarioConfig, k=None):
    from .geodesics import (GeodesicState, causal_character, closed_form_deviation, initial_value,
                            integrate, metric_character, singular_time)
    from .report import VerificationReport
    tol = cfg.tolerances
    rep = VerificationReport()
    runs = []
    for gsp in cfg.geodesics:
        kind = gsp["kind"]
        direction = gsp.get("direction", "forward")
        t_max = float(gsp.get("t_max", 10.0))
        r = float(gsp.get("r", 0.0))
        sign = float(gsp.get("sign", 1))
        if kind == "stationary":
            init = GeodesicState(sign, 0.0)
        else:
            init = initial_value(kind, r, sign)
        label = f"{kind}{'-neg' if sign < 0 else ''}-{direction}"
        traj, blow = integrate(init, direction, t_max, tol["integrator"])
        expected = None if kind == "stationary" else singular_time(kind, r, direction, sign)
        anchor = "geodesic system gamma1' = gamma2^2, gamma2' = gamma1 gamma2"
        if expected is None:
            rep.below(f"{label}-no-blowup", anchor, float(blow.detected), 0.5)
        else:
            rep.below(f"{label}-blowup-detected", anchor, float(not blow.detected), 0.5)
            if blow.detected:
                dist = max(0.0, blow.t_low - expected, expected - blow.t_high)
                rep.below(f"{label}-escape-bracket", f"escape time {expected:.12g}", dist, tol["escape"])
                rep.below(f"{label}-bracket-width", "escape bracket width", blow.bracket_width,
                          tol["bracket_width"] * (1 + 1e-12))
        if kind == "stationary":
            rep.below(f"{label}-constant", "stationary family (1, 0)",
                      float(np.max(np.abs(traj.y - traj.y[:, :1]))), tol["drift"])
        else:
            rep.below(f"{label}-closed-form", "closed-form solution",
                      closed_form_deviation(traj, kind, r, sign), tol["closed_form"])
        rep.below(f"{label}-charge-drift", "gamma1^2 - gamma2^2 conserved", traj.drift_regular, tol["drift"])
        runs.append({
            "label": label,
            "initial": [_f(init.gamma1), _f(init.gamma2)],
            "direction": direction,
            "causal_character": causal_character(init),
            "metric_character": metric_character(init),
            "analytic_escape": None if expected is None else _f(expected),
            "blowup": None if not blow.detected else {"t_low": _f(blow.t_low), "t_high": _f(blow.t_high)},
            "steps": int(traj.t.size),
            "_traj": traj,
            "_blow": blow,
        })
    if k is not None:
        from .geodesics import derive_connection, torsion_residual
        table = np.zeros((2, 2, 2))
        table[1, 0, 1] = -1.0  # nabla_V A = -V
        table[1, 1, 0] = -1.0  # nabla_V V = -A
        rep.below("K-connection", "nabla_A A = nabla_A V = 0, nabla_V A = -V, nabla_V V = -A",
                  float(np.max(np.abs(derive_connection(k) - table))), 1e-14)
        rep.below("K-torsion", "nabla_A V - nabla_V A = [A, V]", torsion_residual(k), 1e-14)
    return rep, runs


def run_scenario(cfg: ScenarioConfig, algebra_ref=None):
    """Full pipeline; returns (report dict without header, scenario algebra or None, geodesic runs)."""
    from .curvature import theorem_kahler_check, theorem_quat_check
    from .geodesics import KGroupMetric
    from .lineartype import KahlerLinearData, PreconditionError
    from .nomizu import (ClosureError, IdentificationError, InvariantViolation, RangeError,
                         antisymmetry_residual, grading_residual, involution_chain, jacobi_residual,
                         realize, verify_reference_brackets, wrong_scale_residual)
    from .report import CheckRecord, VerificationReport

    tol = cfg.tolerances
    data = build_data(cfg)
    nx = float(data.structure.space.inner(data.xi, data.xi))
    notes = []
    L, hol_dim, k = None, None, None
    rep = VerificationReport()

    def fail(name, anchor, err):
        rep.checks.append(CheckRecord(name, f"{anchor}: {type(err).__name__}: {err}",
                                      float("inf"), 0.0, False))

    if "theorem" in cfg.stages:
        try:
            if isinstance(data, KahlerLinearData):
                th = theorem_kahler_check(data, tol["theorem"], control_floor=tol["control_floor"])
            else:
                th = theorem_quat_check(data, tol["theorem"], control_floor=tol["control_floor"],
                                        nu_tol=tol["nu"])
            rep.extend(th, "theorem/")
        except PreconditionError as e:
            fail("theorem/precondition", "nondegenerate datum", e)

    if "nomizu" in cfg.stages:
        try:
            L, expected = scenario_algebra(data)
            hol_dim = L.extras["hol"].dim
            rep.below("nomizu/jacobi", "Nomizu algebra: Jacobi identity", jacobi_residual(L), tol["jacobi"])
            rep.below("nomizu/antisymmetry", "Nomizu algebra: [x, y] = -[y, x]", antisymmetry_residual(L), tol["jacobi"])
            rep.below("nomizu/grading", "[h, m] in m, [h, h] in h", grading_residual(L), tol["jacobi"])
            rep.below("nomizu/holonomy-dim", f"holonomy algebra of dimension {expected}",
                      abs(hol_dim - expected), 0.5)
        except (ClosureError, IdentificationError) as e:
            fail("nomizu/build", "holonomy span", e)

    mcase, ms, mnx = _matrix_params(cfg, nx)
    if nx < 0 and ("matrix" in cfg.stages or "chain" in cfg.stages):
        notes.append("g(xi,xi) < 0: matrix stages use the anti-isometric model (metric -g, xi -> -xi)")
    if "matrix" in cfg.stages:
        try:
            r = realize(mcase, cfg.n, ms, mnx)
            res = r.residuals
            rep.below("matrix/membership", "ambient algebra membership", res["membership"], tol["membership"])
            if mcase.endswith("kahler"):
                rep.below("matrix/trace-JJ", "trace of the holonomy generator", res["trace-JJ"], tol["trace"])
            rep.below("matrix/root-n1", "[A0, v] = v on n1", res["root-n1"], tol["membership"])
            rep.below("matrix/root-n2", "[A0, q] = 2q on n2", res["root-n2"], tol["membership"])
            for key in ("ad-JJ-n1", "n1-bracket", "n1-metric-symmetric", "structure", "n1-bracket-form", "hol-on-n1"):
                rep.below(f"matrix/{key}", "adapted structure from the matrix model", res[key], tol["homomorphism"])
            rep.below("matrix/homomorphism", "phi([x, y]) = [phi x, phi y]", res["homomorphism"], tol["homomorphism"])
            rep.above("matrix/wrong-scale-control", "phi with xi -> 2 g(xi,xi) A0 fails",
                      wrong_scale_residual(r), tol["wrong_scale_floor"])
            rep.below("matrix/jacobi", "Nomizu algebra of the model: Jacobi identity",
                      jacobi_residual(r.algebra), tol["jacobi"])
            for key, v in verify_reference_brackets(r).items():
                rep.below(f"matrix/bracket-{key}", f"explicit bracket table [{key.replace('-', ', ')}]",
                          v, tol["brackets"])
        except RangeError as e:
            notes.append(f"matrix stage skipped: {e}")

    if "chain" in cfg.stages:
        try:
            ch = involution_chain(mcase, cfg.n, ms, mnx)
            for i, step in enumerate(ch.steps[1:], 1):
                for key, v in step.residuals.items():
                    rep.below(f"chain/{i}-{step.name}-{key}", f"involution {step.name}", v, tol["involution"])
            t = ch.terminal
            rep.below("chain/terminal-dim", "terminal algebra of dimension 2", abs(ch.final.algebra.dim - 2), 0.5)
            rep.below("chain/terminal-bracket", "[A, V] = V", t.bracket_residual, tol["involution"])
            rep.below("chain/terminal-orthogonal", "g(A, V) = 0", abs(t.gAV), tol["involution"])
            rep.below("chain/terminal-signs", "g(A, A) = 1, g(V, V) = -1 after normalization",
                      float(t.normalized_signs != (1.0, -1.0)), 0.5)
            k = KGroupMetric(1.0, 1.0, -1.0, 0.0)
        except RangeError as e:
            notes.append(f"chain skipped: {e}")
        except InvariantViolation as e:
            fail("chain/invariant", "involution chain", e)

    runs = []
    if "geodesics" in cfg.stages:
        grep, runs = geodesic_runs(cfg, k if k is not None else KGroupMetric())
        rep.extend(grep, "geodesics/")

    report = {
        "version": REPORT_VERSION,
        "scenario": cfg.echo(),
        "checks": _record(rep),
        "holonomy_dim": hol_dim,
        "algebra_ref": algebra_ref,
        "geodesics": [{k2: v for k2, v in run.items() if not k2.startswith("_")} for run in runs],
        "notes": notes,
        "verdict": "pass" if rep.passed else "fail",
    }
    return report, L, runs


def algebra_document(L) -> dict:
    basis = [{"label": lab, "part": part} for lab, part in zip(L.labels, L.parts)]
    C = L.C
    brackets = []
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            for k in range(L.dim):
                v = float(C[i, j, k])
                if abs(v) > 1e-13:
                    brackets.append({"i": i, "j": j, "k": k, "value": v})
    return {"version": REPORT_VERSION, "dim": L.dim, "basis": basis, "brackets": brackets}


def trajectory_document(run) -> dict:
    traj = run["_traj"]
    pts = [[float(t), float(a), float(b)] for t, a, b in zip(traj.t, traj.y[0], traj.y[1])]
    return {"version": REPORT_VERSION, "label": run["label"], "initial": run["initial"],
            "direction": run["direction"], "points": pts, "blowup": run["blowup"]}


def _header():
    return {"timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "package_version": __version__}


def _write(path: Path, doc: dict):
    text = json.dumps({"header": _header(), **doc}, indent=2, sort_keys=False) + "\n"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise ConfigError(f"cannot write {path}: {e}") from e


def strip_header(text: str) -> dict:
    doc = json.loads(text)
    doc.pop("header", None)
    return doc


def _out_dir(raw, cfg_path):
    base = raw.get("output_dir")
    return Path(base) if base else Path(cfg_path).resolve().parent / "out"


def _single(raw):
    cfg = scenario_from_dict({k: v for k, v in raw.items() if k not in ("output_dir", "scenarios")})
    return cfg


def cmd_verify(raw, cfg_path):
    cfg = _single(raw)
    report, _, _ = run_scenario(cfg)
    out = Path(cfg.output_path) if cfg.output_path else _out_dir(raw, cfg_path) / f"{cfg.label}-report.json"
    _write(out, report)
    return report


def cmd_export_algebra(raw, cfg_path):
    cfg = _single(raw)
    data = build_data(cfg)
    L, _ = scenario_algebra(data)
    out = _out_dir(raw, cfg_path) / f"{cfg.label}-algebra.json"
    _write(out, algebra_document(L))
    log.info("wrote %s", out)
    return out


def cmd_export_trajectories(raw, cfg_path):
    cfg = _single(raw)
    _, runs = geodesic_runs(cfg)
    outs = []
    for run in runs:
        out = _out_dir(raw, cfg_path) / f"trajectory-{run['label']}.json"
        _write(out, trajectory_document(run))
        outs.append(out)
    return outs


def cmd_full_suite(raw, cfg_path):
    scen = raw.get("scenarios") or DEFAULT_SUITE
    shared = {k: v for k, v in raw.items() if k not in ("scenarios", "output_dir", "output_path")}
    out_dir = _out_dir(raw, cfg_path)
    reports = []
    trajs_written = set()
    for item in scen:
        cfg = scenario_from_dict({**shared, **item})
        ref = f"{cfg.label}-algebra.json"
        report, L, runs = run_scenario(cfg, algebra_ref=ref if "nomizu" in cfg.stages else None)
        if L is not None:
            _write(out_dir / ref, algebra_document(L))
        for run in runs:
            if run["label"] not in trajs_written:
                _write(out_dir / f"trajectory-{run['label']}.json", trajectory_document(run))
                trajs_written.add(run["label"])
        reports.append(report)
    suite = {"version": REPORT_VERSION, "scenarios": reports,
             "verdict": "pass" if all(r["verdict"] == "pass" for r in reports) else "fail"}
    out = Path(raw["output_path"]) if raw.get("output_path") else out_dir / "suite-report.json"
    _write(out, suite)
    return suite


def _failing(report):
    if "scenarios" in report:
        return [f"{r['scenario']['name']}: {c['name']}" for r in report["scenarios"]
                for c in r["checks"] if not c["pass"]]
    return [c["name"] for c in report["checks"] if not c["pass"]]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="homlin", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=["verify", "export-algebra", "export-trajectories", "full-suite"])
    parser.add_argument("config", help="scenario JSON file")
    parser.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="replace a config entry; dotted keys reach nested objects")
    parser.add_argument("-v", "--verbose", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        raw = load_config(args.config, args.override)
        if args.command == "verify":
            report = cmd_verify(raw, args.config)
        elif args.command == "full-suite":
            report = cmd_full_suite(raw, args.config)
        elif args.command == "export-algebra":
            print(cmd_export_algebra(raw, args.config))
            return 0
        else:
            for p in cmd_export_trajectories(raw, args.config):
                print(p)
            return 0
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    bad = _failing(report)
    if bad:
        print("FAIL: " + ", ".join(bad), file=sys.stderr)
        return 1
    print("PASS")
    return 0


if __name__ == "__main__":
    sys.exit(main())
