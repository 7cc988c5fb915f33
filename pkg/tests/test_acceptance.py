"""The eight acceptance criteria, each reported as one PASS/FAIL line."""
import json

import numpy as np

from homlin.cli import main, strip_header
from homlin.curvature import R0_kahler, R0_quat, decompose_quat, ricci_scalar, theorem_kahler_check, \
    theorem_quat_check
from homlin.geodesics import (GeodesicState, closed_form_deviation, initial_value, integrate, singular_time,
                              timelike_constants)
from homlin.hypercomplex import PARA, PSEUDO
from homlin.lineartype import (KahlerLinearData, QuatLinearData, build_S_kahler, build_S_quat, fit_pi,
                               kahler_module_residual, metric_compat_residual, qk_class_membership)
from homlin.nomizu import involution_chain, jacobi_residual, nomizu_build, realize, verify_reference_brackets
from homlin.pseudolinear import random_anisotropic_vector, standard_frame
from homlin.structures import make_standard_eps_complex, make_standard_eps_quat

SEEDS = range(5)


def test_symmetry_suite(criterion):
    worst = 0.0
    for eps, splits in ((1, [(2, 0), (3, 0)]), (-1, [(2, 0), (2, 1), (3, 1)])):
        for n, s in splits:
            sp, J = make_standard_eps_complex(n, s, eps)
            for seed in SEEDS:
                rng = np.random.default_rng(seed)
                xi, zeta = rng.standard_normal((2, sp.dim))
                S = build_S_kahler(KahlerLinearData(xi, zeta, J))
                worst = max(worst, metric_compat_residual(S), kahler_module_residual(S, J))
    for eps, splits in ((PARA, [0]), (PSEUDO, [0, 1])):
        for s in splits:
            sp, t = make_standard_eps_quat(2, s, eps)
            for seed in SEEDS:
                rng = np.random.default_rng(seed)
                S = build_S_quat(QuatLinearData(rng.standard_normal(8), tuple(rng.standard_normal((3, 8))), t))
                worst = max(worst, metric_compat_residual(S), fit_pi(S, t)[1])
    assert criterion(1, "symmetry suite", worst < 1e-10, f"max residual {worst:.2e} < 1e-10")


def test_kahler_theorem(criterion):
    worst, control, ok = 0.0, np.inf, True
    for eps in (-1, 1):
        for n, s in ((2, 0), (3, 1)):
            sp, J = make_standard_eps_complex(n, s, eps)
            for xi in (np.eye(sp.dim)[0], random_anisotropic_vector(sp, 11)):
                rep = theorem_kahler_check(KahlerLinearData(xi, np.zeros(sp.dim), J), tol=1e-9)
                ok &= rep.passed
                worst = max(worst, max(c.residual for c in rep.checks if c.name != "negative-control-zeta"))
                control = min(control, rep["negative-control-zeta"].residual)
    ok &= control > 1e-3
    assert criterion(2, "constant eps-holomorphic curvature identities", ok,
                     f"max residual {worst:.2e} < 1e-9, zeta obstruction {control:.3g} > 1e-3")


def test_quat_theorem(criterion):
    ok, worst_sp, worst_nu = True, 0.0, 0.0
    for eps in (PSEUDO, PARA):
        sp, t = make_standard_eps_quat(2, 0, eps)
        fr = standard_frame(sp)
        for xi in (np.eye(8)[0], random_anisotropic_vector(sp, 3)):
            nx = sp.inner(xi, xi)
            rep = theorem_quat_check(QuatLinearData(xi, (np.zeros(8),) * 3, t), tol=1e-9, frame=fr)
            ok &= rep.passed
            S = build_S_quat(QuatLinearData(xi, (np.zeros(8),) * 3, t))
            ok &= qk_class_membership(S, t, fr)["QK3"]["member"]
            dec = decompose_quat(-nx * R0_quat(t), t, fr)
            worst_sp = max(worst_sp, float(np.max(np.abs(dec.sp_part.components))))
            _, s = ricci_scalar(-nx * R0_quat(t), fr)
            worst_nu = max(worst_nu, abs(s / (16 * t.n * (t.n + 2)) + nx))
    ok &= worst_sp < 1e-10 and worst_nu < 1e-8
    assert criterion(3, "constant eps-quaternion curvature identities", ok,
                     f"sp part {worst_sp:.2e} < 1e-10, nu_q error {worst_nu:.2e} < 1e-8, QK3 flagged")


def test_nomizu_validity(criterion):
    jac, hol_ok = 0.0, True
    for eps in (-1, 1):
        for n in range(2, 7):
            sp, J = make_standard_eps_complex(n, 1 if eps == -1 and n > 2 else 0, eps)
            xi = random_anisotropic_vector(sp, n)
            L = nomizu_build(build_S_kahler(KahlerLinearData(xi, np.zeros(sp.dim), J)),
                             -sp.inner(xi, xi) * R0_kahler(J))
            jac = max(jac, jacobi_residual(L))
            hol_ok &= L.extras["hol"].dim == 1
    for eps, n, s in ((PSEUDO, 2, 0), (PSEUDO, 2, 1), (PARA, 2, 0), (PSEUDO, 3, 1), (PARA, 3, 0)):
        sp, t = make_standard_eps_quat(n, s, eps)
        xi = random_anisotropic_vector(sp, 5)
        L = nomizu_build(build_S_quat(QuatLinearData(xi, (np.zeros(sp.dim),) * 3, t)),
                         -sp.inner(xi, xi) * R0_quat(t))
        jac = max(jac, jacobi_residual(L))
        hol_ok &= L.extras["hol"].dim == 3
    tables = 0.0
    for case, n, s in (("para-kahler", 2, 0), ("pseudo-kahler", 3, 1), ("para-quat", 2, 0), ("pseudo-quat", 2, 0)):
        tables = max(tables, max(verify_reference_brackets(realize(case, n, s)).values()))
    ok = jac < 1e-10 and hol_ok and tables < 1e-10
    assert criterion(4, "Nomizu algebras", ok,
                     f"Jacobi {jac:.2e} < 1e-10, holonomy dims 1/3: {hol_ok}, bracket tables {tables:.2e} < 1e-10")


def test_matrix_embeddings(criterion):
    hom = mem = tr = 0.0
    for case, n, s in (("para-kahler", 2, 0), ("pseudo-kahler", 2, 0), ("para-quat", 2, 0), ("pseudo-quat", 2, 0)):
        r = realize(case, n, s)
        hom = max(hom, r.residuals["homomorphism"])
        mem = max(mem, r.residuals["membership"])
        if "kahler" in case:
            tr = max(tr, r.residuals["trace-JJ"])
    ok = hom < 1e-9 and mem < 1e-12 and tr < 1e-13
    assert criterion(5, "matrix embeddings", ok,
                     f"homomorphism {hom:.2e} < 1e-9, membership {mem:.2e} < 1e-12, trace {tr:.2e} < 1e-13")


def test_involution_chains(criterion):
    ok, worst, dims = True, 0.0, []
    for case, n, s in (("para-kahler", 3, 0), ("pseudo-kahler", 4, 1), ("para-quat", 2, 0), ("pseudo-quat", 3, 1)):
        res = involution_chain(case, n, s)
        for st in res.steps[1:]:
            worst = max(worst, max(st.residuals.values()))
        term = res.terminal
        worst = max(worst, term.bracket_residual)
        ok &= res.final.algebra.dim == 2 and term.normalized_signs == (1.0, -1.0)
        dims.append("->".join(str(st.dim) for st in res.steps))
    ok &= worst < 1e-10
    assert criterion(6, "involution chains", ok, f"{', '.join(dims)}; [A,V]=V, signs (+,-), residual {worst:.2e}")


def test_incompleteness(criterion):
    ok = True
    notes = []
    for kind, r, sign, direction, target in (("spacelike", 0, 1, "forward", np.pi / 2),
                                             ("null", 0, 1, "forward", 1.0)):
        traj, rep = integrate(initial_value(kind, r, sign), direction)
        ok &= rep.detected and rep.t_low <= target <= rep.t_high and rep.bracket_width <= 1e-4
        ok &= closed_form_deviation(traj, kind, r, sign) < 1e-6
        notes.append(f"{kind} [{rep.t_low:.9f}, {rep.t_high:.9f}]")
    s, k = timelike_constants(0.6)
    traj, rep = integrate(initial_value("timelike", 0.6, -1), "backward")
    ok &= rep.detected and abs(rep.escape_time_estimate + k / s) < 1e-3
    ok &= abs(singular_time("timelike", 0.6, "backward", -1) + k / s) < 1e-15
    ok &= closed_form_deviation(traj, "timelike", 0.6, -1) < 1e-6
    notes.append(f"timelike {rep.escape_time_estimate:.6f} vs -k/s = {-k / s:.6f}")
    traj, rep = integrate(GeodesicState(1.0, 0.0), "forward", t_max=100)
    ok &= not rep.detected and traj.t[-1] == 100 and traj.drift == 0
    notes.append(f"stationary drift {traj.drift}")
    assert criterion(7, "incompleteness certification", ok, "; ".join(notes))


def test_determinism(criterion, tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text(json.dumps({"output_dir": str(tmp_path / "out")}))
    out = tmp_path / "out" / "suite-report.json"
    codes, texts = [], []
    for _ in range(2):
        codes.append(main(["full-suite", str(cfg)]))
        texts.append(out.read_text())
    a, b = (strip_header(t) for t in texts)
    same = json.dumps(a, indent=2) == json.dumps(b, indent=2)
    body_lines = [t.splitlines() for t in texts]
    # only the timestamp line may differ
    diff = [i for i, (x, y) in enumerate(zip(*body_lines)) if x != y]
    ok = codes == [0, 0] and same and all("timestamp" in body_lines[0][i] for i in diff)
    assert criterion(8, "full-suite determinism", ok, f"exit codes {codes}, differing lines {len(diff)}")
