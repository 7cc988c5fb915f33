import numpy as np
import pytest

from homlin.curvature import (Curvature4, R0_kahler, R0_quat, RS_from_S, Rtilde, constant_hol_model, decompose_quat,
                              holomorphic_sectional, nablaR_candidate, ricci_scalar, second_bianchi_residual,
                              symmetry_residuals, theorem_kahler_check, theorem_quat_check)
from homlin.hypercomplex import PARA, PSEUDO
from homlin.lineartype import (KahlerLinearData, PreconditionError, QuatLinearData, STensor, build_S_kahler,
                               build_S_quat)
from homlin.pseudolinear import InvalidDimensionError, random_anisotropic_vector, random_frame
from homlin.structures import make_standard_eps_complex, make_standard_eps_quat


def _r0_kahler_entry(g, J, e, X, Y, Z, W):
    ip = lambda a, b: a @ g @ b
    return -(ip(Y, Z) * ip(X, W) - ip(X, Z) * ip(Y, W) + e * ip(X, J @ Z) * ip(Y, J @ W)
             - e * ip(X, J @ W) * ip(Y, J @ Z) + 2 * e * ip(X, J @ Y) * ip(Z, J @ W))


def _oracle_scalar(R, g):
    """Double contraction with the inverse metric, independent of any frame."""
    gi = np.linalg.inv(g)
    return float(np.einsum("ac,bd,abcd->", gi, gi, R.components))


@pytest.mark.parametrize("n,s,eps", [(2, 0, -1), (2, 1, -1), (2, 0, 1), (3, 1, 1)])
def test_R0_kahler_symmetries(n, s, eps):
    _, J = make_standard_eps_complex(n, s, eps)
    res = symmetry_residuals(R0_kahler(J))
    assert max(res.values()) < 1e-13


def test_R0_kahler_entries(rng):
    sp, J = make_standard_eps_complex(2, 0, -1)
    R = R0_kahler(J)
    E = np.eye(4)
    assert np.isclose(R.components[0, 1, 1, 0], _r0_kahler_entry(sp.metric, J.J, -1, E[0], E[1], E[1], E[0]))
    X, Y, Z, W = rng.standard_normal((4, 4))
    val = np.einsum("abcd,a,b,c,d->", R.components, X, Y, Z, W)
    assert np.isclose(val, _r0_kahler_entry(sp.metric, J.J, -1, X, Y, Z, W))


@pytest.mark.parametrize("n,s,eps", [(2, 0, -1), (3, 1, -1), (2, 0, 1)])
def test_R0_kahler_einstein(n, s, eps):
    sp, J = make_standard_eps_complex(n, s, eps)
    r, sc = ricci_scalar(R0_kahler(J))
    lam = r[0, 0] / sp.metric[0, 0]
    assert np.max(np.abs(r - lam * sp.metric)) < 1e-12
    assert np.isclose(sc, 2 * n * lam)
    assert np.isclose(sc, _oracle_scalar(R0_kahler(J), sp.metric))


def test_constant_hol_model():
    sp, J = make_standard_eps_complex(2, 1, -1)
    assert np.array_equal(constant_hol_model(0.0, J).components, np.zeros((4,) * 4))
    assert np.allclose(constant_hol_model(-4.0, J).components, -R0_kahler(J).components)
    R2 = constant_hol_model(2.0, J)
    assert np.isclose(ricci_scalar(R2)[1], _oracle_scalar(R2, sp.metric))


@pytest.mark.parametrize("eps", [-1, 1])
def test_holomorphic_sectional_constant(eps):
    sp, J = make_standard_eps_complex(3, 1, eps)
    R = constant_hol_model(1.7, J)
    vals = []
    for seed in range(10):
        X = random_anisotropic_vector(sp, seed)
        if abs(sp.inner(X, X)) < 0.1:
            continue
        vals.append(holomorphic_sectional(R, J, X))
    assert len(vals) >= 5
    assert np.ptp(vals) < 1e-10


def test_ricci_frame_independent():
    sp, J = make_standard_eps_complex(3, 1, -1)
    R = R0_kahler(J)
    r0, s0 = ricci_scalar(R)
    for seed in range(10):
        r, s = ricci_scalar(R, random_frame(sp, seed))
        assert np.max(np.abs(r - r0)) < 1e-11 and abs(s - s0) < 1e-11
    zero = R * 0.0
    r, s = ricci_scalar(zero)
    assert s == 0 and not np.any(r)


@pytest.mark.parametrize("n,s,eps", [(2, 0, PSEUDO), (2, 1, PSEUDO), (2, 0, PARA)])
def test_R0_quat(n, s, eps):
    sp, t = make_standard_eps_quat(n, s, eps)
    R = R0_quat(t)
    assert max(symmetry_residuals(R).values()) < 1e-13
    _, sc = ricci_scalar(R)
    assert np.isclose(sc, 16 * n * (n + 2))
    dec = decompose_quat(R, t)
    assert np.isclose(dec.nu_q, 1.0)
    assert np.max(np.abs(dec.sp_part.components)) < 1e-12


def test_R0_quat_entry():
    """One component from the displayed formula evaluated with vectors."""
    sp, t = make_standard_eps_quat(2, 1, PSEUDO)
    g = sp.metric
    ip = lambda a, b: a @ g @ b
    X, Y = np.eye(8)[0], np.eye(8)[4]
    Z, W = X, Y
    val = ip(X, Z) * ip(Y, W) - ip(Y, Z) * ip(X, W)
    for e, J in zip(t.eps, t.Js):
        val -= e * (ip(J @ X, Z) * ip(J @ Y, W) - ip(J @ Y, Z) * ip(J @ X, W) + 2 * ip(X, J @ Y) * ip(Z, J @ W))
    assert np.isclose(R0_quat(t).components[0, 4, 0, 4], val)


def test_nablaR_and_RS_zero():
    sp, J = make_standard_eps_complex(2, 0, -1)
    S = STensor(np.zeros((4, 4, 4)), sp)
    assert not np.any(nablaR_candidate(R0_kahler(J), S))
    assert not np.any(RS_from_S(S).components)


@pytest.mark.parametrize("n,s,eps", [(2, 0, -1), (3, 1, -1), (2, 0, 1)])
def test_second_bianchi_along_linear_type(n, s, eps, rng):
    sp, J = make_standard_eps_complex(n, s, eps)
    xi = random_anisotropic_vector(sp, 3)
    S = build_S_kahler(KahlerLinearData(xi, np.zeros(sp.dim), J))
    R = constant_hol_model(-4 * sp.inner(xi, xi), J)
    assert second_bianchi_residual(nablaR_candidate(R, S)) < 1e-10
    # S annihilates every multiple of R0 but not a generic algebraic curvature tensor
    h = rng.standard_normal((sp.dim, sp.dim))
    h = h + h.T
    kn = (np.einsum("xw,yz->xyzw", h, h) - np.einsum("xz,yw->xyzw", h, h))
    generic = Curvature4(kn, sp)
    assert max(symmetry_residuals(generic).values()) < 1e-12
    assert second_bianchi_residual(nablaR_candidate(R + generic, S)) > 1e-3


def test_RS_oracle(rng):
    sp, J = make_standard_eps_complex(2, 0, 1)
    S = build_S_kahler(KahlerLinearData(rng.standard_normal(4), rng.standard_normal(4), J))
    Sop = lambda X: np.einsum("x,xyk->ky", X, S.endo)  # matrix of S_X
    E = np.eye(4)
    RS = RS_from_S(S)
    for x in range(4):
        for y in range(4):
            X, Y = E[x], E[y]
            T = Sop(X) @ Y - Sop(Y) @ X
            op = Sop(T) - Sop(X) @ Sop(Y) + Sop(Y) @ Sop(X)
            assert np.allclose(RS.components[x, y], (sp.metric @ op).T, atol=1e-12)


def test_rtilde_xi_vanishes():
    sp, J = make_standard_eps_complex(2, 0, 1)
    xi = np.eye(4)[0]
    S = build_S_kahler(KahlerLinearData(xi, np.zeros(4), J))
    Rt = Rtilde(constant_hol_model(-4 * sp.inner(xi, xi), J), RS_from_S(S))
    assert np.max(np.abs(np.einsum("xyzw,z->xyw", Rt.components, xi))) < 1e-12


@pytest.mark.parametrize("n,s,eps,seed", [(2, 0, -1, None), (3, 2, -1, 2), (2, 0, 1, 5), (3, 1, 1, 8)])
def test_theorem_kahler(n, s, eps, seed):
    sp, J = make_standard_eps_complex(n, s, eps)
    xi = np.eye(sp.dim)[0] if seed is None else random_anisotropic_vector(sp, seed)
    rep = theorem_kahler_check(KahlerLinearData(xi, np.zeros(sp.dim), J), tol=1e-10)
    assert rep.passed, rep.failing()
    assert rep["negative-control-zeta"].residual > 1e-3


def test_theorem_kahler_zeta_fails():
    sp, J = make_standard_eps_complex(2, 0, -1)
    rep = theorem_kahler_check(KahlerLinearData(np.eye(4)[0], np.eye(4)[2], J))
    assert rep.failing() == ["zeta-vanishes"]


def test_theorem_preconditions():
    sp, J = make_standard_eps_complex(2, 1, -1)
    e = np.eye(4)
    v = next(e[0] + e[k] for k in range(1, 4) if sp.inner(e[0] + e[k], e[0] + e[k]) == 0)
    with pytest.raises(PreconditionError):
        theorem_kahler_check(KahlerLinearData(v, np.zeros(4), J))
    _, t = make_standard_eps_quat(1, 0, PSEUDO)
    with pytest.raises(InvalidDimensionError):
        theorem_quat_check(QuatLinearData(np.eye(4)[0], (np.zeros(4),) * 3, t))


@pytest.mark.parametrize("s,eps", [(0, PSEUDO), (1, PSEUDO), (0, PARA)])
def test_theorem_quat(s, eps):
    sp, t = make_standard_eps_quat(2, s, eps)
    rep = theorem_quat_check(QuatLinearData(np.eye(8)[0], (np.zeros(8),) * 3, t))
    assert rep.passed, rep.failing()
    assert rep["negative-control-wedge"].residual > 1e-3


def test_theorem_quat_zeta_fails():
    sp, t = make_standard_eps_quat(2, 0, PSEUDO)
    z = np.eye(8)
    rep = theorem_quat_check(QuatLinearData(z[0], (z[4], np.zeros(8), np.zeros(8)), t))
    assert rep.failing() == ["zeta-vanishes"]
    assert rep["negative-control-zeta"].residual > 1e-3
