"""Homogeneous structure tensors of linear type and their algebraic classes."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .pseudolinear import Frame, MetricSpace, contract12, lower_last, raise_last
from .structures import EpsHermitian, EpsQuatTriple

TOL_DEG = 1e-8
CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


class PreconditionError(ValueError):
    pass


class Degeneracy(str, Enum):
    NONDEGENERATE = "nondegenerate"
    DEGENERATE = "degenerate"
    STRONGLY_DEGENERATE = "strongly_degenerate"


@dataclass(frozen=True, eq=False)
class KahlerLinearData:
    xi: np.ndarray
    zeta: np.ndarray
    structure: EpsHermitian

    def __post_init__(self):
        d = self.structure.dim
        for name in ("xi", "zeta"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (d,):
                raise ValueError(f"{name} has shape {v.shape}, expected ({d},)")
            object.__setattr__(self, name, v)


@dataclass(frozen=True, eq=False)
class QuatLinearData:
    xi: np.ndarray
    zetas: tuple
    structure: EpsQuatTriple

    def __post_init__(self):
        d = self.structure.dim
        xi = np.asarray(self.xi, dtype=float)
        zetas = tuple(np.asarray(z, dtype=float) for z in self.zetas)
        if xi.shape != (d,) or len(zetas) != 3 or any(z.shape != (d,) for z in zetas):
            raise ValueError("xi and the three zetas must be vectors of the structure's dimension")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "zetas", zetas)


@dataclass(frozen=True, eq=False)
class STensor:
    """``components[x, y, z] = g(S_x y, z)``."""

    components: np.ndarray
    space: MetricSpace

    @property
    def endo(self):
        """(1,2) form: ``endo[x, y, k] = (S_x y)^k``; ``endo[x].T`` is the matrix of S_x."""
        return raise_last(self.components, self.space)

    def matrices(self):
        return np.transpose(self.endo, (0, 2, 1))


def build_S_kahler(d: KahlerLinearData) -> STensor:
    t = d.structure
    g, J, e = t.space.metric, t.J, t.eps
    xi, zeta = d.xi, d.zeta
    I = np.eye(t.dim)
    gxi = g @ xi
    gJ = g @ J  # gJ[x, y] = g(e_x, J e_y)
    Sv = (np.einsum("xy,k->xyk", g, xi)
          - np.einsum("y,xk->xyk", gxi, I)
          + e * np.einsum("xy,k->xyk", gJ, J @ xi)
          - e * np.einsum("y,kx->xyk", xi @ gJ, J)
          - 2 * np.einsum("x,ky->xyk", zeta @ gJ, J))
    return STensor(lower_last(Sv, t.space), t.space)


def build_S_quat(d: QuatLinearData) -> STensor:
    t = d.structure
    g = t.space.metric
    xi = d.xi
    I = np.eye(t.dim)
    Sv = np.einsum("xy,k->xyk", g, xi) - np.einsum("y,xk->xyk", g @ xi, I)
    for e, J, zeta in zip(t.eps, t.Js, d.zetas):
        gJ = g @ J
        # g(J_a Y, xi) = (xi^T g J_a)[y]
        Sv -= e * (np.einsum("y,kx->xyk", xi @ gJ, J)
                   - np.einsum("xy,k->xyk", gJ, J @ xi))
        Sv += np.einsum("x,ky->xyk", g @ zeta, J)
    return STensor(lower_last(Sv, t.space), t.space)


def classify_degeneracy(d, tol: float = TOL_DEG) -> Degeneracy:
    space = d.structure.space
    if abs(space.inner(d.xi, d.xi)) > tol:
        return Degeneracy.NONDEGENERATE
    if isinstance(d, QuatLinearData):
        return Degeneracy.DEGENERATE
    if np.linalg.norm(d.zeta) > tol:
        return Degeneracy.DEGENERATE
    return Degeneracy.STRONGLY_DEGENERATE


def metric_compat_residual(S: STensor) -> float:
    c = S.components
    return float(np.max(np.abs(c + np.transpose(c, (0, 2, 1)))))


def kahler_module_residual(S: STensor, t: EpsHermitian) -> float:
    """max |S(X, JY, JZ) + eps S(X, Y, Z)|."""
    c = S.components
    SJJ = np.einsum("xab,ay,bz->xyz", c, t.J, t.J)
    return float(np.max(np.abs(SJJ + t.eps * c)))


@dataclass(frozen=True, eq=False)
class Sp1Projection:
    c: np.ndarray  # c[x, i, j] = c_ij(e_x)
    coeffs: np.ndarray  # S_x = A_x + sum_b coeffs[x, b] J_b with A_x commuting with Q
    residual: float


def sp1_projection(S: STensor, t: EpsQuatTriple) -> Sp1Projection:
    mats = S.matrices()
    d = t.dim
    # trace pairing: tr(J_a J_b) = eps_a * d * delta_ab
    coeffs = np.stack([np.einsum("xij,ji->x", mats, J) / (e * d)
                       for e, J in zip(t.eps, t.Js)], axis=1)
    c = np.zeros((d, 3, 3))
    res = 0.0
    for x in range(d):
        for i, Ji in enumerate(t.Js):
            comm = Ji @ mats[x] - mats[x] @ Ji
            for j, (e, Jj) in enumerate(zip(t.eps, t.Js)):
                c[x, i, j] = np.trace(comm @ Jj) / (e * d)
            recon = sum(c[x, i, j] * t.Js[j] for j in range(3))
            res = max(res, float(np.max(np.abs(comm - recon))))
    return Sp1Projection(c, coeffs, res)


def _sym2_system(t: EpsQuatTriple):
    """Linear map pi -> RHS of the second symmetry, per X.

    Returns M with shape (3, d, d, 3): M[a, y, z, c] is the coefficient of
    pi^c(X) in the a-th equation at (Y, Z) = (e_y, e_z).
    """
    g = t.space.metric
    d = t.dim
    M = np.zeros((3, d, d, 3))
    for a, b, c in CYCLIC:
        Ja, Jb, Jc = t.Js[a], t.Js[b], t.Js[c]
        M[a, :, :, c] += t.eps[b] * (Jb.T @ g @ Ja)
        M[a, :, :, b] -= t.eps[c] * (Jc.T @ g @ Ja)
    return M


def _sym2_lhs(S: STensor, t: EpsQuatTriple):
    c = S.components
    return np.stack([np.einsum("xab,ay,bz->xyz", c, J, J) + e * c
                     for e, J in zip(t.eps, t.Js)])


def fit_pi(S: STensor, t: EpsQuatTriple):
    """Least-squares one-forms pi^1, pi^2, pi^3 for the second symmetry.

    Returns (pi, residual) where ``pi[c]`` is the covector pi^{c+1}.
    """
    d = t.dim
    M = _sym2_system(t).reshape(-1, 3)
    lhs = _sym2_lhs(S, t)  # (3, x, y, z)
    rhs = np.moveaxis(lhs, 1, -1).reshape(-1, d)
    pi, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    res = float(np.max(np.abs(M @ pi - rhs))) if rhs.size else 0.0
    return pi, res


def cyclic_sum(S):
    c = np.asarray(S)
    return c + np.transpose(c, (1, 2, 0)) + np.transpose(c, (2, 0, 1))


def _qk_basis(t: EpsQuatTriple):
    """Design tensors of the classes QK1, QK2, QK3 as linear maps of their one-forms."""
    g = t.space.metric
    d = t.dim
    I = np.eye(d)
    gJ = [g @ J for J in t.Js]  # gJ[a][y, z] = g(Y, J_a Z) = -g(J_a Y, Z)
    # QK1: sum_a theta(J_a X) g(J_a Y, Z); theta(J_a e_x) = J_a[w, x] theta_w
    qk1 = -sum(np.einsum("wx,yz->wxyz", J, G) for J, G in zip(t.Js, gJ))
    # QK2: sum_a theta^a(X) g(J_a Y, Z) ; unknown index (a, w)
    qk2 = np.stack([-np.einsum("wx,yz->wxyz", I, G) for G in gJ]).reshape(3 * d, d, d, d)
    # QK3: <X,Y> theta(Z) - <X,Z> theta(Y) - sum_a eps_a(<X,J_aY> theta(J_aZ) - <X,J_aZ> theta(J_aY))
    qk3 = np.einsum("xy,wz->wxyz", g, I) - np.einsum("xz,wy->wxyz", g, I)
    for e, J, G in zip(t.eps, t.Js, gJ):
        qk3 -= e * (np.einsum("xy,wz->wxyz", G, J) - np.einsum("xz,wy->wxyz", G, J))
    return {"QK1": qk1, "QK2": qk2, "QK3": qk3}


def synthesize_qk(cls: str, forms, t: EpsQuatTriple) -> STensor:
    """Tensor of class QK1/QK2/QK3 from its one-form(s) (components w.r.t. the coordinate dual basis)."""
    B = _qk_basis(t)[cls]
    return STensor(np.tensordot(np.ravel(forms), B, axes=1), t.space)


def _fit(B, target):
    A = B.reshape(B.shape[0], -1).T
    coef, *_ = np.linalg.lstsq(A, target.ravel(), rcond=None)
    scale = max(1.0, float(np.max(np.abs(target))))
    return coef, float(np.max(np.abs(A @ coef - target.ravel()))) / scale


def qk4_residual(S: STensor, t: EpsQuatTriple) -> float:
    c = S.components
    rhs = cyclic_sum(c)
    for e, J in zip(t.eps, t.Js):
        rhs = rhs - e * cyclic_sum(np.einsum("xab,ay,bz->xyz", c, J, J))
    return float(np.max(np.abs(6 * c - rhs)))


def qk_class_membership(S: STensor, t: EpsQuatTriple, frame: Frame, tol: float = 1e-8) -> dict:
    r1 = metric_compat_residual(S)
    if r1 > tol:
        raise PreconditionError(f"S violates S_XYZ = -S_XZY (residual {r1:.3g})")
    _, r2 = fit_pi(S, t)
    if r2 > tol:
        raise PreconditionError(f"S violates the sp(n)+sp(1) symmetry (residual {r2:.3g})")
    out = {}
    bases = _qk_basis(t)
    for name, B in bases.items():
        coef, res = _fit(B, S.components)
        forms = coef.reshape(3, -1) if name == "QK2" else coef
        out[name] = {"forms": forms, "residual": res, "member": res < tol}
    # a-posteriori check of sum_a theta^a o J_a = 0 for the QK2 fit
    th = out["QK2"]["forms"]
    out["QK2"]["constraint_residual"] = float(np.max(np.abs(
        sum(th[a] @ t.Js[a] for a in range(3)))))
    out["QK2"]["member"] = out["QK2"]["member"] and out["QK2"]["constraint_residual"] < tol
    lin = np.concatenate([bases["QK1"], bases["QK2"], bases["QK3"]])
    _, res = _fit(lin, S.components)
    out["QK1+QK2+QK3"] = {"residual": res, "member": res < tol}
    c12 = contract12(S.components, frame, t.space)
    r4 = qk4_residual(S, t)
    out["QK4"] = {"residual": r4, "c12_norm": float(np.max(np.abs(c12))),
                  "member": r4 < tol and float(np.max(np.abs(c12))) < tol}
    r5 = float(np.max(np.abs(cyclic_sum(S.components))))
    out["QK5"] = {"residual": r5, "member": r5 < tol}
    return out
