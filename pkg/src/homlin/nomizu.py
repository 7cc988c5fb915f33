"""Nomizu construction g = T_pM + hol, matrix models and involution chains.

Brackets of the Nomizu algebra:

* [A, B] = AB - BA on the holonomy part,
* [A, eta] = A eta,
* [eta, zeta] = S_eta zeta - S_zeta eta + R~_{eta zeta}.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curvature import Curvature4, RS_from_S
from .lineartype import STensor

E = np.einsum
RANK_TOL = 1e-9
MAX_CLOSURE_ROUNDS = 10


class ClosureError(RuntimeError):
    pass


class IdentificationError(ValueError):
    pass


class InvariantViolation(ValueError):
    pass


class RangeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EndomorphismSpan:
    basis: tuple  # of (d, d) arrays

    @property
    def dim(self):
        return len(self.basis)

    def coordinates(self, M, tol=1e-8):
        """Coefficients of M in the basis; raises if M lies outside the span."""
        if not self.basis:
            if np.max(np.abs(M)) > tol:
                raise IdentificationError("nonzero element of an empty span")
            return np.zeros(0)
        B = np.array([b.ravel() for b in self.basis]).T
        c, *_ = np.linalg.lstsq(B, np.ravel(M), rcond=None)
        res = float(np.max(np.abs(B @ c - np.ravel(M))))
        if res > tol * max(1.0, float(np.max(np.abs(M)))):
            raise IdentificationError(f"element outside the span (residual {res:.3g})")
        return c


def _independent(mats, tol=RANK_TOL):
    """Orthonormal (Frobenius) basis of span(mats), dropping singular values below tol * max."""
    if not mats:
        return []
    d = mats[0].shape[0]
    A = np.array([m.ravel() for m in mats])
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return []
    keep = s > tol * s[0]
    return [v.reshape(d, d) for v in vt[keep]]


def holonomy_span(Rt: Curvature4, tol: float = RANK_TOL, max_rounds: int = MAX_CLOSURE_ROUNDS) -> EndomorphismSpan:
    """Span of all R~_{XY} closed under commutators."""
    endo = Rt.endo()  # [x, y, z, k]
    d = endo.shape[0]
    mats = [endo[x, y].T for x in range(d) for y in range(x + 1, d)]
    if not mats or np.max(np.abs(endo)) == 0:
        return EndomorphismSpan(())
    basis = _independent(mats, tol)
    for _ in range(max_rounds):
        comms = [a @ b - b @ a for i, a in enumerate(basis) for b in basis[i + 1:]]
        new = _independent(basis + comms, tol)
        if len(new) == len(basis):
            return EndomorphismSpan(tuple(basis))
        basis = new
    raise ClosureError(f"commutator closure did not stabilize in {max_rounds} rounds")


@dataclass(frozen=True, eq=False)
class LieAlgebraSC:
    """Structure constants ``C[i, j, k] = c^k_{ij}`` with [e_i, e_j] = sum_k c^k_{ij} e_k."""

    C: np.ndarray
    labels: tuple
    parts: tuple  # "m" (tangent) or "h" (holonomy) per basis element
    metric: np.ndarray | None = None  # bilinear form on the tangent part
    extras: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.C.shape[0]

    def bracket(self, x, y):
        return E("i,j,ijk->k", x, y, self.C)

    def ad(self, x):
        """Matrix of ad(x), acting on coefficient columns."""
        return E("i,ijk->kj", x, self.C)

    def part_indices(self, tag):
        return [i for i, p in enumerate(self.parts) if p == tag]


def nomizu_build(S: STensor, R: Curvature4, hol: EndomorphismSpan | None = None,
                 tangent_labels=None) -> LieAlgebraSC:
    """Nomizu algebra of (S, R).  ``hol`` fixes the holonomy basis (default: holonomy_span)."""
    space = S.space
    d = space.dim
    Rt = R - RS_from_S(S)
    if hol is None:
        hol = holonomy_span(Rt)
    m = hol.dim
    N = d + m
    C = np.zeros((N, N, N))
    Sv = S.endo  # [x, y, k] = (S_x y)^k
    C[:d, :d, :d] = Sv - Sv.transpose(1, 0, 2)
    endo = Rt.endo()
    for i in range(d):
        for j in range(d):
            C[i, j, d:] = hol.coordinates(endo[i, j].T)
    for a, A in enumerate(hol.basis):
        # [A, e_j] = A e_j
        C[d + a, :d, :d] = A.T
        C[:d, d + a, :d] = -A.T
        for b, B in enumerate(hol.basis):
            C[d + a, d + b, d:] = hol.coordinates(A @ B - B @ A)
    if tangent_labels is None:
        tangent_labels = [f"e{i + 1}" for i in range(d)]
    labels = tuple(tangent_labels) + tuple(f"h{a + 1}" for a in range(m))
    parts = ("m",) * d + ("h",) * m
    return LieAlgebraSC(C, labels, parts, np.array(space.metric), {"hol": hol})


def jacobi_residual(L: LieAlgebraSC) -> float:
    """max |[[x,y],z] + [[y,z],x] + [[z,x],y]| over basis triples, relative to max |c|."""
    C = L.C
    scale = max(1.0, float(np.max(np.abs(C)))) ** 2
    # [[e_i, e_j], e_l] = c^k_ij c^m_kl
    T = E("ijk,klm->ijlm", C, C)
    cyc = T + T.transpose(1, 2, 0, 3) + T.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(cyc))) / scale if C.size else 0.0


def antisymmetry_residual(L: LieAlgebraSC) -> float:
    return float(np.max(np.abs(L.C + L.C.transpose(1, 0, 2)))) if L.C.size else 0.0


def grading_residual(L: LieAlgebraSC) -> float:
    """[h, m] in m and [h, h] in h."""
    h, m = L.part_indices("h"), L.part_indices("m")
    if not h:
        return 0.0
    r1 = np.max(np.abs(L.C[np.ix_(h, m, h)])) if m else 0.0
    r2 = np.max(np.abs(L.C[np.ix_(h, h, m)])) if m else 0.0
    return float(max(r1, r2))


# ---------------------------------------------------------------------------
# Matrix models


CASES = ("para-kahler", "pseudo-kahler", "para-quat", "pseudo-quat")


def _case_algebra(case):
    from .hypercomplex import PARA, PSEUDO
    return {"para-kahler": (2, 1), "pseudo-kahler": (2, -1),
            "para-quat": (4, PARA), "pseudo-quat": (4, PSEUDO)}[case]


def _hmul(a, b, eps):
    """Entrywise product of coefficient arrays (..., m)."""
    from .hypercomplex import quat_product
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    if a.shape[-1] == 2:
        return np.stack([a[..., 0] * b[..., 0] + eps * a[..., 1] * b[..., 1],
                         a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0]], axis=-1)
    return quat_product(a, b, eps)


def _conj(a):
    out = np.array(a, dtype=float)
    out[..., 1:] *= -1
    return out


def _u(m, c):
    v = np.zeros(m)
    v[c] = 1.0
    return v


def _sigma_blocks(k, s, mirrored):
    """diag((+-1)^k, (flip)^s) as a real matrix, flip = [[0, 1], [1, 0]]."""
    size = k + 2 * s
    S = np.zeros((size, size))
    S[:k, :k] = -np.eye(k) if mirrored else np.eye(k)
    for b in range(s):
        i = k + 2 * b
        S[i, i + 1] = S[i + 1, i] = 1.0
    return S


def _split_layout(case, n, s):
    """(k, mirrored) for Sigma = diag((+-1)^k, flip^{s+1}) of size n + 1."""
    if case not in ("pseudo-kahler", "pseudo-quat"):
        return None
    if s < 0 or n < 2:
        raise RangeError(f"split s={s}, n={n} outside the realized range")
    k = n - 2 * s - 1
    if k >= 0:
        return k, False
    if case == "pseudo-kahler" and s <= n:
        # mirrored layout: (-1)^{2s+1-n}, flip^{n-s}
        return 2 * s + 1 - n, True
    raise RangeError(f"split s={s} needs n - 2s - 1 >= 0 (n={n})")


@dataclass(frozen=True, eq=False)
class MatrixModel:
    case: str
    ambient: str
    n: int
    s: int
    xi_norm: float
    eps: object
    hyper: dict  # name -> coefficient matrix (N, N, m)
    real: dict  # name -> real expansion
    n1: tuple  # coefficient matrices of the n1 basis (slot-major, component-minor)
    sigma: np.ndarray | None = None

    def expand(self, M):
        from .hypercomplex import real_matrix_expansion
        return real_matrix_expansion(M, self.eps)


def _hmat(Nn, m):
    return np.zeros((Nn, Nn, m))


def matrix_realization(case: str, n: int, s: int = 0, xi_norm: float = 1.0) -> MatrixModel:
    """Generators of the matrix model of the given case.

    Blocks are (n-1, 1, 1).  Hypercomplex entries are coefficient arrays; the
    real expansions replace every entry by its left-multiplication block.
    """
    from .hypercomplex import real_matrix_expansion
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    if n < 2:
        raise RangeError(f"n={n} < 2")
    if xi_norm == 0:
        raise RangeError("xi_norm must be nonzero")
    m, eps = _case_algebra(case)
    Nn = n + 1
    t, mid, bot = slice(0, n - 1), n - 1, n
    H = {}
    sig = None
    one = _u(m, 0)
    if case == "para-kahler":
        e = _u(2, 1)
        A0 = _hmat(Nn, 2)
        A0[mid, bot] = A0[bot, mid] = e
        X = _hmat(Nn, 2)
        X[mid, mid], X[mid, bot], X[bot, mid], X[bot, bot] = -e, one, -one, e
        JJ = _hmat(Nn, 2)
        for i in range(n - 1):
            JJ[i, i] = -2 * e / (n + 1)
        JJ[mid, mid] = JJ[bot, bot] = (n - 1) * e / (n + 1)
        H.update(A0=A0, L1=X, JJ1=JJ)
        ambient = f"su(n+1, para-complex) = sl({n + 1}, R)"
    elif case == "pseudo-kahler":
        i_ = _u(2, 1)
        k, mir = _split_layout(case, n, s)
        sig = _sigma_blocks(k, (n + 1 - k) // 2, mir)
        A0 = _hmat(Nn, 2)
        A0[mid, mid, 0], A0[bot, bot, 0] = 1.0, -1.0
        L0 = _hmat(Nn, 2)
        L0[mid, bot] = i_
        JJ = _hmat(Nn, 2)
        for a in range(n - 1):
            JJ[a, a] = -2 * i_ / (n + 1)
        JJ[mid, mid] = JJ[bot, bot] = (n - 1) * i_ / (n + 1)
        H.update(A0=A0, L1=L0, JJ1=JJ)
        p = int(np.sum(np.linalg.eigvalsh(sig) > 0))
        ambient = f"su({p}, {Nn - p})"
    elif case == "para-quat":
        i_, j_, k_ = (_u(4, c) for c in (1, 2, 3))
        A0 = _hmat(Nn, 4)
        A0[mid, bot] = A0[bot, mid] = j_
        blocks = {"L1": ((i_, -k_), (-k_, i_)), "L2": ((-j_, one), (-one, j_)), "L3": ((k_, -i_), (-i_, k_))}
        for name, ((a, b), (c, d)) in blocks.items():
            L = _hmat(Nn, 4)
            L[mid, mid], L[mid, bot], L[bot, mid], L[bot, bot] = a, b, c, d
            H[name] = L
        for a, (x, y) in enumerate(((-i_, i_), (j_, j_), (-k_, k_))):
            JJ = _hmat(Nn, 4)
            JJ[mid, mid], JJ[bot, bot] = x, y
            H[f"JJ{a + 1}"] = JJ
        H["A0"] = A0
        ambient = f"sp({Nn}, R)"
    else:
        k, mir = _split_layout(case, n, s)
        sig = _sigma_blocks(k, (n + 1 - k) // 2, mir)
        A0 = _hmat(Nn, 4)
        A0[mid, mid, 0], A0[bot, bot, 0] = 1.0, -1.0
        H["A0"] = A0
        for a in range(3):
            L = _hmat(Nn, 4)
            L[mid, bot] = _u(4, a + 1)
            H[f"L{a + 1}"] = L
            JJ = _hmat(Nn, 4)
            JJ[mid, mid] = JJ[bot, bot] = _u(4, a + 1)
            H[f"JJ{a + 1}"] = JJ
        p = int(np.sum(np.linalg.eigvalsh(sig) > 0))
        ambient = f"sp({p}, {Nn - p})"

    n1 = []
    for slot in range(n - 1):
        for c in range(m):
            v = np.zeros((n - 1, m))
            v[slot, c] = 1.0
            N = _hmat(Nn, m)
            if case == "para-kahler":
                e = _u(2, 1)
                N[t, mid] = -_hmul(e, v, eps)
                N[t, bot] = v
                N[mid, t] = -_hmul(e, _conj(v), eps)
                N[bot, t] = -_conj(v)
            elif case == "para-quat":
                j_ = _u(4, 2)
                N[t, mid] = -_hmul(v, j_, eps)
                N[t, bot] = v
                N[mid, t] = -_hmul(j_, _conj(v), eps)
                N[bot, t] = -_conj(v)
            else:
                Sp = sig[:n - 1, :n - 1]
                N[t, bot] = v
                N[mid, t] = -_conj(np.einsum("kl,lc->kc", Sp, v))
            n1.append(N)
    real = {name: real_matrix_expansion(M, eps) for name, M in H.items()}
    return MatrixModel(case, ambient, n, s, float(xi_norm), eps, H, real, tuple(n1), sig)


def _htrace(M):
    return np.einsum("iic->c", M)


def membership_residual(model: MatrixModel, M) -> float:
    """Defining relations of the ambient algebra for a coefficient matrix."""
    from .hypercomplex import hmatmul, hstar
    eps = model.eps
    if model.case in ("para-kahler", "para-quat"):
        r = np.max(np.abs(M + hstar(M)))
    else:
        Sg = np.zeros_like(M)
        Sg[..., 0] = model.sigma
        r = np.max(np.abs(hmatmul(hstar(M), Sg, eps) + hmatmul(Sg, M, eps)))
    if model.case in ("para-kahler", "pseudo-kahler"):
        r = max(r, np.max(np.abs(_htrace(M))))
    return float(r)


def _lstsq_coords(basis, M):
    B = np.array([b.ravel() for b in basis]).T
    c, *_ = np.linalg.lstsq(B, np.ravel(M), rcond=None)
    return c, float(np.max(np.abs(B @ c - np.ravel(M))))


def _comm(a, b):
    return a @ b - b @ a


@dataclass(frozen=True, eq=False)
class RealizedModel:
    """Matrix model together with the adapted tangent structure and phi."""

    model: MatrixModel
    structure: object  # EpsHermitian or EpsQuatTriple on V = T_pM
    xi: np.ndarray
    algebra: LieAlgebraSC
    phi: np.ndarray  # (dim g, D, D): phi of every basis element
    residuals: dict


def _tangent_labels(case, n):
    m = 2 if "kahler" in case else 4
    line = ["xi", "Jxi"] if m == 2 else ["xi", "J1xi", "J2xi", "J3xi"]
    comp = ["re", "im"] if m == 2 else ["1", "i", "j", "k"]
    return line + [f"v{slot + 1}.{c}" for slot in range(n - 1) for c in comp]


def realize(case: str, n: int, s: int = 0, xi_norm: float = 1.0) -> RealizedModel:
    """Nomizu algebra of the linear-type model and its map into the matrix algebra.

    V = span(xi, J_a xi) + n1.  On the quaternion line J_a is left
    multiplication; on n1 it is ad of the holonomy generators.  The metric on
    n1 is read off [v, w] = 2 sum_a eps_a g(v, J_a w) L_a.
    """
    from .curvature import R0_kahler, R0_quat
    from .hypercomplex import complex_left_matrix, left_matrix, unit
    from .lineartype import KahlerLinearData, QuatLinearData, build_S_kahler, build_S_quat
    from .pseudolinear import MetricSpace, signature_of
    from .structures import EpsHermitian, EpsQuatTriple, verify_structure

    mm = matrix_realization(case, n, s, xi_norm)
    nx = mm.xi_norm
    kahler = "kahler" in case
    na = 1 if kahler else 3
    m = na + 1
    epsa = (mm.eps,) if kahler else tuple(mm.eps)
    R = mm.real
    A0 = R["A0"]
    Ls = [R[f"L{a + 1}"] for a in range(na)]
    JJs = [R[f"JJ{a + 1}"] for a in range(na)]
    N1 = [mm.expand(N) for N in mm.n1]
    k1 = len(N1)
    d = m + k1
    res = {}
    res["membership"] = max(membership_residual(mm, M) for M in list(mm.hyper.values()) + list(mm.n1))
    res["trace-JJ"] = max(abs(float(np.trace(J))) for J in JJs)
    res["root-n1"] = max(float(np.max(np.abs(_comm(A0, N) - N))) for N in N1)
    res["root-n2"] = max(float(np.max(np.abs(_comm(A0, L) - 2 * L))) for L in Ls)

    # J_a on n1 = ad(JJ_a)
    Js = []
    r = 0.0
    for a in range(na):
        Ja = np.zeros((d, d))
        if kahler:
            Ja[:m, :m] = complex_left_matrix((0.0, 1.0), mm.eps)
        else:
            Ja[:m, :m] = left_matrix(unit("ijk"[a]), mm.eps)
        for c, N in enumerate(N1):
            col, rr = _lstsq_coords(N1, _comm(JJs[a], N))
            Ja[m:, m + c] = col
            r = max(r, rr)
        Js.append(Ja)
    res["ad-JJ-n1"] = r

    # metric: line part diag(nx, -eps_a nx), n1 part from the L_1 coefficient
    g = np.zeros((d, d))
    g[0, 0] = nx
    for a in range(na):
        g[a + 1, a + 1] = -epsa[a] * nx
    J1n = Js[0][m:, m:]
    r = 0.0
    coeff = np.zeros((na, k1, k1))
    for p in range(k1):
        for q in range(k1):
            c, rr = _lstsq_coords(Ls, _comm(N1[p], N1[q]))
            coeff[:, p, q] = c
            r = max(r, rr)
    res["n1-bracket"] = r
    # c_1(v, w) = 2 eps_1 g(v, J_1 w) and J_1^2 = eps_1
    g[m:, m:] = epsa[0] * 0.5 * coeff[0] @ np.linalg.inv(J1n)
    res["n1-metric-symmetric"] = float(np.max(np.abs(g - g.T)))
    g = 0.5 * (g + g.T)
    space = MetricSpace(g, signature_of(g))
    xi = np.zeros(d)
    xi[0] = 1.0
    if kahler:
        st = EpsHermitian(Js[0], mm.eps, space)
        S = build_S_kahler(KahlerLinearData(xi, np.zeros(d), st))
        Rc = -nx * R0_kahler(st)
    else:
        st = EpsQuatTriple(tuple(Js), tuple(mm.eps), space)
        S = build_S_quat(QuatLinearData(xi, (np.zeros(d),) * 3, st))
        Rc = -nx * R0_quat(st)
    vs = verify_structure(st)
    res["structure"] = max(v for k, v in vs.items() if k != "pass" and k != "signature")
    # the remaining brackets [v, w] = 2 sum_a eps_a g(v, J_a w) L_a
    r = 0.0
    for a in range(na):
        pred = 2 * epsa[a] * (g @ Js[a])[m:, m:]
        r = max(r, float(np.max(np.abs(coeff[a] - pred))))
    res["n1-bracket-form"] = r

    # holonomy generators: act as J_a on n1
    from .curvature import RS_from_S
    Rt = (Rc - RS_from_S(S)).endo()
    gd = np.diag(g)[m:]
    X = np.zeros(d)
    p = m + int(np.argmax(np.abs(np.diag(g)[m:]))) if np.max(np.abs(gd)) > 1e-9 else None
    if p is None:
        # null coordinate vectors: use the sum of a hyperbolic pair
        p1, p2 = np.unravel_index(np.argmax(np.abs(g[m:, m:])), (k1, k1))
        X[m + p1] = X[m + p2] = 1.0
    else:
        X[p] = 1.0
    gxx = X @ g @ X
    hol = []
    for Ja in Js:
        Y = Ja @ X
        hol.append(-E("xyzk,x,y->kz", Rt, X, Y) / (2 * nx * gxx))
    hol_span = EndomorphismSpan(tuple(hol))
    labels = _tangent_labels(case, n)
    L = nomizu_build(S, Rc, hol_span, labels)
    L = LieAlgebraSC(L.C, tuple(labels) + tuple(f"JJ{a + 1}" for a in range(na)), L.parts,
                     L.metric, {"hol": hol_span})
    res["hol-on-n1"] = max(float(np.max(np.abs(h[m:, m:] - Ja[m:, m:]))) for h, Ja in zip(hol, Js))

    phi = [nx * A0] + [Ls[a] + nx * JJs[a] for a in range(na)] + N1 + JJs
    phi = np.array(phi)
    out = RealizedModel(mm, st, xi, L, phi, res)
    res["homomorphism"] = homomorphism_residual(L, phi)
    return out


def homomorphism_residual(L: LieAlgebraSC, phi) -> float:
    """max |phi([x, y]) - [phi x, phi y]| over basis pairs, relative to max |phi|."""
    phi = np.asarray(phi)
    lhs = E("ijk,kab->ijab", L.C, phi)
    rhs = E("iab,jbc->ijac", phi, phi) - E("jab,ibc->ijac", phi, phi)
    scale = max(1.0, float(np.max(np.abs(phi)))) ** 2
    return float(np.max(np.abs(lhs - rhs))) / scale


def wrong_scale_residual(r: RealizedModel, factor: float = 2.0) -> float:
    """Negative control: phi with xi -> factor * xi_norm * A0 must fail."""
    phi = np.array(r.phi)
    phi[0] = phi[0] * factor
    return homomorphism_residual(r.algebra, phi)


# ---------------------------------------------------------------------------
# Involutions and fixed subalgebras

INV_TOL = 1e-10


def _rref_rows(Q, tol=1e-9):
    """Reduced row echelon form of the row space of Q (rows), zero rows dropped."""
    A = np.array(Q, dtype=float)
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(A[r:, c])))
        if abs(A[p, c]) < tol:
            continue
        A[[r, p]] = A[[p, r]]
        A[r] /= A[r, c]
        for i in range(rows):
            if i != r:
                A[i] -= A[i, c] * A[r]
        r += 1
    A[np.abs(A) < tol] = 0.0
    return A[:r]


@dataclass(frozen=True, eq=False)
class InvolutionSpec:
    """A linear map on the full Nomizu algebra, given on its adapted basis."""

    name: str
    matrix: np.ndarray  # acts on coefficient columns of the full algebra

    @classmethod
    def from_rules(cls, name, labels, signs=None, swaps=()):
        """Signed permutation: ``signs[label] = +-1``; ``swaps`` = (a, b, sign) with a <-> sign * b."""
        N = len(labels)
        idx = {l: i for i, l in enumerate(labels)}
        M = np.eye(N)
        for l, sgn in (signs or {}).items():
            M[idx[l], idx[l]] = sgn
        for a, b, sgn in swaps:
            i, j = idx[a], idx[b]
            M[:, i] = 0.0
            M[:, j] = 0.0
            M[j, i] = sgn
            M[i, j] = sgn
        return cls(name, M)


@dataclass(frozen=True, eq=False)
class Subalgebra:
    """Subalgebra of a Nomizu algebra: basis columns in the full coordinates."""

    full: LieAlgebraSC
    basis: np.ndarray  # (N, k)
    algebra: LieAlgebraSC


def _span_labels(full, v):
    terms = []
    for c, l in zip(v, full.labels):
        if abs(c) < 1e-12:
            continue
        if abs(c - 1) < 1e-12:
            terms.append(f"+{l}")
        elif abs(c + 1) < 1e-12:
            terms.append(f"-{l}")
        else:
            terms.append(f"{c:+.6g}*{l}")
    s = "".join(terms)
    return s[1:] if s.startswith("+") else s


def subalgebra(full: LieAlgebraSC, basis, tol: float = INV_TOL) -> Subalgebra:
    B = np.asarray(basis, dtype=float)
    N, k = B.shape
    nm = full.part_indices("m")
    nh = full.part_indices("h")
    parts = []
    for c in range(k):
        in_m = np.max(np.abs(B[nm, c])) > tol if nm else False
        in_h = np.max(np.abs(B[nh, c])) > tol if nh else False
        if in_m and in_h:
            raise InvariantViolation("basis vector mixes tangent and holonomy parts")
        parts.append("h" if in_h else "m")
    C = np.zeros((k, k, k))
    P = np.linalg.pinv(B)
    for i in range(k):
        for j in range(k):
            br = full.bracket(B[:, i], B[:, j])
            c = P @ br
            if np.max(np.abs(B @ c - br)) > tol * max(1.0, float(np.max(np.abs(br)))):
                raise InvariantViolation("span is not closed under the bracket")
            C[i, j] = c
    mi = [c for c in range(k) if parts[c] == "m"]
    G = full.metric
    Bm = B[nm][:, mi]
    metric = Bm.T @ G @ Bm if mi else None
    labels = tuple(_span_labels(full, B[:, c]) for c in range(k))
    return Subalgebra(full, B, LieAlgebraSC(C, labels, tuple(parts), metric))


def whole(full: LieAlgebraSC) -> Subalgebra:
    return subalgebra(full, np.eye(full.dim))


def fixed_subalgebra(sub: Subalgebra, inv: InvolutionSpec, tol: float = INV_TOL):
    """Fixed points of ``inv`` restricted to ``sub``, after checking it is an
    involutive automorphism preserving the holonomy part and the metric.

    Returns (Subalgebra, residuals).
    """
    full, B = sub.full, sub.basis
    M = inv.matrix
    MB = M @ B
    P = np.linalg.pinv(B)
    Ms = P @ MB
    res = {}
    res["preserves-subalgebra"] = float(np.max(np.abs(B @ Ms - MB)))
    res["involutive"] = float(np.max(np.abs(Ms @ Ms - np.eye(B.shape[1]))))
    L = sub.algebra
    # M [x, y] = [M x, M y]
    lhs = E("ka,ija->ijk", Ms, L.C)
    rhs = E("ai,bj,abk->ijk", Ms, Ms, L.C)
    res["automorphism"] = float(np.max(np.abs(lhs - rhs)))
    h = L.part_indices("h")
    mi = L.part_indices("m")
    res["preserves-holonomy"] = float(np.max(np.abs(Ms[np.ix_(mi, h)]))) if h and mi else 0.0
    if mi and L.metric is not None:
        Mm = Ms[np.ix_(mi, mi)]
        res["isometry"] = float(np.max(np.abs(Mm.T @ L.metric @ Mm - L.metric)))
    else:
        res["isometry"] = 0.0
    bad = {k: v for k, v in res.items() if v > tol}
    if bad:
        raise InvariantViolation(f"{inv.name} is not an admissible involution: {bad}")
    from scipy.linalg import null_space
    Fs = null_space(Ms - np.eye(Ms.shape[0]))
    F = _rref_rows((B @ Fs).T).T if Fs.size else np.zeros((B.shape[0], 0))
    return subalgebra(full, F, tol), res


def _slot_labels(n, comps, slots=None):
    slots = range(n - 1) if slots is None else slots
    return [f"v{s + 1}.{c}" for s in slots for c in comps]


def involution_specs(case: str, n: int, labels, s: int = 1) -> list:
    """The involutions of the reduction chain, in application order."""
    if case.startswith("pseudo") and s < 1:
        raise RangeError("the chain needs s >= 1 (for s = 0 the terminal metric is definite)")
    K = ("re", "im")
    Q = ("1", "i", "j", "k")
    F = InvolutionSpec.from_rules
    if case == "para-kahler":
        sig = {"Jxi": -1, "JJ1": -1}
        sig.update({l: -1 for l in _slot_labels(n, ("re",))})
        tau = {l: -1 for l in _slot_labels(n, K, range(n - 2))}
        return [F("sigma", labels, sig), F("tau", labels, tau)]
    if case == "pseudo-kahler":
        if n < 3:
            raise RangeError("the chain needs n >= 3")
        sig = {"Jxi": -1, "JJ1": -1}
        sig.update({l: -1 for l in _slot_labels(n, ("im",))})
        tau = {l: -1 for l in _slot_labels(n, K, range(n - 3))}
        swaps = [(f"v{n - 2}.{c}", f"v{n - 1}.{c}", -1) for c in K]
        return [F("sigma", labels, sig), F("tau", labels, tau, swaps)]
    if case == "para-quat":
        sig = {"J1xi": -1, "J3xi": -1, "JJ1": -1, "JJ3": -1}
        sig.update({l: -1 for l in _slot_labels(n, ("i", "k"))})
        tau = {"J2xi": -1, "JJ2": -1}
        tau.update({l: -1 for l in _slot_labels(n, ("1",))})
        lam = {l: -1 for l in _slot_labels(n, Q, range(n - 2))}
        return [F("sigma", labels, sig), F("tau", labels, tau), F("lambda", labels, lam)]
    if case == "pseudo-quat":
        if n < 3:
            raise RangeError("the chain needs n >= 3")
        sig = {"J2xi": -1, "J3xi": -1, "JJ2": -1, "JJ3": -1}
        sig.update({l: -1 for l in _slot_labels(n, ("j", "k"))})
        tau = {"J1xi": -1, "JJ1": -1}
        tau.update({l: -1 for l in _slot_labels(n, ("i",))})
        lam = {l: -1 for l in _slot_labels(n, Q, range(n - 3))}
        swaps = [(f"v{n - 2}.{c}", f"v{n - 1}.{c}", -1) for c in Q]
        return [F("sigma", labels, sig), F("tau", labels, tau), F("lambda", labels, lam, swaps)]
    raise ValueError(f"unknown case {case!r}")


@dataclass
class ChainStep:
    name: str
    dim: int
    labels: tuple
    residuals: dict


@dataclass
class TerminalAlgebra:
    """k = span(A, V) with [A, V] = V, g(A, V) = 0 and V scaled to g(V, V) = -g(A, A)."""

    A: np.ndarray  # full coordinates
    V: np.ndarray
    gAA: float
    gVV: float
    gAV: float
    bracket_residual: float

    @property
    def lorentzian(self) -> bool:
        return self.gAA * self.gVV < 0

    @property
    def normalized_signs(self):
        """Signs of (g(A, A), g(V, V)) after dividing the metric by |g(A, A)|."""
        return (float(np.sign(self.gAA)), float(np.sign(self.gVV)))


def terminal_algebra(sub: Subalgebra, tol: float = INV_TOL) -> TerminalAlgebra:
    L = sub.algebra
    if L.dim != 2 or L.part_indices("h"):
        raise InvariantViolation(f"terminal algebra has dim {L.dim} and parts {L.parts}")
    x, y = np.eye(2)
    br = L.bracket(x, y)
    if np.max(np.abs(br)) < tol:
        raise InvariantViolation("terminal algebra is abelian")
    v = br / np.linalg.norm(br)
    # pick a complement element a with [a, v] = v
    a = x if abs(v[1]) > abs(v[0]) else y
    c = L.bracket(a, v)
    lam = float(c @ v)
    a = a / lam
    G = L.metric
    gvv = float(v @ G @ v)
    if abs(gvv) < tol:
        raise InvariantViolation("derived line is null")
    a = a - (a @ G @ v) / gvv * v
    gaa = float(a @ G @ a)
    v = v * np.sqrt(abs(gaa / gvv))
    gvv = float(v @ G @ v)
    res = float(np.max(np.abs(L.bracket(a, v) - v)))
    B = sub.basis
    return TerminalAlgebra(B @ a, B @ v, gaa, gvv, float(a @ G @ v), res)


@dataclass
class ChainResult:
    realized: RealizedModel
    steps: list
    final: Subalgebra
    terminal: TerminalAlgebra | None


def involution_chain(case: str, n: int, s: int = 0, xi_norm: float = 1.0) -> ChainResult:
    r = realize(case, n, s, xi_norm)
    L = r.algebra
    sub = whole(L)
    steps = [ChainStep("g", L.dim, L.labels, {})]
    for inv in involution_specs(case, n, L.labels, s):
        sub, res = fixed_subalgebra(sub, inv)
        steps.append(ChainStep(inv.name, sub.algebra.dim, sub.algebra.labels, res))
    term = terminal_algebra(sub)
    return ChainResult(r, steps, sub, term)


def verify_reference_brackets(r: RealizedModel) -> dict:
    """Residuals of the closed bracket table in the adapted basis.

    With nx = g(xi, xi), L_a = J_a xi - nx JJ_a and Z, Z' in (H xi)^perp:
    [Z, Z'] = 2 sum_a eps_a g(Z, J_a Z') L_a, [xi, Z] = nx Z,
    [J_a xi, Z] = nx J_a Z, [JJ_a, Z] = J_a Z, [JJ_a, xi] = 0,
    [xi, J_a xi] = 2 nx L_a, [J_a xi, J_b xi] = mu_c (4 nx J_c xi - 2 nx^2 JJ_c),
    [JJ_a, JJ_b] = 2 mu_c JJ_c, where J_a J_b = mu_c J_c.
    """
    L = r.algebra
    st = r.structure
    kahler = hasattr(st, "J")
    Js = (st.J,) if kahler else st.Js
    eps = (st.eps,) if kahler else st.eps
    na = len(Js)
    m = na + 1
    d = st.dim
    nx = float(r.xi @ st.space.metric @ r.xi)
    g = st.space.metric
    N = L.dim
    I = np.eye(N)
    xi = I[0]
    Jxi = [I[1 + a] for a in range(na)]
    JJ = [I[d + a] for a in range(na)]
    La = [Jxi[a] - nx * JJ[a] for a in range(na)]
    Zs = [I[m + p] for p in range(d - m)]

    def emb(v):  # tangent vector -> full coordinates
        out = np.zeros(N)
        out[:d] = v
        return out

    out = {k: 0.0 for k in ("Z-Z", "xi-Z", "Jxi-Z", "JJ-Z", "JJ-xi", "xi-Jxi", "Jxi-Jxi", "JJ-JJ")}

    def upd(key, lhs, rhs):
        out[key] = max(out[key], float(np.max(np.abs(lhs - rhs))))

    for p, Z in enumerate(Zs):
        for Z2 in Zs:
            rhs = sum(2 * eps[a] * (Z[:d] @ g @ Js[a] @ Z2[:d]) * La[a] for a in range(na))
            upd("Z-Z", L.bracket(Z, Z2), rhs)
        upd("xi-Z", L.bracket(xi, Z), nx * Z)
        for a in range(na):
            upd("Jxi-Z", L.bracket(Jxi[a], Z), nx * emb(Js[a] @ Z[:d]))
            upd("JJ-Z", L.bracket(JJ[a], Z), emb(Js[a] @ Z[:d]))
    for a in range(na):
        upd("JJ-xi", L.bracket(JJ[a], xi), 0 * xi)
        upd("xi-Jxi", L.bracket(xi, Jxi[a]), 2 * nx * La[a])
    if na == 3:
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            mu = float(np.sum(Js[a] @ Js[b] * Js[c]) / np.sum(Js[c] * Js[c]))
            upd("Jxi-Jxi", L.bracket(Jxi[a], Jxi[b]), mu * (4 * nx * Jxi[c] - 2 * nx ** 2 * JJ[c]))
            upd("JJ-JJ", L.bracket(JJ[a], JJ[b]), 2 * mu * JJ[c])
    scale = max(1.0, abs(nx)) ** 2
    return {k: v / scale for k, v in out.items()}
