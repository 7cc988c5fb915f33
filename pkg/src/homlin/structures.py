"""eps-Hermitian structures and eps-quaternion Hermitian triples at a point.

Frozen standard models (all metrics diagonal with +-1 entries):

* eps = -1, (n, s): n planes; the last s planes are negative definite;
  J acts as [[0, -1], [1, 0]] on every plane.
* eps = +1, n: n planes with metric diag(1, -1) and J = [[0, 1], [1, 0]],
  whose +-1 eigenlines are null.
* quaternionic, (n, s): V = H^n with J_a left multiplication by i, j, k;
  the last s quaternionic lines are negative definite.
* para-quaternionic, n: V = H~^n with J_a left multiplication by i, j, k
  and the norm form w^2 + x^2 - y^2 - z^2 on every line.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .hypercomplex import PARA, PSEUDO, left_matrix, unit
from .pseudolinear import MetricSpace, signature_of


class SignatureError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EpsHermitian:
    J: np.ndarray
    eps: int
    space: MetricSpace

    @property
    def dim(self):
        return self.space.dim

    def kahler_form(self):
        """F(X, Y) = g(X, JY)."""
        return self.space.metric @ self.J


@dataclass(frozen=True, eq=False)
class EpsQuatTriple:
    Js: tuple
    eps: tuple
    space: MetricSpace

    @property
    def dim(self):
        return self.space.dim

    @property
    def n(self):
        return self.space.dim // 4

    def forms(self):
        """omega_a(X, Y) = g(X, J_a Y), one matrix per a."""
        return [self.space.metric @ J for J in self.Js]


def make_standard_eps_complex(n: int, s: int = 0, eps: int = -1):
    if n < 1:
        raise SignatureError("need at least one eps-complex dimension")
    if eps == -1:
        if not 0 <= s <= n:
            raise SignatureError(f"split s={s} outside 0..{n}")
        signs = [1.0] * (n - s) + [-1.0] * s
        block_J = np.array([[0.0, -1.0], [1.0, 0.0]])
        g = np.diag(np.repeat(signs, 2))
        sig = (2 * (n - s), 2 * s)
    elif eps == 1:
        block_J = np.array([[0.0, 1.0], [1.0, 0.0]])
        g = np.diag([1.0, -1.0] * n)
        sig = (n, n)
    else:
        raise SignatureError(f"eps must be +-1, got {eps}")
    J = np.kron(np.eye(n), block_J)
    space = MetricSpace(g, sig)
    return space, EpsHermitian(J, eps, space)


def make_standard_eps_quat(n: int, s: int = 0, eps=PSEUDO):
    eps = tuple(int(e) for e in eps)
    if n < 1:
        raise SignatureError("need at least one quaternionic dimension")
    if eps == PSEUDO:
        if not 0 <= s <= n:
            raise SignatureError(f"split s={s} outside 0..{n}")
        diag = np.repeat([1.0] * (n - s) + [-1.0] * s, 4)
        sig = (4 * (n - s), 4 * s)
    elif eps == PARA:
        diag = np.tile([1.0, 1.0, -1.0, -1.0], n)
        sig = (2 * n, 2 * n)
    else:
        raise SignatureError(f"unsupported eps triple {eps}")
    space = MetricSpace(np.diag(diag), sig)
    Js = tuple(np.kron(np.eye(n), left_matrix(unit(u), eps)) for u in "ijk")
    return space, EpsQuatTriple(Js, eps, space)


def skew_residual(J, space: MetricSpace):
    """max |g(JX, Y) + g(X, JY)| over basis vectors."""
    g = space.metric
    return float(np.max(np.abs(J.T @ g + g @ J)))


def verify_structure(x) -> dict:
    """Max-norm residuals of every defining identity; never raises."""
    I = np.eye(x.space.dim)
    if isinstance(x, EpsHermitian):
        rep = {
            "square": float(np.max(np.abs(x.J @ x.J - x.eps * I))),
            "skew": skew_residual(x.J, x.space),
        }
        p, q = signature_of(x.space.metric)
        if x.eps == -1:
            ok_sig = p % 2 == 0 and q % 2 == 0
        else:
            ok_sig = p == q
        rep["signature"] = 0.0 if ok_sig else 1.0
    else:
        J1, J2, J3 = x.Js
        rep = {f"square{a + 1}": float(np.max(np.abs(J @ J - e * I)))
               for a, (J, e) in enumerate(zip(x.Js, x.eps))}
        rep.update({f"skew{a + 1}": skew_residual(J, x.space) for a, J in enumerate(x.Js)})
        rep["J1J2-J3"] = float(np.max(np.abs(J1 @ J2 - J3)))
        rep["dim_mod_4"] = float(x.space.dim % 4)
    rep["pass"] = all(v < 1e-10 for v in rep.values())
    return rep


def wedge2(alpha, beta):
    """(alpha ^ beta) of two 2-forms as a (0,4) array, by antisymmetrization."""
    t = np.einsum("ab,cd->abcd", alpha, beta)
    out = np.zeros_like(t)
    for perm in itertools.permutations(range(4)):
        sign = np.linalg.det(np.eye(4)[list(perm)])
        out += sign * np.transpose(t, perm)
    # alpha, beta skew: each distinct term appears 2! * 2! times
    return out / 4.0


def canonical_four_form(t: EpsQuatTriple):
    return sum(-e * wedge2(w, w) for e, w in zip(t.eps, t.forms()))


def rotate_triple(t: EpsQuatTriple, coeffs) -> EpsQuatTriple:
    """Conjugate the triple by exp(sum_a c_a J_a), an element of Sp^eps(1)."""
    X = sum(c * J for c, J in zip(coeffs, t.Js))
    U = expm(X)
    Ui = expm(-X)
    return EpsQuatTriple(tuple(U @ J @ Ui for J in t.Js), t.eps, t.space)
