"""eps-complex numbers, quaternions and para-quaternions.

Para-quaternions use i^2 = -1, j^2 = k^2 = +1, ij = k, jk = -i, ki = j.
Matrices over these algebras are stored as numpy arrays of shape
``(rows, cols, 2)`` or ``(rows, cols, 4)`` holding real coefficients, and
act on column vectors; scalars expand to their left-multiplication matrices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PSEUDO = (-1, -1, -1)
PARA = (-1, 1, 1)


class AlgebraMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class EpsComplex:
    re: float
    im: float
    eps: int = -1

    def __mul__(self, other):
        if isinstance(other, EpsComplex):
            if other.eps != self.eps:
                raise AlgebraMismatchError("eps-complex numbers from different algebras")
            return EpsComplex(self.re * other.re + self.eps * self.im * other.im,
                              self.re * other.im + self.im * other.re, self.eps)
        return EpsComplex(self.re * other, self.im * other, self.eps)

    __rmul__ = __mul__

    def __add__(self, other):
        if other.eps != self.eps:
            raise AlgebraMismatchError("eps-complex numbers from different algebras")
        return EpsComplex(self.re + other.re, self.im + other.im, self.eps)

    def conj(self):
        return EpsComplex(self.re, -self.im, self.eps)

    def as_array(self):
        return np.array([self.re, self.im])


def _check_eps(eps):
    eps = tuple(int(e) for e in eps)
    if eps not in (PSEUDO, PARA):
        raise AlgebraMismatchError(f"unsupported eps triple {eps}")
    return eps


def quat_product(a, b, eps=PSEUDO):
    """Product of coefficient arrays (..., 4) in the algebra with squares ``eps``."""
    al, be = -1.0, float(_check_eps(eps)[1])
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    # ij = k, jk = -be*i, ki = -al*j, with al = i^2, be = j^2, k^2 = -al*be
    c0 = a0 * b0 + al * a1 * b1 + be * a2 * b2 - al * be * a3 * b3
    c1 = a0 * b1 + a1 * b0 - be * a2 * b3 + be * a3 * b2
    c2 = a0 * b2 + a2 * b0 + al * a1 * b3 - al * a3 * b1
    c3 = a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1
    return np.stack([c0, c1, c2, c3], axis=-1)


@dataclass(frozen=True)
class EpsQuaternion:
    w: float
    x: float
    y: float
    z: float
    eps: tuple = PSEUDO

    @classmethod
    def from_array(cls, arr, eps=PSEUDO):
        return cls(*map(float, arr), eps=tuple(eps))

    def as_array(self):
        return np.array([self.w, self.x, self.y, self.z])

    def __mul__(self, other):
        if isinstance(other, EpsQuaternion):
            if tuple(other.eps) != tuple(self.eps):
                raise AlgebraMismatchError("quaternions from different algebras")
            return EpsQuaternion.from_array(
                quat_product(self.as_array(), other.as_array(), self.eps), self.eps)
        return EpsQuaternion.from_array(self.as_array() * other, self.eps)

    def __rmul__(self, other):
        return EpsQuaternion.from_array(self.as_array() * other, self.eps)

    def __add__(self, other):
        if tuple(other.eps) != tuple(self.eps):
            raise AlgebraMismatchError("quaternions from different algebras")
        return EpsQuaternion.from_array(self.as_array() + other.as_array(), self.eps)

    def __sub__(self, other):
        return self + (-1.0) * other

    def conj(self):
        return EpsQuaternion(self.w, -self.x, -self.y, -self.z, self.eps)

    def norm_form(self):
        """Real part of q * conj(q)."""
        return float(quat_product(self.as_array(), self.conj().as_array(), self.eps)[0])


def quat_mul(a: EpsQuaternion, b: EpsQuaternion) -> EpsQuaternion:
    return a * b


def quat_conj(a: EpsQuaternion) -> EpsQuaternion:
    return a.conj()


def unit(name, eps=PSEUDO):
    arr = np.zeros(4)
    arr["1ijk".index(name)] = 1.0
    return arr


def left_matrix(q, eps=PSEUDO):
    """4x4 real matrix of x -> q x."""
    q = np.asarray(q, dtype=float)
    return np.stack([quat_product(q, e, eps) for e in np.eye(4)], axis=-1)


def right_matrix(q, eps=PSEUDO):
    """4x4 real matrix of x -> x q."""
    q = np.asarray(q, dtype=float)
    return np.stack([quat_product(e, q, eps) for e in np.eye(4)], axis=-1)


def complex_left_matrix(z, eps=-1):
    re, im = z
    return np.array([[re, eps * im], [im, re]], dtype=float)


def real_matrix_expansion(M, eps=PSEUDO):
    """Replace every entry by its left-multiplication block.

    ``M`` has shape (r, c, 2) for eps-complex entries (``eps`` an int) or
    (r, c, 4) for (para-)quaternion entries (``eps`` a triple).
    """
    M = np.asarray(M, dtype=float)
    r, c, m = M.shape
    out = np.zeros((r * m, c * m))
    for i in range(r):
        for j in range(c):
            if m == 2:
                block = complex_left_matrix(M[i, j], int(eps))
            else:
                block = left_matrix(M[i, j], eps)
            out[i * m:(i + 1) * m, j * m:(j + 1) * m] = block
    return out


def hmatmul(A, B, eps=PSEUDO):
    """Product of hypercomplex matrices in coefficient form."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    m = A.shape[-1]
    if m == 2:
        e = float(eps)

        def prod(a, b):
            return np.stack([a[..., 0] * b[..., 0] + e * a[..., 1] * b[..., 1],
                             a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0]], axis=-1)
    else:
        def prod(a, b):
            return quat_product(a, b, eps)
    return prod(A[:, :, None, :], B[None, :, :, :]).sum(axis=1)


def hconj(A):
    out = np.array(A, dtype=float)
    out[..., 1:] *= -1
    return out


def hstar(A):
    """Conjugate transpose."""
    return np.swapaxes(hconj(A), 0, 1)


def signed_hermitian_product(q, qp, r, eps=PSEUDO):
    """<q, q'> = -sum_{i<r} q_i conj(q'_i) + sum_{i>=r} q_i conj(q'_i).

    For the para-quaternion case pass ``r = 0``.
    """
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    signs = np.array([-1.0] * r + [1.0] * (len(q) - r))
    terms = quat_product(q, hconj(qp), eps)
    return (signs[:, None] * terms).sum(axis=0)
