"""Pseudo-Euclidean vector spaces and dense index gymnastics.

All tensors are plain numpy arrays in the coordinate basis of a
:class:`MetricSpace`.  A (0,3) homogeneous structure is stored as
``S[x, y, z] = g(S_x y, z)``; its (1,2) form as ``S[x, y, k] = (S_x y)^k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm


class InvalidDimensionError(ValueError):
    pass


class SlotVarianceError(ValueError):
    pass


class FrameError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MetricSpace:
    metric: np.ndarray
    signature: tuple[int, int]
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = np.asarray(self.metric, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InvalidDimensionError("metric must be square")
        if not np.allclose(g, g.T, atol=1e-14):
            raise ValueError("metric is not symmetric")
        ev = np.linalg.eigvalsh(g)
        if np.min(np.abs(ev)) < 1e-12:
            raise ValueError("metric is degenerate")
        p, q = self.signature
        if (int(np.sum(ev > 0)), int(np.sum(ev < 0))) != (p, q):
            raise ValueError(f"eigenvalue signs do not match signature {self.signature}")
        g.setflags(write=False)
        inv = np.linalg.inv(g)
        inv.setflags(write=False)
        object.__setattr__(self, "metric", g)
        object.__setattr__(self, "inverse", inv)

    @property
    def dim(self) -> int:
        return self.metric.shape[0]

    @property
    def is_diagonal(self) -> bool:
        g = self.metric
        return bool(np.all(g == np.diag(np.diag(g))) and np.all(np.abs(np.diag(g)) == 1.0))

    def inner(self, x, y):
        return np.asarray(x) @ self.metric @ np.asarray(y)

    def flat(self, v):
        return self.metric @ np.asarray(v)

    def sharp(self, w):
        return self.inverse @ np.asarray(w)


def make_standard_metric(p: int, q: int) -> MetricSpace:
    if p < 0 or q < 0 or p + q == 0:
        raise InvalidDimensionError(f"signature ({p}, {q}) has no dimension")
    return MetricSpace(np.diag([1.0] * p + [-1.0] * q), (p, q))


def signature_of(g) -> tuple[int, int]:
    ev = np.linalg.eigvalsh(np.asarray(g, dtype=float))
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """Components plus a variance string: ``'u'`` contravariant, ``'d'`` covariant."""

    components: np.ndarray
    variance: str

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if set(self.variance) - {"u", "d"}:
            raise SlotVarianceError(f"bad variance {self.variance!r}")
        if c.ndim != len(self.variance):
            raise SlotVarianceError("rank does not match variance")
        if c.ndim and len(set(c.shape)) != 1:
            raise InvalidDimensionError(f"non-cubic component shape {c.shape}")
        object.__setattr__(self, "components", c)

    @property
    def rank(self) -> int:
        return len(self.variance)


def _contract_slot(matrix, arr, slot):
    out = np.tensordot(matrix, arr, axes=([1], [slot]))
    return np.moveaxis(out, 0, slot)


def lower_raise(t: DenseTensor, slot: int, direction: str, space: MetricSpace) -> DenseTensor:
    if not 0 <= slot < t.rank:
        raise SlotVarianceError(f"slot {slot} out of range for rank {t.rank}")
    if t.components.shape[slot] != space.dim:
        raise InvalidDimensionError("tensor and metric dimensions differ")
    var = list(t.variance)
    if direction == "lower":
        if var[slot] != "u":
            raise SlotVarianceError(f"slot {slot} is already covariant")
        comps = _contract_slot(space.metric, t.components, slot)
        var[slot] = "d"
    elif direction == "raise":
        if var[slot] != "d":
            raise SlotVarianceError(f"slot {slot} is already contravariant")
        comps = _contract_slot(space.inverse, t.components, slot)
        var[slot] = "u"
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return DenseTensor(comps, "".join(var))


def lower_last(arr, space: MetricSpace):
    return np.tensordot(arr, space.metric, axes=([-1], [0]))


def raise_last(arr, space: MetricSpace):
    return np.tensordot(arr, space.inverse, axes=([-1], [0]))


@dataclass(frozen=True, eq=False)
class Frame:
    vectors: np.ndarray  # rows are the frame vectors
    signs: np.ndarray


def check_frame(frame: Frame, space: MetricSpace, tol: float = 1e-10) -> float:
    E = np.asarray(frame.vectors)
    gram = E @ space.metric @ E.T
    res = float(np.max(np.abs(gram - np.diag(frame.signs)))) if len(E) else 0.0
    if E.shape != (space.dim, space.dim) or res > tol:
        raise FrameError(f"frame is not orthonormal (residual {res:.3g})")
    return res


def standard_frame(space: MetricSpace) -> Frame:
    if not space.is_diagonal:
        raise FrameError("orthonormal frames are only built for diagonal +-1 metrics")
    return Frame(np.eye(space.dim), np.diag(space.metric).copy())


def random_frame(space: MetricSpace, seed: int, scale: float = 0.7) -> Frame:
    """Standard frame moved by exp of a random element of so(p, q)."""
    base = standard_frame(space)
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((space.dim, space.dim))
    # A = g^{-1} (B - B^T) is g-skew
    A = space.inverse @ (B - B.T) * scale / np.sqrt(space.dim)
    Q = expm(A)
    return Frame((Q @ base.vectors.T).T, base.signs)


def contract12(S, frame: Frame, space: MetricSpace | None = None):
    """Z -> sum_r eps_r S(e_r, e_r, Z) for a (0,3) array ``S``."""
    if space is not None:
        check_frame(frame, space)
    E = np.asarray(frame.vectors)
    return np.einsum("r,ri,rj,ijk->k", frame.signs, E, E, np.asarray(S))


def random_anisotropic_vector(space: MetricSpace, seed: int, threshold: float = 0.1):
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        v = rng.standard_normal(space.dim)
        v /= np.linalg.norm(v)
        if abs(space.inner(v, v)) >= threshold:
            return v
    # eigenvectors of a nondegenerate metric are never null
    _, vecs = np.linalg.eigh(space.metric)
    return vecs[:, 0].copy()
