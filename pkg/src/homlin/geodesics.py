"""Geodesics of the 2-dimensional group K with [A, V] = V, g(A, A) = 1, g(V, V) = -1.

A geodesic has velocity gamma1 A + gamma2 V in the left-invariant frame and
satisfies gamma1' = gamma2^2, gamma2' = gamma1 gamma2.

Causal labels follow the convention of the incompleteness argument: the
family through (0, 1) is called space-like and the one through (1, r),
0 < r < 1, time-like, although g(v, v) = gamma1^2 - gamma2^2 has the
opposite sign.  ``metric_character`` gives the sign-based label.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

BLOWUP_NORM = 1e8
CONFIRM_NORM = 1e16
BRACKET_WIDTH = 1e-4
NULL_BAND = 1e-10


class DomainError(ValueError):
    def __init__(self, msg, singular_time):
        super().__init__(msg)
        self.singular_time = singular_time


@dataclass(frozen=True)
class KGroupMetric:
    bracket: float = 1.0  # [A, V] = bracket * V
    gAA: float = 1.0
    gVV: float = -1.0
    gAV: float = 0.0

    def structure(self):
        """C[i, j, k] with [e_i, e_j] = C[i, j, k] e_k, e_0 = A, e_1 = V."""
        C = np.zeros((2, 2, 2))
        C[0, 1, 1] = self.bracket
        C[1, 0, 1] = -self.bracket
        return C

    def metric(self):
        return np.array([[self.gAA, self.gAV], [self.gAV, self.gVV]])


@dataclass
class GeodesicState:
    gamma1: float
    gamma2: float
    t: float = 0.0

    def vector(self):
        return np.array([self.gamma1, self.gamma2])


@dataclass
class BlowupReport:
    detected: bool
    direction: str
    max_norm_reached: float
    t_low: float | None = None
    t_high: float | None = None

    @property
    def escape_time_estimate(self):
        if not self.detected:
            return None
        return 0.5 * (self.t_low + self.t_high)

    @property
    def bracket_width(self):
        if not self.detected:
            return None
        return abs(self.t_high - self.t_low)


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray  # (2, len(t))
    direction: str
    drift: float  # max |q(t) - q(0)| over the whole trajectory
    drift_regular: float  # same, excluding the last 1e-2 before an escape
    extras: dict = field(default_factory=dict)


def derive_connection(k: KGroupMetric = KGroupMetric()):
    """Left-invariant Levi-Civita connection: ``nabla[i, j] = components of nabla_{e_i} e_j``.

    Koszul: 2 g(nabla_X Y, Z) = g([X, Y], Z) - g([Y, Z], X) + g([Z, X], Y).
    """
    C = k.structure()
    g = k.metric()
    br = np.einsum("ijk,kl->ijl", C, g)  # br[i, j, l] = g([e_i, e_j], e_l)
    low = 0.5 * (br - np.einsum("jli->ijl", br) + np.einsum("lij->ijl", br))
    return np.einsum("ijl,lk->ijk", low, np.linalg.inv(g))


def torsion_residual(k: KGroupMetric = KGroupMetric()) -> float:
    nab = derive_connection(k)
    T = nab - np.transpose(nab, (1, 0, 2)) - k.structure()
    return float(np.max(np.abs(T)))


def geodesic_rhs(s, conn=None):
    """Velocity derivative (gamma1', gamma2'); the default is the closed system."""
    g1, g2 = (s.gamma1, s.gamma2) if isinstance(s, GeodesicState) else s
    if conn is None:
        return g2 * g2, g1 * g2
    v = np.array([g1, g2])
    out = -np.einsum("ijk,i,j->k", conn, v, v)
    return float(out[0]), float(out[1])


def causal_character(s) -> str:
    """Label of the incompleteness argument: sign of gamma1^2 - gamma2^2, with (0, 1) space-like."""
    g1, g2 = (s.gamma1, s.gamma2) if isinstance(s, GeodesicState) else s
    q = g1 * g1 - g2 * g2
    if abs(q) <= NULL_BAND:
        return "null"
    return "timelike" if q > 0 else "spacelike"


def metric_character(s, k: KGroupMetric = KGroupMetric()) -> str:
    """Label from the sign of g(v, v), spacelike when positive."""
    v = s.vector() if isinstance(s, GeodesicState) else np.asarray(s, float)
    q = float(v @ k.metric() @ v)
    if abs(q) <= NULL_BAND:
        return "null"
    return "spacelike" if q > 0 else "timelike"


def timelike_constants(r: float):
    """(s, k) with s = sqrt(1 - r^2), tanh k = s."""
    if not 0 < r < 1:
        raise DomainError(f"timelike family needs 0 < r < 1, got {r}", None)
    s = np.sqrt(1 - r * r)
    return float(s), float(np.arctanh(s))


def initial_value(kind: str, r: float = 0.0, sign: float = 1.0) -> GeodesicState:
    base = {"spacelike": (0.0, 1.0), "null": (1.0, 1.0), "timelike": (1.0, r)}[kind]
    if kind == "timelike":
        timelike_constants(r)
    return GeodesicState(sign * base[0], sign * base[1], 0.0)


def _pole(kind, r):
    """Forward escape time of the family through the base initial value."""
    if kind == "spacelike":
        return np.pi / 2
    if kind == "null":
        return 1.0
    if kind == "timelike":
        s, k = timelike_constants(r)
        return k / s
    raise ValueError(f"unknown kind {kind!r}")


def singular_time(kind: str, r: float = 0.0, direction: str = "forward", sign: float = 1.0):
    """Escape time in the given direction of the solution through sign * (base value), or None.

    Reversing the initial velocity reflects the solution: gamma(t) -> -gamma(-t).
    """
    t0 = _pole(kind, r)
    fwd = {"spacelike": (t0, -t0), "null": (t0, None), "timelike": (t0, None)}[kind]
    if sign < 0:
        fwd = (None if fwd[1] is None else -fwd[1], -fwd[0])
    return fwd[0] if direction == "forward" else fwd[1]


def _base_solution(kind, r, t):
    if kind == "spacelike":
        if not -np.pi / 2 < t < np.pi / 2:
            raise DomainError(f"t={t} outside (-pi/2, pi/2)", np.pi / 2 if t > 0 else -np.pi / 2)
        return np.tan(t), 1 / np.cos(t)
    if kind == "null":
        if not t < 1:
            raise DomainError(f"t={t} outside t < 1", 1.0)
        return 1.0 / (1.0 - t), 1.0 / (1.0 - t)
    s, k = timelike_constants(r)
    if not t < k / s:
        raise DomainError(f"t={t} outside t < {k / s}", k / s)
    u = k - s * t
    return s / np.tanh(u), s / np.sinh(u)


def closed_form(kind: str, r: float, t: float, sign: float = 1.0) -> GeodesicState:
    """Explicit solution through sign * (0, 1), sign * (1, 1) or sign * (1, r).

    Base solutions: (tan t, sec t), 1/(1 - t) in both components, and
    (s coth(k - s t), s / sinh(k - s t)) with s = sqrt(1 - r^2), tanh k = s.
    For sign = -1 the last one is (-s coth(s t + k), -s / sinh(s t + k)),
    singular at t = -k/s.
    """
    if kind not in ("spacelike", "null", "timelike"):
        raise ValueError(f"unknown kind {kind!r}")
    if sign < 0:
        try:
            g1, g2 = _base_solution(kind, r, -t)
        except DomainError as e:
            raise DomainError(str(e).replace("t=", "-t="), None if e.singular_time is None else -e.singular_time)
        return GeodesicState(float(-g1), float(-g2), t)
    g1, g2 = _base_solution(kind, r, t)
    return GeodesicState(float(g1), float(g2), t)


def _charge(y):
    return y[0] ** 2 - y[1] ** 2


def _solve(y0, t0, t1, rtol, atol, threshold):
    def rhs(t, y):
        return [y[1] * y[1], y[0] * y[1]]

    def big(t, y):
        return np.hypot(y[0], y[1]) - threshold

    big.terminal = True
    return solve_ivp(rhs, (t0, t1), y0, method="DOP853", rtol=rtol, atol=atol, events=big)


def integrate(init: GeodesicState, direction: str = "forward", t_max: float = 10.0,
              tol: float = 1e-12):
    """Adaptive Dormand-Prince integration with blow-up detection.

    Blow-up is declared when |gamma| exceeds 1e8.  The escape time is then
    bracketed: starting at width 1e-4 past the crossing, the width is halved
    while the continued solution still exceeds 1e16 inside it.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be forward or backward, got {direction!r}")
    sgn = 1.0 if direction == "forward" else -1.0
    y0 = [float(init.gamma1), float(init.gamma2)]
    t0 = float(init.t)
    atol = tol * 1e-2
    sol = _solve(y0, t0, t0 + sgn * t_max, tol, atol, BLOWUP_NORM)
    t, y = sol.t, sol.y
    norms = np.hypot(y[0], y[1])
    q = _charge(y)
    drift = float(np.max(np.abs(q - q[0])))
    detected = bool(sol.status == 1 and sol.t_events[0].size)
    rep = BlowupReport(detected, direction, float(np.max(norms)))
    regular = np.ones_like(t, dtype=bool)
    if detected:
        tc = float(sol.t_events[0][0])
        yc = sol.y_events[0][0]
        w = BRACKET_WIDTH
        last = None
        while w > 1e-14:
            # local time keeps the float spacing far below the remaining distance to the pole
            probe = _solve(yc, 0.0, sgn * w, tol, atol, CONFIRM_NORM)
            if probe.status == 1 and probe.t_events[0].size:
                last = w
                w *= 0.5
            else:
                break
        if last is None:
            # divergence not confirmed inside the first window
            rep.detected = False
        else:
            rep.t_low, rep.t_high = sorted((tc, tc + sgn * last))
            rep.max_norm_reached = max(rep.max_norm_reached, float(np.hypot(*yc)))
            regular = np.abs(t - tc) > 1e-2
    drift_regular = float(np.max(np.abs(q[regular] - q[0]))) if regular.any() else 0.0
    return Trajectory(t, y, direction, drift, drift_regular), rep


def closed_form_deviation(traj: Trajectory, kind: str, r: float = 0.0, sign: float = 1.0,
                          fraction: float = 0.9) -> float:
    """Max deviation from the closed form over the first ``fraction`` of the domain covered."""
    t_end = singular_time(kind, r, traj.direction, sign)
    t0 = traj.t[0]
    if t_end is None:
        limit = traj.t[-1]
    else:
        limit = t0 + fraction * (t_end - t0)
    mask = (traj.t - t0) * (limit - t0) >= 0
    mask &= np.abs(traj.t - t0) <= abs(limit - t0)
    dev = 0.0
    for ti, yi in zip(traj.t[mask], traj.y.T[mask]):
        c = closed_form(kind, r, float(ti), sign)
        dev = max(dev, float(np.max(np.abs(yi - c.vector()))))
    return dev
