"""Garnier Hamiltonians, the isomonodromy vector fields and their flow.

Two forms of the Hamiltonian are available.

``"isomonodromic"`` (the default) is

    t_i (t_i - 1) prod_{j != i} (t_j - t_i) H_i
        = sum_j w_j(q) [F(q_j) p_j^2 - K(q_j) p_j + F_i(q_j) p_j]

with w_j = prod_{k != j} (q_k - t_i) / prod_{k != j} (q_k - q_j),
F(x) = x (x - 1) (x - t1)(x - t2)(x - t3), F_i = F / (x - t_i) and
K(x) = (x (x - 1) F_t'(x) - (2x - 1) F_t(x)) / 2 with F_t = (x-t1)(x-t2)(x-t3).
This is the form whose flow preserves the monodromy of the system Psi(q, p)
in the normalization of :mod:`garnierlab.fuchsian`.

``"half-derivative"`` uses F'(q_j) / 2 in place of K(q_j). It differs from
the isomonodromic form by the sign of the (2x - 1) F_t(x) / 2 part of
the linear-in-p coefficient, and its flow does *not* preserve monodromy;
it is kept so the discrepancy can be reproduced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .darboux import DarbouxPoint
from .errors import CriticalLocus, DegenerateInput, LeftParameterSpace
from .fuchsian import PoleConfig
from .numkit import OdeStats, dopri5, segment_distance

__all__ = [
    "FORMS",
    "hamiltonian",
    "hamiltonian_gradient",
    "garnier_vector_field",
    "isomonodromic_flow",
    "FlowTrajectory",
    "flow_along",
]

FORMS = ("isomonodromic", "half-derivative")

# abort when two q's come closer than this (relative to the scale)
COLLISION_GUARD = 1e-5
# minimum distance of the t-path from the boundary of T
T_GUARD = 1e-3


class _Polys:
    """Coefficient arrays (low first) of the polynomials entering H_i."""

    __slots__ = ("F", "dF", "K", "dK", "Fi", "dFi", "den")

    def __init__(self, tv: np.ndarray, i: int, form: str):
        if form not in FORMS:
            raise DegenerateInput(f"unknown Hamiltonian form {form!r}")
        Ft = npoly.polyfromroots(tv)
        x2 = np.array([0, -1, 1], dtype=complex)  # x (x - 1)
        self.F = npoly.polymul(x2, Ft)
        if form == "half-derivative":
            self.K = npoly.polyder(self.F) / 2
        else:
            lin = np.array([-1, 2], dtype=complex)  # 2x - 1
            self.K = npoly.polysub(
                npoly.polymul(x2, npoly.polyder(Ft)), npoly.polymul(lin, Ft)
            ) / 2
        others = [tv[m] for m in range(3) if m != i]
        self.Fi = npoly.polymul(x2, npoly.polyfromroots(others))
        self.dF = npoly.polyder(self.F)
        self.dK = npoly.polyder(self.K)
        self.dFi = npoly.polyder(self.Fi)
        tj = [tv[m] - tv[i] for m in range(3) if m != i]
        self.den = tv[i] * (tv[i] - 1) * tj[0] * tj[1]


_CACHE: dict = {}


def _polys(t: PoleConfig, i: int, form: str) -> _Polys:
    key = (t.t1, t.t2, t.t3, i, form)
    got = _CACHE.get(key)
    if got is None:
        if len(_CACHE) > 4096:
            _CACHE.clear()
        got = _CACHE[key] = _Polys(t.t, i, form)
    return got


def _check_i(i: int) -> int:
    if i not in (1, 2, 3):
        raise DegenerateInput("Hamiltonian index must be 1, 2 or 3")
    return i - 1


def _check_q(q: np.ndarray) -> None:
    for a in range(3):
        for b in range(a + 1, 3):
            if q[a] == q[b]:
                raise CriticalLocus(f"q{a + 1} = q{b + 1}")


def _weights(q: np.ndarray, ti: complex) -> np.ndarray:
    w = np.empty(3, dtype=complex)
    for j in range(3):
        k, m = [r for r in range(3) if r != j]
        w[j] = (q[k] - ti) * (q[m] - ti) / ((q[k] - q[j]) * (q[m] - q[j]))
    return w


def hamiltonian(t, d: DarbouxPoint, i: int, form: str = "isomonodromic") -> complex:
    """H_i(t; q, p) for i in {1, 2, 3}."""
    t = PoleConfig.of(t)
    ii = _check_i(i)
    q, p = d.q, d.p
    _check_q(q)
    P = _polys(t, ii, form)
    w = _weights(q, t.t[ii])
    F = npoly.polyval(q, P.F)
    K = npoly.polyval(q, P.K)
    Fi = npoly.polyval(q, P.Fi)
    return complex(np.sum(w * (F * p * p - K * p + Fi * p)) / P.den)


def hamiltonian_gradient(
    t, d: DarbouxPoint, i: int, form: str = "isomonodromic"
) -> tuple[np.ndarray, np.ndarray]:
    """(dH_i/dq, dH_i/dp) in closed form."""
    t = PoleConfig.of(t)
    ii = _check_i(i)
    ti = t.t[ii]
    q, p = d.q, d.p
    _check_q(q)
    P = _polys(t, ii, form)
    w = _weights(q, ti)
    F = npoly.polyval(q, P.F)
    K = npoly.polyval(q, P.K)
    Fi = npoly.polyval(q, P.Fi)
    h = F * p * p - K * p + Fi * p
    dh = npoly.polyval(q, P.dF) * p * p - npoly.polyval(q, P.dK) * p + npoly.polyval(q, P.dFi) * p
    dp = w * (2 * F * p - K + Fi)
    dq = w * dh
    for j in range(3):
        k, m = [r for r in range(3) if r != j]
        # w_j = (q_k - t_i)(q_m - t_i) / ((q_k - q_j)(q_m - q_j))
        dq[j] += h[j] * w[j] * (1 / (q[k] - q[j]) + 1 / (q[m] - q[j]))
        for a, b in ((k, m), (m, k)):
            dq[a] += h[j] * (ti - q[j]) / (q[a] - q[j]) ** 2 * (q[b] - ti) / (q[b] - q[j])
    return dq / P.den, dp / P.den


def garnier_vector_field(
    t, d: DarbouxPoint, i: int, form: str = "isomonodromic"
) -> tuple[np.ndarray, np.ndarray]:
    """The (q, p) components of V_i: (dH_i/dp, -dH_i/dq)."""
    gq, gp = hamiltonian_gradient(t, d, i, form)
    return gp, -gq


@dataclass
class FlowTrajectory:
    samples: list = field(default_factory=list)  # (PoleConfig, DarbouxPoint)
    tol: float = 0.0
    stats: OdeStats = field(default_factory=OdeStats)

    @property
    def end(self) -> tuple[PoleConfig, DarbouxPoint]:
        return self.samples[-1]


def _as_tvec(w) -> np.ndarray:
    if isinstance(w, PoleConfig):
        return w.t
    return np.array(w, dtype=complex).reshape(3)


def _check_segment(a: np.ndarray, b: np.ndarray, guard: float) -> None:
    # each t_i(s), and each difference t_i(s) - t_j(s), is affine in s
    for i in range(3):
        for bad in (0, 1):
            if segment_distance(bad, a[i], b[i]) < guard:
                raise LeftParameterSpace(f"t{i + 1} passes within {guard} of {bad}")
        for j in range(i + 1, 3):
            if segment_distance(0, a[i] - a[j], b[i] - b[j]) < guard:
                raise LeftParameterSpace(f"t{i + 1} and t{j + 1} nearly collide")


def isomonodromic_flow(
    t_path: Sequence,
    d0: DarbouxPoint,
    tol: float,
    form: str = "isomonodromic",
    guard: float = T_GUARD,
) -> FlowTrajectory:
    """Integrate the Garnier system along a piecewise-linear path in T.

    ``t_path`` is a sequence of waypoints, each a :class:`PoleConfig` or a
    triple (t1, t2, t3). On the segment from ``a`` to ``b`` the state obeys
    d(q, p)/ds = sum_i (b_i - a_i) V_i for s in [0, 1].
    """
    pts = [_as_tvec(w) for w in t_path]
    if not pts:
        raise DegenerateInput("empty path")
    for a in pts:
        PoleConfig(*a)
    traj = FlowTrajectory(tol=tol)
    traj.samples.append((PoleConfig(*pts[0]), d0))
    y = d0.vector()
    _check_q(d0.q)
    for a, b in zip(pts[:-1], pts[1:]):
        delta = b - a
        if not np.any(delta):
            continue
        _check_segment(a, b, guard)

        def rhs(s, y, a=a, delta=delta):
            tc = PoleConfig(*(a + s * delta))
            d = DarbouxPoint(y[:3], y[3:])
            out = np.zeros(6, dtype=complex)
            for i in range(3):
                if delta[i] == 0:
                    continue
                gq, gp = hamiltonian_gradient(tc, d, i + 1, form)
                out[:3] += delta[i] * gp
                out[3:] -= delta[i] * gq
            return out

        def on_accept(s, y, a=a, delta=delta):
            q = y[:3]
            tc = a + s * delta
            sc = max(1.0, float(np.max(np.abs(q))), float(np.max(np.abs(tc))))
            gap = min(abs(q[0] - q[1]), abs(q[1] - q[2]), abs(q[0] - q[2]))
            if gap < COLLISION_GUARD * sc:
                raise CriticalLocus(f"critical locus at s={s:.6g}")
            traj.samples.append((PoleConfig(*tc), DarbouxPoint(y[:3].copy(), y[3:].copy())))

        try:
            y, st = dopri5(rhs, y, 0.0, 1.0, tol, on_accept=on_accept)
        except ZeroDivisionError as exc:
            raise CriticalLocus(str(exc)) from exc
        traj.stats.merge(st)
    if len(traj.samples) == 1 or not np.array_equal(traj.samples[-1][0].t, pts[-1]):
        traj.samples.append((PoleConfig(*pts[-1]), DarbouxPoint(y[:3], y[3:])))
    return traj


def flow_along(t, d0: DarbouxPoint, i: int, dt: complex, tol: float, **kw) -> tuple[PoleConfig, DarbouxPoint]:
    """Flow along t_i -> t_i + dt; returns the endpoint."""
    t = PoleConfig.of(t)
    a = t.t
    b = a.copy()
    b[i - 1] += dt
    return isomonodromic_flow([a, b], d0, tol, **kw).end
