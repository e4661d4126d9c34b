"""Foundation numerics: polylines, an adaptive Dormand-Prince integrator,
parallel transport of linear connections, low-degree polynomial roots,
finite-difference Jacobians and SVD rank.

Two-by-two matrices are plain ``numpy`` arrays of shape ``(2, 2)`` and
complex polynomials are coefficient arrays ordered lowest degree first
(the ``numpy.polynomial.polynomial`` convention).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateInput,
    EvaluationFailure,
    SingularApproach,
    StencilCollision,
)

__all__ = [
    "Polyline",
    "OdeStats",
    "dopri5",
    "integrate_transport",
    "transport_with_stats",
    "poly_roots",
    "poly_from_roots",
    "jacobian_fd",
    "rank_svd",
    "segment_distance",
]


@dataclass(frozen=True)
class Polyline:
    """Ordered complex waypoints joined by straight segments."""

    waypoints: tuple

    def __post_init__(self):
        pts = tuple(complex(w) for w in self.waypoints)
        if len(pts) < 2:
            raise DegenerateInput("a polyline needs at least two waypoints")
        object.__setattr__(self, "waypoints", pts)

    @property
    def start(self) -> complex:
        return self.waypoints[0]

    @property
    def end(self) -> complex:
        return self.waypoints[-1]

    @property
    def closed(self) -> bool:
        return self.waypoints[0] == self.waypoints[-1]

    def segments(self):
        return list(zip(self.waypoints[:-1], self.waypoints[1:]))

    def reversed(self) -> "Polyline":
        return Polyline(self.waypoints[::-1])

    def __add__(self, other: "Polyline") -> "Polyline":
        # traverse self first, then other
        if abs(self.end - other.start) > 1e-14 * max(1.0, abs(self.end)):
            raise DegenerateInput("polylines do not join")
        return Polyline(self.waypoints + other.waypoints[1:])

    def length(self) -> float:
        return sum(abs(b - a) for a, b in self.segments())

    def winding_number(self, point: complex) -> float:
        """Winding number about ``point`` computed from summed arguments."""
        total = 0.0
        for a, b in self.segments():
            total += cmath.phase((b - point) / (a - point))
        return total / (2 * math.pi)

    def min_distance(self, points: Iterable[complex]) -> float:
        return min(
            segment_distance(p, a, b) for p in points for a, b in self.segments()
        )


def segment_distance(p: complex, a: complex, b: complex) -> float:
    """Euclidean distance from ``p`` to the closed segment [a, b]."""
    d = b - a
    if d == 0:
        return abs(p - a)
    s = ((p - a) * d.conjugate()).real / abs(d) ** 2
    s = min(1.0, max(0.0, s))
    return abs(p - (a + s * d))


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4)
# ---------------------------------------------------------------------------

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4

# PI controller constants (Hairer, Norsett & Wanner II.4)
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA
_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0


@dataclass
class OdeStats:
    accepted: int = 0
    rejected: int = 0
    evaluations: int = 0
    last_step: float = 0.0
    next_step: float = 0.0  # controller proposal after the last accepted step

    def merge(self, other: "OdeStats") -> None:
        self.accepted += other.accepted
        self.rejected += other.rejected
        self.evaluations += other.evaluations
        self.last_step = other.last_step
        self.next_step = other.next_step


def dopri5(
    f: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    s0: float,
    s1: float,
    rtol: float,
    atol: float | None = None,
    h0: float | None = None,
    max_steps: int = 200_000,
    step_cap: Callable[[float, np.ndarray], float] | None = None,
    on_accept: Callable[[float, np.ndarray], None] | None = None,
) -> tuple[np.ndarray, OdeStats]:
    """Integrate ``y' = f(s, y)`` from ``s0`` to ``s1`` (real, ``s1 > s0``).

    Embedded Runge-Kutta 5(4) of Dormand and Prince with a PI step-size
    controller. ``atol`` defaults to ``1e-3 * rtol``. ``step_cap(s, y)``
    optionally bounds the next step; ``on_accept(s, y)`` is called after
    every accepted step and may raise to abort.
    """
    if not rtol > 0:
        raise DegenerateInput("tolerance must be positive")
    if atol is None:
        atol = 1e-3 * rtol
    y = np.array(y0, dtype=complex)
    span = s1 - s0
    stats = OdeStats()
    if span == 0:
        return y, stats
    s = s0
    k1 = f(s, y)
    stats.evaluations += 1
    if not np.all(np.isfinite(k1)):
        raise EvaluationFailure(f"non-finite right-hand side at s={s}")
    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean((np.abs(y) / scale) ** 2))
        d1 = np.sqrt(np.mean((np.abs(k1) / scale) ** 2))
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6 * span
        h = min(h, span, span * 0.1) if h > 0 else 1e-6 * span
    else:
        h = min(h0, span)
    h_min = 1e-13 * max(1.0, abs(span))
    err_prev = 1e-4
    ks = [None] * 7
    while s < s1:
        if stats.accepted + stats.rejected >= max_steps:
            raise SingularApproach(f"step budget exhausted at s={s}")
        if step_cap is not None:
            h = min(h, step_cap(s, y))
        if s + h > s1 or s1 - (s + h) < 1e-12 * span:
            h = s1 - s
        if h < h_min:
            raise SingularApproach(f"step size underflow at s={s}")
        ks[0] = k1
        for i in range(1, 7):
            yi = y.copy()
            for j, a in enumerate(_A[i]):
                if a:
                    yi += (h * a) * ks[j]
            ks[i] = f(s + _C[i] * h, yi)
        stats.evaluations += 6
        y_new = yi  # the seventh stage node is the 5th-order solution (FSAL)
        if not (np.all(np.isfinite(ks[6])) and np.all(np.isfinite(y_new))):
            h *= 0.25
            stats.rejected += 1
            continue
        err_vec = h * sum(e * k for e, k in zip(_E, ks) if e)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((np.abs(err_vec) / scale) ** 2)))
        if err <= 1.0:
            s = s + h
            y = y_new
            k1 = ks[6]
            stats.accepted += 1
            stats.last_step = h
            if on_accept is not None:
                on_accept(s, y)
            err = max(err, 1e-10)
            fac = _SAFETY * err ** (-_ALPHA) * err_prev**_BETA
            err_prev = err
            h *= min(_FAC_MAX, max(_FAC_MIN, fac))
            stats.next_step = h
        else:
            stats.rejected += 1
            h *= max(_FAC_MIN, _SAFETY * err ** (-_ALPHA))
    return y, stats


def _check_safety(path: Polyline, singularities: Sequence[complex], safety):
    sing = [complex(p) for p in singularities]
    if not sing:
        return
    if safety is None:
        if len(sing) < 2:
            return
        dmin = min(abs(a - b) for i, a in enumerate(sing) for b in sing[i + 1 :])
        safety = 0.1 * dmin
    dist = path.min_distance(sing)
    if dist < safety:
        raise SingularApproach(
            f"path comes within {dist:.3g} of a singular point (margin {safety:.3g})"
        )


def transport_with_stats(
    coeff_at: Callable[[complex], np.ndarray],
    path: Polyline,
    tol: float,
    singularities: Sequence[complex] = (),
    safety: float | None = None,
) -> tuple[np.ndarray, complex, OdeStats]:
    """Like :func:`integrate_transport`, also returning the integrated trace
    ``int tr A dx`` and the integrator statistics."""
    _check_safety(path, singularities, safety)
    y = np.zeros(5, dtype=complex)
    y[0] = y[3] = 1.0
    stats = OdeStats()
    h_rel = None
    prev_len = 0.0
    for a, b in path.segments():
        d = b - a
        if d == 0:
            continue
        if h_rel is not None:
            # carry the last accepted step over, rescaled to this segment
            h_rel = min(1.0, h_rel * prev_len / abs(d))

        def rhs(s, y, a=a, d=d):
            A = coeff_at(a + s * d)
            out = np.empty(5, dtype=complex)
            b00, b01, b10, b11 = y[0], y[1], y[2], y[3]
            a00, a01, a10, a11 = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
            out[0] = -(a00 * b00 + a01 * b10) * d
            out[1] = -(a00 * b01 + a01 * b11) * d
            out[2] = -(a10 * b00 + a11 * b10) * d
            out[3] = -(a10 * b01 + a11 * b11) * d
            out[4] = (a00 + a11) * d
            return out

        try:
            y, st = dopri5(rhs, y, 0.0, 1.0, tol, h0=h_rel)
        except (ZeroDivisionError, FloatingPointError) as exc:
            raise EvaluationFailure(str(exc)) from exc
        stats.merge(st)
        h_rel = st.next_step or None
        prev_len = abs(d)
    B = y[:4].reshape(2, 2)
    trace_integral = complex(y[4])
    expected = cmath.exp(-trace_integral)
    det = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
    # Liouville check, scaled by the size of B because det cancels entries
    bound = 10 * tol * max(1.0, float(np.max(np.abs(B))) ** 2)
    if abs(det - expected) > bound:
        raise EvaluationFailure(
            f"Liouville check failed: |det B - exp(-int tr A)| = {abs(det - expected):.3g}"
        )
    return B, trace_integral, stats


def integrate_transport(
    coeff_at: Callable[[complex], np.ndarray],
    path: Polyline,
    tol: float,
    singularities: Sequence[complex] = (),
    safety: float | None = None,
) -> np.ndarray:
    """Solve ``dB = -A(x) B dx`` along ``path`` with ``B(start) = I``.

    ``coeff_at(x)`` returns the 2x2 coefficient ``A(x)``. If
    ``singularities`` is given, the path must stay ``safety`` away from each
    of them (default: 0.1 times their minimum pairwise distance).
    """
    return transport_with_stats(coeff_at, path, tol, singularities, safety)[0]


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


def _trim(coeffs) -> np.ndarray:
    c = np.array(coeffs, dtype=complex)
    nz = np.nonzero(c)[0]
    if len(nz) == 0:
        raise DegenerateInput("zero polynomial")
    return c[: nz[-1] + 1]


def _polish(c: np.ndarray, r: complex) -> complex:
    p = np.polynomial.polynomial.polyval(r, c)
    dp = np.polynomial.polynomial.polyval(r, np.polynomial.polynomial.polyder(c))
    if dp == 0:
        return r
    r2 = r - p / dp
    p2 = np.polynomial.polynomial.polyval(r2, c)
    return r2 if abs(p2) < abs(p) else r


def poly_roots(coeffs) -> list[complex]:
    """Roots of a polynomial of degree 1, 2 or 3 (coefficients low first).

    Closed-form formulas followed by a single Newton polish step per root.
    """
    c = _trim(coeffs)
    deg = len(c) - 1
    if deg == 0:
        raise DegenerateInput("constant polynomial has no roots")
    if deg > 3:
        raise DegenerateInput("poly_roots handles degree <= 3 only")
    if deg == 1:
        return [-c[0] / c[1]]
    if deg == 2:
        a, b, k = c[2], c[1], c[0]
        disc = cmath.sqrt(b * b - 4 * a * k)
        # pick the sign avoiding cancellation
        den = -b - disc if abs(-b - disc) >= abs(-b + disc) else -b + disc
        if den == 0:
            roots = [-b / (2 * a)] * 2
        else:
            r1 = den / (2 * a)
            r2 = 2 * k / den
            roots = [r1, r2]
        return [_polish(c, r) for r in roots]
    a = c[3]
    b, cc, d = c[2] / a, c[1] / a, c[0] / a
    # depressed cubic u^3 + p u + q with x = u - b/3
    p = cc - b * b / 3
    q = 2 * b**3 / 27 - b * cc / 3 + d
    shift = -b / 3
    if abs(p) < 1e-300 and abs(q) < 1e-300:
        return [shift] * 3
    disc = cmath.sqrt(q * q / 4 + p**3 / 27)
    w1 = -q / 2 + disc
    w2 = -q / 2 - disc
    w = w1 if abs(w1) >= abs(w2) else w2
    u = w ** (1 / 3) if w != 0 else 0j
    omega = cmath.exp(2j * math.pi / 3)
    roots = []
    for k in range(3):
        uk = u * omega**k
        roots.append(uk - p / (3 * uk) + shift if uk != 0 else shift)
    return [_polish(c, r) for r in roots]


def poly_from_roots(roots, leading: complex = 1.0) -> np.ndarray:
    """Coefficients (low first) of ``leading * prod(x - r)``."""
    return leading * np.polynomial.polynomial.polyfromroots(list(roots)).astype(complex)


# ---------------------------------------------------------------------------
# differentiation and rank
# ---------------------------------------------------------------------------


def jacobian_fd(
    f: Callable[[np.ndarray], np.ndarray],
    x0,
    h: float,
    forbidden: Callable[[np.ndarray], bool] | None = None,
) -> np.ndarray:
    """Central-difference Jacobian with one Richardson extrapolation level.

    ``f`` maps m complex inputs to n complex outputs and is assumed to be
    holomorphic, so real-direction differences give complex derivatives.
    ``forbidden(x)`` may flag stencil points that must not be evaluated.
    """
    x0 = np.array(x0, dtype=complex)
    m = x0.size
    cols = []
    for k in range(m):
        vals = {}
        for step in (h, -h, h / 2, -h / 2):
            x = x0.copy()
            x[k] += step
            if forbidden is not None and forbidden(x):
                raise StencilCollision(f"stencil point {k} at offset {step} is forbidden")
            v = np.atleast_1d(np.asarray(f(x), dtype=complex))
            if not np.all(np.isfinite(v)):
                raise EvaluationFailure("non-finite value on the stencil")
            vals[step] = v
        d1 = (vals[h] - vals[-h]) / (2 * h)
        d2 = (vals[h / 2] - vals[-h / 2]) / h
        cols.append((4 * d2 - d1) / 3)
    return np.column_stack(cols)


def rank_svd(M, rel_threshold: float) -> tuple[int, np.ndarray]:
    """Numerical rank: singular values at least ``rel_threshold * s_max``."""
    M = np.asarray(M, dtype=complex)
    if not np.all(np.isfinite(M)):
        raise EvaluationFailure("non-finite matrix entries")
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0, s
    return int(np.sum(s >= rel_threshold * s[0])), s
