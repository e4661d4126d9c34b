"""Numerical monodromy by analytic continuation.

Conventions
-----------
The transport along a path P is the solution B of dB = -A B dx with
B(start) = I; concatenating P1 then P2 gives T(P2) T(P1). The monodromy
matrix of a loop is its transport. Loops are built by
:func:`standard_loops` and listed in *loop order*: the five finite loops by
increasing argument of (pole - basepoint), then the loop around infinity,
a clockwise circle about 0 through the basepoint. With this order
M_{o6} M_{o5} ... M_{o1} = I, where o is the loop order. (The matrices
rho = M^{-1} act on the right and satisfy rho_{o1} ... rho_{o6} = I.)

Matrices are stored by pole label in the order 0, 1, t1, t2, t3, oo, and
index words refer to that storage order, 1-based.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BranchApproach,
    CentralRepresentation,
    EvaluationFailure,
    GarnierLabError,
    OddWord,
    PathPlanningFailure,
    ReducibleDeterminant,
    StencilCollision,
)
from .fuchsian import (
    ALL_POLES,
    FINITE_POLES,
    FuchsianSystem,
    Pole,
    PoleConfig,
    coefficient_function,
    sigma_system,
)
from .genus2 import (
    Genus2System,
    QuadraticDifferential,
    curve_F,
    is_reducible_nu,
    section_phi,
)
from .numkit import OdeStats, Polyline, dopri5, jacobian_fd, rank_svd, transport_with_stats

__all__ = [
    "DEFAULT_WORDS",
    "Loop",
    "MonodromyRep",
    "IrreducibilityReport",
    "HyperellipticTransport",
    "RHRank",
    "default_basepoint",
    "choose_basepoint",
    "standard_loops",
    "fuchsian_monodromy",
    "word_product",
    "even_word_traces",
    "is_irreducible",
    "irreducibility_report",
    "two_point_loop",
    "hyperelliptic_continuation",
    "rh_trace_map",
    "rh_jacobian_rank",
]

DEFAULT_WORDS = ((1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (1, 2, 3, 4))

# vertices of the polygons standing in for circles
CIRCLE_VERTICES = 32
LOOP_RADIUS = 0.3  # times the minimum pairwise pole distance
CORRIDOR = 0.15  # minimum clearance of approach segments, same units


@dataclass(frozen=True)
class Loop:
    pole: Pole
    basepoint: complex
    path: Polyline

    def winding(self, point: complex) -> float:
        return self.path.winding_number(point)


def default_basepoint(t) -> complex:
    t = PoleConfig.of(t)
    return 2j * (1 + float(np.max(np.abs(t.t))))


def choose_basepoint(ts: Sequence) -> complex:
    """First basepoint, in a fixed candidate order, whose standard loops can
    be planned for every pole configuration in ``ts``.

    The default basepoint comes first; then points on the same circle
    rotated by increasing angles, alternating in sign.
    """
    ts = [PoleConfig.of(t) for t in ts]
    R = 2 * (1 + max(float(np.max(np.abs(t.t))) for t in ts))
    angles = [0.0] + [s * 0.07 * k for k in range(1, 23) for s in (1, -1)]
    for ang in angles:
        b = 1j * R * cmath.exp(1j * ang)
        try:
            for t in ts:
                standard_loops(t, b)
        except PathPlanningFailure:
            continue
        return b
    raise PathPlanningFailure("no admissible basepoint among the candidates")


def _circle(center: complex, start: complex, clockwise: bool = False) -> list[complex]:
    u = start - center
    sgn = -1 if clockwise else 1
    pts = [center + u * cmath.exp(sgn * 2j * math.pi * k / CIRCLE_VERTICES) for k in range(CIRCLE_VERTICES)]
    return pts + [start]


def standard_loops(t, basepoint: complex | None = None) -> list[Loop]:
    """Six generating loops based at ``basepoint``, returned in loop order."""
    t = PoleConfig.of(t)
    b = default_basepoint(t) if basepoint is None else complex(basepoint)
    poles = {p: t.location(p) for p in FINITE_POLES}
    locs = list(poles.values())
    if any(abs(b - a) == 0 for a in locs):
        raise PathPlanningFailure("basepoint coincides with a pole")
    dmin = t.min_pole_distance()
    r = LOOP_RADIUS * dmin
    if min(abs(b - a) for a in locs) <= 2 * r:
        raise PathPlanningFailure("basepoint too close to a pole")
    R = abs(b)
    if R <= max(abs(a) for a in locs) + dmin:
        raise PathPlanningFailure("basepoint must lie outside a disc holding all poles")
    # the cut direction is the tangent of the outer circle at b, so the
    # angular order of the rays matches the circle around infinity
    cut = 1j * b / R
    order = sorted(FINITE_POLES, key=lambda p: cmath.phase((poles[p] - b) / cut))
    loops = []
    for p in order:
        a = poles[p]
        u = (b - a) / abs(b - a)
        entry = a + r * u
        for other, ao in poles.items():
            if other is not p and Polyline((b, entry)).min_distance([ao]) < CORRIDOR * dmin:
                raise PathPlanningFailure(
                    f"the ray to {p.value} passes too close to {other.value}"
                )
        path = Polyline([b] + _circle(a, entry) + [b])
        loops.append(Loop(p, b, path))
    loops.append(Loop(Pole.INF, b, Polyline(_circle(0j, b, clockwise=True))))
    for lp in loops:
        _validate_loop(lp, poles)
    return loops


def _validate_loop(lp: Loop, poles: dict) -> None:
    for p, a in poles.items():
        w = lp.winding(a)
        want = -1.0 if lp.pole is Pole.INF else (1.0 if p is lp.pole else 0.0)
        if abs(w - want) > 1e-6:
            raise PathPlanningFailure(
                f"loop around {lp.pole.value} winds {w:.6f} times about {p.value}"
            )


@dataclass
class MonodromyRep:
    matrices: np.ndarray  # (6, 2, 2) in the order 0, 1, t1, t2, t3, oo
    loops: list = field(default_factory=list)
    order: tuple = ()  # pole labels in loop order
    tol: float = 0.0
    stats: OdeStats = field(default_factory=OdeStats)

    def matrix(self, pole: Pole) -> np.ndarray:
        return self.matrices[ALL_POLES.index(pole)]

    def ordered_product(self) -> np.ndarray:
        P = np.eye(2, dtype=complex)
        for p in self.order:
            P = self.matrix(p) @ P
        return P

    def conjugated(self, g: np.ndarray) -> "MonodromyRep":
        gi = np.linalg.inv(g)
        mats = np.array([g @ M @ gi for M in self.matrices])
        return MonodromyRep(mats, self.loops, self.order, self.tol, self.stats)

    def invariant_residuals(self) -> dict:
        tr = np.array([np.trace(M) for M in self.matrices])
        det = np.array([np.linalg.det(M) for M in self.matrices])
        return {
            "max_abs_trace": float(np.max(np.abs(tr))),
            "max_det_plus_one": float(np.max(np.abs(det + 1))),
            "product_defect": float(np.max(np.abs(self.ordered_product() - np.eye(2)))),
        }


def fuchsian_monodromy(
    sys: FuchsianSystem, loops: Sequence[Loop] | None = None, tol: float = 1e-10
) -> MonodromyRep:
    if loops is None:
        loops = standard_loops(sys.poles, choose_basepoint([sys.poles]))
    coeff = coefficient_function(sys)
    sing = list(sys.poles.finite_poles())
    mats = np.zeros((6, 2, 2), dtype=complex)
    stats = OdeStats()
    for lp in loops:
        B, _, st = transport_with_stats(coeff, lp.path, tol, sing)
        mats[ALL_POLES.index(lp.pole)] = B
        stats.merge(st)
    return MonodromyRep(mats, list(loops), tuple(lp.pole for lp in loops), tol, stats)


def _check_word(word) -> None:
    if len(word) % 2:
        raise OddWord(f"word {tuple(word)} has odd length")
    if any(not 1 <= k <= 6 for k in word):
        raise ValueError(f"word indices must lie in 1..6: {tuple(word)}")


def word_product(rep: MonodromyRep, word) -> np.ndarray:
    """M_{w1} M_{w2} ... M_{wk} (1-based storage indices)."""
    _check_word(word)
    P = np.eye(2, dtype=complex)
    for k in word:
        P = P @ rep.matrices[k - 1]
    return P


def even_word_traces(rep: MonodromyRep, words=DEFAULT_WORDS) -> np.ndarray:
    for w in words:
        _check_word(w)
    return np.array([np.trace(word_product(rep, w)) for w in words], dtype=complex)


@dataclass(frozen=True)
class IrreducibilityReport:
    irreducible: bool
    line_motion: float  # how far the least-moved candidate line is moved
    commutator_deviation: float  # max |tr(M_j M_k M_j^-1 M_k^-1) - 2|


def _fs_distance(v: np.ndarray, w: np.ndarray) -> float:
    nv, nw = np.linalg.norm(v), np.linalg.norm(w)
    if nv == 0 or nw == 0:
        return 0.0
    cos2 = min(1.0, abs(np.vdot(v, w)) ** 2 / (nv * nv * nw * nw))
    return math.sqrt(1.0 - cos2)


def _generators(rep: MonodromyRep, subgroup: str) -> list[np.ndarray]:
    M = rep.matrices
    if subgroup == "full":
        return list(M)
    if subgroup == "even":
        # M_0 M_k generate the index-2 subgroup of even words
        return [M[0] @ M[k] for k in range(1, 6)]
    raise ValueError(f"subgroup must be 'full' or 'even', not {subgroup!r}")


def irreducibility_report(
    rep: MonodromyRep, tol: float = 1e-6, subgroup: str = "even"
) -> IrreducibilityReport:
    """Look for a line fixed by every generator of ``subgroup``.

    ``"even"`` tests the even-word subgroup, the representation seen by the
    genus-2 lift; ``"full"`` tests all six local monodromies. On the
    reducible locus of Sigma only the former is reducible: the even words
    fix two lines which every odd generator swaps.
    """
    gens = _generators(rep, subgroup)
    I = np.eye(2)
    pivot = None
    for M in gens:
        s = max(1.0, float(np.max(np.abs(M))))
        if min(np.max(np.abs(M - I)), np.max(np.abs(M + I))) > tol * s:
            pivot = M
            break
    if pivot is None:
        raise CentralRepresentation(f"all {subgroup} generators are central")
    _, V = np.linalg.eig(pivot)
    motion = min(max(_fs_distance(v, M @ v) for M in gens) for v in V.T)
    dev = 0.0
    for i, A in enumerate(gens):
        for B in gens[i + 1 :]:
            comm = A @ B @ np.linalg.inv(A) @ np.linalg.inv(B)
            dev = max(dev, abs(np.trace(comm) - 2))
    return IrreducibilityReport(bool(motion > tol), float(motion), float(dev))


def is_irreducible(rep: MonodromyRep, tol: float = 1e-6, subgroup: str = "even") -> bool:
    """No line is invariant under every generator of ``subgroup``."""
    return irreducibility_report(rep, tol, subgroup).irreducible


def two_point_loop(loops: Sequence[Loop], j: Pole, k: Pole) -> Polyline:
    """Standard loop around j followed by the one around k."""
    by = {lp.pole: lp for lp in loops}
    return by[j].path + by[k].path


@dataclass(frozen=True)
class HyperellipticTransport:
    matrix: np.ndarray
    sheet: int
    y_end: complex
    stats: OdeStats


def _principal_y(t: PoleConfig, x: complex) -> complex:
    return cmath.sqrt(curve_F(t, x))


def hyperelliptic_continuation(
    g2sys: Genus2System,
    x_path: Polyline,
    sheet0: int = 1,
    tol: float = 1e-10,
    safety: float | None = None,
) -> HyperellipticTransport:
    """Transport of the genus-2 system along the lift of ``x_path`` starting
    on the sheet y = sheet0 * sqrt(F(x)) (principal square root)."""
    if sheet0 not in (1, -1):
        raise ValueError("sheet0 must be +1 or -1")
    t = g2sys.poles
    branch = list(t.finite_poles())
    if safety is None:
        safety = 0.1 * t.min_pole_distance()
    if x_path.min_distance(branch) < safety:
        raise BranchApproach("path comes too close to a branch point")
    ycur = [sheet0 * _principal_y(t, x_path.start)]

    def pick(x):
        r = _principal_y(t, x)
        return r if abs(r - ycur[0]) <= abs(r + ycur[0]) else -r

    F_coeffs = np.polynomial.polynomial.polyfromroots(branch)
    dF_coeffs = np.polynomial.polynomial.polyder(F_coeffs)
    y = np.array([1, 0, 0, 1], dtype=complex)
    stats = OdeStats()
    h0 = None
    prev_len = 0.0
    for a, b in x_path.segments():
        d = b - a
        if d == 0:
            continue
        if h0 is not None:
            h0 = min(1.0, h0 * prev_len / abs(d))

        def rhs(s, Y, a=a, d=d):
            x = a + s * d
            A = g2sys.coefficient(x, pick(x))
            B = Y.reshape(2, 2)
            return (-(A @ B) * d).ravel()

        def cap(s, Y, a=a, d=d):
            x = a + s * d
            F = np.polynomial.polynomial.polyval(x, F_coeffs)
            dF = np.polynomial.polynomial.polyval(x, dF_coeffs)
            # keep the relative change of y over one step below ~5 percent
            return 0.1 * abs(F) / max(abs(dF) * abs(d), 1e-300)

        def accept(s, Y, a=a, d=d):
            ycur[0] = pick(a + s * d)

        y, st = dopri5(rhs, y, 0.0, 1.0, tol, h0=h0, step_cap=cap, on_accept=accept)
        stats.merge(st)
        h0 = st.next_step or None
        prev_len = abs(d)
    B = y.reshape(2, 2)
    det = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
    if abs(det - 1) > 10 * tol * max(1.0, float(np.max(np.abs(B))) ** 2):
        raise EvaluationFailure(f"Liouville check failed: |det - 1| = {abs(det - 1):.3g}")
    y_end = ycur[0]
    sheet = 1 if abs(y_end - _principal_y(t, x_path.end)) <= abs(y_end + _principal_y(t, x_path.end)) else -1
    return HyperellipticTransport(B, sheet, y_end, stats)


def _sorted_roots(nu: QuadraticDifferential):
    return sorted(np.roots([nu.nu2, nu.nu1, nu.nu0]), key=lambda r: (r.real, r.imag))


def rh_trace_map(
    t,
    nu,
    words=DEFAULT_WORDS,
    tol: float = 1e-10,
    root_choice: int = 0,
    basepoint: complex | None = None,
    disc_tol: float = 1e-10,
) -> np.ndarray:
    """(t, nu) -> section_phi -> Sigma point -> monodromy -> even-word traces."""
    t = PoleConfig.of(t)
    nu = QuadraticDifferential.of(nu)
    if is_reducible_nu(nu, disc_tol):
        raise ReducibleDeterminant("nu1^2 - 4 nu0 nu2 vanishes")
    z, c1, c2, c3 = section_phi(t, nu, root_choice)
    sys = sigma_system(t, z, c1, c2)
    if basepoint is None:
        basepoint = choose_basepoint([t])
    rep = fuchsian_monodromy(sys, standard_loops(t, basepoint), tol)
    return even_word_traces(rep, words)


@dataclass(frozen=True)
class RHRank:
    jacobian: np.ndarray
    rank: int
    singular_values: np.ndarray

    @property
    def condition_ratio(self) -> float:
        s = self.singular_values
        return float(s[-1] / s[0]) if s.size and s[0] else 0.0


def rh_jacobian_rank(
    t,
    nu,
    words=DEFAULT_WORDS,
    h: float | None = None,
    tol: float = 1e-10,
    rel_threshold: float = 1e-6,
    root_choice: int = 0,
    guard: float = 1e-3,
) -> RHRank:
    """Finite-difference Jacobian of :func:`rh_trace_map` in
    (t1, t2, t3, nu0, nu1, nu2) and its numerical rank."""
    if len(words) < 6:
        raise ValueError("at least six words are needed for rank 6")
    t = PoleConfig.of(t)
    nu = QuadraticDifferential.of(nu)
    if is_reducible_nu(nu, 1e-10):
        raise ReducibleDeterminant("nu1^2 - 4 nu0 nu2 vanishes")
    x0 = np.concatenate([t.t, nu.vector()])
    if h is None:
        h = 1e-4 * max(1.0, float(np.max(np.abs(x0))))
    # keep every stencil point on the branch chosen at the centre and on the
    # loop system of the centre
    xb0 = _sorted_roots(nu)[root_choice]
    b = choose_basepoint([t])

    def forbidden(x):
        tv = x[:3]
        pts = [0, 1, *tv]
        if min(abs(p - q) for i, p in enumerate(pts) for q in pts[i + 1 :]) < guard:
            return True
        disc = x[4] ** 2 - 4 * x[3] * x[5]
        return abs(disc) < 1e-8 * max(1.0, float(np.max(np.abs(x[3:])))) ** 2

    def f(x):
        tt = PoleConfig(*x[:3])
        nn = QuadraticDifferential(*x[3:])
        roots = _sorted_roots(nn)
        choice = int(np.argmin([abs(r - xb0) for r in roots]))
        return rh_trace_map(tt, nn, words, tol, choice, basepoint=b)

    try:
        J = jacobian_fd(f, x0, h, forbidden)
    except StencilCollision:
        raise
    except GarnierLabError as exc:
        raise StencilCollision(f"stencil evaluation failed: {exc}") from exc
    rank, s = rank_svd(J, rel_threshold)
    return RHRank(J, rank, s)
