"""Normal-form holomorphic systems on the genus-2 curve y^2 = F(x) and the
geometry of their Riccati foliations.

A normal-form system is A = [[0, beta], [gamma, 0]] with
beta = (b1 x + b0) dx / y and gamma = (g1 x + g0) dx / y, where
F(x) = x (x - 1)(x - t1)(x - t2)(x - t3). Writing Y = (y1, y2) and
y = y1 / y2, the flat sections of d + A give the Riccati equation
dy = gamma y^2 - beta, so the tangency form at height p is gamma p^2 - beta.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegreeCollapse,
    ExceptionalDecomposition,
    InvariantHorizontal,
    NotInSigma,
    RootAtInfinity,
)
from .fuchsian import PoleConfig, q_invariants
from .numkit import poly_roots

__all__ = [
    "INF",
    "Genus2System",
    "QuadraticDifferential",
    "TangencyPoint",
    "SpecialFiber",
    "SelfIntersection",
    "det_quadratic",
    "is_reducible_nu",
    "phi_lift",
    "section_phi",
    "tangency_points",
    "twelve_special_fibers",
    "self_intersection",
    "self_intersection_report",
    "curve_F",
]

INF = float("inf")  # the point at infinity, both for x and for the height p


@dataclass(frozen=True)
class Genus2System:
    poles: PoleConfig
    beta0: complex
    beta1: complex
    gamma0: complex
    gamma1: complex

    def __post_init__(self):
        object.__setattr__(self, "poles", PoleConfig.of(self.poles))
        for name in ("beta0", "beta1", "gamma0", "gamma1"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def resultant(self) -> complex:
        """beta0 gamma1 - beta1 gamma0; zero exactly on reducible systems."""
        return self.beta0 * self.gamma1 - self.beta1 * self.gamma0

    def scale(self) -> float:
        return max(1.0, abs(self.beta0), abs(self.beta1), abs(self.gamma0), abs(self.gamma1))

    def is_irreducible(self, tol: float = 1e-10) -> bool:
        return abs(self.resultant) > tol * self.scale() ** 2

    def coefficient(self, x: complex, y: complex) -> np.ndarray:
        """A(x) for the connection d + A(x) dx, at the curve point (x, y)."""
        return np.array(
            [[0, (self.beta1 * x + self.beta0) / y], [(self.gamma1 * x + self.gamma0) / y, 0]],
            dtype=complex,
        )


@dataclass(frozen=True)
class QuadraticDifferential:
    """(nu2 x^2 + nu1 x + nu0) dx^2 / F(x)."""

    nu0: complex
    nu1: complex
    nu2: complex

    def __post_init__(self):
        for name in ("nu0", "nu1", "nu2"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def of(cls, nu) -> "QuadraticDifferential":
        if isinstance(nu, QuadraticDifferential):
            return nu
        return cls(*nu)

    def vector(self) -> np.ndarray:
        return np.array([self.nu0, self.nu1, self.nu2], dtype=complex)

    @property
    def discriminant(self) -> complex:
        return self.nu1 * self.nu1 - 4 * self.nu0 * self.nu2

    def scale(self) -> float:
        return max(1.0, abs(self.nu0), abs(self.nu1), abs(self.nu2))


def curve_F(t: PoleConfig, x: complex) -> complex:
    t1, t2, t3 = t.t
    return x * (x - 1) * (x - t1) * (x - t2) * (x - t3)


def det_quadratic(sys: Genus2System) -> QuadraticDifferential:
    """nu(x) = -(b1 x + b0)(g1 x + g0), the numerator of det A."""
    b0, b1, g0, g1 = sys.beta0, sys.beta1, sys.gamma0, sys.gamma1
    return QuadraticDifferential(-b0 * g0, -(b1 * g0 + b0 * g1), -b1 * g1)


def is_reducible_nu(nu, tol: float) -> bool:
    nu = QuadraticDifferential.of(nu)
    return abs(nu.discriminant) < tol * nu.scale() ** 2


def phi_lift(t, z, c1, c2, c3) -> Genus2System:
    """The normal-form lift of the Sigma point (z, z, z; c1, c2, c3)."""
    t = PoleConfig.of(t)
    c = np.array([c1, c2, c3], dtype=complex)
    if abs(c.sum()) > 1e-10 * max(1.0, float(np.max(np.abs(c)))):
        raise NotInSigma("c1 + c2 + c3 != 0")
    Q0, _, Qinf = q_invariants(t, c)
    return Genus2System(t, -z / 2, (2 * z - 1) / 2, -Q0, -Qinf)


def section_phi(t, nu, root_choice: int = 0) -> tuple[complex, complex, complex, complex]:
    """A Sigma point (z, c1, c2, c3) whose lift has determinant ``nu``.

    The roots of nu(x) are ordered by (real, imag); ``root_choice`` picks
    which one plays x_beta (the zero of beta). The two choices are the two
    sheets of the 2-fold cover.
    """
    t = PoleConfig.of(t)
    nu = QuadraticDifferential.of(nu)
    if nu.nu2 == 0:
        raise RootAtInfinity("nu2 = 0: a root of nu sits at infinity")
    if root_choice not in (0, 1):
        raise ValueError("root_choice must be 0 or 1")
    roots = sorted(poly_roots([nu.nu0, nu.nu1, nu.nu2]), key=lambda r: (r.real, r.imag))
    xb, xg = roots[root_choice], roots[1 - root_choice]
    if abs(2 * xb - 1) < 1e-12 * max(1.0, abs(xb)):
        raise ExceptionalDecomposition("x_beta = 1/2")
    K = 2 * nu.nu2 * (2 * xb - 1)
    tv = t.t
    c = []
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        c.append(K * (tv[i] - xg) / ((tv[i] - tv[j]) * (tv[i] - tv[k])))
    z = xb / (2 * xb - 1)
    return complex(z), complex(c[0]), complex(c[1]), complex(c[2])


@dataclass(frozen=True)
class TangencyPoint:
    x: complex  # INF for the Weierstrass point at infinity
    sheet: int  # +1 / -1 relative to the principal square root; 0 at Weierstrass points
    multiplicity: int


def _weierstrass(t: PoleConfig) -> list[complex]:
    return [0j, 1 + 0j, *t.t]


def _form(sys: Genus2System, p) -> tuple[complex, complex]:
    if p == INF or p is None:
        return sys.gamma1, sys.gamma0
    p2 = complex(p) ** 2
    return sys.gamma1 * p2 - sys.beta1, sys.gamma0 * p2 - sys.beta0


def tangency_points(sys: Genus2System, p, tol: float = 1e-12) -> list[TangencyPoint]:
    """Zeros on the curve of the tangency form at height ``p`` (``INF`` allowed)."""
    a1, a0 = _form(sys, p)
    ref = sys.scale() * max(1.0, abs(p) ** 2 if p not in (INF, None) else 1.0)
    if abs(a1) <= tol * ref and abs(a0) <= tol * ref:
        raise InvariantHorizontal("the tangency form vanishes identically")
    if abs(a1) <= tol * ref:
        return [TangencyPoint(INF, 0, 2)]
    x = -a0 / a1
    t = sys.poles
    sc = max(1.0, t.scale())
    for w in _weierstrass(t):
        if abs(x - w) <= 1e-9 * sc:
            return [TangencyPoint(w, 0, 2)]
    return [TangencyPoint(x, 1, 1), TangencyPoint(x, -1, 1)]


@dataclass(frozen=True)
class SpecialFiber:
    w: complex  # Weierstrass x-value (INF for the point at infinity)
    p: complex  # height; INF when the root is at p = infinity
    multiplicity: int


def _solve_height(A: complex, B: complex, tol: float) -> list[tuple[complex, int]]:
    # A p^2 = B on the projective p-line
    ref = max(abs(A), abs(B))
    if ref == 0:
        raise DegreeCollapse("tangency form vanishes at a Weierstrass point")
    if abs(A) <= tol * ref:
        return [(INF, 2)]
    if abs(B) <= tol * ref:
        return [(0j, 2)]
    r = cmath.sqrt(B / A)
    return [(r, 1), (-r, 1)]


def twelve_special_fibers(sys: Genus2System, tol: float = 1e-12) -> list[SpecialFiber]:
    """Heights p whose tangency point is a Weierstrass point, with multiplicity."""
    if not sys.is_irreducible(tol):
        raise DegreeCollapse("reducible system: the tangency map degenerates")
    out = []
    for w in _weierstrass(sys.poles):
        A = sys.gamma1 * w + sys.gamma0
        B = sys.beta1 * w + sys.beta0
        out += [SpecialFiber(w, p, m) for p, m in _solve_height(A, B, tol)]
    out += [SpecialFiber(INF, p, m) for p, m in _solve_height(sys.gamma1, sys.beta1, tol)]
    return out


@dataclass(frozen=True)
class SelfIntersection:
    value: int
    c1_wedge: float
    c1_L: int
    branch_count: int
    generic: bool


def _coincident(ps: list, tol: float) -> bool:
    finite = [p for p in ps if p != INF]
    n_inf = len(ps) - len(finite)
    if n_inf > 1:
        return True
    for i, a in enumerate(finite):
        for b in finite[i + 1 :]:
            if abs(a - b) <= tol * max(1.0, abs(a), abs(b)):
                return True
    return False


def self_intersection_report(sys: Genus2System, tol: float = 1e-9) -> SelfIntersection:
    fibers = twelve_special_fibers(sys)
    # each simple fiber is a simple branch point and contributes e_p - 1 = 1
    branch = sum(f.multiplicity for f in fibers)
    expanded = [f.p for f in fibers for _ in range(f.multiplicity)]
    generic = all(f.multiplicity == 1 for f in fibers) and not _coincident(expanded, tol)
    c1_L = 4
    c1_wedge = c1_L - branch / 2
    value = c1_wedge - 2
    return SelfIntersection(int(round(value)), c1_wedge, c1_L, branch, generic)


def self_intersection(sys: Genus2System) -> int:
    """Self-intersection of the rational curve of projective structures."""
    return self_intersection_report(sys).value
