"""Fuchsian systems on the projective line with poles 0, 1, t1, t2, t3, oo.

The chart (z1, z2, z3, c1, c2, c3) in C^6 parametrizes logarithmic
connections on the trivial rank-2 bundle with local exponents
{0, -1/2} over 0, 1, oo and {0, 1/2} over t1, t2, t3, normalized so that the
-1/2 eigendirections over 0 and 1 are [0:1] and [1:1], the 1/2
eigendirection over t_i is [z_i:1] and the 0-eigendirection over oo is [1:0].

The connection is ``d + A(x) dx``; flat sections solve ``dY + A Y dx = 0``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpectrum, InvalidPoleConfig, PoleEvaluation

__all__ = [
    "Pole",
    "PoleConfig",
    "FuchsianSystem",
    "Eigendirection",
    "SigmaReport",
    "q_invariants",
    "connection_coefficient",
    "residue",
    "residues",
    "eigendirection",
    "sigma_membership",
    "sigma_system",
]


class Pole(enum.Enum):
    ZERO = "0"
    ONE = "1"
    T1 = "t1"
    T2 = "t2"
    T3 = "t3"
    INF = "inf"

    @property
    def exponents(self) -> tuple[float, float]:
        if self in (Pole.ZERO, Pole.ONE, Pole.INF):
            return (0.0, -0.5)
        return (0.0, 0.5)


FINITE_POLES = (Pole.ZERO, Pole.ONE, Pole.T1, Pole.T2, Pole.T3)
ALL_POLES = FINITE_POLES + (Pole.INF,)


@dataclass(frozen=True)
class PoleConfig:
    """A point (t1, t2, t3) of the parameter space T."""

    t1: complex
    t2: complex
    t3: complex

    def __post_init__(self):
        ts = [complex(self.t1), complex(self.t2), complex(self.t3)]
        for name, v in zip(("t1", "t2", "t3"), ts):
            object.__setattr__(self, name, v)
            if not np.isfinite(v):
                raise InvalidPoleConfig(f"{name} must be finite")
            if v == 0 or v == 1:
                raise InvalidPoleConfig(f"{name} must avoid 0 and 1")
        if ts[0] == ts[1] or ts[1] == ts[2] or ts[0] == ts[2]:
            raise InvalidPoleConfig("t1, t2, t3 must be pairwise distinct")

    @classmethod
    def of(cls, t) -> "PoleConfig":
        if isinstance(t, PoleConfig):
            return t
        return cls(*t)

    @property
    def t(self) -> np.ndarray:
        return np.array([self.t1, self.t2, self.t3], dtype=complex)

    def finite_poles(self) -> np.ndarray:
        return np.array([0, 1, self.t1, self.t2, self.t3], dtype=complex)

    def location(self, pole: Pole) -> complex:
        return {
            Pole.ZERO: 0j,
            Pole.ONE: 1 + 0j,
            Pole.T1: self.t1,
            Pole.T2: self.t2,
            Pole.T3: self.t3,
        }[pole]

    def min_pole_distance(self) -> float:
        p = self.finite_poles()
        return float(min(abs(a - b) for i, a in enumerate(p) for b in p[i + 1 :]))

    def scale(self) -> float:
        return float(max(1.0, np.max(np.abs(self.t))))


@dataclass(frozen=True)
class FuchsianSystem:
    poles: PoleConfig
    z: np.ndarray = field(repr=True)
    c: np.ndarray = field(repr=True)

    def __post_init__(self):
        object.__setattr__(self, "poles", PoleConfig.of(self.poles))
        z = np.array(self.z, dtype=complex).reshape(3)
        c = np.array(self.c, dtype=complex).reshape(3)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "c", c)

    def __eq__(self, other):
        return (
            isinstance(other, FuchsianSystem)
            and self.poles == other.poles
            and np.array_equal(self.z, other.z)
            and np.array_equal(self.c, other.c)
        )

    __hash__ = None

    def vector(self) -> np.ndarray:
        return np.concatenate([self.z, self.c])


_RES0_BASE = np.array([[0, 0], [0, -0.5]], dtype=complex)
_RES1_BASE = np.array([[0, -0.5], [0, -0.5]], dtype=complex)


def residues(sys: FuchsianSystem) -> np.ndarray:
    """Residue matrices at (0, 1, t1, t2, t3) stacked into shape (5, 2, 2)."""
    z, c = sys.z, sys.c
    R = np.zeros((5, 2, 2), dtype=complex)
    R[0] = _RES0_BASE
    R[0, 1, 0] = np.sum(c * (1 - z))
    s = np.sum(c * z)
    R[1] = _RES1_BASE + np.array([[s, -s], [s, -s]])
    for i in range(3):
        zi, ci = z[i], c[i]
        R[2 + i] = np.array(
            [[-ci * zi, zi / 2 + ci * zi * zi], [-ci, 0.5 + ci * zi]], dtype=complex
        )
    return R


def residue(sys: FuchsianSystem, pole: Pole) -> np.ndarray:
    R = residues(sys)
    if pole is Pole.INF:
        return -R.sum(axis=0)
    return R[FINITE_POLES.index(pole)].copy()


def connection_coefficient(sys: FuchsianSystem, x: complex) -> np.ndarray:
    """The matrix A(x) with connection d + A(x) dx."""
    poles = sys.poles.finite_poles()
    d = x - poles
    if np.any(d == 0):
        raise PoleEvaluation(f"x = {x} is a pole")
    return np.tensordot(1.0 / d, residues(sys), axes=1)


def coefficient_function(sys: FuchsianSystem):
    """A fast closure x -> A(x), for repeated evaluation along paths."""
    poles = sys.poles.finite_poles()
    R = residues(sys)

    def coeff_at(x):
        return np.tensordot(1.0 / (x - poles), R, axes=1)

    return coeff_at


@dataclass(frozen=True)
class Eigendirection:
    u: complex
    v: complex
    at_infinity: bool = False

    def vector(self) -> np.ndarray:
        return np.array([self.u, self.v], dtype=complex)


def eigendirection(sys: FuchsianSystem, pole: Pole, eigenvalue: float) -> Eigendirection:
    """Projective eigendirection [u:v] of the residue at ``pole`` for
    ``eigenvalue`` (one of the two local exponents there).

    The normalized directions follow the parabolic-data table; the
    0-eigendirections over 0 and 1 are returned as [u:1], or as [1:0]
    with ``at_infinity`` set when the chart coordinate u is infinite.
    """
    lam0, lam1 = pole.exponents
    if lam0 == lam1:
        raise DegenerateSpectrum("coincident local exponents")
    if not (np.isclose(eigenvalue, lam0) or np.isclose(eigenvalue, lam1)):
        raise DegenerateSpectrum(f"{eigenvalue} is not a local exponent at {pole.value}")
    z, c = sys.z, sys.c
    if eigenvalue != 0:
        if pole is Pole.ZERO:
            return Eigendirection(0j, 1 + 0j)
        if pole is Pole.ONE:
            return Eigendirection(1 + 0j, 1 + 0j)
        if pole is Pole.INF:
            return _kernel_direction(residue(sys, pole) - eigenvalue * np.eye(2))
        i = FINITE_POLES.index(pole) - 2
        return Eigendirection(z[i], 1 + 0j)
    if pole is Pole.INF:
        return Eigendirection(1 + 0j, 0j)
    if pole is Pole.ZERO:
        den = 2 * np.sum(c * (1 - z))
        if den == 0:
            return Eigendirection(1 + 0j, 0j, at_infinity=True)
        return Eigendirection(1 / den, 1 + 0j)
    if pole is Pole.ONE:
        den = 2 * np.sum(c * z)
        if den == 0:
            return Eigendirection(1 + 0j, 0j, at_infinity=True)
        return Eigendirection(1 + 1 / den, 1 + 0j)
    # 0-eigendirection over t_i: kernel of the residue
    return _kernel_direction(residue(sys, pole))


def _kernel_direction(R: np.ndarray) -> Eigendirection:
    # rows are proportional for a rank-one matrix; use the larger one
    row = R[0] if np.abs(R[0]).sum() >= np.abs(R[1]).sum() else R[1]
    u, v = -row[1], row[0]
    if v == 0:
        return Eigendirection(1 + 0j, 0j, at_infinity=True)
    return Eigendirection(u / v, 1 + 0j)


@dataclass(frozen=True)
class SigmaReport:
    in_sigma: bool
    Q0: complex
    Q1: complex
    Qinf: complex
    reducible_residual: complex


def q_invariants(t: PoleConfig, c) -> tuple[complex, complex, complex]:
    """(Q0, Q1, Qinf) with Q0 = t2 t3 c1 + t1 t3 c2 + t1 t2 c3,
    Qinf = t1 c1 + t2 c2 + t3 c3 and Q1 = Q0 + Qinf."""
    t1, t2, t3 = t.t
    c1, c2, c3 = c
    Q0 = t2 * t3 * c1 + t1 * t3 * c2 + t1 * t2 * c3
    Qinf = t1 * c1 + t2 * c2 + t3 * c3
    return Q0, Q0 + Qinf, Qinf


def sigma_membership(sys: FuchsianSystem, tol: float) -> SigmaReport:
    z, c = sys.z, sys.c
    defect = max(abs(z[0] - z[1]), abs(z[1] - z[2]), abs(c.sum()))
    Q0, Q1, Qinf = q_invariants(sys.poles, c)
    zz = z[0]
    return SigmaReport(
        in_sigma=bool(defect < tol),
        Q0=Q0,
        Q1=Q1,
        Qinf=Qinf,
        reducible_residual=Q0 * zz + Q1 * (zz - 1) + Qinf,
    )


def sigma_system(t, z: complex, c1: complex, c2: complex) -> FuchsianSystem:
    """The point of Sigma with z1 = z2 = z3 = z and c3 = -c1 - c2."""
    return FuchsianSystem(PoleConfig.of(t), [z, z, z], [c1, c2, -c1 - c2])
