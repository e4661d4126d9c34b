"""Transversality of the isomonodromy foliation to the locus Sigma of
systems lifting to the trivial bundle, and the tangent cone of the
strictly semi-stable hypersurface along it.

On Sigma^Darb = {q1 = 0, q2 = 1, p3 = 0} with coordinates (p1, p2, q3)
the determinant of (V_i . F_j), F = (q1, q2, p3), has the closed form

    (T (q3-1)^2 p1 + U q3^2 p2) / (8 (t1-t2)(t2-t3)(t1-t3) q3^2 (q3-1)^2)

with T = t1 t2 t3 and U = (t1-1)(t2-1)(t3-1). It is exact for the fields of
the ``"half-derivative"`` Hamiltonian; the isomonodromic fields give its negative,
so the vanishing locus is the same.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .darboux import sigma_darboux_point
from .errors import NotInSigma, PoleOfFormula
from .fuchsian import PoleConfig, q_invariants
from .garnier import hamiltonian_gradient

__all__ = [
    "ConicForm",
    "DetValue",
    "transversality_det_closed",
    "transversality_det_closed_scaled",
    "transversality_det_numeric",
    "reducible_residual_sigma",
    "reducible_residual_cross",
    "reducible_z",
    "tangent_cone_conic",
    "VANISH_TOL",
]

VANISH_TOL = 1e-8


def _tu(t: PoleConfig) -> tuple[complex, complex]:
    tv = t.t
    return complex(np.prod(tv)), complex(np.prod(tv - 1))


@dataclass(frozen=True)
class DetValue:
    value: complex
    scale: float  # largest monomial of the numerator, over the same denominator

    @property
    def relative(self) -> float:
        return abs(self.value) / self.scale if self.scale else 0.0


def transversality_det_closed_scaled(t, p1, p2, q3) -> DetValue:
    t = PoleConfig.of(t)
    if q3 == 0 or q3 == 1:
        raise PoleOfFormula("q3 must avoid 0 and 1")
    t1, t2, t3 = t.t
    T, U = _tu(t)
    a = T * (q3 - 1) ** 2 * p1
    b = U * q3**2 * p2
    den = 8 * (t1 - t2) * (t2 - t3) * (t1 - t3) * q3**2 * (q3 - 1) ** 2
    return DetValue(complex((a + b) / den), max(abs(a), abs(b)) / abs(den))


def transversality_det_closed(t, p1, p2, q3) -> complex:
    return transversality_det_closed_scaled(t, p1, p2, q3).value


def transversality_matrix(t, p1, p2, q3, form: str = "isomonodromic") -> np.ndarray:
    d = sigma_darboux_point(p1, p2, q3)
    rows = []
    for i in (1, 2, 3):
        gq, gp = hamiltonian_gradient(t, d, i, form)
        rows.append([gp[0], gp[1], -gq[2]])
    return np.array(rows, dtype=complex)


def transversality_det_numeric(t, p1, p2, q3, form: str = "isomonodromic") -> complex:
    """det(V_i . F_j) at the point (0, 1, q3; p1, p2, 0), from the fields."""
    return complex(np.linalg.det(transversality_matrix(PoleConfig.of(t), p1, p2, q3, form)))


def _sigma_c(c1, c2, c3) -> np.ndarray:
    c = np.array([c1, c2, c3], dtype=complex)
    if abs(c.sum()) > 1e-10 * max(1.0, float(np.max(np.abs(c)))):
        raise NotInSigma("c1 + c2 + c3 != 0")
    return c


def reducible_residual_sigma(t, z, c1, c2, c3) -> complex:
    """Q0 z + Q1 (z - 1) + Qinf; zero exactly on reducible Sigma points."""
    t = PoleConfig.of(t)
    Q0, Q1, Qinf = q_invariants(t, _sigma_c(c1, c2, c3))
    return complex(Q0 * z + Q1 * (z - 1) + Qinf)


def reducible_residual_cross(t, z, c1, c2, c3) -> complex:
    """The same locus written as z Qinf - (1 - 2z) Q0."""
    t = PoleConfig.of(t)
    Q0, _, Qinf = q_invariants(t, _sigma_c(c1, c2, c3))
    return complex(z * Qinf - (1 - 2 * z) * Q0)


def reducible_z(t, c1, c2, c3) -> complex:
    """The z making (z; c) reducible: z = Q0 / (Qinf + 2 Q0)."""
    Q0, _, Qinf = q_invariants(PoleConfig.of(t), _sigma_c(c1, c2, c3))
    return complex(Q0 / (Qinf + 2 * Q0))


@dataclass(frozen=True)
class ConicForm:
    matrix: np.ndarray
    det: complex
    scale: float  # largest monomial in the determinant expansion
    smooth: bool


def _det_monomials(M: np.ndarray) -> list[complex]:
    return [
        M[0, 0] * M[1, 1] * M[2, 2],
        2 * M[0, 1] * M[1, 2] * M[0, 2],
        -M[0, 0] * M[1, 2] ** 2,
        -M[1, 1] * M[0, 2] ** 2,
        -M[2, 2] * M[0, 1] ** 2,
    ]


def tangent_cone_conic(
    t, z1, c1, c2, tol: float = VANISH_TOL, form: str = "symmetric"
) -> ConicForm:
    """Symmetric matrix of the tangent-cone quadratic form in (Z1, Z2, Z3).

    ``form="symmetric"`` uses (2 t3 - 1)(t1 - t2)(c1 + c2) for the Z3^2
    coefficient, the value symmetric to the Z2^2 coefficient under
    exchanging the indices 2 and 3; with it the conic is singular exactly on
    the reducible locus. ``form="shifted"`` uses (t3 - 1)(t1 - t2)(c1 + c2),
    for which that equivalence fails.
    """
    t = PoleConfig.of(t)
    t1, t2, t3 = t.t
    if form == "symmetric":
        k33 = (2 * t3 - 1) * (t1 - t2) * (c1 + c2)
    elif form == "shifted":
        k33 = (t3 - 1) * (t1 - t2) * (c1 + c2)
    else:
        raise ValueError(f"unknown conic form {form!r}")
    k12 = (2 * t2 * z1 - t2 - z1) * (t1 - t3)
    k13 = -(2 * t3 * z1 - t3 - z1) * (t1 - t2)
    k23 = -c1 * (2 * t2 - 1) * (t1 - t3) - c2 * (
        2 * t1 * t2 + 2 * t3 * t1 - 4 * t3 * t2 - 2 * t1 + t2 + t3
    )
    k22 = c2 * (2 * t2 - 1) * (t1 - t3)
    M = np.array(
        [[0, k12 / 2, k13 / 2], [k12 / 2, k22, k23 / 2], [k13 / 2, k23 / 2, k33]],
        dtype=complex,
    )
    det = complex(np.sum(_det_monomials(M)))
    scale = max(float(max(abs(m) for m in _det_monomials(M))), 1e-300)
    return ConicForm(M, det, scale, bool(abs(det) > tol * scale))
