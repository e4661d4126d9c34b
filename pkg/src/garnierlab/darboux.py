"""Darboux coordinates (q, p) for the Garnier system and the degree-6 map
Psi from (q, p) to the moduli chart (z, c).

The q_k are the three zeros of the (2,1) entry of the connection matrix,
i.e. the points where [1:0] is an eigenvector, and p_k is the matching
eigenvalue A_11(q_k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CriticalLocus,
    CubicDegenerate,
    IndeterminateP,
    LambdaDegenerate,
    NotInSigma,
    PolarLocus,
    SpecialSubset,
)
from .fuchsian import PoleConfig, q_invariants
from .numkit import jacobian_fd, poly_roots

__all__ = [
    "DarbouxPoint",
    "psi",
    "psi_inverse",
    "darboux_cubic",
    "sigma_darb_to_sigma",
    "sigma_to_sigma_darb",
    "sigma_darboux_point",
    "symplectic_defect",
    "symplectic_form",
    "admissible",
    "GUARD",
]

# relative guard band used for admissibility of samples
GUARD = 1e-6
# below this relative size a rational map is treated as hitting its pole
_EXACT = 1e-13


@dataclass(frozen=True)
class DarbouxPoint:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.array(self.q, dtype=complex).reshape(3))
        object.__setattr__(self, "p", np.array(self.p, dtype=complex).reshape(3))

    @classmethod
    def from_vector(cls, v) -> "DarbouxPoint":
        v = np.asarray(v, dtype=complex)
        return cls(v[:3], v[3:])

    def vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    def permuted(self, perm) -> "DarbouxPoint":
        perm = list(perm)
        return DarbouxPoint(self.q[perm], self.p[perm])

    def __eq__(self, other):
        return (
            isinstance(other, DarbouxPoint)
            and np.array_equal(self.q, other.q)
            and np.array_equal(self.p, other.p)
        )

    __hash__ = None


def _scale(*arrays) -> float:
    return max(1.0, *(float(np.max(np.abs(a))) for a in arrays))


def _check_distinct(q: np.ndarray, rel: float = _EXACT) -> None:
    s = _scale(q)
    for i in range(3):
        for j in range(i + 1, 3):
            if abs(q[i] - q[j]) <= rel * s:
                raise CriticalLocus(f"q{i + 1} and q{j + 1} collide")


def _lambda(q: np.ndarray, p: np.ndarray, t: np.ndarray) -> complex:
    total = 0j
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        total += p[i] * np.prod(q[i] - t) / ((q[i] - q[j]) * (q[i] - q[k]))
    return total


def psi(t, d: DarbouxPoint) -> tuple[np.ndarray, np.ndarray]:
    """Map a Darboux point to (z, c); symmetric in the pairs (q_k, p_k)."""
    t = PoleConfig.of(t)
    tv = t.t
    q, p = d.q, d.p
    _check_distinct(q)
    lam = _lambda(q, p, tv)
    if abs(lam) <= _EXACT * _scale(p) * _scale(q, tv) ** 3:
        raise LambdaDegenerate("Lambda vanishes")
    z = np.empty(3, dtype=complex)
    c = np.empty(3, dtype=complex)
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        ti = tv.copy()
        ti[i] = 1.0
        z[i] = tv[i] * _lambda(q, p, ti) / lam
        c[i] = -np.prod(q - tv[i]) * lam / (
            tv[i] * (tv[i] - 1) * (tv[i] - tv[j]) * (tv[i] - tv[k])
        )
    return z, c


def darboux_cubic(t, z, c) -> np.ndarray:
    """Coefficients (low first) of the cubic whose roots are q1, q2, q3.

    It is x(x-1) A_21(x) (x-t1)(x-t2)(x-t3) for the connection at (z, c).
    """
    tv = PoleConfig.of(t).t
    z = np.asarray(z, dtype=complex)
    c = np.asarray(c, dtype=complex)
    P = np.zeros(4, dtype=complex)
    for i in range(3):
        others = [tv[j] for j in range(3) if j != i]
        lin = np.array([-tv[i] * (z[i] - 1), z[i] - tv[i]])
        P += c[i] * np.polynomial.polynomial.polymul(
            lin, np.polynomial.polynomial.polyfromroots(others)
        )
    return P


def _p_naive(q: complex, tv, z, c) -> complex:
    s = np.sum(c * z)
    return s / (q - 1) - np.sum(c * z / (q - tv))


def _p_cleared(k: int, q: np.ndarray, tv, z, L: complex) -> complex:
    # A_11(q_k) rewritten through the factorization of the cubic: the poles
    # at q = 1 and q = t_i cancel against the vanishing of the cubic there
    qo = [q[m] for m in range(3) if m != k]
    out = -L * np.prod([1 - x for x in qo]) / np.prod(1 - tv)
    for i in range(3):
        tj = [tv[j] for j in range(3) if j != i]
        out += (
            z[i]
            * L
            * np.prod([tv[i] - x for x in qo])
            / (tv[i] * (1 - tv[i]) * np.prod([tv[i] - u for u in tj]))
        )
    return out


def psi_inverse(t, z, c) -> DarbouxPoint:
    """One preimage of (z, c) under Psi, with q sorted by (real, imag)."""
    t = PoleConfig.of(t)
    tv = t.t
    z = np.asarray(z, dtype=complex)
    c = np.asarray(c, dtype=complex)
    P = darboux_cubic(t, z, c)
    L = P[3]
    if abs(L) <= _EXACT * _scale(c) * _scale(z, tv):
        raise CubicDegenerate("leading coefficient sum c_i (z_i - t_i) vanishes")
    q = np.array(sorted(poly_roots(P), key=lambda r: (r.real, r.imag)), dtype=complex)
    sc = t.scale()
    p = np.empty(3, dtype=complex)
    for k in range(3):
        near = min(abs(q[k] - 1), float(np.min(np.abs(q[k] - tv))))
        if near < 1e-4 * sc:
            p[k] = _p_cleared(k, q, tv, z, L)
        else:
            p[k] = _p_naive(q[k], tv, z, c)
        if not np.isfinite(p[k]):
            raise IndeterminateP(f"p{k + 1} is indeterminate at q = {q[k]}")
    return DarbouxPoint(q, p)


def _tu(t: PoleConfig) -> tuple[complex, complex]:
    tv = t.t
    return complex(np.prod(tv)), complex(np.prod(tv - 1))


def sigma_darb_to_sigma(t, p1, p2, q3) -> tuple[complex, complex, complex, complex]:
    """Psi restricted to {q1 = 0, q2 = 1, p3 = 0}; returns (z, c1, c2, c3)."""
    t = PoleConfig.of(t)
    tv = t.t
    T, U = _tu(t)
    core = T * (q3 - 1) * p1 - U * q3 * p2
    qd = q3 * (q3 - 1) * core
    ref = max(abs(T * (q3 - 1) * p1), abs(U * q3 * p2), 1e-300)
    if qd == 0 or abs(core) <= _EXACT * ref or abs(q3 * (q3 - 1)) <= _EXACT * _scale(q3):
        raise PolarLocus("Q^Darb vanishes")
    # 1 - 1/z = U q3 p2 / (T (q3-1) p1), solved for z
    z = T * (q3 - 1) * p1 / core
    lead = core / (q3 * (q3 - 1))
    c = []
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        c.append(lead * (q3 - tv[i]) / ((tv[i] - tv[j]) * (tv[i] - tv[k])))
    return complex(z), complex(c[0]), complex(c[1]), complex(c[2])


def sigma_to_sigma_darb(t, z, c1, c2, c3) -> tuple[complex, complex, complex]:
    """Inverse of :func:`sigma_darb_to_sigma`; returns (p1, p2, q3)."""
    t = PoleConfig.of(t)
    c = np.array([c1, c2, c3], dtype=complex)
    if abs(c.sum()) > 1e-10 * _scale(c):
        raise NotInSigma("c1 + c2 + c3 != 0")
    T, U = _tu(t)
    Q0, Q1, Qinf = q_invariants(t, c)
    ref = _scale(c) * t.scale() ** 2
    if min(abs(Q0), abs(Q1), abs(Qinf)) <= _EXACT * ref:
        raise SpecialSubset("Q0 * Q1 * Qinf = 0")
    return (
        complex(z * Q0 / T),
        complex((z - 1) * Q1 / U),
        complex(-Q0 / Qinf),
    )


def sigma_darboux_point(p1, p2, q3) -> DarbouxPoint:
    return DarbouxPoint([0, 1, q3], [p1, p2, 0])


def symplectic_form() -> np.ndarray:
    I = np.eye(3)
    Z = np.zeros((3, 3))
    return np.block([[Z, I], [-I, Z]])


def symplectic_defect(t, d: DarbouxPoint, h: float = 1e-5) -> float:
    """Frobenius norm of J^T Omega J - Omega for the Jacobian J of Psi."""
    t = PoleConfig.of(t)
    psi(t, d)  # surface domain errors before differencing

    def f(v):
        z, c = psi(t, DarbouxPoint.from_vector(v))
        return np.concatenate([z, c])

    J = jacobian_fd(f, d.vector(), h)
    om = symplectic_form()
    return float(np.linalg.norm(J.T @ om @ J - om))


def admissible(t, d: DarbouxPoint, guard: float = GUARD) -> bool:
    """True when d lies outside the guard bands of Psi."""
    t = PoleConfig.of(t)
    q = d.q
    s = _scale(q, t.t)
    if min(abs(q[0] - q[1]), abs(q[1] - q[2]), abs(q[0] - q[2])) <= guard * s:
        return False
    lam = _lambda(q, d.p, t.t)
    return abs(lam) > guard * _scale(d.p) * s**3
