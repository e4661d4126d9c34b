import numpy as np
import pytest

from garnierlab.darboux import (
    DarbouxPoint,
    admissible,
    darboux_cubic,
    psi,
    psi_inverse,
    sigma_darb_to_sigma,
    sigma_to_sigma_darb,
    symplectic_defect,
)
from garnierlab.errors import CriticalLocus, NotInSigma, SpecialSubset
from garnierlab.fuchsian import q_invariants
from garnierlab.numkit import poly_roots

from conftest import cunit


def random_point(t, rng):
    while True:
        d = DarbouxPoint(cunit(rng, 3, 2.0), cunit(rng, 3))
        if admissible(t, d):
            return d


def test_psi_symmetric_under_pair_permutation(t, rng):
    d = random_point(t, rng)
    z, c = psi(t, d)
    for perm in [(1, 0, 2), (2, 1, 0), (1, 2, 0)]:
        z2, c2 = psi(t, d.permuted(perm))
        assert np.max(np.abs(np.r_[z2 - z, c2 - c])) < 1e-12 * max(1, np.max(np.abs(np.r_[z, c])))


def test_round_trip(t, rng):
    for _ in range(100):
        z, c = cunit(rng, 3), cunit(rng, 3)
        d = psi_inverse(t, z, c)
        z2, c2 = psi(t, d)
        assert np.max(np.abs(np.r_[z2 - z, c2 - c])) < 1e-9


def test_cubic_roots_back_substitute(t, rng):
    P = darboux_cubic(t, cunit(rng, 3), cunit(rng, 3))
    for r in poly_roots(P):
        assert abs(np.polynomial.polynomial.polyval(r, P)) < 1e-10 * np.max(np.abs(P)) * max(1, abs(r)) ** 3


def test_collision_is_critical(t):
    with pytest.raises(CriticalLocus):
        psi(t, DarbouxPoint([0.3, 0.3, 2], [1, 2, 3]))
    with pytest.raises(CriticalLocus):
        symplectic_defect(t, DarbouxPoint([0.3, 0.3, 2], [1, 2, 3]))


def test_sigma_reverse_map(t, rng):
    z, c1, c2 = cunit(rng, 3)
    c = [c1, c2, -c1 - c2]
    Q0, _, Qinf = q_invariants(t, c)
    d = psi_inverse(t, [z] * 3, c)
    k = int(np.argmin(np.abs(d.q - (-Q0 / Qinf))))
    assert np.allclose(sorted(d.q, key=lambda r: (r.real, r.imag)),
                       sorted([0, 1, -Q0 / Qinf], key=lambda r: (complex(r).real, complex(r).imag)), atol=1e-10)
    assert abs(d.p[k]) < 1e-10
    i0 = int(np.argmin(np.abs(d.q)))
    assert abs(d.p[i0] - z * Q0 / np.prod(t.t)) < 1e-10


def test_sigma_maps(t, rng):
    for _ in range(100):
        p1, p2 = cunit(rng, 2)
        q3 = cunit(rng, half=2.0) + 3
        z, c1, c2, c3 = sigma_darb_to_sigma(t, p1, p2, q3)
        assert abs(c1 + c2 + c3) < 1e-12 * max(1, abs(c1), abs(c2))
        back = sigma_to_sigma_darb(t, z, c1, c2, c3)
        assert np.max(np.abs(np.array(back) - [p1, p2, q3])) < 1e-9


def test_c_vanishes_when_q3_hits_t(t):
    _, c1, _, _ = sigma_darb_to_sigma(t, 0.3, -0.2j, t.t1)
    assert abs(c1) < 1e-15


def test_sigma_preconditions(t):
    Q0 = lambda c: q_invariants(t, c)[0]
    with pytest.raises(NotInSigma):
        sigma_to_sigma_darb(t, 0.2, 1, 1, 1)
    # c orthogonal to (t2 t3, t1 t3, t1 t2) within c1 + c2 + c3 = 0 gives Q0 = 0
    t1, t2, t3 = t.t
    a, b, g = t2 * t3, t1 * t3, t1 * t2
    c = np.array([b - g, g - a, a - b])
    assert abs(Q0(c)) < 1e-12
    with pytest.raises(SpecialSubset):
        sigma_to_sigma_darb(t, 0.2, *c)


def test_symplectic_defect(t, rng):
    d = random_point(t, rng)
    d1 = symplectic_defect(t, d, h=1e-5)
    d2 = symplectic_defect(t, d, h=5e-6)
    assert d1 < 1e-6
    assert d2 <= 2 * d1 + 1e-9
