import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from garnierlab.errors import (
    DegreeCollapse,
    ExceptionalDecomposition,
    InvariantHorizontal,
    NotInSigma,
    RootAtInfinity,
)
from garnierlab.fuchsian import PoleConfig, q_invariants
from garnierlab.genus2 import (
    INF,
    Genus2System,
    QuadraticDifferential,
    det_quadratic,
    is_reducible_nu,
    phi_lift,
    section_phi,
    self_intersection,
    self_intersection_report,
    tangency_points,
    twelve_special_fibers,
)

T = PoleConfig(2.1 + 0.4j, -1.3 + 1.1j, 0.6 - 1.7j)

unit = st.complex_numbers(max_magnitude=0.7, allow_nan=False, allow_infinity=False)


def irreducible(b0, b1, g0, g1):
    s = Genus2System(T, b0, b1, g0, g1)
    return s if abs(s.resultant) > 1e-3 * s.scale() ** 2 else None


def test_det_quadratic_simple():
    nu = det_quadratic(Genus2System(T, 0, 1, 0, 1))
    assert nu.vector().tolist() == [0, 0, -1]


@given(unit, unit, unit, unit, st.complex_numbers(min_magnitude=0.1, max_magnitude=10))
def test_nu_gauge_invariant_and_discriminant(b0, b1, g0, g1, lam):
    s = Genus2System(T, b0, b1, g0, g1)
    nu = det_quadratic(s)
    s2 = Genus2System(T, lam**2 * b0, lam**2 * b1, g0 / lam**2, g1 / lam**2)
    assert np.allclose(det_quadratic(s2).vector(), nu.vector(), atol=1e-12)
    assert abs(nu.discriminant - s.resultant**2) < 1e-12


def test_is_reducible_nu():
    assert is_reducible_nu((1, 2, 1), 1e-12)
    assert not is_reducible_nu((0, 1, 0), 1e-12)
    assert is_reducible_nu(det_quadratic(Genus2System(T, 0.3, 0.2, 0.6, 0.4)), 1e-12)


def test_phi_lift_coefficients():
    c = (0.3, -0.1j, -0.3 + 0.1j)
    g = phi_lift(T, 0, *c)
    assert (g.beta0, g.beta1) == (0, -0.5)
    Q0, _, Qinf = q_invariants(T, c)
    assert g.gamma1 == -Qinf and g.gamma0 == -Q0
    with pytest.raises(NotInSigma):
        phi_lift(T, 0, 1, 1, 1)


@settings(max_examples=60)
@given(unit, unit, unit, st.sampled_from([0, 1]))
def test_section_round_trip(n0, n1, n2, choice):
    nu = QuadraticDifferential(n0, n1, n2)
    if abs(n2) < 1e-2 or abs(nu.discriminant) < 1e-3:
        return
    try:
        z, c1, c2, c3 = section_phi(T, nu, choice)
    except ExceptionalDecomposition:
        return
    back = det_quadratic(phi_lift(T, z, c1, c2, c3))
    assert np.max(np.abs(back.vector() - nu.vector())) < 1e-10 * max(1, np.max(np.abs(nu.vector())))


def test_section_z_and_branches():
    nu = QuadraticDifferential(-0.2, 0.3 + 0.1j, 0.5)
    roots = sorted(np.roots([nu.nu2, nu.nu1, nu.nu0]), key=lambda r: (r.real, r.imag))
    a = section_phi(T, nu, 0)
    b = section_phi(T, nu, 1)
    assert abs(a[0] - roots[0] / (2 * roots[0] - 1)) < 1e-12
    assert abs(a[0] - b[0]) > 1e-3


def test_section_errors():
    with pytest.raises(RootAtInfinity):
        section_phi(T, (1, 1, 0))
    # roots 1/2 and 3: x_beta = 1/2 for the first choice
    nu = QuadraticDifferential(1.5, -3.5, 1)
    with pytest.raises(ExceptionalDecomposition):
        section_phi(T, nu, 0)


@settings(max_examples=40)
@given(unit, unit, unit, unit, unit)
def test_two_tangencies(b0, b1, g0, g1, p):
    s = irreducible(b0, b1, g0, g1)
    if s is None:
        return
    try:
        pts = tangency_points(s, p)
    except InvariantHorizontal:
        return
    assert sum(x.multiplicity for x in pts) == 2


def test_tangency_special_heights():
    s = Genus2System(T, 0.3, -0.2j, 0.1 + 0.4j, 0.5)
    # gamma1 p^2 = beta1: double zero at infinity
    p = np.sqrt(s.beta1 / s.gamma1)
    assert tangency_points(s, p) == [tangency_points(s, p)[0]]
    assert tangency_points(s, p)[0].x == INF and tangency_points(s, p)[0].multiplicity == 2
    # p = infinity: x = -gamma0 / gamma1
    pts = tangency_points(s, INF)
    assert abs(pts[0].x + s.gamma0 / s.gamma1) < 1e-14


def test_invariant_horizontal():
    s = Genus2System(T, 0.2, 0.4, 0.2, 0.4)  # reducible, p = 1 kills the form
    with pytest.raises(InvariantHorizontal):
        tangency_points(s, 1)


@settings(max_examples=40)
@given(unit, unit, unit, unit)
def test_twelve_fibers_and_self_intersection(b0, b1, g0, g1):
    s = irreducible(b0, b1, g0, g1)
    if s is None:
        return
    fibers = twelve_special_fibers(s)
    assert sum(f.multiplicity for f in fibers) == 12
    for f in fibers:
        pts = tangency_points(s, f.p)
        assert len(pts) == 1 and pts[0].multiplicity == 2
    rep = self_intersection_report(s)
    assert rep.c1_wedge == -2 and rep.value == -4 == self_intersection(s)


def test_generic_fibers_are_distinct():
    s = Genus2System(T, 0.31 - 0.2j, -0.17j, 0.12 + 0.43j, 0.5 - 0.05j)
    ps = [f.p for f in twelve_special_fibers(s)]
    assert len(ps) == 12
    assert min(abs(a - b) for i, a in enumerate(ps) for b in ps[i + 1 :]) > 1e-6
    assert self_intersection_report(s).generic


def test_non_generic_flag():
    # beta1 = 0 puts the fiber over infinity at p = 0 with multiplicity 2
    s = Genus2System(T, 0.3, 0, 0.1 + 0.4j, 0.5)
    rep = self_intersection_report(s)
    assert not rep.generic and rep.value == -4


def test_reducible_degree_collapse():
    with pytest.raises(DegreeCollapse):
        twelve_special_fibers(Genus2System(T, 0.2, 0.4, 0.1, 0.2))
