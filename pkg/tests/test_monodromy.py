import numpy as np
import pytest

from garnierlab.errors import (
    BranchApproach,
    CentralRepresentation,
    OddWord,
    PathPlanningFailure,
    ReducibleDeterminant,
)
from garnierlab.fuchsian import ALL_POLES, FINITE_POLES, FuchsianSystem, Pole, PoleConfig, sigma_system
from garnierlab.genus2 import QuadraticDifferential, phi_lift, section_phi
from garnierlab.monodromy import (
    DEFAULT_WORDS,
    MonodromyRep,
    choose_basepoint,
    default_basepoint,
    even_word_traces,
    fuchsian_monodromy,
    hyperelliptic_continuation,
    is_irreducible,
    rh_jacobian_rank,
    rh_trace_map,
    standard_loops,
    two_point_loop,
    word_product,
)
from garnierlab.numkit import Polyline
from garnierlab.transversality import reducible_z

T = PoleConfig(2.1 + 0.4j, -1.3 + 1.1j, 0.6 - 1.7j)


@pytest.fixture(scope="module")
def rep():
    return fuchsian_monodromy(FuchsianSystem(T, [0.2, -0.1 + 0.3j, 0.4j], [0.3, -0.2 + 0.1j, 0.1 - 0.4j]))


def test_loops_wind_once():
    loops = standard_loops(T, default_basepoint(T))
    assert [lp.pole for lp in loops][-1] is Pole.INF
    for lp in loops:
        for p in FINITE_POLES:
            want = -1 if lp.pole is Pole.INF else int(p is lp.pole)
            assert abs(lp.winding(T.location(p)) - want) < 1e-6


def test_real_poles_default_basepoint():
    assert len(standard_loops((2, 3, 5))) == 6


def test_basepoint_on_pole():
    with pytest.raises(PathPlanningFailure):
        standard_loops(T, T.t2)


def test_basepoint_fallback_is_deterministic():
    t = PoleConfig(2.5j, 1.2j, -1)  # rays from the default basepoint graze 0 and t2
    b = choose_basepoint([t])
    assert b == choose_basepoint([t])
    assert len(standard_loops(t, b)) == 6


def test_local_invariants(rep):
    r = rep.invariant_residuals()
    assert r["max_abs_trace"] < 1e-6
    assert r["max_det_plus_one"] < 1e-8
    assert r["product_defect"] < 1e-6


def test_squares_are_identity(rep):
    for k in range(1, 7):
        assert abs(np.trace(word_product(rep, (k, k))) - 2) < 1e-6


def test_even_words(rep):
    tr = even_word_traces(rep)
    assert tr.shape == (7,) and np.all(np.isfinite(tr))
    for w in DEFAULT_WORDS:
        assert abs(np.linalg.det(word_product(rep, w)) - 1) < 1e-8
    with pytest.raises(OddWord):
        even_word_traces(rep, [(1, 2, 3)])


def test_conjugation_invariance(rep):
    g = np.array([[1.3, 0.2 - 1j], [0.4j, 0.9]])
    a = even_word_traces(rep)
    b = even_word_traces(rep.conjugated(g))
    assert np.max(np.abs(a - b)) < 1e-8 * max(1, np.max(np.abs(a)))


def test_irreducibility():
    d1 = np.diag([1, -1]).astype(complex)
    d2 = np.diag([2, -0.5]).astype(complex)
    diag = MonodromyRep(np.array([d1, d2, d1, d2, d1, d2]), order=tuple(ALL_POLES))
    assert not is_irreducible(diag)
    assert not is_irreducible(diag, subgroup="full")
    with pytest.raises(CentralRepresentation):
        is_irreducible(MonodromyRep(np.array([np.eye(2)] * 6), order=tuple(ALL_POLES)))
    c1, c2 = 0.3 - 0.1j, 0.2 + 0.25j
    z = reducible_z(T, c1, c2, -c1 - c2)
    red = fuchsian_monodromy(sigma_system(T, z, c1, c2))
    assert not is_irreducible(red)
    # the six local monodromies themselves share no line: odd words swap the two even lines
    assert is_irreducible(red, subgroup="full")
    gen = fuchsian_monodromy(sigma_system(T, 0.3 + 0.1j, c1, c2))
    assert is_irreducible(gen) and is_irreducible(gen, subgroup="full")


@pytest.fixture(scope="module")
def lifted():
    nu = QuadraticDifferential(-0.2 + 0.1j, 0.3, 0.45 - 0.1j)
    z, c1, c2, c3 = section_phi(T, nu, 0)
    b = choose_basepoint([T])
    loops = standard_loops(T, b)
    rep = fuchsian_monodromy(sigma_system(T, z, c1, c2), loops, 1e-11)
    return phi_lift(T, z, c1, c2, c3), loops, rep, nu, b


def test_hyperelliptic_trivial_loop(lifted):
    g2 = lifted[0]
    path = Polyline([5 + 5j, 6 + 5j, 6 + 6j, 5 + 6j, 5 + 5j])
    H = hyperelliptic_continuation(g2, path, 1, 1e-11)
    assert H.sheet == 1 and np.max(np.abs(H.matrix - np.eye(2))) < 1e-6


def test_hyperelliptic_matches_even_words(lifted):
    g2, loops, rep, _, _ = lifted
    for j, k in [(Pole.ZERO, Pole.ONE), (Pole.T1, Pole.T3), (Pole.ONE, Pole.T2)]:
        H = hyperelliptic_continuation(g2, two_point_loop(loops, j, k), 1, 1e-11)
        assert H.sheet == 1
        assert abs(np.linalg.det(H.matrix) - 1) < 1e-6
        want = np.trace(word_product(rep, (ALL_POLES.index(j) + 1, ALL_POLES.index(k) + 1)))
        assert abs(np.trace(H.matrix) - want) < 1e-6


def test_hyperelliptic_single_branch_point_flips_sheet(lifted):
    g2, loops = lifted[0], lifted[1]
    H = hyperelliptic_continuation(g2, loops[0].path, 1, 1e-10)
    assert H.sheet == -1


def test_hyperelliptic_branch_approach(lifted):
    with pytest.raises(BranchApproach):
        hyperelliptic_continuation(lifted[0], Polyline([-1, 1e-3j, 1]), 1)


def test_branch_swap(lifted):
    nu, b = lifted[3], lifted[4]
    a = rh_trace_map(T, nu, tol=1e-12, root_choice=0, basepoint=b)
    c = rh_trace_map(T, nu, tol=1e-12, root_choice=1, basepoint=b)
    assert np.max(np.abs(a - c)) < 1e-8


def test_reducible_nu():
    with pytest.raises(ReducibleDeterminant):
        rh_trace_map(T, (1, 2, 1))


def test_rank_six_independent_of_word_order():
    nu = (-0.2 + 0.1j, 0.3, 0.45 - 0.1j)
    a = rh_jacobian_rank(T, nu)
    b = rh_jacobian_rank(T, nu, words=DEFAULT_WORDS[::-1])
    assert a.rank == b.rank == 6
    assert np.allclose(a.jacobian[::-1], b.jacobian)
