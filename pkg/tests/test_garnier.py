import numpy as np
import pytest
import sympy as sp

from garnierlab.darboux import DarbouxPoint, psi
from garnierlab.errors import CriticalLocus, LeftParameterSpace
from garnierlab.fuchsian import FuchsianSystem
from garnierlab.garnier import (
    flow_along,
    garnier_vector_field,
    hamiltonian,
    hamiltonian_gradient,
    isomonodromic_flow,
)
from garnierlab.monodromy import choose_basepoint, even_word_traces, fuchsian_monodromy, standard_loops

from conftest import cunit


@pytest.fixture
def d(rng):
    return DarbouxPoint(cunit(rng, 3, 2.0), cunit(rng, 3))


def sympy_hamiltonian(i, form):
    """H_i written out symbolically, independent of the numpy evaluator."""
    q = sp.symbols("q1:4")
    p = sp.symbols("p1:4")
    ts = sp.symbols("t1:4")
    x = sp.Symbol("x")
    Ft = (x - ts[0]) * (x - ts[1]) * (x - ts[2])
    F = x * (x - 1) * Ft
    if form == "half-derivative":
        K = sp.diff(F, x) / 2
    else:
        K = (x * (x - 1) * sp.diff(Ft, x) - (2 * x - 1) * Ft) / 2
    ti = ts[i - 1]
    Fi = sp.cancel(F / (x - ti))
    den = ti * (ti - 1) * sp.prod([tj - ti for tj in ts if tj != ti])
    H = 0
    for j in range(3):
        others = [k for k in range(3) if k != j]
        w = sp.prod([(q[k] - ti) / (q[k] - q[j]) for k in others])
        at = {x: q[j]}
        H += w * (F.subs(at) * p[j] ** 2 - K.subs(at) * p[j] + Fi.subs(at) * p[j])
    H = H / den
    args = (*ts, *q, *p)
    grad = [sp.diff(H, v) for v in (*q, *p)]
    return sp.lambdify(args, H, "numpy"), sp.lambdify(args, grad, "numpy")


@pytest.mark.parametrize("form", ["isomonodromic", "half-derivative"])
@pytest.mark.parametrize("i", [1, 2, 3])
def test_against_symbolic_form(t, d, i, form):
    H, G = sympy_hamiltonian(i, form)
    args = (*t.t, *d.q, *d.p)
    want = complex(H(*args))
    assert abs(hamiltonian(t, d, i, form) - want) < 1e-10 * abs(want)
    gq, gp = hamiltonian_gradient(t, d, i, form)
    g = np.array(G(*args), dtype=complex)
    assert np.max(np.abs(np.r_[gq, gp] - g)) < 1e-10 * np.max(np.abs(g))


def test_vanishes_on_zero_momenta(t, d):
    d0 = DarbouxPoint(d.q, [0, 0, 0])
    for i in (1, 2, 3):
        assert hamiltonian(t, d0, i) == 0
        _, dp = garnier_vector_field(t, d0, i)
        assert np.max(np.abs(dp)) < 1e-13


def test_gradient_matches_finite_differences(t, d):
    h = 1e-6
    for i in (1, 2, 3):
        gq, gp = hamiltonian_gradient(t, d, i)
        v = d.vector()
        fd = []
        for k in range(6):
            e = np.zeros(6)
            e[k] = h
            fp = hamiltonian(t, DarbouxPoint.from_vector(v + e), i)
            fm = hamiltonian(t, DarbouxPoint.from_vector(v - e), i)
            fd.append((fp - fm) / (2 * h))
        g = np.r_[gq, gp]
        assert np.max(np.abs(g - fd)) < 1e-7 * np.max(np.abs(g))


def test_collision_is_critical(t):
    with pytest.raises(CriticalLocus):
        hamiltonian(t, DarbouxPoint([0.5, 0.5, 2], [1, 1, 1]), 1)


def test_zero_length_path_keeps_point(t, d):
    assert isomonodromic_flow([t, t], d, 1e-10).end[1] == d


def test_forward_then_back(t, d):
    tol = 1e-11
    t1, d1 = flow_along(t, d, 2, 0.05 + 0.02j, tol)
    _, d2 = isomonodromic_flow([t1, t], d1, tol).end
    assert np.max(np.abs(d2.vector() - d.vector())) < 100 * tol * max(1, np.max(np.abs(d.vector())))


def test_flows_commute(t, d):
    tol = 1e-12
    a = t.t
    b = a + [0.01, 0, 0]
    c = a + [0.01, 0.01, 0]
    e = a + [0, 0.01, 0]
    one = isomonodromic_flow([a, b, c], d, tol).end[1]
    two = isomonodromic_flow([a, e, c], d, tol).end[1]
    assert np.max(np.abs(one.vector() - two.vector())) < 1e-6


def test_leaving_parameter_space(t, d):
    with pytest.raises(LeftParameterSpace):
        isomonodromic_flow([t, (1.0005, t.t2, t.t3)], d, 1e-8)


def _traces(t, d, b):
    z, c = psi(t, d)
    rep = fuchsian_monodromy(FuchsianSystem(t, z, c), standard_loops(t, b), 1e-11)
    return even_word_traces(rep)


def test_only_isomonodromic_form_preserves_traces(t, rng):
    d = DarbouxPoint(cunit(rng, 3, 1.5) + 0.2, cunit(rng, 3, 0.3))
    t1 = (t.t1 + 0.1, t.t2, t.t3)
    b = choose_basepoint([t, t1])
    before = _traces(t, d, b)
    after = {}
    for form in ("isomonodromic", "half-derivative"):
        d1 = isomonodromic_flow([t, t1], d, 1e-11, form=form).end[1]
        after[form] = np.max(np.abs(_traces(t1, d1, b) - before))
    assert after["isomonodromic"] < 1e-6
    assert after["half-derivative"] > 1e-4
