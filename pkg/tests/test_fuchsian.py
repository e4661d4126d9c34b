import numpy as np
import pytest

from garnierlab.errors import InvalidPoleConfig, PoleEvaluation
from garnierlab.fuchsian import (
    ALL_POLES,
    FuchsianSystem,
    Pole,
    PoleConfig,
    connection_coefficient,
    eigendirection,
    q_invariants,
    residue,
    residues,
    sigma_membership,
    sigma_system,
)

from conftest import cunit


@pytest.fixture
def sys(t, rng):
    return FuchsianSystem(t, cunit(rng, 3), cunit(rng, 3))


def test_pole_config_validation():
    for bad in [(0, 2, 3), (1, 2, 3), (2, 2, 3), (np.inf, 2, 3)]:
        with pytest.raises(InvalidPoleConfig):
            PoleConfig(*bad)


def test_residue_at_one_without_c(t):
    s = FuchsianSystem(t, [0.1, 0.2, 0.3], [0, 0, 0])
    assert np.allclose(residue(s, Pole.ONE), [[0, -0.5], [0, -0.5]])


def test_residues_sum_to_zero(sys):
    R = np.array([residue(sys, p) for p in ALL_POLES])
    assert np.max(np.abs(R.sum(axis=0))) < 1e-12
    assert residues(sys).shape == (5, 2, 2)


@pytest.mark.parametrize("pole", ALL_POLES)
def test_residue_spectrum(sys, pole):
    ev = np.sort_complex(np.linalg.eigvals(residue(sys, pole)))
    assert np.allclose(ev, np.sort_complex(np.array(pole.exponents, complex)), atol=1e-12)


def test_theta_block_entry(t, sys):
    # x -> t1 asymptotics: (x - t1) A(x) -> residue, whose (2,2) entry is 1/2 + c1 z1
    x = t.t1 + 1e-7
    A = connection_coefficient(sys, x) * (x - t.t1)
    assert abs(A[1, 1] - (0.5 + sys.c[0] * sys.z[0])) < 1e-5
    assert abs(residue(sys, Pole.T1)[0, 1] - (sys.z[0] / 2 + sys.c[0] * sys.z[0] ** 2)) < 1e-14


def test_connection_derivative_matches_difference(sys):
    x, h = 0.4 + 2.2j, 1e-6
    R = residues(sys)
    poles = sys.poles.finite_poles()
    dA = -sum(R[k] / (x - a) ** 2 for k, a in enumerate(poles))
    fd = (connection_coefficient(sys, x + h) - connection_coefficient(sys, x - h)) / (2 * h)
    assert np.max(np.abs(fd - dA)) < 1e-7


def test_evaluation_at_pole(sys):
    with pytest.raises(PoleEvaluation):
        connection_coefficient(sys, sys.poles.t2)


def test_eigendirections(sys):
    assert eigendirection(sys, Pole.ZERO, -0.5).vector().tolist() == [0, 1]
    assert eigendirection(sys, Pole.INF, 0).vector().tolist() == [1, 0]
    s = np.sum(sys.c * (1 - sys.z))
    e = eigendirection(sys, Pole.ZERO, 0)
    assert abs(e.u - 1 / (2 * s)) < 1e-14 and e.v == 1
    for pole in ALL_POLES:
        for lam in pole.exponents:
            e = eigendirection(sys, pole, lam)
            R = residue(sys, pole)
            v = e.vector()
            assert np.max(np.abs(R @ v - lam * v)) < 1e-12 * max(1, np.max(np.abs(v)))


def test_eigendirection_at_infinity_of_chart(t):
    s = FuchsianSystem(t, [0.5, 0.5, 0.5], [1, -1, 0])  # sum c (1 - z) = 0
    e = eigendirection(s, Pole.ZERO, 0)
    assert e.at_infinity and e.vector().tolist() == [1, 0]


def test_sigma_membership(t, rng):
    a, c1, c2 = cunit(rng, 3)
    assert sigma_membership(sigma_system(t, a, c1, c2), 1e-10).in_sigma
    assert not sigma_membership(FuchsianSystem(t, [0, 0, 1], [c1, c2, -c1 - c2]), 1e-10).in_sigma


def test_reducible_residual_identity(t, rng):
    for _ in range(100):
        z, c1, c2 = cunit(rng, 3)
        c = [c1, c2, -c1 - c2]
        rep = sigma_membership(sigma_system(t, z, c1, c2), 1e-10)
        Q0, Q1, Qinf = q_invariants(t, c)
        assert abs(Q1 - Q0 - Qinf) < 1e-15
        cross = z * Qinf - (1 - 2 * z) * Q0
        assert abs(rep.reducible_residual - cross) < 1e-12
