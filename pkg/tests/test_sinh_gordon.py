import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from indyn import fixtures
from indyn.core import XScan
from indyn.errors import DomainError
from indyn.sinh_gordon import (
    MINUS_INF,
    PLUS_INF,
    SgConfig,
    cauchy_matrix_v,
    hamiltonian,
    sg_eq10_residual,
    sg_factor,
    sg_roots_at_time,
    simulate_sg,
    to_lab,
    to_lightcone,
    two_body_lab_trajectory,
    _scaled_factor,
)

LN2 = math.log(2.0)


def single(p, q0=0.0, eps=-1):
    return SgConfig((complex(p),), (complex(q0),), (eps,), XScan(), "lightcone", 1e-13)


@given(st.lists(st.floats(0.1, 5), min_size=1, max_size=5))
def test_cauchy_symmetry(p):
    V = cauchy_matrix_v(p)
    assert np.allclose(V + V.T, 1.0)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_lightcone_roundtrip(X, T):
    x, t = to_lightcone(X, T)
    assert to_lab(x, t) == pytest.approx((X, T))


@pytest.mark.parametrize("p,q0,eps", [(1.0, 0.0, -1), (2.0, 0.5, -1), (0.7, -1.0, 1)])
def test_single_particle_closed_form(p, q0, eps):
    cfg = single(p, q0, eps)
    for t in (-2.0, 0.0, 1.5):
        s = sg_roots_at_time(cfg, t)
        assert len(s.roots) == 1
        # eps=-1 vanishes in det(A + v), eps=+1 in det(A - v)
        assert s.labels == ((MINUS_INF,) if eps == -1 else (PLUS_INF,))
        expected = q0 - t / p ** 2 - LN2 / (2 * p)
        assert s.roots[0].real == pytest.approx(expected, abs=1e-10)


def test_factor_clamped_far_out():
    cfg = single(1.0)
    assert math.isfinite(sg_factor(cfg, 1e4, 0.0, 1))
    assert _scaled_factor(cfg, 1e4, 0.0, 1) == pytest.approx(-1.0)


@given(st.floats(0.3, 2), st.floats(-1, 1), st.floats(-1, 1), st.floats(-3, 3), st.floats(-2, 2),
       st.sampled_from([-1, 1]))
def test_conjugate_pair_determinant_real(pr, pi_, qi, x, t, eps):
    cfg = SgConfig((complex(pr, pi_), complex(pr, -pi_)), (complex(0.3, qi), complex(0.3, -qi)),
                   (eps, eps), XScan(), "lightcone", 1e-12)
    for sign in (1, -1):
        _scaled_factor(cfg, x, t, sign)  # raises NonRealDeterminant otherwise


def test_hamiltonian():
    cfg = SgConfig((2.0 + 0j, 0.5 + 0j), (0j, 0j), (-1, -1), XScan(), "lightcone", 1e-12)
    assert hamiltonian(cfg) == pytest.approx(2.5)


@pytest.mark.parametrize("name,same", [("sg_repulsive", True), ("sg_opposite", False)])
def test_pair_matches_two_body_law(name, same):
    wls = simulate_sg(fixtures.load(name))
    x12 = wls.lines[0].x - wls.lines[1].x
    exact = two_body_lab_trajectory(0.6, wls.t, same_label=same)
    assert np.max(np.abs(np.abs(x12) - np.abs(exact))) < 1e-10
    assert np.ptp(wls.lines[0].x + wls.lines[1].x) < 1e-10  # centre of mass at rest


def test_breather_keeps_both_roots():
    wls = simulate_sg(fixtures.load("sg_breather"))
    assert (wls.real_counts() == 2).all()
    assert not wls.events


def test_window_grows_for_far_roots():
    # root near -30, far outside the initial scan window
    cfg = SgConfig((1 + 0j,), (-30 + 0j,), (-1,), XScan(-5, 5, 64), "lightcone", 1e-13)
    s = sg_roots_at_time(cfg, 0.0)
    assert s.roots[0].real == pytest.approx(-30 - LN2 / 2, abs=1e-10)


class TestPairLaw:
    def test_exact_trajectory_satisfies_law(self):
        theta = 0.6
        T = np.linspace(0.3, 1.5, 7)
        h = 1e-4
        for same, eps in ((True, 1), (False, -1)):
            x = lambda tt: two_body_lab_trajectory(theta, tt, same)  # noqa: E731
            x0 = x(T)
            v = (x(T + h) - x(T - h)) / (2 * h)
            a = (x(T + h) - 2 * x0 + x(T - h)) / h ** 2
            res = [sg_eq10_residual(*args, eps) for args in zip(x0, v, a)]
            assert np.max(np.abs(res)) < 1e-5

    def test_literal_form_disagrees(self):
        theta, T, h = 0.6, 0.8, 1e-4
        x = lambda tt: float(two_body_lab_trajectory(theta, tt, True))  # noqa: E731
        v = (x(T + h) - x(T - h)) / (2 * h)
        a = (x(T + h) - 2 * x(T) + x(T - h)) / h ** 2
        assert abs(sg_eq10_residual(x(T), v, a, 1, literal=True)) > 1e-3

    def test_domain(self):
        with pytest.raises(DomainError):
            sg_eq10_residual(1.0, 2.0, 0.0, 1)
        with pytest.raises(DomainError):
            sg_eq10_residual(0.0, 0.0, 0.0, 1)
