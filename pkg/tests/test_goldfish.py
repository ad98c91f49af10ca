import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from indyn import fixtures
from indyn.core import EventKind
from indyn.errors import ValidationError, ZeroTime
from indyn.goldfish import (
    GoldfishInit,
    companion_roots,
    goldfish_coeffs,
    goldfish_roots,
    lax_degeneracy_residual,
    polynomial_value,
    root_velocities,
    simulate_goldfish,
)


def test_coeffs_pair():
    # (x+1)(x-1) - t (x - 1): roots 1 and t - 1
    c = goldfish_coeffs(GoldfishInit((-1.0, 1.0), (1.0, 0.0)), 0.5)
    assert np.allclose(c, [1.0, -0.5, -0.5])


def test_zero_time():
    with pytest.raises(ZeroTime):
        goldfish_coeffs(GoldfishInit((0.0,), (1.0,)), 0.0)
    s = goldfish_roots(GoldfishInit((2.0, 0.0), (1.0, 1.0)), 0.0)
    assert list(s.roots.real) == [2.0, 0.0]


def test_init_validation():
    with pytest.raises(ValidationError):
        GoldfishInit((0.0, 0.0), (1.0, 1.0))
    with pytest.raises(ValidationError):
        GoldfishInit((0.0,), (1.0, 1.0))


def test_single_particle_free():
    s = goldfish_roots(GoldfishInit((1.0,), (2.0,)), 3.0)
    assert s.real_roots == pytest.approx([7.0])


def test_companion_roots():
    assert np.allclose(np.sort(companion_roots(np.poly([1.0, 2.0, 3.0])).real), [1, 2, 3])


def test_pair_crossing_exact():
    wls = simulate_goldfish(fixtures.load("goldfish_pair"))
    t = wls.t
    X = np.sort(wls.positions().real, axis=1)
    exact = np.sort(np.column_stack([np.ones_like(t), t - 1]), axis=1)
    assert np.max(np.abs(X - exact)) < 1e-12
    assert not wls.events


def test_opposite_pair_annihilates():
    # x^2 - 1 + 2t: annihilation at t = 1/2
    wls = simulate_goldfish(fixtures.load("goldfish_opposite"))
    assert [e.kind for e in wls.events] == [EventKind.ANNIHILATION]
    assert wls.events[0].t_event == pytest.approx(0.5, abs=1e-8)


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=6))
def test_lax_degeneracy(v):
    v = np.array(v)
    scale = len(v) * max(np.max(np.abs(v)) ** 2, 1e-300)
    assert lax_degeneracy_residual(v) <= 1e-12 * scale + 1e-300


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=5, unique=True),
       st.integers(0, 4), st.floats(-2, 2).filter(lambda t: abs(t) > 1e-3))
def test_rest_persistence(x0, j, t):
    x0 = sorted(x0)
    if np.min(np.diff(x0)) < 1e-2:
        return
    j %= len(x0)
    v0 = [0.5 + 0.1 * k for k in range(len(x0))]
    v0[j] = 0.0
    init = GoldfishInit(tuple(x0), tuple(v0))
    scale = 1 + max(abs(x) for x in x0)
    assert abs(polynomial_value(init, t, x0[j])) <= 1e-10 * scale ** len(x0)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5, unique=True),
       st.lists(st.floats(-2, 2), min_size=5, max_size=5), st.floats(-2, 2))
def test_root_sum_identity(x0, v0, t):
    if len(x0) > 1 and np.min(np.diff(sorted(x0))) < 1e-3:
        return
    v0 = v0[: len(x0)]
    s = goldfish_roots(GoldfishInit(tuple(x0), tuple(v0)), t) if t else None
    if s is None:
        return
    scale = 1 + np.abs(s.roots).max()
    assert abs(s.roots.sum() - sum(x0) - t * sum(v0)) <= 1e-10 * scale


def test_root_velocities_at_zero_and_later():
    init = GoldfishInit((0.0, 1.0, 3.0), (2.0, 1.0, 0.5))
    x, v = root_velocities(init, 0.0)
    assert list(v.real) == [2.0, 1.0, 0.5]
    h = 1e-6
    x, v = root_velocities(init, 0.4)
    xp = np.sort(goldfish_roots(init, 0.4 + h).roots.real)
    xm = np.sort(goldfish_roots(init, 0.4 - h).roots.real)
    order = np.argsort(x.real)
    assert np.allclose(v.real[order], (xp - xm) / (2 * h), atol=1e-6)


def test_billiard_no_events():
    wls = simulate_goldfish(fixtures.load("fig5_goldfish_billiard"))
    assert not wls.events and wls.alive_matrix().all()
