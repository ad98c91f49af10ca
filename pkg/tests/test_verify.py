import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from indyn import fixtures, simulate
from indyn.core import EventKind, EventRecord, Model, TimeGrid, WorldLine, WorldLineSet
from indyn.errors import CollisionApproach, GridTooShort, ParticleCoincidence
from indyn.pipeline import initial_state, verify_run
from indyn.verify import (
    VerificationReport,
    cm_energy,
    conservation_report,
    fd_derivatives,
    newton_residual,
    newton_rhs,
    ode_oracle,
    root_residual_report,
)


def line(t, x, alive=None, lid=0):
    alive = np.ones(len(t), bool) if alive is None else alive
    return WorldLine(lid, np.asarray(t, float), np.asarray(x, complex), alive, np.full(len(t), np.nan))


class TestFiniteDifferences:
    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
    def test_exact_on_quadratics(self, c0, c1, c2):
        t = np.linspace(0, 1, 11)
        v, a = fd_derivatives(line(t, c0 + c1 * t + c2 * t ** 2))
        assert np.allclose(v, c1 + 2 * c2 * t, atol=1e-9)
        assert np.allclose(a, 2 * c2, atol=1e-7)

    def test_too_short(self):
        with pytest.raises(GridTooShort):
            fd_derivatives(line([0, 1, 2, 3], [0, 1, 2, 3]))

    def test_nonuniform(self):
        with pytest.raises(ValueError):
            fd_derivatives(line([0, 1, 2, 3, 5], [0, 1, 2, 3, 5]))

    def test_dead_and_event_samples_are_nan(self):
        t = np.linspace(0, 1, 21)
        alive = t < 0.5
        ev = EventRecord(EventKind.ANNIHILATION, 0.5, (0, 1), 1e-9)
        v, a = fd_derivatives(line(t, t, alive), [ev])
        assert np.isnan(v[7:]).all() and np.isfinite(v[:7]).all()


def test_newton_rhs_cm_pair():
    # x'' = 2 g^2 / (x_k - x_j)^3
    f = newton_rhs(Model.CM, np.array([0.0, 1.0]), np.zeros(2), -1.0)
    assert f == pytest.approx([-2.0, 2.0])


def test_newton_rhs_goldfish_pair():
    f = newton_rhs(Model.GOLDFISH, np.array([0.0, 1.0]), np.array([1.0, 2.0]), None)
    assert f == pytest.approx([-4.0, 4.0])


def test_cm_energy_pair():
    assert cm_energy(np.array([0.0, 2.0]), np.array([1.0, 1.0]), 4.0) == pytest.approx(0.0)


def test_newton_residual_coincidence():
    t = np.linspace(0, 1, 11)
    wls = WorldLineSet((line(t, t, lid=0), line(t, t, lid=1)))
    with pytest.raises(ParticleCoincidence):
        newton_residual(Model.GOLDFISH, wls, None)
    rep = newton_residual(Model.GOLDFISH, wls, None, skip_coincident=True)
    assert rep.notes


class TestOracle:
    def test_free_particle(self):
        traj = ode_oracle(Model.CM, [0.0], [2.0], 1.0, (0.0, 1.0), 1e-10)
        assert traj.x[-1, 0] == pytest.approx(2.0)

    def test_repulsive_pair_exchanges_momenta(self):
        c = fixtures.load("fig1_cm_repulsive")
        x0, v0 = initial_state(c, -3.0)
        traj = ode_oracle(Model.CM, x0, v0, -1.0, (-3.0, 3.0), 1e-10)
        assert np.sort(traj.v[-1]) == pytest.approx([-1, 1], abs=2e-2)

    def test_attractive_collision(self):
        c = fixtures.load("fig2_cm_attractive")
        x0, v0 = initial_state(c, -2.0)
        with pytest.raises(CollisionApproach) as info:
            ode_oracle(Model.CM, x0, v0, 1.0, (-2.0, 0.0), 1e-10)
        assert info.value.t < -0.5

    def test_coincident_start(self):
        with pytest.raises(ParticleCoincidence):
            ode_oracle(Model.CM, [0.0, 0.0], [1.0, -1.0], 1.0, (0.0, 1.0), 1e-9)


def test_report_merge_and_dict():
    a = VerificationReport(trace_deviation=1e-16, notes=["x"])
    b = VerificationReport(root_residual=1e-15, samples_excluded=2, notes=["y"])
    m = a.merge(b)
    d = m.to_dict()
    assert d["trace_deviation"] == 1e-16 and d["root_residual"] == 1e-15
    assert m.samples_excluded == 2 and m.notes == ["x", "y"]


def test_cm_energy_conserved_through_gap():
    c = fixtures.load("fig2_cm_attractive")
    rep = conservation_report(c.model, simulate(c), c)
    assert rep.energy_deviation < 1e-9
    assert rep.trace_deviation < 1e-10


@pytest.mark.parametrize("name", ["fig3_cm_four", "goldfish_smooth", "rs_three", "sg_repulsive"])
def test_root_residual_small(name):
    c = fixtures.load(name)
    assert root_residual_report(c, simulate(c)).root_residual < 1e-8


def test_root_residual_detects_corruption():
    c = fixtures.load("goldfish_pair")
    wls = simulate(c)
    ln = wls.lines[0]
    z = ln.z.copy()
    z[10] += 0.1
    bad = WorldLineSet((dataclasses.replace(ln, z=z),) + wls.lines[1:], wls.events)
    assert root_residual_report(c, bad).root_residual > 1e-4


@pytest.mark.parametrize("name", sorted(fixtures.DOCS))
def test_verify_run_passes_every_fixture(name):
    c = fixtures.load(name)
    if c.model is Model.SINH_GORDON and c.time.samples > 200:
        c = dataclasses.replace(c, time=TimeGrid(c.time.start, c.time.end, 121))
    _, failures = verify_run(c)
    assert failures == []


def test_verify_run_smooth_runs_oracle():
    rep, failures = verify_run(fixtures.load("cm_smooth"))
    assert not failures
    assert rep.oracle_distance < 1e-6 and rep.newton_residual_max < 1e-4


def test_verify_run_pair_law():
    c = fixtures.load("sg_repulsive")
    rep, failures = verify_run(c, eq10_epsilon=1)
    assert not failures and rep.eq10_residual < 1e-3
    rep, failures = verify_run(c, eq10_epsilon=-1)
    assert failures == ["eq10_residual"]
