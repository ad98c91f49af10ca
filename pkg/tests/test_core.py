import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from indyn.core import (
    EventKind,
    Model,
    ParticleParams,
    ScenarioConfig,
    TimeGrid,
    classify_roots,
    event_window_mask,
    localize_event,
    make_snapshot,
    track_roots,
    validate_scenario,
    EventRecord,
)
from indyn.errors import (
    DegenerateMomenta,
    EmptyTimeGrid,
    InconsistentSnapshotSize,
    MultipleTransitions,
    NoCountChange,
    NonPositiveRealMomentum,
    UnpairedComplexParameter,
    ValidationError,
)


def cm(particles, g2=1.0, grid=TimeGrid(-1, 1, 11), **kw):
    return ScenarioConfig(Model.CM, grid, gamma_squared=g2,
                          particles=tuple(ParticleParams(a, p) for a, p in particles), **kw)


class TestValidation:
    def test_minimal_cm_ok(self):
        assert validate_scenario(cm([(0, 1), (0, -1)])).n == 2

    def test_conjugate_pair_ok(self):
        validate_scenario(cm([(1j, 1 + 1j), (-1j, 1 - 1j)]))

    def test_unpaired_complex(self):
        with pytest.raises(UnpairedComplexParameter):
            validate_scenario(cm([(0, 1 + 1j), (0, 2)]))

    def test_conjugate_a_must_follow_p(self):
        with pytest.raises(UnpairedComplexParameter):
            validate_scenario(cm([(1j, 1 + 1j), (1j, 1 - 1j)]))

    def test_repeated_momenta(self):
        with pytest.raises(DegenerateMomenta):
            validate_scenario(cm([(0, 1), (1, 1)]))

    @pytest.mark.parametrize("grid", [TimeGrid(0, 1, 1), TimeGrid(1, 0, 5), TimeGrid(0, 0, 5)])
    def test_bad_grid(self, grid):
        with pytest.raises(EmptyTimeGrid):
            validate_scenario(cm([(0, 1), (0, -1)], grid=grid))

    def test_cm_needs_coupling(self):
        with pytest.raises(ValidationError):
            validate_scenario(cm([(0, 1), (0, -1)], g2=None))

    def test_sinh_gordon_momentum_sign(self):
        cfg = ScenarioConfig(Model.SINH_GORDON, TimeGrid(0, 1, 3),
                             particles=(ParticleParams(0, -1.0, -1),))
        with pytest.raises(NonPositiveRealMomentum):
            validate_scenario(cfg)

    def test_sinh_gordon_pair_needs_equal_labels(self):
        cfg = ScenarioConfig(Model.SINH_GORDON, TimeGrid(0, 1, 3),
                             particles=(ParticleParams(0, 1 + 1j, 1), ParticleParams(0, 1 - 1j, -1)))
        with pytest.raises(UnpairedComplexParameter):
            validate_scenario(cfg)

    def test_goldfish_distinct_positions(self):
        cfg = ScenarioConfig(Model.GOLDFISH, TimeGrid(0, 1, 3),
                             init_positions=(0.0, 0.0), init_velocities=(1.0, 1.0))
        with pytest.raises(ValidationError):
            validate_scenario(cfg)

    def test_non_finite(self):
        with pytest.raises(ValidationError):
            validate_scenario(cm([(math.nan, 1), (0, -1)]))


class TestClassify:
    def test_tolerance_scales_with_roots(self):
        mask = classify_roots(np.array([1e6 + 1e-3j, 1e6 - 1e-3j, 0.0]))
        assert mask.all()

    def test_conjugate_pair_is_not_real(self):
        assert list(classify_roots(np.array([1 + 0.1j, 1 - 0.1j, 2]))) == [False, False, True]

    def test_odd_nonreal_count_fixed(self):
        mask = classify_roots(np.array([1 + 0.1j, 1 - 0.1j, 2 + 1e-7j]), tol_im=1e-9)
        assert list(mask) == [False, False, True]


def _pair_snapshots(ts, centre=0.0):
    # +-sqrt(t^2 - 1): real outside [-1, 1]
    out = []
    for t in ts:
        r = np.sqrt(complex(t * t - 1))
        out.append(make_snapshot(t, [centre + r, centre - r]))
    return out


class TestTracking:
    def test_empty(self):
        assert track_roots([]).lines == ()

    def test_inconsistent_sizes(self):
        with pytest.raises(InconsistentSnapshotSize):
            track_roots([make_snapshot(0, [1, 2]), make_snapshot(1, [1])])

    def test_single_snapshot(self):
        wls = track_roots([make_snapshot(0.0, [3.0, 1.0])])
        assert len(wls.lines) == 2 and not wls.events

    def test_pair_gap(self):
        ts = np.linspace(-2, 2, 41)
        wls = track_roots(_pair_snapshots(ts))
        kinds = [e.kind for e in wls.events]
        assert kinds == [EventKind.ANNIHILATION, EventKind.CREATION]
        assert wls.events[0].line_ids == (0, 1)
        counts = wls.real_counts()
        assert counts.min() == 0 and counts.max() == 2
        # lines keep their side across the gap
        assert wls.lines[0].x[0] * wls.lines[1].x[0] < 0

    def test_crossing_lines_keep_identity(self):
        ts = np.linspace(-1, 1, 21)
        snaps = [make_snapshot(t, sorted([t, -t])) for t in ts]
        wls = track_roots(snaps)
        slopes = [np.polyfit(ts, ln.x, 1)[0] for ln in wls.lines]
        assert sorted(np.round(slopes, 9)) == [-1.0, 1.0]

    def test_velocity_undefined_near_event(self):
        ts = np.linspace(-2, 2, 41)
        wls = track_roots(_pair_snapshots(ts))
        ln = wls.lines[0]
        assert np.isnan(ln.v_est[~ln.alive]).all()
        assert np.isfinite(ln.v_est[0])


class TestLocalize:
    @staticmethod
    def counter(t0):
        return lambda t: 0 if t > t0 else 2

    def test_basic(self):
        te, w = localize_event(self.counter(0.3), 0.0, 1.0, 1e-12)
        assert abs(te - 0.3) < 1e-12 and w <= 1e-12

    def test_no_change(self):
        with pytest.raises(NoCountChange):
            localize_event(lambda t: 2, 0, 1, 1e-9)

    def test_multiple(self):
        with pytest.raises(MultipleTransitions):
            localize_event(lambda t: 0 if t > 0.5 else 4, 0, 1, 1e-9)

    def test_intermediate(self):
        with pytest.raises(MultipleTransitions):
            localize_event(lambda t: 0 if t > 0.6 else (2 if t > 0.4 else 4), 0, 1, 1e-9, max_jump=4)

    @given(st.floats(0.01, 0.99), st.floats(0.0, 0.009), st.floats(0.991, 1.0))
    def test_bracket_independent(self, t0, lo, hi):
        te, _ = localize_event(self.counter(t0), lo, hi, 1e-10)
        assert abs(te - t0) <= 1e-10


def test_event_window_mask():
    t = np.linspace(0, 1, 21)
    ev = EventRecord(EventKind.ANNIHILATION, 0.5, (0, 1), 1e-9)
    m = event_window_mask(t, [ev], 0)
    assert m.sum() == 7 and m[10]
    assert not event_window_mask(t, [ev], 2).any()
