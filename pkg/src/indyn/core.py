"""Shared domain types, root continuity tracking and event localization.

Every engine produces a sequence of :class:`RootSnapshot` objects (the full
root multiset of its defining equation at one time).  :func:`track_roots`
stitches those into world lines and :func:`localize_event` pins down the
moments at which a pair of real roots leaves or re-enters the real axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import (
    DegenerateMomenta,
    EmptyTimeGrid,
    InconsistentSnapshotSize,
    MultipleTransitions,
    NoCountChange,
    NonPositiveRealMomentum,
    UnpairedComplexParameter,
    ValidationError,
)

PAIRING_RTOL = 1e-12
HUNGARIAN_MAX_N = 32
EVENT_WINDOW = 3


class Model(str, Enum):
    CM = "cm"
    RS = "rs"
    GOLDFISH = "goldfish"
    SINH_GORDON = "sinh_gordon"


class EventKind(str, Enum):
    ANNIHILATION = "annihilation"
    CREATION = "creation"


@dataclass(frozen=True)
class ParticleParams:
    """Free-flight data of one particle.

    ``a`` is the offset of the free coordinate (for Sinh-Gordon it plays the
    role of ``q0``), ``p`` the conserved momentum.  ``epsilon`` is only read
    by the Sinh-Gordon engine.
    """

    a: complex = 0j
    p: complex = 0j
    epsilon: int = 1


@dataclass(frozen=True)
class TimeGrid:
    start: float
    end: float
    samples: int

    def times(self) -> np.ndarray:
        return np.linspace(self.start, self.end, self.samples)

    @property
    def step(self) -> float:
        return (self.end - self.start) / (self.samples - 1)


@dataclass(frozen=True)
class Tolerances:
    tol_im: float | None = None  # None: 1e-8 * (1 + max|root|) per snapshot
    tol_root: float = 1e-12
    tol_event: float = 1e-9
    tol_residual: float = 1e-4


@dataclass(frozen=True)
class XScan:
    x_min: float = -10.0
    x_max: float = 10.0
    n_grid: int = 512


@dataclass(frozen=True)
class ScenarioConfig:
    model: Model
    time: TimeGrid
    gamma_squared: float | None = None
    particles: tuple[ParticleParams, ...] = ()
    init_positions: tuple[float, ...] = ()
    init_velocities: tuple[float, ...] = ()
    tolerances: Tolerances = field(default_factory=Tolerances)
    x_scan: XScan = field(default_factory=XScan)
    frame: str = "lightcone"

    @property
    def n(self) -> int:
        if self.model is Model.GOLDFISH:
            return len(self.init_positions)
        return len(self.particles)

    def momenta(self) -> np.ndarray:
        return np.array([pp.p for pp in self.particles], dtype=complex)

    def offsets(self) -> np.ndarray:
        return np.array([pp.a for pp in self.particles], dtype=complex)


def _close(u: complex, v: complex) -> bool:
    return abs(u - v) <= PAIRING_RTOL * (1.0 + max(abs(u), abs(v)))


def _is_real(z: complex) -> bool:
    return abs(z.imag) <= PAIRING_RTOL * (1.0 + abs(z))


def _check_pairing(particles: Sequence[ParticleParams], model: Model) -> None:
    pending = [i for i, pp in enumerate(particles)
               if not (_is_real(pp.a) and _is_real(pp.p))]
    used: set[int] = set()
    for i in pending:
        if i in used:
            continue
        pi = particles[i]
        partner = None
        for j in pending:
            if j == i or j in used:
                continue
            pj = particles[j]
            if (_close(pj.p, pi.p.conjugate()) and _close(pj.a, pi.a.conjugate())
                    and (model is not Model.SINH_GORDON or pj.epsilon == pi.epsilon)):
                partner = j
                break
        if partner is None:
            raise UnpairedComplexParameter(
                f"particle {i} (a={pi.a}, p={pi.p}) has no complex-conjugate partner")
        used.update((i, partner))


def validate_scenario(config: ScenarioConfig) -> ScenarioConfig:
    """Check the structural constraints of a scenario and return it unchanged."""
    grid = config.time
    if grid.samples < 2 or not (grid.start < grid.end):
        raise EmptyTimeGrid(
            f"time grid needs start < end and at least 2 samples, got {grid}")
    if not all(math.isfinite(v) for v in (grid.start, grid.end)):
        raise EmptyTimeGrid("time grid bounds must be finite")
    if config.n < 1:
        raise ValidationError("scenario needs at least one particle")

    if config.model is Model.GOLDFISH:
        x0 = np.asarray(config.init_positions, dtype=float)
        v0 = np.asarray(config.init_velocities, dtype=float)
        if x0.shape != v0.shape:
            raise ValidationError("init_positions and init_velocities differ in length")
        if not (np.all(np.isfinite(x0)) and np.all(np.isfinite(v0))):
            raise ValidationError("goldfish initial data must be finite")
        if len(np.unique(x0)) != len(x0):
            raise ValidationError("goldfish initial positions must be pairwise distinct")
        return config

    for pp in config.particles:
        if not all(math.isfinite(v) for v in (pp.a.real, pp.a.imag, pp.p.real, pp.p.imag)):
            raise ValidationError(f"non-finite particle parameter {pp}")
    _check_pairing(config.particles, config.model)

    if config.model in (Model.CM, Model.RS):
        if config.gamma_squared is None or not math.isfinite(config.gamma_squared):
            raise ValidationError(f"{config.model.value} needs a finite gamma_squared")
        p = config.momenta()
        for j in range(len(p)):
            for k in range(j + 1, len(p)):
                if _close(p[j], p[k]):
                    raise DegenerateMomenta(f"p[{j}] == p[{k}] == {p[j]}")
    elif config.model is Model.SINH_GORDON:
        for i, pp in enumerate(config.particles):
            if not pp.p.real > 0:
                raise NonPositiveRealMomentum(f"particle {i}: Re p = {pp.p.real} <= 0")
            if pp.epsilon not in (-1, 1):
                raise ValidationError(f"particle {i}: epsilon must be +1 or -1")
        if config.frame not in ("lightcone", "lab"):
            raise ValidationError(f"unknown frame {config.frame!r}")
    return config


# ---------------------------------------------------------------------------
# snapshots


def default_tol_im(roots: np.ndarray) -> float:
    scale = float(np.max(np.abs(roots))) if len(roots) else 0.0
    return 1e-8 * (1.0 + scale)


def classify_roots(roots: np.ndarray, tol_im: float | None = None) -> np.ndarray:
    """Boolean mask of roots treated as real.

    Non-real roots of real-coefficient equations come in pairs, so an odd
    number of non-real roots means one of them is spurious; the one closest
    to the axis is reclassified as real.
    """
    roots = np.asarray(roots, dtype=complex)
    if tol_im is None:
        tol_im = default_tol_im(roots)
    mask = np.abs(roots.imag) <= tol_im
    nonreal = np.flatnonzero(~mask)
    if len(nonreal) % 2:
        mask[nonreal[np.argmin(np.abs(roots.imag[nonreal]))]] = True
    return mask


@dataclass(frozen=True)
class RootSnapshot:
    t: float
    roots: np.ndarray
    real_mask: np.ndarray
    labels: tuple | None = None

    @property
    def n_real(self) -> int:
        return int(np.count_nonzero(self.real_mask))

    @property
    def real_roots(self) -> np.ndarray:
        return np.sort(self.roots.real[self.real_mask])


def make_snapshot(t: float, roots, tol_im: float | None = None,
                  labels: Sequence | None = None) -> RootSnapshot:
    roots = np.asarray(roots, dtype=complex).ravel()
    mask = classify_roots(roots, tol_im)
    return RootSnapshot(float(t), roots, mask,
                        None if labels is None else tuple(labels))


# ---------------------------------------------------------------------------
# world lines


class Sample(NamedTuple):
    t: float
    x: float
    v_est: float
    alive: bool


@dataclass(frozen=True)
class EventRecord:
    kind: EventKind
    t_event: float
    line_ids: tuple[int, int]
    t_bracket_width: float


@dataclass(frozen=True)
class WorldLine:
    """One tracked root.

    ``z`` keeps the complex root value so that lines can be followed through
    annihilation gaps; ``x`` is its real part.  ``v_est`` is NaN wherever a
    velocity is undefined (dead sample, or too close to an event).
    """

    id: int
    t: np.ndarray
    z: np.ndarray
    alive: np.ndarray
    v_est: np.ndarray
    label: object = None

    @property
    def x(self) -> np.ndarray:
        return self.z.real

    def samples(self) -> Iterator[Sample]:
        for t, x, v, a in zip(self.t, self.x, self.v_est, self.alive):
            yield Sample(float(t), float(x), float(v), bool(a))


@dataclass(frozen=True)
class WorldLineSet:
    lines: tuple[WorldLine, ...]
    events: tuple[EventRecord, ...] = ()
    metadata: dict = field(default_factory=dict)

    @property
    def t(self) -> np.ndarray:
        return self.lines[0].t if self.lines else np.empty(0)

    def positions(self) -> np.ndarray:
        """Complex root values, shape (n_samples, n_lines)."""
        return np.column_stack([ln.z for ln in self.lines]) if self.lines else np.empty((0, 0))

    def alive_matrix(self) -> np.ndarray:
        return np.column_stack([ln.alive for ln in self.lines]) if self.lines else np.empty((0, 0), bool)

    def real_counts(self) -> np.ndarray:
        return self.alive_matrix().sum(axis=1)


def event_window_mask(t: np.ndarray, events: Sequence[EventRecord], line_id: int,
                      window: int = EVENT_WINDOW) -> np.ndarray:
    """Samples of ``line_id`` lying within ``window`` grid steps of one of its events."""
    mask = np.zeros(len(t), dtype=bool)
    if len(t) < 2:
        return mask
    for ev in events:
        if line_id not in ev.line_ids:
            continue
        j = int(np.argmin(np.abs(t - ev.t_event)))
        mask[max(0, j - window): j + window + 1] = True
    return mask


def _velocity_estimates(t: np.ndarray, z: np.ndarray, alive: np.ndarray,
                        blocked: np.ndarray) -> np.ndarray:
    n = len(t)
    v = np.full(n, np.nan)
    if n < 2:
        return v
    x = z.real
    grad = np.gradient(x, t, edge_order=2 if n >= 3 else 1)
    ok = alive & ~blocked
    # a difference is only trusted if every sample in its stencil is alive
    ok[1:-1] &= alive[:-2] & alive[2:]
    if n >= 3:
        ok[0] &= alive[1] & alive[2]
        ok[-1] &= alive[-2] & alive[-3]
    v[ok] = grad[ok]
    return v


def _rebuild_lines(lines: Sequence[WorldLine], events: Sequence[EventRecord]) -> tuple[WorldLine, ...]:
    out = []
    for ln in lines:
        blocked = event_window_mask(ln.t, events, ln.id)
        out.append(replace(ln, v_est=_velocity_estimates(ln.t, ln.z, ln.alive, blocked)))
    return tuple(out)


def _match(prev: np.ndarray, pred: np.ndarray, new: np.ndarray,
           prev_alive: np.ndarray, new_alive: np.ndarray,
           prev_labels, new_labels) -> np.ndarray:
    """Permutation ``perm`` such that ``new[perm]`` continues ``prev``."""
    n = len(prev)
    if n > HUNGARIAN_MAX_N:
        # greedy on sorted real parts, keeping any label blocks apart
        key_prev = np.lexsort((pred.real, [str(l) for l in prev_labels] if prev_labels else np.zeros(n)))
        key_new = np.lexsort((new.real, [str(l) for l in new_labels] if new_labels else np.zeros(n)))
        perm = np.empty(n, dtype=int)
        perm[key_prev] = key_new
        return perm
    cost = np.minimum(np.abs(pred[:, None] - new[None, :]),
                      np.abs(prev[:, None] - new[None, :]))
    scale = 1.0 + float(np.max(np.abs(new)))
    cost = cost + 1e3 * scale * (prev_alive[:, None] != new_alive[None, :])
    if prev_labels is not None and new_labels is not None:
        pl = np.array([str(l) for l in prev_labels])
        nl = np.array([str(l) for l in new_labels])
        cost = cost + 1e6 * scale * (pl[:, None] != nl[None, :])
    _, perm = linear_sum_assignment(cost)
    return perm


def track_roots(snapshots: Sequence[RootSnapshot]) -> WorldLineSet:
    """Continuity-match root snapshots into world lines.

    Roots are followed in the complex plane, so a pair that leaves the real
    axis keeps its identity (``alive=False``) until it comes back.  Each
    change of +-2 in the real-root count between consecutive snapshots gives
    a provisional event whose time is the bracket midpoint; engines refine it
    with :func:`refine_events`.
    """
    if not snapshots:
        return WorldLineSet(())
    n = len(snapshots[0].roots)
    for s in snapshots:
        if len(s.roots) != n:
            raise InconsistentSnapshotSize(
                f"snapshot at t={s.t} has {len(s.roots)} roots, expected {n}")
    m = len(snapshots)
    t = np.array([s.t for s in snapshots], dtype=float)
    Z = np.empty((m, n), dtype=complex)
    A = np.empty((m, n), dtype=bool)
    labels0 = snapshots[0].labels
    L = [labels0]
    Z[0] = snapshots[0].roots
    A[0] = snapshots[0].real_mask
    for k in range(1, m):
        s = snapshots[k]
        prev = Z[k - 1]
        pred = 2 * Z[k - 1] - Z[k - 2] if k >= 2 else prev
        perm = _match(prev, pred, s.roots, A[k - 1], s.real_mask, L[-1], s.labels)
        Z[k] = s.roots[perm]
        A[k] = s.real_mask[perm]
        L.append(None if s.labels is None else tuple(s.labels[i] for i in perm))

    events = []
    for k in range(1, m):
        dc = int(A[k].sum()) - int(A[k - 1].sum())
        if dc == 0:
            continue
        if dc < 0:
            kind, flipped = EventKind.ANNIHILATION, np.flatnonzero(A[k - 1] & ~A[k])
        else:
            kind, flipped = EventKind.CREATION, np.flatnonzero(~A[k - 1] & A[k])
        # a jump of 4 or more is kept as consecutive pairs; refinement splits them
        flipped = list(flipped)
        for i in range(0, len(flipped) - 1, 2):
            events.append(EventRecord(kind, 0.5 * (t[k - 1] + t[k]),
                                      (int(flipped[i]), int(flipped[i + 1])),
                                      float(t[k] - t[k - 1])))

    lines = []
    for i in range(n):
        label = None if labels0 is None else L[0][i]
        lines.append(WorldLine(i, t.copy(), Z[:, i].copy(), A[:, i].copy(),
                               np.full(m, np.nan), label))
    return WorldLineSet(_rebuild_lines(lines, events), tuple(events))


# ---------------------------------------------------------------------------
# events


def localize_event(root_counter: Callable[[float], int], t_lo: float, t_hi: float,
                   tol_event: float, max_jump: int = 2) -> tuple[float, float]:
    """Bisect on the real-root count until the bracket is at most ``tol_event`` wide.

    Returns ``(t_event, bracket_width)`` with ``t_event`` the final midpoint.
    """
    if not t_lo < t_hi:
        raise ValueError("need t_lo < t_hi")
    c_lo, c_hi = root_counter(t_lo), root_counter(t_hi)
    if c_lo == c_hi:
        raise NoCountChange(f"real-root count is {c_lo} at both {t_lo} and {t_hi}")
    if abs(c_hi - c_lo) > max_jump:
        raise MultipleTransitions(
            f"count jumps {c_lo} -> {c_hi} inside [{t_lo}, {t_hi}]; refine the grid")
    lo, hi = t_lo, t_hi
    while hi - lo > tol_event:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        c = root_counter(mid)
        if c == c_lo:
            lo = mid
        elif c == c_hi:
            hi = mid
        else:
            raise MultipleTransitions(
                f"intermediate count {c} at t={mid} between {c_lo} and {c_hi}")
    return 0.5 * (lo + hi), hi - lo


def _split_bracket(counter, lo, hi, depth=0, pieces=16, max_depth=6):
    """Subintervals of [lo, hi] each holding a single count change."""
    c_lo, c_hi = counter(lo), counter(hi)
    if abs(c_hi - c_lo) <= 2 or depth >= max_depth:
        return [(lo, hi)] if c_lo != c_hi else []
    ts = np.linspace(lo, hi, pieces + 1)
    out = []
    for a, b in zip(ts[:-1], ts[1:]):
        if counter(a) != counter(b):
            out.extend(_split_bracket(counter, a, b, depth + 1, pieces, max_depth))
    return out


def refine_events(wls: WorldLineSet, counter: Callable[[float], int],
                  tol_event: float) -> WorldLineSet:
    """Localize every provisional event of ``wls`` to ``tol_event``."""
    if not wls.events:
        return wls
    t = wls.t
    by_bracket: dict[float, list[EventRecord]] = {}
    for ev in wls.events:
        by_bracket.setdefault(ev.t_event, []).append(ev)
    refined = []
    for mid, group in by_bracket.items():
        k = int(np.searchsorted(t, mid))
        lo, hi = float(t[k - 1]), float(t[k])
        subs = _split_bracket(counter, lo, hi)
        if len(subs) == len(group) and all(abs(counter(b) - counter(a)) == 2 for a, b in subs):
            for ev, (a, b) in zip(group, subs):
                te, w = localize_event(counter, a, b, tol_event)
                refined.append(replace(ev, t_event=te, t_bracket_width=w))
        else:
            # simultaneous transitions (exact symmetry): localize them together
            te, w = localize_event(counter, lo, hi, tol_event, max_jump=2 * len(group))
            refined.extend(replace(ev, t_event=te, t_bracket_width=w) for ev in group)
    refined.sort(key=lambda e: (e.t_event, e.line_ids))
    return WorldLineSet(_rebuild_lines(wls.lines, refined), tuple(refined), dict(wls.metadata))
