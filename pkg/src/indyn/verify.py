"""Independent checks of engine output.

Nothing here reuses the root solvers: Newton residuals come from finite
differences of tracked world lines, the ODE oracle integrates the equations
of motion directly, and conservation checks use exact algebraic identities.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .core import EVENT_WINDOW, EventRecord, Model, ScenarioConfig, WorldLine, WorldLineSet, event_window_mask
from .errors import (
    CollisionApproach,
    DomainError,
    GridTooShort,
    ParticleCoincidence,
    RsPoleProximity,
    StepUnderflow,
)
from . import goldfish, sinh_gordon, spectral
from .sinh_gordon import sg_eq10_residual

COINCIDENCE_RTOL = 1e-6
RS_POLE_TOL = 1e-8


@dataclass
class VerificationReport:
    """Max-norm diagnostics; ``None`` means the check was not run."""

    newton_residual: tuple[float, ...] | None = None
    trace_deviation: float | None = None
    root_sum_deviation: float | None = None
    energy_deviation: float | None = None
    hamiltonian_drift: float | None = None
    momentum_drift: float | None = None
    oracle_distance: float | None = None
    eq10_residual: float | None = None
    root_residual: float | None = None
    samples_excluded: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def newton_residual_max(self) -> float | None:
        if self.newton_residual is None:
            return None
        return max(self.newton_residual, default=0.0)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        out = VerificationReport()
        for name in ("newton_residual", "trace_deviation", "root_sum_deviation",
                     "energy_deviation", "hamiltonian_drift", "momentum_drift",
                     "oracle_distance", "eq10_residual", "root_residual"):
            mine, theirs = getattr(self, name), getattr(other, name)
            setattr(out, name, theirs if mine is None else mine)
        out.samples_excluded = self.samples_excluded + other.samples_excluded
        out.notes = self.notes + other.notes
        return out

    def to_dict(self) -> dict:
        d = asdict(self)
        d["newton_residual_max"] = self.newton_residual_max
        if d["newton_residual"] is not None:
            d["newton_residual"] = list(d["newton_residual"])
        return d


# ---------------------------------------------------------------------------
# finite differences


def fd_derivatives(line: WorldLine, events: Sequence[EventRecord] = (),
                   stencil_order: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Second-order velocity and acceleration of one world line.

    Central differences inside, four-point one-sided formulas at the ends.
    Samples whose stencil touches a dead sample, and samples within three grid
    steps of one of the line's events, come back as NaN.
    """
    if stencil_order != 2:
        raise ValueError("only the second-order stencil is implemented")
    t = np.asarray(line.t, dtype=float)
    x = np.asarray(line.x, dtype=float)
    n = len(t)
    if n < 5:
        raise GridTooShort(f"need at least 5 samples, got {n}")
    h = (t[-1] - t[0]) / (n - 1)
    if not np.allclose(np.diff(t), h, rtol=1e-9, atol=0):
        raise ValueError("fd_derivatives needs a uniform time grid")

    v = np.empty(n)
    a = np.empty(n)
    v[1:-1] = (x[2:] - x[:-2]) / (2 * h)
    a[1:-1] = (x[2:] - 2 * x[1:-1] + x[:-2]) / h ** 2
    v[0] = (-3 * x[0] + 4 * x[1] - x[2]) / (2 * h)
    v[-1] = (3 * x[-1] - 4 * x[-2] + x[-3]) / (2 * h)
    a[0] = (2 * x[0] - 5 * x[1] + 4 * x[2] - x[3]) / h ** 2
    a[-1] = (2 * x[-1] - 5 * x[-2] + 4 * x[-3] - x[-4]) / h ** 2

    alive = np.asarray(line.alive, dtype=bool)
    ok = alive.copy()
    ok[1:-1] &= alive[:-2] & alive[2:]
    ok[0] &= alive[1:4].all()
    ok[-1] &= alive[-4:-1].all()
    ok &= ~event_window_mask(t, events, line.id, EVENT_WINDOW)
    v[~ok] = np.nan
    a[~ok] = np.nan
    return v, a


# ---------------------------------------------------------------------------
# Newton equations


def newton_rhs(model: Model, x: np.ndarray, v: np.ndarray, gamma_squared: float | None) -> np.ndarray:
    """Right-hand side of the equations of motion, vectorised over leading axes."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    d = x[..., :, None] - x[..., None, :]  # x_j - x_k
    n = x.shape[-1]
    off = ~np.eye(n, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        if model is Model.CM:
            terms = np.where(off, 2 * gamma_squared / (-d) ** 3, 0.0)
        elif model is Model.RS:
            vv = v[..., :, None] * v[..., None, :]
            terms = np.where(off, 2 * gamma_squared * vv / (d * (gamma_squared - d ** 2)), 0.0)
        elif model is Model.GOLDFISH:
            vv = v[..., :, None] * v[..., None, :]
            terms = np.where(off, 2 * vv / d, 0.0)
        else:
            raise ValueError(f"no Newton equation for model {model}")
    return terms.sum(axis=-1)


def _check_separation(model: Model, x: np.ndarray, gamma_squared: float | None, scale: float) -> None:
    n = x.shape[-1]
    if n < 2:
        return
    d = np.abs(x[..., :, None] - x[..., None, :])[..., ~np.eye(n, dtype=bool)]
    if d.size and d.min() <= COINCIDENCE_RTOL * scale:
        raise ParticleCoincidence(f"particles within {d.min():.3e} of each other")
    if model is Model.RS and d.size:
        gap = np.abs(gamma_squared - d ** 2)
        if gap.min() < RS_POLE_TOL:
            raise RsPoleProximity(f"|gamma^2 - (x_j - x_k)^2| = {gap.min():.3e}")


def newton_residual(model: Model, lines: WorldLineSet, gamma_squared: float | None,
                    skip_coincident: bool = False) -> VerificationReport:
    """Max ``|x_j'' - F_j(x, x')|`` per line over interior samples where every line is usable.

    ``skip_coincident`` excludes samples at which two lines (nearly) meet
    instead of raising :class:`ParticleCoincidence`.
    """
    n = len(lines.lines)
    if n == 0:
        return VerificationReport(newton_residual=())
    derivs = [fd_derivatives(ln, lines.events) for ln in lines.lines]
    X = lines.positions().real
    V = np.column_stack([d[0] for d in derivs])
    Acc = np.column_stack([d[1] for d in derivs])
    usable = np.all(np.isfinite(V) & np.isfinite(Acc), axis=1)
    usable[0] = usable[-1] = False
    scale = 1.0 + float(np.max(np.abs(X)))
    if skip_coincident and n >= 2:
        d = np.abs(X[:, :, None] - X[:, None, :])[:, ~np.eye(n, dtype=bool)]
        usable &= d.min(axis=1) > COINCIDENCE_RTOL * scale
        if model is Model.RS:
            usable &= np.abs(gamma_squared - d ** 2).min(axis=1) >= RS_POLE_TOL
    excluded = int(len(usable) - np.count_nonzero(usable))
    if not usable.any():
        return VerificationReport(newton_residual=tuple([0.0] * n), samples_excluded=excluded,
                                  notes=["no usable samples for Newton residual"])
    Xu, Vu, Au = X[usable], V[usable], Acc[usable]
    _check_separation(model, Xu, gamma_squared, scale)
    res = np.abs(Au - newton_rhs(model, Xu, Vu, gamma_squared)).max(axis=0)
    return VerificationReport(newton_residual=tuple(float(r) for r in res),
                              samples_excluded=excluded)


# ---------------------------------------------------------------------------
# ODE oracle


@dataclass(frozen=True)
class OdeTrajectories:
    t: np.ndarray
    x: np.ndarray  # (n_samples, N)
    v: np.ndarray
    nfev: int


def ode_oracle(model: Model, x0, v0, gamma_squared: float | None, span: tuple[float, float],
               tol: float, t_eval=None) -> OdeTrajectories:
    """Integrate the Newton equations with the Dormand-Prince 4(5) pair.

    Aborts with :class:`CollisionApproach` as soon as two particles come
    within ``1e-6 * scale`` of each other.
    """
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    n = len(x0)
    if n > 1 and len(np.unique(x0)) != n:
        raise ParticleCoincidence("initial positions must be distinct")
    scale = 1.0 + float(np.max(np.abs(x0)))
    threshold = COINCIDENCE_RTOL * scale

    def rhs(_t, y):
        x, v = y[:n], y[n:]
        return np.concatenate([v, newton_rhs(model, x, v, gamma_squared)])

    def approach(_t, y):
        if n < 2:
            return 1.0
        xs = np.sort(y[:n])
        return float(np.min(np.diff(xs))) - threshold

    approach.terminal = True
    approach.direction = -1

    if t_eval is None:
        t_eval = np.linspace(span[0], span[1], 101)
    sol = solve_ivp(rhs, span, np.concatenate([x0, v0]), method="RK45", rtol=tol,
                    atol=tol * scale, t_eval=np.asarray(t_eval, dtype=float),
                    events=approach, dense_output=True)
    if sol.status == 1:
        t_hit = float(sol.t_events[0][0])
        raise CollisionApproach(t_hit, threshold)
    if sol.status == -1:
        y = sol.y[:, -1] if sol.y.size else np.concatenate([x0, v0])
        sep = float(np.min(np.diff(np.sort(y[:n])))) if n > 1 else math.inf
        if sep < 1e3 * threshold:
            raise CollisionApproach(float(sol.t[-1]) if sol.t.size else span[0], sep)
        raise StepUnderflow(sol.message)
    return OdeTrajectories(sol.t, sol.y[:n].T.copy(), sol.y[n:].T.copy(), sol.nfev)


def cm_energy(x: np.ndarray, v: np.ndarray, gamma_squared: float) -> np.ndarray:
    """Kinetic plus pair potential ``-gamma^2 / (x_j - x_k)^2``, vectorised."""
    x, v = np.asarray(x), np.asarray(v)
    n = x.shape[-1]
    iu = np.triu_indices(n, 1)
    d = (x[..., :, None] - x[..., None, :])[..., iu[0], iu[1]]
    return 0.5 * np.sum(v ** 2, axis=-1) - gamma_squared * np.sum(1.0 / d ** 2, axis=-1)


def ode_report(model: Model, traj: OdeTrajectories, gamma_squared: float | None) -> VerificationReport:
    mom = traj.v.sum(axis=1)
    rep = VerificationReport(momentum_drift=float(np.max(np.abs(mom - mom[0]))))
    if model is Model.CM:
        H = cm_energy(traj.x, traj.v, gamma_squared)
        rep.hamiltonian_drift = float(np.max(np.abs(H - H[0])))
    return rep


def engine_vs_oracle(engine_x: np.ndarray, oracle: OdeTrajectories) -> float:
    """Max distance between sorted engine positions and sorted oracle positions."""
    a = np.sort(np.asarray(engine_x, dtype=float), axis=1)
    b = np.sort(oracle.x, axis=1)
    return float(np.max(np.abs(a - b)))


# ---------------------------------------------------------------------------
# conservation


def _cm_energy_deviation(config: ScenarioConfig, t: np.ndarray, Z: np.ndarray) -> float | None:
    """Max ``|H - sum p^2 / 2|`` over samples, with exact eigenvalue velocities.

    The identity holds for complex roots as well, so non-real samples count.
    Samples with nearly coincident roots (ill-conditioned velocities) are skipped.
    """
    free = 0.5 * np.sum(config.momenta() ** 2)
    worst = None
    n = Z.shape[1]
    off = ~np.eye(n, dtype=bool)
    for k, tk in enumerate(t):
        z = Z[k]
        sep = np.abs(z[:, None] - z[None, :])[off].min()
        if sep <= 1e-3 * (1.0 + np.abs(z).max()):
            continue
        lam, vel = spectral.eigen_velocities(config, float(tk))
        idx = np.argmin(np.abs(lam[None, :] - z[:, None]), axis=1)
        if len(set(idx.tolist())) != n:
            continue
        dev = float(abs(cm_energy(z, vel[idx], config.gamma_squared) - free))
        worst = dev if worst is None else max(worst, dev)
    return worst


def conservation_report(model: Model, lines: WorldLineSet, config: ScenarioConfig) -> VerificationReport:
    """Algebraic identities of the tracked roots.

    Trace (CM, RS) and root-sum (Goldfish) deviations are divided by
    ``1 + max|root|`` at each sample.  For CM the interacting energy on
    every well-separated sample is compared with ``sum p^2 / 2``.
    """
    rep = VerificationReport()
    if not lines.lines:
        return rep
    t = lines.t
    Z = lines.positions()
    scale = 1.0 + np.max(np.abs(Z), axis=1)
    if model in (Model.CM, Model.RS):
        a, p = config.offsets(), config.momenta()
        dev = np.abs(Z.sum(axis=1) - a.sum() - t * p.sum()) / scale
        rep.trace_deviation = float(dev.max())
        if model is Model.CM and Z.shape[1] > 1:
            rep.energy_deviation = _cm_energy_deviation(config, t, Z)
    elif model is Model.GOLDFISH:
        x0 = np.asarray(config.init_positions, dtype=float)
        v0 = np.asarray(config.init_velocities, dtype=float)
        dev = np.abs(Z.sum(axis=1) - x0.sum() - t * v0.sum()) / scale
        rep.root_sum_deviation = float(dev.max())
    return rep


def asymptotic_slopes(positions_at, T: float, h: float = 1e-2) -> np.ndarray:
    """Sorted central-difference velocities at time ``T``.

    ``positions_at(t)`` must return the sorted real positions.
    """
    return np.sort((np.asarray(positions_at(T + h)) - np.asarray(positions_at(T - h))) / (2 * h))


# ---------------------------------------------------------------------------
# Sinh-Gordon pair law


def eq10_report(lines: WorldLineSet, epsilon: int, min_separation: float = 0.05) -> VerificationReport:
    """Max two-singularity law residual over interior samples of an N=2 lab-frame run.

    Samples with ``|x12| < min_separation`` (crossings) or outside the law's
    domain are excluded and counted.
    """
    if len(lines.lines) != 2:
        raise ValueError("the pair law needs exactly two world lines")
    l1, l2 = lines.lines
    rel = WorldLine(-1, l1.t, l1.z - l2.z, l1.alive & l2.alive, l1.v_est)
    v, a = fd_derivatives(rel)
    x = rel.x
    worst, excluded = 0.0, 0
    for i in range(1, len(x) - 1):
        if not (np.isfinite(v[i]) and np.isfinite(a[i])) or abs(x[i]) < min_separation:
            excluded += 1
            continue
        try:
            worst = max(worst, abs(sg_eq10_residual(x[i], v[i], a[i], epsilon)))
        except DomainError:
            excluded += 1
    return VerificationReport(eq10_residual=worst, samples_excluded=excluded)


# ---------------------------------------------------------------------------
# root residual


def root_residual_report(config: ScenarioConfig, lines: WorldLineSet) -> VerificationReport:
    """Max backward error of every alive sample as a root of its defining equation.

    CM/RS: smallest singular value of ``Q(t) + W - x I`` over ``1 + ||Q + W||``;
    Goldfish: ``|P(x)| / sum_k |c_k| |x|^k``; Sinh-Gordon: the smaller of the
    two row-scaled factors.
    """
    worst = 0.0
    t = lines.t
    X = lines.positions().real if lines.lines else np.empty((0, 0))
    alive = lines.alive_matrix() if lines.lines else np.empty((0, 0), bool)
    if config.model in (Model.CM, Model.RS):
        W = spectral.interaction_matrix(config.model, config.momenta(), config.gamma_squared)
        for k, tk in enumerate(t):
            M = spectral.build_cm_rs_matrix(config, float(tk), W)
            norm = 1.0 + np.linalg.norm(M, 2)
            eye = np.eye(len(M))
            for x in X[k][alive[k]]:
                s = np.linalg.svd(M - x * eye, compute_uv=False)
                worst = max(worst, float(s[-1] / (norm + abs(x))))
    elif config.model is Model.GOLDFISH:
        init = goldfish.GoldfishInit.from_config(config)
        for k, tk in enumerate(t):
            xs = X[k][alive[k]]
            if tk == 0:
                c = init.base_poly
            else:
                c = goldfish.goldfish_coeffs(init, float(tk))
            for x in xs:
                denom = np.polyval(np.abs(c), abs(x))
                if denom > 0:
                    worst = max(worst, float(abs(np.polyval(c, x)) / denom))
    elif config.model is Model.SINH_GORDON:
        sg = sinh_gordon.SgConfig.from_config(config)
        for k, tk in enumerate(t):
            for x in X[k][alive[k]]:
                pt = sinh_gordon._point(sg, float(x), float(tk))
                worst = max(worst, min(abs(sinh_gordon._scaled_factor(sg, *pt, s)) for s in (1, -1)))
    return VerificationReport(root_residual=worst)
