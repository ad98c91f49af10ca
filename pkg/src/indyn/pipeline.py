"""Model dispatch and the end-to-end verification run used by the CLI."""

from __future__ import annotations

import numpy as np

from .core import Model, ScenarioConfig, WorldLineSet
from .errors import CollisionApproach, ParticleCoincidence, StepUnderflow
from .goldfish import GoldfishInit, root_velocities, simulate_goldfish
from .sinh_gordon import simulate_sg
from .spectral import eigen_velocities, simulate_spectral
from .verify import (
    VerificationReport,
    conservation_report,
    engine_vs_oracle,
    eq10_report,
    newton_residual,
    ode_oracle,
    ode_report,
    root_residual_report,
)

IDENTITY_TOL = 1e-10
ROOT_RESIDUAL_TOL = 1e-8
EQ10_TOL = 1e-3
ODE_TOL = 1e-9
# the Newton residual tolerance is stated for grid steps up to this size
NEWTON_MAX_STEP = 1e-3


def simulate(config: ScenarioConfig) -> WorldLineSet:
    if config.model in (Model.CM, Model.RS):
        return simulate_spectral(config)
    if config.model is Model.GOLDFISH:
        return simulate_goldfish(config)
    return simulate_sg(config)


def initial_state(config: ScenarioConfig, t0: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact real positions and velocities at ``t0`` (all roots must be real)."""
    if config.model is Model.GOLDFISH:
        x, v = root_velocities(GoldfishInit.from_config(config), t0)
    else:
        x, v = eigen_velocities(config, t0)
    order = np.argsort(x.real)
    return x.real[order], v.real[order]


def oracle_tolerance(tol: float = ODE_TOL) -> float:
    return max(10 * tol, 1e-6)


def verify_run(config: ScenarioConfig, lines: WorldLineSet | None = None,
               eq10_epsilon: int | None = None) -> tuple[VerificationReport, list[str]]:
    """Run every applicable check; returns the report and the names of failed checks."""
    if lines is None:
        lines = simulate(config)
    model = config.model
    rep = root_residual_report(config, lines)
    rep = rep.merge(conservation_report(model, lines, config))
    failures = []
    if rep.root_residual is not None and rep.root_residual > ROOT_RESIDUAL_TOL:
        failures.append("root_residual")
    for name in ("trace_deviation", "root_sum_deviation"):
        val = getattr(rep, name)
        if val is not None and val > IDENTITY_TOL:
            failures.append(name)

    smooth = not lines.events and bool(np.all(lines.alive_matrix()))
    if model is not Model.SINH_GORDON:
        if smooth and len(lines.t) >= 5:
            try:
                nr = newton_residual(model, lines, config.gamma_squared, skip_coincident=True)
            except ParticleCoincidence as exc:
                nr = VerificationReport(notes=[f"newton residual skipped: {exc}"])
            rep = rep.merge(nr)
            if config.time.step > NEWTON_MAX_STEP * (1 + 1e-9):
                rep.notes.append(f"newton residual not gated: grid step {config.time.step:.3g} "
                                 f"exceeds {NEWTON_MAX_STEP:g}")
            elif rep.newton_residual_max is not None and rep.newton_residual_max > config.tolerances.tol_residual:
                failures.append("newton_residual")
            t = lines.t
            try:
                x0, v0 = initial_state(config, float(t[0]))
                traj = ode_oracle(model, x0, v0, config.gamma_squared, (float(t[0]), float(t[-1])),
                                  ODE_TOL, t_eval=t)
                orc = ode_report(model, traj, config.gamma_squared)
                orc.oracle_distance = engine_vs_oracle(lines.positions().real, traj)
                rep = rep.merge(orc)
                if orc.oracle_distance > oracle_tolerance():
                    failures.append("oracle_distance")
            except (CollisionApproach, StepUnderflow, ParticleCoincidence) as exc:
                rep.notes.append(f"ODE oracle skipped: {exc}")
        else:
            rep.notes.append("Newton residual and ODE oracle skipped: scenario has events")
    elif eq10_epsilon is not None:
        rep = rep.merge(eq10_report(lines, eq10_epsilon))
        if rep.eq10_residual is not None and rep.eq10_residual > EQ10_TOL:
            failures.append("eq10_residual")
    return rep, failures
