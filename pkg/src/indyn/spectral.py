"""Rational Calogero-Moser and Ruijsenaars-Schneider world lines.

Particle positions are the eigenvalues of ``Q(t) + W`` with
``Q(t) = diag(a_i + t p_i)`` and a momentum-only off-diagonal ``W``.  The
two-particle closed form and the annihilation interval live here as well;
they double as oracles for the eigenvalue path.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eig

from .core import (
    Model,
    RootSnapshot,
    ScenarioConfig,
    WorldLineSet,
    make_snapshot,
    refine_events,
    track_roots,
)
from .errors import DegenerateMomenta, EigenSolverFailure, ZeroMomentumDifference


def coupling(gamma_squared: float) -> complex:
    """Principal square root of gamma squared (imaginary in the repulsive regime)."""
    return cmath.sqrt(complex(gamma_squared))


def interaction_matrix(model: Model, p, gamma_squared: float) -> np.ndarray:
    """Off-diagonal part W of the model matrix; zero diagonal."""
    p = np.asarray(p, dtype=complex)
    diff = p[:, None] - p[None, :]
    n = len(p)
    off = ~np.eye(n, dtype=bool)
    if np.any(diff[off] == 0):
        raise DegenerateMomenta("two momenta coincide")
    g = coupling(gamma_squared)
    W = np.zeros((n, n), dtype=complex)
    if model is Model.CM:
        W[off] = g / diff[off]
    elif model is Model.RS:
        W[off] = (g * np.broadcast_to(p[:, None], (n, n)))[off] / diff[off]
    else:
        raise ValueError(f"no spectral matrix for model {model}")
    return W


def build_cm_rs_matrix(config: ScenarioConfig, t: float, W: np.ndarray | None = None) -> np.ndarray:
    """Dense ``Q(t) + W``.

    Returned as a real array when every entry is real (real data with
    attractive coupling), otherwise complex.
    """
    a = config.offsets()
    p = config.momenta()
    if W is None:
        W = interaction_matrix(config.model, p, config.gamma_squared)
    M = W + np.diag(a + t * p)
    if not np.any(M.imag):
        return M.real.copy()
    return M


def eigenvalues(M: np.ndarray, t: float = float("nan")) -> np.ndarray:
    try:
        ev = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverFailure(t) from exc
    if not np.all(np.isfinite(ev)):
        raise EigenSolverFailure(t, "eigenvalue solver returned non-finite values")
    return ev.astype(complex)


def roots_at_time_spectral(config: ScenarioConfig, t: float,
                           W: np.ndarray | None = None) -> RootSnapshot:
    M = build_cm_rs_matrix(config, t, W)
    return make_snapshot(t, eigenvalues(M, t), config.tolerances.tol_im)


@dataclass(frozen=True)
class TwoParticleReduction:
    """Center-of-mass / relative split of two-particle free data."""

    A: complex
    a: complex
    P: complex
    p: complex

    @classmethod
    def from_particles(cls, a1, a2, p1, p2) -> "TwoParticleReduction":
        return cls(complex(a1 + a2), complex(a1 - a2), complex(p1 + p2), complex(p1 - p2))

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "TwoParticleReduction":
        (a1, a2), (p1, p2) = config.offsets(), config.momenta()
        return cls.from_particles(a1, a2, p1, p2)

    def particles(self) -> tuple[complex, complex, complex, complex]:
        """``(a1, a2, p1, p2)``."""
        return ((self.A + self.a) / 2, (self.A - self.a) / 2,
                (self.P + self.p) / 2, (self.P - self.p) / 2)


def two_particle_worldlines(red: TwoParticleReduction, gamma_squared: float,
                            t: float) -> tuple[complex, complex]:
    """Closed-form CM pair positions at time ``t`` (principal square root)."""
    if red.p == 0:
        raise ZeroMomentumDifference("relative momentum p1 - p2 is zero")
    centre = red.A + red.P * t
    root = cmath.sqrt((red.a + red.p * t) ** 2 - 4 * gamma_squared / red.p ** 2)
    return 0.5 * (centre + root), 0.5 * (centre - root)


def annihilation_interval(red: TwoParticleReduction,
                          gamma_squared: float) -> tuple[float, float] | None:
    """Window with no real CM solution for real two-particle data, or None."""
    if red.p == 0:
        raise ZeroMomentumDifference("relative momentum p1 - p2 is zero")
    if gamma_squared <= 0:
        return None
    a, p = red.a.real, red.p.real
    g = gamma_squared ** 0.5
    centre = -a / p
    half = 2 * g / p ** 2
    return centre - half, centre + half


def simulate_spectral(config: ScenarioConfig) -> WorldLineSet:
    if config.model not in (Model.CM, Model.RS):
        raise ValueError(f"simulate_spectral cannot run model {config.model}")
    W = interaction_matrix(config.model, config.momenta(), config.gamma_squared)
    snaps = [roots_at_time_spectral(config, float(t), W) for t in config.time.times()]
    wls = track_roots(snaps)

    def count(t: float) -> int:
        return roots_at_time_spectral(config, t, W).n_real

    return refine_events(wls, count, config.tolerances.tol_event)


def eigen_velocities(config: ScenarioConfig, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and their exact time derivatives ``y^H diag(p) x / y^H x``."""
    M = build_cm_rs_matrix(config, t).astype(complex)
    w, vl, vr = eig(M, left=True, right=True)
    p = config.momenta()
    num = np.einsum("ij,i,ij->j", vl.conj(), p, vr)
    den = np.einsum("ij,ij->j", vl.conj(), vr)
    return w, num / den
