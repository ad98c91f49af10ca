"""Goldfish model through its algebraic solution.

At time t the positions are the roots of

    prod_j (x - x_j(0)) - t * sum_j v_j(0) prod_{k != j} (x - x_k(0)) = 0,

which is the cleared form of ``sum_j v_j(0) / (x - x_j(0)) = 1 / t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import (
    Model,
    RootSnapshot,
    ScenarioConfig,
    WorldLineSet,
    make_snapshot,
    refine_events,
    track_roots,
)
from .errors import EigenSolverFailure, ValidationError, ZeroTime


@dataclass(frozen=True)
class GoldfishInit:
    x0: tuple[float, ...]
    v0: tuple[float, ...]

    def __post_init__(self):
        if len(self.x0) != len(self.v0):
            raise ValidationError("x0 and v0 differ in length")
        if len(self.x0) == 0:
            raise ValidationError("goldfish needs at least one particle")
        if len(set(self.x0)) != len(self.x0):
            raise ValidationError("initial positions must be pairwise distinct")

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "GoldfishInit":
        return cls(tuple(map(float, config.init_positions)),
                   tuple(map(float, config.init_velocities)))

    @cached_property
    def base_poly(self) -> np.ndarray:
        """``prod (x - x_j(0))``, highest degree first."""
        return np.poly(np.asarray(self.x0, dtype=float))

    @cached_property
    def rate_poly(self) -> np.ndarray:
        """``dP/dt``, padded to degree N (leading coefficient zero)."""
        x0 = np.asarray(self.x0, dtype=float)
        out = np.zeros(len(x0) + 1)
        for j, vj in enumerate(self.v0):
            if vj != 0:
                out[1:] -= vj * np.poly(np.delete(x0, j))
        return out


def goldfish_coeffs(init: GoldfishInit, t: float) -> np.ndarray:
    """Monic coefficients, highest degree first, of the degree-N position polynomial."""
    if t == 0:
        raise ZeroTime("t = 0: positions are the initial data")
    return init.base_poly + t * init.rate_poly


def companion_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of a monic polynomial as eigenvalues of its companion matrix."""
    c = np.asarray(coeffs, dtype=float)
    n = len(c) - 1
    if n == 0:
        return np.empty(0, dtype=complex)
    C = np.zeros((n, n))
    C[0, :] = -c[1:] / c[0]
    C[1:, :-1] = np.eye(n - 1)
    try:
        ev = np.linalg.eigvals(C)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverFailure(float("nan")) from exc
    return ev.astype(complex)


def goldfish_roots(init: GoldfishInit, t: float, tol_im: float | None = None) -> RootSnapshot:
    if t == 0:
        return make_snapshot(0.0, np.asarray(init.x0, dtype=complex), tol_im)
    return make_snapshot(t, companion_roots(goldfish_coeffs(init, t)), tol_im)


def polynomial_value(init: GoldfishInit, t: float, x: float) -> float:
    return float(np.polyval(goldfish_coeffs(init, t), x))


def lax_degeneracy_residual(velocities) -> float:
    """Max-norm of ``L @ L - (sum v) L`` for the rank-one Lax matrix ``L = 1 (x) v``."""
    v = np.asarray(velocities, dtype=float)
    L = np.outer(np.ones_like(v), v)
    return float(np.max(np.abs(L @ L - v.sum() * L)))


def simulate_goldfish(config: ScenarioConfig) -> WorldLineSet:
    if config.model is not Model.GOLDFISH:
        raise ValueError(f"simulate_goldfish cannot run model {config.model}")
    init = GoldfishInit.from_config(config)
    tol_im = config.tolerances.tol_im
    snaps = [goldfish_roots(init, float(t), tol_im) for t in config.time.times()]
    wls = track_roots(snaps)

    def count(t: float) -> int:
        return goldfish_roots(init, t, tol_im).n_real

    return refine_events(wls, count, config.tolerances.tol_event)


def root_velocities(init: GoldfishInit, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Roots and their time derivatives ``-dP/dt / dP/dx`` by implicit differentiation."""
    if t == 0:
        return np.asarray(init.x0, dtype=complex), np.asarray(init.v0, dtype=complex)
    coeffs = goldfish_coeffs(init, t)
    roots = companion_roots(coeffs)
    dpdt = init.rate_poly
    dpdx = np.polyder(coeffs)
    return roots, -np.polyval(dpdt, roots) / np.polyval(dpdx, roots)
