"""World lines of Sinh-Gordon singularities.

Singularities sit at the real zeros in x of

    det(A(x, t) + v) * det(A(x, t) - v),
    A = diag(eps_i exp(2 p_i (x - q_i(t)))),  q_i(t) = q0_i - t / p_i**2,
    v_jk = p_j / (p_j + p_k).

The two factors are never multiplied out: a zero of ``det(A + v)`` is a
``u -> -inf`` singularity, a zero of ``det(A - v)`` a ``u -> +inf`` one.

Coordinates: ``x, t`` above are the light-cone pair of ``u_xt = sinh(u)/16``.
The relative-motion law for two singularities is stated in the lab pair
``X = x + t, T = t - x`` in which free singularities move with
``|dX/dT| < 1``.  ``frame="lab"`` makes every routine scan along lines of
constant ``T`` instead of constant ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, log_expit

from .core import (
    Model,
    RootSnapshot,
    ScenarioConfig,
    WorldLineSet,
    XScan,
    make_snapshot,
    refine_events,
    track_roots,
)
from .errors import DomainError, NonRealDeterminant, RootCountMismatch, ValidationError

EXP_CLAMP = 700.0
MINUS_INF = "u=-inf"  # zero of det(A + v)
PLUS_INF = "u=+inf"  # zero of det(A - v)
MAX_DOUBLINGS = 8
REALNESS_TOL = 1e-8


@dataclass(frozen=True)
class SgConfig:
    p: tuple[complex, ...]
    q0: tuple[complex, ...]
    epsilon: tuple[int, ...]
    x_scan: XScan = field(default_factory=XScan)
    frame: str = "lightcone"
    tol_root: float = 1e-12

    def __post_init__(self):
        if not (len(self.p) == len(self.q0) == len(self.epsilon)):
            raise ValidationError("p, q0 and epsilon must have equal length")
        if self.frame not in ("lightcone", "lab"):
            raise ValidationError(f"unknown frame {self.frame!r}")

    @property
    def n(self) -> int:
        return len(self.p)

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "SgConfig":
        return cls(tuple(complex(pp.p) for pp in config.particles),
                   tuple(complex(pp.a) for pp in config.particles),
                   tuple(int(pp.epsilon) for pp in config.particles),
                   config.x_scan, config.frame, config.tolerances.tol_root)


def cauchy_matrix_v(p) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    return p[:, None] / (p[:, None] + p[None, :])


def to_lightcone(X: float, T: float) -> tuple[float, float]:
    return 0.5 * (X - T), 0.5 * (X + T)


def to_lab(x: float, t: float) -> tuple[float, float]:
    return x + t, t - x


def _exponents(config: SgConfig, x: float, t: float) -> np.ndarray:
    p = np.asarray(config.p, dtype=complex)
    q = np.asarray(config.q0, dtype=complex) - t / p ** 2
    return 2 * p * (x - q)


def _point(config: SgConfig, s: float, time: float) -> tuple[float, float]:
    """Light-cone ``(x, t)`` of scan coordinate ``s`` at frame time ``time``."""
    if config.frame == "lab":
        return to_lightcone(s, time)
    return s, time


def _check_real(det: complex) -> float:
    if abs(det.imag) > REALNESS_TOL * (1.0 + abs(det.real)):
        raise NonRealDeterminant(
            f"determinant {det} is not real; check the conjugate pairing of the data")
    return det.real


def sg_factor(config: SgConfig, x: float, t: float, sign: int) -> float:
    """``det(A(x, t) + sign * v)`` in light-cone coordinates."""
    e = _exponents(config, x, t)
    e = np.clip(e.real, -EXP_CLAMP, EXP_CLAMP) + 1j * e.imag
    A = np.diag(np.asarray(config.epsilon) * np.exp(e))
    return _check_real(complex(np.linalg.det(A + sign * cauchy_matrix_v(config.p))))


def _scaled_factors(config: SgConfig, x, t, sign: int) -> np.ndarray:
    """Vectorised :func:`_scaled_factor` over matching arrays of light-cone points."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    p = np.asarray(config.p, dtype=complex)
    q = np.asarray(config.q0, dtype=complex)[None, :] - t[:, None] / p ** 2
    e = 2 * p * (x[:, None] - q)
    r = e.real
    rows = np.exp(log_expit(-r))  # 1 / (1 + e^r)
    M = sign * cauchy_matrix_v(config.p)[None, :, :] * rows[:, :, None]
    idx = np.arange(config.n)
    M[:, idx, idx] += np.asarray(config.epsilon) * expit(r) * np.exp(1j * e.imag)
    det = np.linalg.det(M)
    bad = np.abs(det.imag) > REALNESS_TOL * (1.0 + np.abs(det.real))
    if bad.any():
        _check_real(complex(det[np.argmax(bad)]))
    return det.real


def _scaled_factor(config: SgConfig, x: float, t: float, sign: int) -> float:
    """Positive multiple of :func:`sg_factor`: row i divided by ``1 + |A_ii|``.

    Same sign and zero set, no overflow for any x.
    """
    return float(_scaled_factors(config, x, t, sign)[0])


def _scan(config: SgConfig, time: float, lo: float, hi: float, n: int):
    xs = np.linspace(lo, hi, n)
    found = []
    for sign, label in ((1, MINUS_INF), (-1, PLUS_INF)):
        f = lambda s: _scaled_factor(config, *_point(config, s, time), sign)  # noqa: E731
        vals = _scaled_factors(config, *_point(config, xs, time), sign)
        for i in range(n - 1):
            if vals[i] == 0.0:
                found.append((float(xs[i]), label))
            elif vals[i] * vals[i + 1] < 0:
                root = brentq(f, xs[i], xs[i + 1], xtol=config.tol_root, rtol=1e-15)
                found.append((float(root), label))
        if vals[-1] == 0.0:
            found.append((float(xs[-1]), label))
    return found


def sg_roots_at_time(config: SgConfig, t: float, tol_im: float | None = None) -> RootSnapshot:
    """All singularity positions at frame time ``t``, labelled by factor."""
    lo, hi, n = config.x_scan.x_min, config.x_scan.x_max, config.x_scan.n_grid
    found = _scan(config, t, lo, hi, n)
    if len(found) < config.n:
        found = _scan(config, t, lo, hi, 4 * n)
    doublings = 0
    while len(found) < config.n and doublings < MAX_DOUBLINGS:
        centre, half = 0.5 * (lo + hi), hi - lo
        lo, hi = centre - half, centre + half
        doublings += 1
        found = _scan(config, t, lo, hi, n)
        if len(found) < config.n:
            found = _scan(config, t, lo, hi, 4 * n)
    if len(found) != config.n:
        raise RootCountMismatch(config.n, len(found), t)
    found.sort()
    return make_snapshot(t, [r for r, _ in found], tol_im, [lab for _, lab in found])


def hamiltonian(config: SgConfig) -> float:
    """``sum 1/p_i``; real for conjugate-paired data."""
    return float(np.sum(1.0 / np.asarray(config.p, dtype=complex)).real)


def sg_eq10_residual(x12: float, v12: float, a12: float, epsilon: int,
                     literal: bool = False) -> float:
    """LHS - RHS of the implicit two-singularity law in the center-of-mass lab frame.

    With ``W = sqrt(4 - v12**2)`` and ``s = sgn(x12)``::

        a12 s / W = 4 eps / (cosh(4 |x12| / W * sqrt(1 + a12 s / (2 W))) - eps)

    ``literal=True`` uses ``1 + a12 x12 / W`` under the inner root instead;
    that form does not vanish on exact two-singularity trajectories and is
    kept only for comparison.
    """
    if abs(v12) >= 2:
        raise DomainError(f"|v12| = {abs(v12)} >= 2: outside the time-like domain")
    if x12 == 0:
        raise DomainError("x12 = 0: sgn(x12) undefined")
    w = math.sqrt(4.0 - v12 * v12)
    s = 1.0 if x12 > 0 else -1.0
    inner = 1.0 + (a12 * x12 / w if literal else a12 * s / (2.0 * w))
    if inner < 0:
        raise DomainError(f"negative inner square-root argument {inner}")
    arg = 4.0 * abs(x12) / w * math.sqrt(inner)
    rhs = 0.0 if arg > EXP_CLAMP else 4.0 * epsilon / (math.cosh(arg) - epsilon)
    return a12 * s / w - rhs


def two_body_lab_trajectory(theta: float, T, same_label: bool = True, T0: float = 0.0):
    """Exact relative coordinate of a center-of-mass pair with rapidities ``+-theta``.

    Same-label (repulsive) pair: ``tanh(theta) cosh(cosh(theta) x12) = cosh(2 sinh(theta) (T - T0))``;
    opposite-label pair: ``tanh(theta) sinh(cosh(theta) x12) = sinh(2 sinh(theta) (T - T0))``.
    Independent of the determinant scan, used as its oracle.
    """
    T = np.asarray(T, dtype=float)
    g, s = math.cosh(theta), math.sinh(theta)
    rhs = 2 * s * (T - T0)
    if same_label:
        return np.arccosh(np.cosh(rhs) / math.tanh(theta)) / g
    return np.arcsinh(np.sinh(rhs) / math.tanh(theta)) / g


def simulate_sg(config: ScenarioConfig) -> WorldLineSet:
    if config.model is not Model.SINH_GORDON:
        raise ValueError(f"simulate_sg cannot run model {config.model}")
    sg = SgConfig.from_config(config)
    tol_im = config.tolerances.tol_im
    snaps = [sg_roots_at_time(sg, float(t), tol_im) for t in config.time.times()]
    wls = track_roots(snaps)
    wls = refine_events(wls, lambda t: sg_roots_at_time(sg, t, tol_im).n_real,
                        config.tolerances.tol_event)
    meta = dict(wls.metadata)
    meta.update(hamiltonian=hamiltonian(sg), frame=sg.frame)
    return WorldLineSet(wls.lines, wls.events, meta)
