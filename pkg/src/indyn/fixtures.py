"""Named scenario documents reproducing the reference world-line pictures.

Each entry is a plain config document (the same JSON schema the CLI reads),
so fixtures also exercise the loader.  ``scripts/write_configs.py`` dumps
them into ``configs/``.
"""

from __future__ import annotations

import json
import math

from .core import ScenarioConfig
from .io import load_config


def _particles(a, p, eps=None):
    eps = eps or [1] * len(p)
    return [{"a": list(ai) if isinstance(ai, (list, tuple)) else [ai, 0.0],
             "p": list(pi) if isinstance(pi, (list, tuple)) else [pi, 0.0],
             "epsilon": e} for ai, pi, e in zip(a, p, eps)]


_RAPIDITY = 0.6
_P_FAST, _P_SLOW = math.exp(_RAPIDITY), math.exp(-_RAPIDITY)

DOCS: dict[str, dict] = {
    # two particles under repulsion exchange their momenta
    "fig1_cm_repulsive": {
        "model": "cm", "gamma_squared": -1.0,
        "particles": _particles([0.0, 0.0], [1.0, -1.0]),
        "time": {"start": -3.0, "end": 3.0, "samples": 601},
    },
    # attractive pair: annihilation at -0.5, creation at +0.5
    "fig2_cm_attractive": {
        "model": "cm", "gamma_squared": 1.0,
        "particles": _particles([0.0, 0.0], [1.0, -1.0]),
        "time": {"start": -2.0, "end": 2.0, "samples": 401},
    },
    "fig3_cm_four": {
        "model": "cm", "gamma_squared": 1.0,
        "particles": _particles([-0.3, 0.2, -0.1, 0.25], [2.0, 0.8, -0.7, -1.9]),
        "time": {"start": -3.0, "end": 3.0, "samples": 601},
    },
    # odd N: one particle always survives, and it bends while the others are gone
    "fig4_cm_five": {
        "model": "cm", "gamma_squared": 1.0,
        "particles": _particles([-0.1, 0.2, 0.3, -0.2, 0.1], [2.0, 1.0, 0.15, -1.0, -2.0]),
        "time": {"start": -3.0, "end": 3.0, "samples": 601},
    },
    "fig5_goldfish_billiard": {
        "model": "goldfish",
        "init_positions": [-5.0, 0.0, 1.0, 2.0, 3.0, 4.0],
        "init_velocities": [1.0, 1e-4, 1e-4, 1e-4, 1e-4, 1e-4],
        "time": {"start": 0.0, "end": 30.0, "samples": 601},
    },
    # complex-conjugate data: the pair only exists on -1 < t < 0
    "cm_unstable_pair": {
        "model": "cm", "gamma_squared": 1.0,
        "particles": _particles([[0.0, 0.5], [0.0, -0.5]], [[0.0, 1.0], [0.0, -1.0]]),
        "time": {"start": -1.5, "end": 0.5, "samples": 201},
    },
    "cm_smooth": {
        "model": "cm", "gamma_squared": -0.09,
        "particles": _particles([0.0, 0.0], [1.0, -1.0]),
        "time": {"start": -0.5, "end": 0.5, "samples": 1001},
    },
    "cm_smooth_three": {
        "model": "cm", "gamma_squared": -0.09,
        "particles": _particles([0.0, 0.05, 0.0], [1.0, 0.0, -1.0]),
        "time": {"start": -0.5, "end": 0.5, "samples": 1001},
    },
    "rs_smooth": {
        "model": "rs", "gamma_squared": -0.09,
        "particles": _particles([0.0, 0.0], [1.5, 0.5]),
        "time": {"start": -0.5, "end": 0.5, "samples": 1001},
    },
    "rs_three": {
        "model": "rs", "gamma_squared": -1.0,
        "particles": _particles([0.0, 0.1, 0.2], [2.0, 1.0, 0.5]),
        "time": {"start": -2.0, "end": 2.0, "samples": 401},
    },
    "rs_attractive": {
        "model": "rs", "gamma_squared": 1.0,
        "particles": _particles([0.0, 0.0], [2.0, 0.5]),
        "time": {"start": -2.0, "end": 2.0, "samples": 401},
    },
    "goldfish_pair": {
        "model": "goldfish", "init_positions": [-1.0, 1.0], "init_velocities": [1.0, 0.0],
        "time": {"start": -1.0, "end": 4.0, "samples": 501},
    },
    "goldfish_opposite": {
        "model": "goldfish", "init_positions": [-1.0, 1.0], "init_velocities": [1.0, -1.0],
        "time": {"start": -1.0, "end": 2.0, "samples": 301},
    },
    "goldfish_smooth": {
        "model": "goldfish", "init_positions": [0.0, 1.0, 3.0], "init_velocities": [2.0, 1.0, 0.5],
        "time": {"start": 0.1, "end": 1.1, "samples": 1001},
    },
    "sg_single": {
        "model": "sinh_gordon",
        "particles": _particles([0.0], [1.0], [-1]),
        "time": {"start": -2.0, "end": 2.0, "samples": 81},
        "x_scan": {"x_min": -10.0, "x_max": 10.0, "n_grid": 512},
    },
    # center-of-mass lab frame, rapidities +-0.6
    "sg_repulsive": {
        "model": "sinh_gordon", "frame": "lab",
        "particles": _particles([0.0, 0.0], [_P_FAST, _P_SLOW], [-1, -1]),
        "time": {"start": -3.0, "end": 3.0, "samples": 601},
        "x_scan": {"x_min": -10.0, "x_max": 10.0, "n_grid": 512},
        "tolerances": {"tol_root": 1e-14},
    },
    "sg_opposite": {
        "model": "sinh_gordon", "frame": "lab",
        "particles": _particles([0.0, 0.0], [_P_FAST, _P_SLOW], [1, -1]),
        "time": {"start": -3.0, "end": 3.0, "samples": 601},
        "x_scan": {"x_min": -10.0, "x_max": 10.0, "n_grid": 512},
        "tolerances": {"tol_root": 1e-14},
    },
    "sg_breather": {
        "model": "sinh_gordon",
        "particles": _particles([[0.0, 0.0], [0.0, 0.0]], [[1.0, 0.5], [1.0, -0.5]], [-1, -1]),
        "time": {"start": -4.0, "end": 4.0, "samples": 401},
        "x_scan": {"x_min": -10.0, "x_max": 10.0, "n_grid": 512},
    },
}

SMOOTH = ("cm_smooth", "cm_smooth_three", "rs_smooth", "goldfish_smooth")


def document(name: str) -> str:
    return json.dumps(DOCS[name], indent=2, sort_keys=True) + "\n"


def load(name: str) -> ScenarioConfig:
    return load_config(document(name))
