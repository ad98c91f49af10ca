"""Induced dynamics: particle world lines as real roots of algebraic equations."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    EventKind,
    EventRecord,
    Model,
    ParticleParams,
    RootSnapshot,
    ScenarioConfig,
    TimeGrid,
    Tolerances,
    WorldLine,
    WorldLineSet,
    XScan,
    localize_event,
    track_roots,
    validate_scenario,
)
from .pipeline import simulate  # noqa: E402

__all__ = [
    "EventKind", "EventRecord", "Model", "ParticleParams", "RootSnapshot", "ScenarioConfig",
    "TimeGrid", "Tolerances", "WorldLine", "WorldLineSet", "XScan", "localize_event",
    "simulate", "track_roots", "validate_scenario",
]
