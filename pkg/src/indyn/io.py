"""Configuration documents and trajectory / event exports.

Config documents are JSON objects; complex numbers are ``[re, im]`` pairs
(a bare number is accepted as a real value).  Exports are byte-deterministic:
numbers are written with 17 significant digits and keys in a fixed order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .core import (
    EventKind,
    EventRecord,
    Model,
    ParticleParams,
    ScenarioConfig,
    TimeGrid,
    Tolerances,
    WorldLine,
    WorldLineSet,
    XScan,
    validate_scenario,
)
from .errors import ParseError

CSV_COLUMNS = ("t", "line_id", "x", "v_est", "alive")

_TOP_FIELDS = {"model", "gamma_squared", "particles", "init_positions", "init_velocities",
               "time", "tolerances", "x_scan", "frame"}
_PARTICLE_FIELDS = {"a", "p", "epsilon"}
_TIME_FIELDS = {"start", "end", "samples"}
_TOL_FIELDS = {"tol_im", "tol_root", "tol_event", "tol_residual"}
_SCAN_FIELDS = {"x_min", "x_max", "n_grid"}


def fmt(x: float) -> str:
    """17 significant digits; empty string for NaN."""
    x = float(x)
    if math.isnan(x):
        return ""
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# config documents


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ParseError(f"missing field {key!r} in {where}", field=key)
    return doc[key]


def _check_keys(doc: Any, allowed: set, where: str) -> dict:
    if not isinstance(doc, dict):
        raise ParseError(f"{where} must be a JSON object", field=where)
    extra = set(doc) - allowed
    if extra:
        raise ParseError(f"unknown field(s) {sorted(extra)} in {where}", field=sorted(extra)[0])
    return doc


def _number(v, name: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"field {name!r} must be a number, got {v!r}", field=name)
    v = float(v)
    if not math.isfinite(v):
        raise ParseError(f"field {name!r} must be finite", field=name)
    return v


def _integer(v, name: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, float) and v.is_integer():
            return int(v)
        raise ParseError(f"field {name!r} must be an integer, got {v!r}", field=name)
    return v


def _complex(v, name: str) -> complex:
    if isinstance(v, list):
        if len(v) != 2:
            raise ParseError(f"field {name!r} must be a [re, im] pair", field=name)
        return complex(_number(v[0], name), _number(v[1], name))
    return complex(_number(v, name), 0.0)


def _number_list(v, name: str) -> tuple[float, ...]:
    if not isinstance(v, list):
        raise ParseError(f"field {name!r} must be a list of numbers", field=name)
    return tuple(_number(x, name) for x in v)


def config_from_dict(doc: Any) -> ScenarioConfig:
    """Build (without validating) a scenario from a parsed JSON object."""
    doc = _check_keys(doc, _TOP_FIELDS, "config")
    model_name = _require(doc, "model", "config")
    try:
        model = Model(model_name)
    except (ValueError, TypeError):
        raise ParseError(f"unknown model {model_name!r}", field="model") from None

    t = _check_keys(_require(doc, "time", "config"), _TIME_FIELDS, "time")
    grid = TimeGrid(_number(_require(t, "start", "time"), "start"),
                    _number(_require(t, "end", "time"), "end"),
                    _integer(_require(t, "samples", "time"), "samples"))

    tol_doc = _check_keys(doc.get("tolerances", {}), _TOL_FIELDS, "tolerances")
    tol_kw = {}
    for k, v in tol_doc.items():
        tol_kw[k] = None if (k == "tol_im" and v is None) else _number(v, k)
    tolerances = Tolerances(**tol_kw)

    scan_doc = _check_keys(doc.get("x_scan", {}), _SCAN_FIELDS, "x_scan")
    scan_kw = {k: (_integer(v, k) if k == "n_grid" else _number(v, k)) for k, v in scan_doc.items()}
    x_scan = XScan(**scan_kw)

    frame = doc.get("frame", "lightcone")
    if not isinstance(frame, str):
        raise ParseError("field 'frame' must be a string", field="frame")

    kw: dict[str, Any] = dict(model=model, time=grid, tolerances=tolerances, x_scan=x_scan, frame=frame)
    if model in (Model.CM, Model.RS):
        kw["gamma_squared"] = _number(_require(doc, "gamma_squared", "config"), "gamma_squared")
    elif "gamma_squared" in doc and doc["gamma_squared"] is not None:
        kw["gamma_squared"] = _number(doc["gamma_squared"], "gamma_squared")

    if model is Model.GOLDFISH:
        kw["init_positions"] = _number_list(_require(doc, "init_positions", "config"), "init_positions")
        kw["init_velocities"] = _number_list(_require(doc, "init_velocities", "config"), "init_velocities")
    else:
        plist = _require(doc, "particles", "config")
        if not isinstance(plist, list):
            raise ParseError("field 'particles' must be a list", field="particles")
        particles = []
        for i, pd in enumerate(plist):
            pd = _check_keys(pd, _PARTICLE_FIELDS, f"particles[{i}]")
            eps = _integer(pd.get("epsilon", 1), "epsilon")
            particles.append(ParticleParams(_complex(pd.get("a", 0.0), "a"),
                                            _complex(_require(pd, "p", f"particles[{i}]"), "p"),
                                            eps))
        kw["particles"] = tuple(particles)
    return ScenarioConfig(**kw)


def load_config(text: str | bytes) -> ScenarioConfig:
    """Parse and validate a JSON configuration document."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"config is not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    except RecursionError:
        raise ParseError("config nests too deeply") from None
    return validate_scenario(config_from_dict(doc))


def _pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def config_to_dict(config: ScenarioConfig) -> dict:
    """Canonical document; ``config_from_dict(config_to_dict(c)) == c``."""
    doc: dict[str, Any] = {"model": config.model.value}
    if config.gamma_squared is not None:
        doc["gamma_squared"] = config.gamma_squared
    if config.model is Model.GOLDFISH:
        doc["init_positions"] = list(config.init_positions)
        doc["init_velocities"] = list(config.init_velocities)
    else:
        doc["particles"] = [{"a": _pair(pp.a), "p": _pair(pp.p), "epsilon": pp.epsilon}
                            for pp in config.particles]
    doc["time"] = {"start": config.time.start, "end": config.time.end, "samples": config.time.samples}
    tol = config.tolerances
    doc["tolerances"] = {"tol_im": tol.tol_im, "tol_root": tol.tol_root,
                         "tol_event": tol.tol_event, "tol_residual": tol.tol_residual}
    if config.model is Model.SINH_GORDON:
        doc["x_scan"] = {"x_min": config.x_scan.x_min, "x_max": config.x_scan.x_max,
                         "n_grid": config.x_scan.n_grid}
        doc["frame"] = config.frame
    return doc


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_digest(config: ScenarioConfig) -> str:
    return hashlib.sha256(canonical_json(config_to_dict(config)).encode()).hexdigest()


# ---------------------------------------------------------------------------
# exports


@dataclass(frozen=True)
class ExportBundle:
    lines: WorldLineSet
    config: ScenarioConfig | None = None
    extra: dict = field(default_factory=dict)

    def metadata(self) -> dict:
        meta: dict[str, Any] = {"tool": "indyn", "version": __version__}
        if self.config is not None:
            cfg = config_to_dict(self.config)
            meta.update(model=cfg["model"], parameters=cfg, tolerances=cfg["tolerances"],
                        config_digest=config_digest(self.config))
        meta["n_lines"] = len(self.lines.lines)
        meta["n_events"] = len(self.lines.events)
        for k, v in sorted({**self.lines.metadata, **self.extra}.items()):
            meta[k] = v
        return meta


def trajectories_csv(lines: WorldLineSet) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for ln in lines.lines:
        for t, x, v, a in zip(ln.t, ln.x, ln.v_est, ln.alive):
            buf.write(f"{fmt(t)},{ln.id},{fmt(x)},{fmt(v)},{1 if a else 0}\n")
    return buf.getvalue()


def event_json(ev: EventRecord) -> str:
    ids = ",".join(str(int(i)) for i in ev.line_ids)
    return (f'{{"kind":"{ev.kind.value}","t_event":{fmt(ev.t_event)},'
            f'"bracket_width":{fmt(ev.t_bracket_width)},"line_ids":[{ids}]}}')


def events_jsonl(lines: WorldLineSet) -> str:
    return "".join(event_json(ev) + "\n" for ev in lines.events)


def export_trajectories(bundle: ExportBundle, format: str = "csv") -> str:
    """``csv``: the trajectory table; ``jsonl``: one event record per line."""
    if format == "csv":
        return trajectories_csv(bundle.lines)
    if format == "jsonl":
        return events_jsonl(bundle.lines)
    raise ValueError(f"unknown export format {format!r}")


def metadata_json(bundle: ExportBundle) -> str:
    return json.dumps(bundle.metadata(), sort_keys=True, indent=2, allow_nan=False) + "\n"


def parse_trajectories_csv(text: str) -> WorldLineSet:
    """Inverse of :func:`trajectories_csv` (events are not part of the table)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty trajectory file") from None
    if tuple(header) != CSV_COLUMNS:
        raise ParseError(f"unexpected CSV header {header}", 1, 1)
    rows: dict[int, list] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise ParseError(f"expected {len(CSV_COLUMNS)} columns", lineno, 1)
        try:
            t, lid, x = float(row[0]), int(row[1]), float(row[2])
            v = float(row[3]) if row[3] else math.nan
            alive = {"1": True, "0": False}[row[4]]
        except (ValueError, KeyError):
            raise ParseError(f"malformed row {row}", lineno, 1) from None
        rows.setdefault(lid, []).append((t, x, v, alive))
    lines = []
    for lid in sorted(rows):
        arr = rows[lid]
        lines.append(WorldLine(lid, np.array([r[0] for r in arr]),
                               np.array([r[1] for r in arr], dtype=complex),
                               np.array([r[3] for r in arr], dtype=bool),
                               np.array([r[2] for r in arr])))
    return WorldLineSet(tuple(lines))


def parse_events_jsonl(text: str) -> tuple[EventRecord, ...]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            d = json.loads(raw)
            out.append(EventRecord(EventKind(d["kind"]), float(d["t_event"]),
                                   tuple(int(i) for i in d["line_ids"]), float(d["bracket_width"])))
        except (json.JSONDecodeError, KeyError, ValueError, TypeError):
            raise ParseError("malformed event record", lineno, 1) from None
    return tuple(out)
