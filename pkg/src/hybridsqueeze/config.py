"""Scenario configuration: TOML loading, presets and validation.

Frequencies are rad/s unless the section sets ``two_pi = true``, in which
case frequency-valued keys are read in Hz and multiplied by 2 pi.
"""

from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, HybridSqueezeError
from .params import TWO_PI, DeviceParams, table1_device

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

SCENARIOS = ("table1", "fig2a", "fig2b", "fig2c", "fig2d", "fig2e",
             "fig3a", "fig3b", "fig3c", "figA1", "verify")

# key -> is it a frequency (rad/s)?
DEVICE_KEYS = {
    "Q_x": False, "temperature": False, "radius": False, "b0": False, "b1": False,
    "B_z": False, "gamma_s": True, "gamma_z": True, "omega_x": True,
    "omega_K": True, "omega_nv": True, "g": True, "lam": True,
}
FRAME_KEYS = {
    "r_p": False, "omega_p": True, "Omega_p": True, "Delta_s_over_gr": False,
    "Delta_K_over_gr": False, "Delta_NV_over_gr": False, "lam_r_over_gr": False,
}
INTEGRATOR_KEYS = ("method", "dt", "t_end", "n_samples", "rtol", "atol", "max_steps")
SVR_KEYS = ("r_e", "theta_e")
GATE_KEYS = ("enabled", "delta", "tol", "heating_limit")
OPTION_KEYS = ("r_p_min", "r_p_max", "n_points", "radii", "Q_min", "Q_max", "initial")
TOP_KEYS = ("scenario", "out", "rwa", "threads", "seed", "truncation", "device", "frame",
            "integrator", "svr", "gate", "options", "sweep")
SWEEP_AXES = {**DEVICE_KEYS, **FRAME_KEYS}
MAX_ROWS = 2000


@dataclass(frozen=True)
class GateSettings:
    enabled: bool = True
    delta: int = 2
    tol: float = 1e-3
    # runs whose bath would add more than this many quanta over the horizon
    # cannot converge at single-excitation truncations and are not gated
    heating_limit: float = 0.05


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    device: dict = field(default_factory=dict)
    frame: dict = field(default_factory=dict)
    truncation: Optional[tuple] = None
    integrator: dict = field(default_factory=dict)
    svr: Optional[tuple] = None
    gate: GateSettings = GateSettings()
    options: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    out: Path = Path("out")
    rwa: bool = False
    threads: int = 1

    def build_device(self) -> DeviceParams:
        return make_device(self.device)

    def with_point(self, point: dict) -> "ScenarioConfig":
        """Copy with sweep-axis values folded into device/frame overrides."""
        dev, fr = dict(self.device), dict(self.frame)
        for k, v in point.items():
            (dev if k in DEVICE_KEYS else fr)[k] = v
        return replace(self, device=dev, frame=fr, sweep={})


def make_device(over: dict) -> DeviceParams:
    d = table1_device()
    try:
        if "radius" in over:
            d = d.with_radius(over["radius"])
        if "Q_x" in over:
            d = d.with_Q(over["Q_x"])
        if "gamma_s" in over:
            d = d.with_gamma_s(over["gamma_s"])
        if "temperature" in over:
            d = replace(d, temperature=over["temperature"])
        mag, spin = {}, {}
        for k in ("b0", "B_z"):
            if k in over:
                mag[k] = over[k]
        for k in ("b1", "gamma_z"):
            if k in over:
                spin[k] = over[k]
        if "omega_nv" in over:
            spin["omega_nv"] = over["omega_nv"]
        if mag:
            d = replace(d, magnon=replace(d.magnon, **mag))
        if spin:
            d = replace(d, spin=replace(d.spin, **spin))
        for k, attr in (("omega_x", "omega_x_override"), ("omega_K", "omega_K_override"),
                        ("g", "g_override"), ("lam", "lam_override")):
            if k in over:
                d = replace(d, **{attr: over[k]})
    except HybridSqueezeError as e:
        raise ConfigError(str(e), "device") from e
    return d


# --- presets ------------------------------------------------------------------------

_FIG3_FRAME = {"r_p": 1.54, "Delta_s_over_gr": -55.0, "Delta_K_over_gr": -45.0,
               "Delta_NV_over_gr": -45.0, "lam_r_over_gr": 1.0}
_FIG3_DEVICE = {"gamma_s": TWO_PI * 0.1e6, "gamma_z": TWO_PI * 1e3, "Q_x": 1e8}

PRESETS = {
    "table1": {"frame": {"r_p": 2.5}},
    "fig2a": {"options": {"r_p_min": 0.0, "r_p_max": 2.5, "n_points": 251,
                          "radii": [100e-9, 10e-9]}},
    "fig2b": {"options": {"Q_min": 1e5, "Q_max": 1e8, "n_points": 61}},
    "fig2c": {"options": {"r_p_min": 0.0, "r_p_max": 3.0, "n_points": 301}},
    "figA1": {"options": {"r_p_min": 0.05, "r_p_max": 3.0, "n_points": 296}},
    "fig2d": {"frame": {"r_p": 2.5}, "device": {"Q_x": 1e8}, "truncation": (5, 5),
              "integrator": {"t_end": 0.6e-6, "n_samples": 600}, "options": {"initial": "phonon"}},
    "fig2e": {"frame": {"r_p": 2.5}, "device": {"Q_x": 1e3}, "truncation": (5, 5),
              "integrator": {"t_end": 0.6e-6, "n_samples": 600}, "options": {"initial": "phonon"}},
    # tripartite runs at (4, 4): the (+2, +2) gate then stays at dim 72
    "fig3a": {"frame": _FIG3_FRAME, "device": _FIG3_DEVICE, "truncation": (4, 4),
              "integrator": {"n_samples": 400}},
    "fig3b": {"frame": _FIG3_FRAME, "device": _FIG3_DEVICE, "truncation": (4, 4),
              "integrator": {"n_samples": 400},
              "sweep": {"gamma_s": [TWO_PI * 0.1e6, TWO_PI * 0.3e6, TWO_PI * 1.0e6]}},
    "fig3c": {"frame": _FIG3_FRAME, "device": _FIG3_DEVICE, "truncation": (4, 4),
              "integrator": {"n_samples": 400},
              "sweep": {"Q_x": [1e4, 1e6, 1e8]}},
    "verify": {},
}


# --- parsing ------------------------------------------------------------------------

def _number(v, path, positive=False, nonneg=False, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {type(v).__name__}", path)
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError("must be finite", path)
    if positive and not v > 0:
        raise ConfigError("must be positive", path)
    if nonneg and v < 0:
        raise ConfigError("must be non-negative", path)
    if integer:
        if v != int(v):
            raise ConfigError("must be an integer", path)
        return int(v)
    return v


def _table(raw, path) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("expected a table", path)
    return dict(raw)


def _check_keys(d, allowed, path):
    for k in d:
        if k not in allowed and k != "two_pi":
            raise ConfigError(f"unknown key (allowed: {', '.join(sorted(allowed))})", f"{path}.{k}")


def _scale(section, path):
    tp = section.pop("two_pi", False)
    if not isinstance(tp, bool):
        raise ConfigError("expected true/false", f"{path}.two_pi")
    return TWO_PI if tp else 1.0


_NONNEG = {"temperature", "b0", "b1", "gamma_s", "gamma_z", "r_p", "r_e", "lam_r_over_gr"}


def _parse_values(section, keys, path):
    section = _table(section, path)
    _check_keys(section, keys, path)
    k2pi = _scale(section, path)
    out = {}
    for k, v in section.items():
        p = f"{path}.{k}"
        freq = keys[k] if isinstance(keys, dict) else False
        nonneg = k in _NONNEG
        out[k] = _number(v, p, positive=not nonneg and k in ("Q_x", "radius", "B_z"),
                         nonneg=nonneg) * (k2pi if freq else 1.0)
    return out


def _parse_truncation(v, path):
    if isinstance(v, str):
        v = v.split(",")
    if isinstance(v, dict):
        v = [v.get("phonon"), v.get("magnon")]
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ConfigError("expected n_phonon,n_magnon", path)
    try:
        n = tuple(int(str(x).strip()) for x in v)
    except (TypeError, ValueError):
        raise ConfigError("truncations must be integers", path) from None
    if min(n) < 2:
        raise ConfigError("truncations must be >= 2", path)
    return n


def _parse_integrator(section, path):
    section = _table(section, path)
    _check_keys(section, INTEGRATOR_KEYS, path)
    out = {}
    for k, v in section.items():
        p = f"{path}.{k}"
        if k == "method":
            if v not in ("rk4", "rk45"):
                raise ConfigError("method must be 'rk4' or 'rk45'", p)
            out[k] = v
        elif k in ("n_samples", "max_steps"):
            out[k] = _number(v, p, positive=True, integer=True)
        else:
            out[k] = _number(v, p, positive=True)
    if out.get("n_samples", 1) > MAX_ROWS - 1:
        raise ConfigError(f"at most {MAX_ROWS - 1} samples", f"{path}.n_samples")
    return out


def _parse_svr(section, path):
    section = _table(section, path)
    _check_keys(section, SVR_KEYS + ("enabled",), path)
    if section.pop("enabled", True) is False:
        return None
    if "r_e" not in section or "theta_e" not in section:
        raise ConfigError("needs r_e and theta_e", path)
    return (_number(section["r_e"], f"{path}.r_e", nonneg=True),
            _number(section["theta_e"], f"{path}.theta_e"))


def _parse_gate(section, path):
    section = _table(section, path)
    _check_keys(section, GATE_KEYS, path)
    kw = {}
    if "enabled" in section:
        if not isinstance(section["enabled"], bool):
            raise ConfigError("expected true/false", f"{path}.enabled")
        kw["enabled"] = section["enabled"]
    if "delta" in section:
        kw["delta"] = _number(section["delta"], f"{path}.delta", positive=True, integer=True)
    for k in ("tol", "heating_limit"):
        if k in section:
            kw[k] = _number(section[k], f"{path}.{k}", positive=True)
    return GateSettings(**kw)


def _parse_options(section, path):
    section = _table(section, path)
    _check_keys(section, OPTION_KEYS, path)
    out = {}
    for k, v in section.items():
        p = f"{path}.{k}"
        if k == "initial":
            if v not in ("phonon", "magnon"):
                raise ConfigError("initial must be 'phonon' or 'magnon'", p)
            out[k] = v
        elif k == "radii":
            if not isinstance(v, list) or not v:
                raise ConfigError("expected a non-empty list", p)
            out[k] = [_number(x, f"{p}[{i}]", positive=True) for i, x in enumerate(v)]
        elif k == "n_points":
            out[k] = _number(v, p, positive=True, integer=True)
            if out[k] > MAX_ROWS - 1:
                raise ConfigError(f"at most {MAX_ROWS - 1} points", p)
        else:
            out[k] = _number(v, p, nonneg=True)
    return out


def axis_values(spec, path, scale=1.0) -> list:
    """A sweep axis: explicit list or {start, stop, num[, log]}."""
    if isinstance(spec, list):
        vals = [_number(x, f"{path}[{i}]") * scale for i, x in enumerate(spec)]
    elif isinstance(spec, dict):
        _check_keys(spec, ("start", "stop", "num", "log"), path)
        try:
            a = _number(spec["start"], f"{path}.start")
            b = _number(spec["stop"], f"{path}.stop")
            n = _number(spec["num"], f"{path}.num", nonneg=True, integer=True)
        except KeyError as e:
            raise ConfigError(f"missing {e.args[0]}", path) from None
        if spec.get("log", False):
            if a <= 0 or b <= 0:
                raise ConfigError("log axis needs positive bounds", path)
            vals = list(np.geomspace(a, b, n) * scale)
        else:
            vals = list(np.linspace(a, b, n) * scale)
    else:
        raise ConfigError("expected a list or {start, stop, num}", path)
    if not vals:
        raise ConfigError("empty range", path)
    return [float(v) for v in vals]


def _parse_sweep(section, path):
    section = _table(section, path)
    scale = _scale(section, path)
    if not section:
        raise ConfigError("no ranged axis given", path)
    if len(section) > 2:
        raise ConfigError(f"at most two ranged axes, got {len(section)}", path)
    out = {}
    for k, v in section.items():
        if k not in SWEEP_AXES:
            raise ConfigError(f"cannot sweep {k!r}", f"{path}.{k}")
        out[k] = axis_values(v, f"{path}.{k}", scale if SWEEP_AXES[k] else 1.0)
    return out


def _merge(preset: dict, user: dict) -> dict:
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in preset.items()}
    for k, v in user.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "sweep":
            out[k].update(v)
        else:
            out[k] = v
    return out


def config_from_dict(raw: dict, scenario: Optional[str] = None) -> ScenarioConfig:
    raw = _table(raw, "config")
    for k in raw:
        if k not in TOP_KEYS:
            raise ConfigError(f"unknown key (allowed: {', '.join(TOP_KEYS)})", k)
    sid = scenario or raw.get("scenario")
    if sid is None:
        raise ConfigError("no scenario given", "scenario")
    if sid not in SCENARIOS:
        raise ConfigError(f"unknown scenario {sid!r} (one of {', '.join(SCENARIOS)})", "scenario")
    # user values are parsed (scaled) first, then laid over the preset
    user = {}
    if "device" in raw:
        user["device"] = _parse_values(raw["device"], DEVICE_KEYS, "device")
    if "frame" in raw:
        user["frame"] = _parse_values(raw["frame"], FRAME_KEYS, "frame")
    if "integrator" in raw:
        user["integrator"] = _parse_integrator(raw["integrator"], "integrator")
    if "options" in raw:
        user["options"] = _parse_options(raw["options"], "options")
    if "sweep" in raw:
        user["sweep"] = _parse_sweep(raw["sweep"], "sweep")
    merged = _merge(PRESETS[sid], user)

    fr = merged.get("frame", {})
    if "omega_p" in fr and "r_p" in fr and "Omega_p" not in fr:
        raise ConfigError("omega_p needs Omega_p", "frame.Omega_p")
    det = [k for k in fr if k.endswith("_over_gr")]
    if det and ("Delta_s_over_gr" not in fr or "Delta_K_over_gr" not in fr):
        raise ConfigError("detuning frame needs Delta_s_over_gr and Delta_K_over_gr", "frame")

    kw = dict(scenario=sid, device=merged.get("device", {}), frame=fr,
              integrator=merged.get("integrator", {}), options=merged.get("options", {}),
              sweep=merged.get("sweep", {}))
    if "truncation" in raw:
        kw["truncation"] = _parse_truncation(raw["truncation"], "truncation")
    elif "truncation" in merged:
        kw["truncation"] = tuple(merged["truncation"])
    if "svr" in raw:
        kw["svr"] = _parse_svr(raw["svr"], "svr")
    if "gate" in raw:
        kw["gate"] = _parse_gate(raw["gate"], "gate")
    if "out" in raw:
        if not isinstance(raw["out"], str):
            raise ConfigError("expected a path string", "out")
        kw["out"] = Path(raw["out"])
    if "rwa" in raw:
        if not isinstance(raw["rwa"], bool):
            raise ConfigError("expected true/false", "rwa")
        kw["rwa"] = raw["rwa"]
    if "threads" in raw:
        kw["threads"] = _number(raw["threads"], "threads", positive=True, integer=True)
    cfg = ScenarioConfig(**kw)
    validate(cfg)
    return cfg


def validate(cfg: ScenarioConfig):
    """Check overrides against the parameter preconditions before any run."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        make_device(cfg.device)
        for k, vals in cfg.sweep.items():
            for v in vals:
                try:
                    cfg.with_point({k: v}).build_device()
                except ConfigError as e:
                    raise ConfigError(str(e.__cause__ or e), f"sweep.{k}") from e


def load_config(path, scenario: Optional[str] = None) -> ScenarioConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}", str(path)) from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"TOML syntax error: {e}", str(path)) from e
    return config_from_dict(raw, scenario)
