"""Experiment configuration: validated dataclass plus JSON file schema.

JSON field names carry their units (separation_um, omega_r_mhz, ...) so a
config file is self-describing and unit mistakes surface as schema errors.
Named presets reproducing the standard scenarios ship as package data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np

from .errors import ConfigError
from .measurement import MODES, DetectionParams
from .model import (
    GeometryConfig,
    InteractionChannel,
    LaserConfig,
    default_channels,
    validate_channels,
)
from .noise import NoiseModel
from .protocol import ProtocolConfig

PRESET_NAMES = ("fig3a", "fig3b", "fig4", "protocol")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full physical scenario for one pulse-duration scan."""

    lasers: LaserConfig = field(default_factory=LaserConfig)
    geometry: GeometryConfig = field(default_factory=lambda: GeometryConfig(separation_um=3.6))
    channels: tuple[InteractionChannel, ...] | None = None
    noise: NoiseModel = field(default_factory=NoiseModel)
    detection: DetectionParams = field(default_factory=DetectionParams)
    durations_ns: tuple[float, ...] = tuple(float(t) for t in range(0, 501, 20))
    n_shots: int = 100
    seed: int = 0
    mode: str = "two-atom"

    def __post_init__(self):
        channels = self.channels
        if channels is None:
            channels = default_channels(self.geometry)
        object.__setattr__(self, "channels", validate_channels(channels))
        durations = tuple(float(t) for t in self.durations_ns)
        if not durations or any(b <= a for a, b in zip(durations, durations[1:])):
            raise ConfigError("durations_ns must be non-empty and strictly increasing")
        object.__setattr__(self, "durations_ns", durations)
        if self.n_shots < 1:
            raise ConfigError(f"n_shots must be >= 1, got {self.n_shots}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")

    def at_separation(self, separation_um: float) -> "ExperimentConfig":
        """Same scenario at a different distance.

        Explicitly configured channel shifts are rescaled by the 1/R^3
        interaction law; channels derived from the geometry are recomputed.
        """
        geometry = replace(self.geometry, separation_um=separation_um)
        factor = (self.geometry.separation_um / separation_um) ** 3
        channels = tuple(
            replace(ch, shift_mhz=ch.shift_mhz * factor) for ch in self.channels
        )
        return replace(self, geometry=geometry, channels=channels)


def _require_keys(section: dict, allowed: set[str], context: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {context}")


def _get_number(section: dict, key: str, context: str, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"missing required key {key!r} in {context}")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{context}.{key} must be a number, got {value!r}")
    return float(value)


def _get_vector(section: dict, key: str, context: str, default):
    value = section.get(key, default)
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{context}.{key} must be a 3-vector") from None
    if arr.shape != (3,):
        raise ConfigError(f"{context}.{key} must be a 3-vector, got {value!r}")
    return arr


def _lasers_from_json(section: dict) -> LaserConfig:
    ctx = "lasers"
    _require_keys(
        section,
        {"omega_r_mhz", "omega_b_mhz", "delta_intermediate_mhz", "two_photon_detuning_mhz",
         "lambda_r_um", "lambda_b_um", "dir_r", "dir_b"},
        ctx,
    )
    defaults = LaserConfig()
    return LaserConfig(
        omega_r_mhz=_get_number(section, "omega_r_mhz", ctx, defaults.omega_r_mhz),
        omega_b_mhz=_get_number(section, "omega_b_mhz", ctx, defaults.omega_b_mhz),
        delta_intermediate_mhz=_get_number(
            section, "delta_intermediate_mhz", ctx, defaults.delta_intermediate_mhz
        ),
        two_photon_detuning_mhz=_get_number(
            section, "two_photon_detuning_mhz", ctx, 0.0
        ),
        lambda_r_um=_get_number(section, "lambda_r_um", ctx, defaults.lambda_r_um),
        lambda_b_um=_get_number(section, "lambda_b_um", ctx, defaults.lambda_b_um),
        dir_r=_get_vector(section, "dir_r", ctx, defaults.dir_r),
        dir_b=_get_vector(section, "dir_b", ctx, defaults.dir_b),
    )


def _geometry_from_json(section: dict) -> GeometryConfig:
    ctx = "geometry"
    _require_keys(section, {"separation_um", "axis", "c3_mhz_um3"}, ctx)
    return GeometryConfig(
        separation_um=_get_number(section, "separation_um", ctx),
        axis=_get_vector(section, "axis", ctx, [0.0, 0.0, 1.0]),
        c3_mhz_um3=_get_number(section, "c3_mhz_um3", ctx, 3200.0),
    )


def _channels_from_json(entries) -> tuple[InteractionChannel, ...]:
    if not isinstance(entries, list):
        raise ConfigError("channels must be a list of {shift_mhz, weight} objects")
    channels = []
    for i, entry in enumerate(entries):
        ctx = f"channels[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{ctx} must be an object")
        _require_keys(entry, {"shift_mhz", "weight"}, ctx)
        channels.append(
            InteractionChannel(
                shift_mhz=_get_number(entry, "shift_mhz", ctx),
                weight=_get_number(entry, "weight", ctx, 1.0),
            )
        )
    return validate_channels(channels)


def _noise_from_json(section: dict) -> NoiseModel:
    ctx = "noise"
    _require_keys(
        section,
        {"freq_jitter_rms_mhz", "intensity_rms", "pumping_efficiency", "temperature_uk",
         "sigma_longitudinal_um", "sigma_radial_um", "longitudinal_axis"},
        ctx,
    )
    defaults = NoiseModel()
    return NoiseModel(
        freq_jitter_rms_mhz=_get_number(
            section, "freq_jitter_rms_mhz", ctx, defaults.freq_jitter_rms_mhz
        ),
        intensity_rms=_get_number(section, "intensity_rms", ctx, defaults.intensity_rms),
        pumping_efficiency=_get_number(
            section, "pumping_efficiency", ctx, defaults.pumping_efficiency
        ),
        temperature_uk=_get_number(section, "temperature_uk", ctx, defaults.temperature_uk),
        sigma_longitudinal_um=_get_number(
            section, "sigma_longitudinal_um", ctx, defaults.sigma_longitudinal_um
        ),
        sigma_radial_um=_get_number(
            section, "sigma_radial_um", ctx, defaults.sigma_radial_um
        ),
        longitudinal_axis=_get_vector(
            section, "longitudinal_axis", ctx, defaults.longitudinal_axis
        ),
    )


def _detection_from_json(section: dict) -> DetectionParams:
    ctx = "detection"
    _require_keys(section, {"p_loss_given_rydberg", "p_loss_given_ground"}, ctx)
    return DetectionParams(
        p_loss_given_rydberg=_get_number(section, "p_loss_given_rydberg", ctx, 1.0),
        p_loss_given_ground=_get_number(section, "p_loss_given_ground", ctx, 0.0),
    )


def _durations_from_json(value) -> tuple[float, ...]:
    if isinstance(value, dict):
        _require_keys(value, {"start_ns", "stop_ns", "step_ns"}, "durations_ns")
        start = _get_number(value, "start_ns", "durations_ns")
        stop = _get_number(value, "stop_ns", "durations_ns")
        step = _get_number(value, "step_ns", "durations_ns")
        if step <= 0 or stop <= start:
            raise ConfigError("durations_ns range must have step_ns > 0 and stop_ns > start_ns")
        return tuple(np.arange(start, stop + 0.5 * step, step))
    if isinstance(value, list):
        return tuple(float(t) for t in value)
    raise ConfigError("durations_ns must be a list or a {start_ns, stop_ns, step_ns} object")


_TOP_LEVEL_KEYS = {
    "mode", "seed", "n_shots", "durations_ns", "lasers", "geometry",
    "channels", "noise", "detection", "protocol",
}


def config_from_dict(document: dict) -> ExperimentConfig:
    if not isinstance(document, dict):
        raise ConfigError("config document must be a JSON object")
    _require_keys(document, _TOP_LEVEL_KEYS, "config")
    if "geometry" not in document:
        raise ConfigError("missing required section 'geometry'")
    geometry = _geometry_from_json(document["geometry"])
    channels = None
    if "channels" in document:
        channels = _channels_from_json(document["channels"])
    durations = ExperimentConfig.__dataclass_fields__["durations_ns"].default
    if "durations_ns" in document:
        durations = _durations_from_json(document["durations_ns"])
    mode = document.get("mode", "two-atom")
    if not isinstance(mode, str):
        raise ConfigError(f"mode must be a string, got {mode!r}")
    seed = document.get("seed", 0)
    n_shots = document.get("n_shots", 100)
    for name, value in (("seed", seed), ("n_shots", n_shots)):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer, got {value!r}")
    return ExperimentConfig(
        lasers=_lasers_from_json(document.get("lasers", {})),
        geometry=geometry,
        channels=channels,
        noise=_noise_from_json(document.get("noise", {})),
        detection=_detection_from_json(document.get("detection", {})),
        durations_ns=durations,
        n_shots=n_shots,
        seed=seed,
        mode=mode,
    )


def protocol_from_dict(document: dict, experiment: ExperimentConfig) -> ProtocolConfig:
    """Protocol section on top of the experiment's lasers/geometry/noise."""
    section = document.get("protocol", {})
    ctx = "protocol"
    _require_keys(
        section,
        {"pulse1_duration_ns", "pulse2_omega_mhz", "pulse2_k_per_um",
         "pulse2_duration_ns", "resample_positions_between_pulses", "n_shots"},
        ctx,
    )
    pulse1_ns = pulse2_ns = pulse2_omega = pulse2_k = None
    if "pulse1_duration_ns" in section:
        pulse1_ns = _get_number(section, "pulse1_duration_ns", ctx)
    if "pulse2_duration_ns" in section:
        pulse2_ns = _get_number(section, "pulse2_duration_ns", ctx)
    if "pulse2_omega_mhz" in section:
        pulse2_omega = _get_number(section, "pulse2_omega_mhz", ctx)
    if "pulse2_k_per_um" in section:
        pulse2_k = _get_vector(section, "pulse2_k_per_um", ctx, None)
    resample = section.get("resample_positions_between_pulses", False)
    if not isinstance(resample, bool):
        raise ConfigError(f"{ctx}.resample_positions_between_pulses must be a boolean")
    return ProtocolConfig(
        lasers=experiment.lasers,
        geometry=experiment.geometry,
        noise=experiment.noise,
        channels=experiment.channels,
        pulse1_duration_us=None if pulse1_ns is None else pulse1_ns * 1e-3,
        pulse2_omega_mhz=pulse2_omega,
        pulse2_k=pulse2_k,
        pulse2_duration_us=None if pulse2_ns is None else pulse2_ns * 1e-3,
        resample_positions_between_pulses=resample,
    )


def protocol_shots(document: dict, default: int = 100) -> int:
    value = document.get("protocol", {}).get("n_shots", default)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"protocol.n_shots must be a positive integer, got {value!r}")
    return value


def load_config_document(path) -> dict:
    """Read and parse a JSON config file (malformed JSON is a schema error)."""
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None


def load_config(path) -> ExperimentConfig:
    return config_from_dict(load_config_document(path))


def load_preset_document(name: str) -> dict:
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; available: {PRESET_NAMES}")
    text = resources.files("rydsim.presets").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def load_preset(name: str) -> ExperimentConfig:
    return config_from_dict(load_preset_document(name))
