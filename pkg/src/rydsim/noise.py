"""Shot-to-shot noise sampling: laser jitter, intensity, pumping, thermal positions.

The motion of the atoms is frozen during a pulse sequence; the trap
temperature only disperses the positions from shot to shot. Position spread
defaults convert the classical thermal turning points (+-800 nm along the
trap axis, +-200 nm transverse, at 70 uK) to Gaussian sigmas via
sigma = amplitude / sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigError
from .model import GeometryConfig, InteractionChannel, _as_unit_vector

MOTION_AMPLITUDE_LONGITUDINAL_UM = 0.8
MOTION_AMPLITUDE_RADIAL_UM = 0.2


def thermal_sigma(amplitude_um: float, amplitude_is_sigma: bool = False) -> float:
    """Gaussian position sigma from a classical turning-point amplitude.

    Equipartition gives 0.5*m*w^2*a^2 = kB*T at the turning point a while
    the position variance is kB*T/(m*w^2), hence sigma = a/sqrt(2). Set
    amplitude_is_sigma for the alternative reading where the quoted
    amplitude already is the RMS spread.
    """
    if amplitude_is_sigma:
        return amplitude_um
    return amplitude_um / math.sqrt(2.0)


@dataclass(frozen=True)
class NoiseModel:
    """Imperfection budget for one excitation sequence."""

    freq_jitter_rms_mhz: float = 1.0        # two-photon resonance jitter, shot to shot
    intensity_rms: float = 0.05             # relative, common to the pulse
    pumping_efficiency: float = 0.90
    temperature_uk: float = 70.0            # informational; sigmas below carry the effect
    sigma_longitudinal_um: float = thermal_sigma(MOTION_AMPLITUDE_LONGITUDINAL_UM)
    sigma_radial_um: float = thermal_sigma(MOTION_AMPLITUDE_RADIAL_UM)
    longitudinal_axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0, 0.0]))

    def __post_init__(self):
        for name in ("freq_jitter_rms_mhz", "intensity_rms", "temperature_uk",
                     "sigma_longitudinal_um", "sigma_radial_um"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if not 0.0 <= self.pumping_efficiency <= 1.0:
            raise ConfigError("pumping_efficiency must be in [0, 1]")
        object.__setattr__(
            self, "longitudinal_axis",
            _as_unit_vector(self.longitudinal_axis, "longitudinal_axis"),
        )

    @classmethod
    def off(cls) -> "NoiseModel":
        """Noiseless model: every shot is the nominal configuration."""
        return cls(
            freq_jitter_rms_mhz=0.0,
            intensity_rms=0.0,
            pumping_efficiency=1.0,
            temperature_uk=0.0,
            sigma_longitudinal_um=0.0,
            sigma_radial_um=0.0,
        )

    @cached_property
    def trap_frame(self) -> np.ndarray:
        """Orthonormal rows (longitudinal, transverse1, transverse2)."""
        long_ax = self.longitudinal_axis
        helper = np.array([1.0, 0.0, 0.0])
        if abs(np.dot(helper, long_ax)) > 0.9:
            helper = np.array([0.0, 0.0, 1.0])
        t1 = np.cross(long_ax, helper)
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(long_ax, t1)
        frame = np.vstack([long_ax, t1, t2])
        frame.flags.writeable = False
        return frame

    @cached_property
    def _sigma_vector(self) -> np.ndarray:
        sig = np.array(
            [self.sigma_longitudinal_um, self.sigma_radial_um, self.sigma_radial_um]
        )
        sig.flags.writeable = False
        return sig


@dataclass(frozen=True)
class ShotParams:
    """One Monte Carlo realization of the experiment."""

    delta_nu_mhz: float
    intensity_scale: float
    r_a: np.ndarray     # um, includes the nominal trap center
    r_b: np.ndarray
    pumped_a: bool
    pumped_b: bool
    channel_index: int = 0

    def __post_init__(self):
        if self.intensity_scale <= 0:
            raise ConfigError("intensity_scale must be > 0")
        for name in ("r_a", "r_b"):
            v = np.asarray(getattr(self, name), dtype=float).copy()
            if v.shape != (3,):
                raise ConfigError(f"{name} must be a 3-vector")
            v.flags.writeable = False
            object.__setattr__(self, name, v)


def nominal_shot(geometry: GeometryConfig) -> ShotParams:
    """The zero-noise realization: nominal positions, unit intensity."""
    r_a, r_b = geometry.trap_centers
    return ShotParams(
        delta_nu_mhz=0.0, intensity_scale=1.0, r_a=r_a, r_b=r_b,
        pumped_a=True, pumped_b=True, channel_index=0,
    )


def _sample_displacement(noise: NoiseModel, rng) -> np.ndarray:
    return (noise._sigma_vector * rng.standard_normal(3)) @ noise.trap_frame


def sample_positions(
    noise: NoiseModel, geometry: GeometryConfig, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Thermal positions of both atoms about their trap centers."""
    center_a, center_b = geometry.trap_centers
    return (
        center_a + _sample_displacement(noise, rng),
        center_b + _sample_displacement(noise, rng),
    )


def sample_shot(
    noise: NoiseModel,
    geometry: GeometryConfig,
    rng: np.random.Generator,
    channels: tuple[InteractionChannel, ...] | None = None,
) -> ShotParams:
    """Draw one shot realization from the noise model.

    Draw order is fixed (detuning, intensity, displacement a, displacement b,
    pumping a, pumping b, channel) so a given seed always yields the same
    shot sequence.
    """
    delta_nu = noise.freq_jitter_rms_mhz * rng.standard_normal()

    scale = 1.0 + noise.intensity_rms * rng.standard_normal()
    while scale <= 0.0:    # truncate the Gaussian to positive intensity
        scale = 1.0 + noise.intensity_rms * rng.standard_normal()

    r_a, r_b = sample_positions(noise, geometry, rng)

    pumped_a = bool(rng.random() < noise.pumping_efficiency)
    pumped_b = bool(rng.random() < noise.pumping_efficiency)

    channel_index = 0
    if channels is not None and len(channels) > 1:
        weights = np.array([ch.weight for ch in channels])
        channel_index = int(rng.choice(len(channels), p=weights / weights.sum()))

    return ShotParams(
        delta_nu_mhz=delta_nu,
        intensity_scale=scale,
        r_a=r_a,
        r_b=r_b,
        pumped_a=pumped_a,
        pumped_b=pumped_b,
        channel_index=channel_index,
    )


def frozen_phase(shot: ShotParams, k_eff) -> float:
    """Relative laser phase k.(r_a - r_b) of the two superposition branches."""
    return float(np.dot(np.asarray(k_eff, dtype=float), shot.r_a - shot.r_b))
