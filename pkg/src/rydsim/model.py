"""Hamiltonians and derived quantities for two-photon Rydberg excitation.

Conventions used throughout:

* user-facing frequencies are ordinary frequencies in MHz, positions in um,
  wavevectors in rad/um; Hamiltonian entries are converted to rad/us here
  (1 MHz of ordinary frequency = 2*pi rad/us), nowhere else;
* everything is written in the frame rotating at the two-photon laser
  frequency, so only detunings appear on the diagonal;
* a positive detuning offset delta_nu (laser above resonance) lowers the
  rotating-frame energy of the excited states, i.e. contributes -delta_nu
  per Rydberg excitation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigError
from .quantum import HermitianOperator, StateVector

TWO_PI = 2.0 * np.pi

SINGLE_ATOM_BASIS = ("g", "r")
TWO_ATOM_BASIS = ("gg", "rg", "gr", "rr")
THREE_LEVEL_BASIS = ("g", "p", "r")

_UNIT_TOL = 1e-12


def _as_unit_vector(v, name) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ConfigError(f"{name} must be a 3-vector, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise ConfigError(f"{name} must be a unit vector, |{name}| = {np.linalg.norm(v)!r}")
    v = v.copy()
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class LaserConfig:
    """Two-photon excitation lasers. Defaults are the production values."""

    omega_r_mhz: float = 260.0          # single-photon Rabi frequency, 795 nm leg
    omega_b_mhz: float = 21.0           # Rabi frequency, 474 nm leg
    delta_intermediate_mhz: float = 400.0   # blue detuning from the intermediate level
    two_photon_detuning_mhz: float = 0.0
    lambda_r_um: float = 0.795
    lambda_b_um: float = 0.474
    dir_r: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    dir_b: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        if self.omega_r_mhz < 0 or self.omega_b_mhz < 0:
            raise ConfigError("Rabi frequencies must be >= 0")
        if self.delta_intermediate_mhz == 0:
            raise ConfigError("intermediate detuning must be nonzero")
        if self.lambda_r_um <= 0 or self.lambda_b_um <= 0:
            raise ConfigError("wavelengths must be > 0")
        object.__setattr__(self, "dir_r", _as_unit_vector(self.dir_r, "dir_r"))
        object.__setattr__(self, "dir_b", _as_unit_vector(self.dir_b, "dir_b"))


@dataclass(frozen=True)
class GeometryConfig:
    """Trap geometry: interatomic separation along the quantization axis."""

    separation_um: float
    axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    c3_mhz_um3: float = 3200.0

    def __post_init__(self):
        if self.separation_um <= 0:
            raise ConfigError(f"separation must be > 0, got {self.separation_um}")
        if self.c3_mhz_um3 < 0:
            raise ConfigError("c3 must be >= 0")
        object.__setattr__(self, "axis", _as_unit_vector(self.axis, "axis"))

    @cached_property
    def trap_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Nominal positions of atoms a and b, symmetric about the origin."""
        half = 0.5 * self.separation_um * self.axis
        minus = -half
        half.flags.writeable = False
        minus.flags.writeable = False
        return half, minus


@dataclass(frozen=True)
class InteractionChannel:
    """One interaction branch of the doubly excited level."""

    shift_mhz: float    # sign allowed
    weight: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0:
            raise ConfigError(f"channel weight must be in [0, 1], got {self.weight}")


def validate_channels(channels) -> tuple[InteractionChannel, ...]:
    """Check that channel weights sum to 1 within 1e-9."""
    channels = tuple(channels)
    if not channels:
        raise ConfigError("channel list must not be empty")
    total = sum(ch.weight for ch in channels)
    if abs(total - 1.0) > 1e-9:
        raise ConfigError(f"channel weights must sum to 1, got {total!r}")
    return channels


def default_channels(geometry: GeometryConfig) -> tuple[InteractionChannel, ...]:
    """Single dominant branch +c3/R^3 with weight 1."""
    return (InteractionChannel(shift_mhz=interaction_shift(geometry), weight=1.0),)


@dataclass(frozen=True)
class EffectiveCoupling:
    """Effective two-photon coupling: Rabi frequency and summed wavevector."""

    omega_mhz: float
    k_eff: np.ndarray   # rad/um, k_red + k_blue

    def __post_init__(self):
        k = np.asarray(self.k_eff, dtype=float).copy()
        if k.shape != (3,):
            raise ConfigError("k_eff must be a 3-vector")
        k.flags.writeable = False
        object.__setattr__(self, "k_eff", k)


def two_photon_rabi(lasers: LaserConfig) -> EffectiveCoupling:
    """Effective coupling of the two-photon transition.

    omega = omega_r * omega_b / (2 * delta_intermediate), and the effective
    wavevector is the sum of the two laser wavevectors.
    """
    omega = lasers.omega_r_mhz * lasers.omega_b_mhz / (2.0 * lasers.delta_intermediate_mhz)
    k_eff = (TWO_PI / lasers.lambda_r_um) * lasers.dir_r + (
        TWO_PI / lasers.lambda_b_um
    ) * lasers.dir_b
    return EffectiveCoupling(omega_mhz=omega, k_eff=k_eff)


def interaction_shift(geometry: GeometryConfig) -> float:
    """Magnitude of the dominant interaction branch, c3 / R^3, in MHz."""
    return geometry.c3_mhz_um3 / geometry.separation_um**3


def blockade_radius(c3_mhz_um3: float, omega_mhz: float) -> float:
    """Distance at which the interaction shift equals the Rabi frequency."""
    if omega_mhz <= 0:
        raise ConfigError(f"omega must be > 0, got {omega_mhz}")
    return (c3_mhz_um3 / omega_mhz) ** (1.0 / 3.0)


def build_single_atom_hamiltonian(
    coupling: EffectiveCoupling, shot, atom: str = "a"
) -> HermitianOperator:
    """Two-level operator on ("g", "r") for one driven atom.

    The coupling carries the laser phase at the atom position,
    (s * omega / 2) * exp(i k.r), and the diagonal is -delta_nu on "r".
    """
    if atom not in ("a", "b"):
        raise ValueError(f"atom must be 'a' or 'b', got {atom!r}")
    r = shot.r_a if atom == "a" else shot.r_b
    c = 0.5 * shot.intensity_scale * coupling.omega_mhz * np.exp(1j * np.dot(coupling.k_eff, r))
    h = np.array([[0.0, np.conj(c)], [c, -shot.delta_nu_mhz]], dtype=complex)
    return HermitianOperator(TWO_PI * h, SINGLE_ATOM_BASIS)


def build_two_atom_hamiltonian(
    coupling: EffectiveCoupling, shot, channel: InteractionChannel
) -> HermitianOperator:
    """Four-level operator on ("gg", "rg", "gr", "rr").

    Each off-diagonal element carries the laser phase of the atom being
    excited by that transition, so the operator is the sum of the two
    single-atom couplings plus the interaction shift on "rr":

        gg <-> rg and gr <-> rr : (s*omega/2) exp(i k.r_a)   (atom a excited)
        gg <-> gr and rg <-> rr : (s*omega/2) exp(i k.r_b)   (atom b excited)

    Diagonal: -delta_nu on the singly excited states, -2*delta_nu + shift
    on "rr".
    """
    c = 0.5 * shot.intensity_scale * coupling.omega_mhz
    ca = c * np.exp(1j * np.dot(coupling.k_eff, shot.r_a))
    cb = c * np.exp(1j * np.dot(coupling.k_eff, shot.r_b))
    h = np.zeros((4, 4), dtype=complex)
    # indices: 0 gg, 1 rg, 2 gr, 3 rr
    h[1, 0] = ca
    h[3, 2] = ca
    h[2, 0] = cb
    h[3, 1] = cb
    h = h + h.conj().T
    h[1, 1] = h[2, 2] = -shot.delta_nu_mhz
    h[3, 3] = -2.0 * shot.delta_nu_mhz + channel.shift_mhz
    return HermitianOperator(TWO_PI * h, TWO_ATOM_BASIS)


def build_three_level_hamiltonian(
    lasers: LaserConfig, compensate_light_shift: bool = True
) -> HermitianOperator:
    """Ladder operator on ("g", "p", "r") for the two-photon transition.

    Couplings omega_r/2 on g<->p and omega_b/2 on p<->r, with the
    intermediate level held off-resonant at +delta. By default the "r"
    diagonal carries the second-order differential light shift
    (omega_b^2 - omega_r^2) / (4*delta), so that zero two-photon detuning
    sits on the dressed (light-shifted) resonance where the experiment
    operates; disable to place "r" at the bare resonance instead.

    This model exists to validate the effective coupling of
    two_photon_rabi; production dynamics use the two-level reduction.
    """
    a = 0.5 * lasers.omega_r_mhz
    b = 0.5 * lasers.omega_b_mhz
    delta = lasers.delta_intermediate_mhz
    e_r = -lasers.two_photon_detuning_mhz
    if compensate_light_shift:
        e_r += (lasers.omega_b_mhz**2 - lasers.omega_r_mhz**2) / (4.0 * delta)
    h = np.array(
        [
            [0.0, a, 0.0],
            [a, delta, b],
            [0.0, b, e_r],
        ],
        dtype=complex,
    )
    return HermitianOperator(TWO_PI * h, THREE_LEVEL_BASIS)


def bright_state(k_eff, r_a, r_b) -> StateVector:
    """Symmetric single-excitation state driven at sqrt(2) * omega.

    (exp(i k.r_a)|rg> + exp(i k.r_b)|gr>) / sqrt(2)
    """
    return _single_excitation_state(k_eff, r_a, r_b, +1.0)


def dark_state(k_eff, r_a, r_b) -> StateVector:
    """Antisymmetric single-excitation state, not coupled to the drive.

    (exp(i k.r_a)|rg> - exp(i k.r_b)|gr>) / sqrt(2)
    """
    return _single_excitation_state(k_eff, r_a, r_b, -1.0)


def _single_excitation_state(k_eff, r_a, r_b, sign) -> StateVector:
    k_eff = np.asarray(k_eff, dtype=float)
    amps = np.zeros(4, dtype=complex)
    amps[1] = np.exp(1j * np.dot(k_eff, np.asarray(r_a, dtype=float)))
    amps[2] = sign * np.exp(1j * np.dot(k_eff, np.asarray(r_b, dtype=float)))
    return StateVector(amps / np.sqrt(2.0), TWO_ATOM_BASIS)
