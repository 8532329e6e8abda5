"""Two-atom Rydberg blockade simulator and analysis toolkit.

Simulates the excitation of two individually trapped atoms to a Rydberg
level through a two-photon transition: independent Rabi oscillations at
large separation, blockade of double excitation at short separation, the
sqrt(2) collective enhancement of the single-excitation oscillation, and a
two-pulse phase-erasure sequence that turns the blockaded excitation into a
hyperfine Bell state. A shot-to-shot noise model (laser frequency jitter,
intensity fluctuations, imperfect optical pumping, thermal position spread)
reproduces realistic damping and excitation ceilings.
"""

from .analysis import FitResult, FrequencyRatio, fit_damped_cosine, fit_damped_cosine_xy, frequency_ratio
from .config import ExperimentConfig, load_config, load_preset
from .errors import BasisMismatchError, ConfigError, FitError
from .measurement import (
    DataSet,
    DetectionParams,
    detect,
    outcome_probabilities,
    run_exact,
    run_experiment,
)
from .model import (
    EffectiveCoupling,
    GeometryConfig,
    InteractionChannel,
    LaserConfig,
    blockade_radius,
    bright_state,
    build_single_atom_hamiltonian,
    build_three_level_hamiltonian,
    build_two_atom_hamiltonian,
    dark_state,
    interaction_shift,
    two_photon_rabi,
)
from .noise import NoiseModel, ShotParams, frozen_phase, sample_shot
from .protocol import ProtocolConfig, ProtocolResult, run_protocol
from .quantum import (
    HermitianOperator,
    StateVector,
    overlap_probability,
    population,
    propagate_piecewise_constant,
    propagate_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "BasisMismatchError",
    "ConfigError",
    "DataSet",
    "DetectionParams",
    "EffectiveCoupling",
    "ExperimentConfig",
    "FitError",
    "FitResult",
    "FrequencyRatio",
    "GeometryConfig",
    "HermitianOperator",
    "InteractionChannel",
    "LaserConfig",
    "NoiseModel",
    "ProtocolConfig",
    "ProtocolResult",
    "ShotParams",
    "StateVector",
    "blockade_radius",
    "bright_state",
    "build_single_atom_hamiltonian",
    "build_three_level_hamiltonian",
    "build_two_atom_hamiltonian",
    "dark_state",
    "detect",
    "fit_damped_cosine",
    "fit_damped_cosine_xy",
    "frequency_ratio",
    "frozen_phase",
    "interaction_shift",
    "load_config",
    "load_preset",
    "outcome_probabilities",
    "overlap_probability",
    "population",
    "propagate_piecewise_constant",
    "propagate_schedule",
    "run_exact",
    "run_experiment",
    "run_protocol",
    "sample_shot",
    "two_photon_rabi",
]
