"""Loss-based detection and aggregation of shot statistics.

A Rydberg excitation is detected through the loss of the atom once the trap
is restored, so the excitation probability equals the loss probability.
Detection is ideal by default; the conditional loss probabilities are knobs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np

from .errors import ConfigError
from .model import (
    TWO_ATOM_BASIS,
    build_single_atom_hamiltonian,
    build_two_atom_hamiltonian,
    two_photon_rabi,
)
from .noise import nominal_shot, sample_shot
from .quantum import StateVector, population, propagate_piecewise_constant

if TYPE_CHECKING:
    from .config import ExperimentConfig

MODES = ("single-atom-a", "single-atom-b", "two-atom")

CSV_COLUMNS = (
    "duration_ns",
    "p_a", "p_b", "p_both", "p_exactly_one",
    "err_a", "err_b", "err_both", "err_exactly_one",
    "n_shots",
)


@dataclass(frozen=True)
class DetectionParams:
    """Conditional probabilities of losing an atom given its final state."""

    p_loss_given_rydberg: float = 1.0
    p_loss_given_ground: float = 0.0

    def __post_init__(self):
        for name in ("p_loss_given_rydberg", "p_loss_given_ground"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class DataSet:
    """Per-duration loss probabilities with binomial standard errors."""

    durations_ns: np.ndarray
    p_a: np.ndarray
    p_b: np.ndarray
    p_both: np.ndarray
    p_exactly_one: np.ndarray
    err_a: np.ndarray
    err_b: np.ndarray
    err_both: np.ndarray
    err_exactly_one: np.ndarray
    n_shots: np.ndarray

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            arr = np.asarray(getattr(self, name), dtype=float if name != "n_shots" else int)
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        n = len(self.durations_ns)
        for name in self.__dataclass_fields__:
            if len(getattr(self, name)) != n:
                raise ConfigError(f"column {name} has wrong length")
        if n == 0:
            raise ConfigError("dataset must contain at least one row")
        if np.any(np.diff(self.durations_ns) <= 0):
            raise ConfigError("durations must be strictly increasing")
        for name in ("p_a", "p_b", "p_both", "p_exactly_one"):
            col = getattr(self, name)
            if np.any((col < 0) | (col > 1)):
                raise ConfigError(f"column {name} must lie in [0, 1]")
        for name in ("err_a", "err_b", "err_both", "err_exactly_one"):
            if np.any(getattr(self, name) < 0):
                raise ConfigError(f"column {name} must be >= 0")

    def column(self, name: str) -> np.ndarray:
        if name not in self.__dataclass_fields__:
            raise KeyError(f"no column {name!r}; have {tuple(self.__dataclass_fields__)}")
        return getattr(self, name)

    def _columns(self):
        fields = ("durations_ns",) + CSV_COLUMNS[1:-1] + ("n_shots",)
        return [getattr(self, name) for name in fields]

    def to_csv(self, path) -> None:
        """Write one header row plus one row per duration, 6 significant digits."""
        columns = self._columns()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for i in range(len(self.durations_ns)):
                row = [f"{col[i]:.6g}" for col in columns[:-1]]
                row.append(str(int(self.n_shots[i])))
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path) -> "DataSet":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != CSV_COLUMNS:
                raise ConfigError(f"unexpected CSV header {header!r} in {path}")
            rows = [[float(x) for x in row] for row in reader if row]
        if not rows:
            raise ConfigError(f"no data rows in {path}")
        cols = np.array(rows, dtype=float).T
        return cls(*cols)


def outcome_probabilities(final: StateVector) -> dict[str, float]:
    """Born probabilities of the four two-atom outcomes."""
    if tuple(final.basis) != TWO_ATOM_BASIS:
        raise ConfigError(f"expected two-atom basis {TWO_ATOM_BASIS}, got {final.basis}")
    return {label: population(final, label) for label in TWO_ATOM_BASIS}


def detect(
    probabilities: dict[str, float],
    detection: DetectionParams,
    rng: np.random.Generator,
) -> tuple[bool, bool]:
    """Sample a joint outcome, then flip each atom to lost conditionally.

    Returns (lost_a, lost_b).
    """
    labels = TWO_ATOM_BASIS
    p = np.array([probabilities[label] for label in labels], dtype=float)
    p = p / p.sum()
    outcome = labels[rng.choice(len(labels), p=p)]
    lost = []
    for atom_state in outcome:
        p_loss = (
            detection.p_loss_given_rydberg
            if atom_state == "r"
            else detection.p_loss_given_ground
        )
        lost.append(bool(rng.random() < p_loss))
    return lost[0], lost[1]


def _shot_outcome_probabilities(config, coupling, shot, duration_us) -> dict[str, float]:
    """Joint outcome probabilities for one shot; unpumped atoms are inert."""
    mode = config.mode
    if mode == "two-atom" and shot.pumped_a and shot.pumped_b:
        channel = config.channels[shot.channel_index]
        op = build_two_atom_hamiltonian(coupling, shot, channel)
        psi0 = StateVector.basis_state(TWO_ATOM_BASIS, "gg")
        psi = propagate_piecewise_constant(psi0, op, duration_us)
        return outcome_probabilities(psi)

    p_a = p_b = 0.0
    drive_a = mode in ("two-atom", "single-atom-a") and shot.pumped_a
    drive_b = mode in ("two-atom", "single-atom-b") and shot.pumped_b
    if drive_a:
        p_a = _single_atom_excitation(coupling, shot, "a", duration_us)
    if drive_b:
        p_b = _single_atom_excitation(coupling, shot, "b", duration_us)
    return {
        "gg": (1 - p_a) * (1 - p_b),
        "rg": p_a * (1 - p_b),
        "gr": (1 - p_a) * p_b,
        "rr": p_a * p_b,
    }


def _single_atom_excitation(coupling, shot, atom, duration_us) -> float:
    op = build_single_atom_hamiltonian(coupling, shot, atom)
    psi = propagate_piecewise_constant(
        StateVector.basis_state(op.basis, "g"), op, duration_us
    )
    return population(psi, "r")


def _detection_map(probs: dict[str, float], detection: DetectionParams, present):
    """Exact per-atom loss probabilities implied by the detection model."""
    pl = {"g": detection.p_loss_given_ground, "r": detection.p_loss_given_rydberg}
    p_a = p_b = p_both = p_exactly_one = 0.0
    for outcome, p in probs.items():
        la = pl[outcome[0]] if "a" in present else 0.0
        lb = pl[outcome[1]] if "b" in present else 0.0
        p_a += p * la
        p_b += p * lb
        p_both += p * la * lb
        p_exactly_one += p * (la * (1 - lb) + (1 - la) * lb)
    return p_a, p_b, p_both, p_exactly_one


def _present_atoms(mode: str):
    if mode == "two-atom":
        return ("a", "b")
    return ("a",) if mode == "single-atom-a" else ("b",)


def run_experiment(
    config: "ExperimentConfig",
    durations_ns=None,
    n_shots: int | None = None,
    seed: int | None = None,
) -> DataSet:
    """Monte Carlo pulse-duration scan.

    For every duration, draws n_shots noise realizations, propagates each,
    samples the loss outcome, and aggregates loss probabilities with
    binomial standard errors sqrt(p*(1-p)/n). In single-atom modes the
    empty trap never reports a loss.

    Shots use per-shot random substreams spawned from (seed, duration,
    shot), so results are bit-exact reproducible and independent of any
    evaluation order.
    """
    durations_ns = np.asarray(
        config.durations_ns if durations_ns is None else durations_ns, dtype=float
    )
    if durations_ns.size == 0 or np.any(np.diff(durations_ns) <= 0):
        raise ConfigError("durations must be non-empty and strictly increasing")
    n_shots = int(config.n_shots if n_shots is None else n_shots)
    if n_shots < 1:
        raise ConfigError(f"n_shots must be >= 1, got {n_shots}")
    seed = config.seed if seed is None else seed
    if config.mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {config.mode!r}")

    coupling = two_photon_rabi(config.lasers)
    present = _present_atoms(config.mode)
    duration_streams = np.random.SeedSequence(seed).spawn(len(durations_ns))

    cols = {name: [] for name in ("p_a", "p_b", "p_both", "p_exactly_one")}
    errs = {name: [] for name in ("p_a", "p_b", "p_both", "p_exactly_one")}
    for d_index, t_ns in enumerate(durations_ns):
        t_us = t_ns * 1e-3
        shot_streams = duration_streams[d_index].spawn(n_shots)
        lost_a = np.zeros(n_shots, dtype=bool)
        lost_b = np.zeros(n_shots, dtype=bool)
        for s_index in range(n_shots):
            rng = np.random.default_rng(shot_streams[s_index])
            shot = sample_shot(config.noise, config.geometry, rng, config.channels)
            probs = _shot_outcome_probabilities(config, coupling, shot, t_us)
            la, lb = detect(probs, config.detection, rng)
            lost_a[s_index] = la if "a" in present else False
            lost_b[s_index] = lb if "b" in present else False
        counts = {
            "p_a": np.mean(lost_a),
            "p_b": np.mean(lost_b),
            "p_both": np.mean(lost_a & lost_b),
            "p_exactly_one": np.mean(lost_a ^ lost_b),
        }
        for name, p in counts.items():
            cols[name].append(p)
            errs[name].append(np.sqrt(p * (1 - p) / n_shots))

    return DataSet(
        durations_ns=durations_ns,
        p_a=cols["p_a"], p_b=cols["p_b"],
        p_both=cols["p_both"], p_exactly_one=cols["p_exactly_one"],
        err_a=errs["p_a"], err_b=errs["p_b"],
        err_both=errs["p_both"], err_exactly_one=errs["p_exactly_one"],
        n_shots=np.full(len(durations_ns), n_shots),
    )


def run_exact(config: "ExperimentConfig", durations_ns=None) -> DataSet:
    """Infinite-shot noiseless limit: exact Born probabilities, zero errors.

    Evaluates the nominal (zero-noise) realization, weight-averaging over
    the configured interaction channels, and applies the detection model
    analytically. Error columns are zero and n_shots is zero, which the
    fitting layer reads as unit weights.
    """
    durations_ns = np.asarray(
        config.durations_ns if durations_ns is None else durations_ns, dtype=float
    )
    if config.mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {config.mode!r}")
    coupling = two_photon_rabi(config.lasers)
    present = _present_atoms(config.mode)
    shot = nominal_shot(config.geometry)

    rows = []
    for t_ns in durations_ns:
        t_us = t_ns * 1e-3
        acc = np.zeros(4)
        for index, channel in enumerate(config.channels):
            shot_ch = shot if index == 0 else replace(shot, channel_index=index)
            probs = _shot_outcome_probabilities(config, coupling, shot_ch, t_us)
            acc += channel.weight * np.array(_detection_map(probs, config.detection, present))
        rows.append(acc)
    rows = np.clip(np.array(rows), 0.0, 1.0)   # guard roundoff at the [0, 1] edges
    zeros = np.zeros(len(durations_ns))
    return DataSet(
        durations_ns=durations_ns,
        p_a=rows[:, 0], p_b=rows[:, 1], p_both=rows[:, 2], p_exactly_one=rows[:, 3],
        err_a=zeros, err_b=zeros, err_both=zeros, err_exactly_one=zeros,
        n_shots=zeros,
    )
