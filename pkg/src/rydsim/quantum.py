"""Dense complex state vectors and unitary propagation for tiny Hilbert spaces.

All operator entries are angular frequencies in rad/us and all durations are
in us, so the propagator is exp(-i * matrix * duration) with no extra hbar.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .errors import BasisMismatchError

NORM_TOL = 1e-9
HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitudes over an ordered, labeled basis."""

    amplitudes: np.ndarray
    basis: tuple[str, ...]

    def __post_init__(self):
        basis = tuple(str(b) for b in self.basis)
        if len(set(basis)) != len(basis):
            raise ValueError("basis labels must be unique")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (len(basis),):
            raise ValueError(
                f"amplitude count {amps.shape} does not match basis size {len(basis)}"
            )
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |a|^2 = {norm2!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def basis_state(cls, basis, label) -> "StateVector":
        """Unit vector along one basis label."""
        basis = tuple(basis)
        amps = np.zeros(len(basis), dtype=complex)
        amps[basis.index(label)] = 1.0
        return cls(amps, basis)

    def index(self, label) -> int:
        try:
            return self.basis.index(label)
        except ValueError:
            raise KeyError(f"label {label!r} not in basis {self.basis}") from None


@dataclass(frozen=True)
class HermitianOperator:
    """Hermitian matrix in a labeled basis, entries in rad/us."""

    matrix: np.ndarray
    basis: tuple[str, ...]

    def __post_init__(self):
        basis = tuple(str(b) for b in self.basis)
        mat = np.array(self.matrix, dtype=complex)
        n = len(basis)
        if mat.shape != (n, n):
            raise ValueError(f"matrix shape {mat.shape} does not match basis size {n}")
        dev = np.max(np.abs(mat - mat.conj().T)) if n else 0.0
        if dev > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "basis", basis)


def _check_shared_basis(a_basis, b_basis):
    if tuple(a_basis) != tuple(b_basis):
        raise BasisMismatchError(f"bases differ: {tuple(a_basis)} vs {tuple(b_basis)}")


def propagate_piecewise_constant(
    state: StateVector, op: HermitianOperator, duration: float
) -> StateVector:
    """Apply exp(-i * op.matrix * duration) to the state (duration in us).

    Uses the eigendecomposition of the Hermitian matrix, which is exactly
    unitary up to roundoff for the dimensions handled here.
    """
    _check_shared_basis(state.basis, op.basis)
    if duration < 0:
        raise ValueError(f"duration must be >= 0, got {duration}")
    if duration == 0:
        return state
    w, v = eigh(op.matrix)
    amps = v @ (np.exp(-1j * w * duration) * (v.conj().T @ state.amplitudes))
    return StateVector(amps, state.basis)


def propagate_schedule(state: StateVector, schedule) -> StateVector:
    """Apply a sequence of (HermitianOperator, duration) square segments."""
    for op, duration in schedule:
        state = propagate_piecewise_constant(state, op, duration)
    return state


def population(state: StateVector, label) -> float:
    """|amplitude|^2 of one basis label."""
    return float(np.abs(state.amplitudes[state.index(label)]) ** 2)


def overlap_probability(state: StateVector, target: StateVector) -> float:
    """|<target|state>|^2 for two states on the same basis."""
    _check_shared_basis(state.basis, target.basis)
    return float(np.abs(np.vdot(target.amplitudes, state.amplitudes)) ** 2)
