"""Dense state vectors over ordered registers of mixed-dimension qudits."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from . import kernels

MAX_AMPLITUDES = 2**24
NORM_TOL = 1e-10
RANK_CUTOFF = 1e-9


class DimensionError(ValueError):
    """A dimension or basis index is incompatible with the register."""


class LayoutError(ValueError):
    """Unknown, duplicated or mismatched subsystem labels."""


class NumericalError(ArithmeticError):
    """A projection with (numerically) zero weight was requested."""


@dataclass(frozen=True)
class SubsystemLayout:
    dims: tuple[int, ...]
    labels: tuple[str, ...]
    max_amplitudes: int = MAX_AMPLITUDES

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        labels = tuple(self.labels)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)
        if len(dims) != len(labels):
            raise LayoutError(f"{len(dims)} dims but {len(labels)} labels")
        for label, d in zip(labels, dims):
            if d < 2:
                raise DimensionError(f"subsystem {label!r} has dimension {d}; need >= 2")
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate labels in {labels}")
        if prod(dims) > self.max_amplitudes:
            raise DimensionError(
                f"register needs {prod(dims)} amplitudes, limit is {self.max_amplitudes}"
            )

    @property
    def size(self) -> int:
        return prod(self.dims)

    def position(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown subsystem {label!r}") from None

    def dim(self, label: str) -> int:
        return self.dims[self.position(label)]

    def __contains__(self, label) -> bool:
        return label in self.labels

    def extended(self, label: str, dim: int) -> "SubsystemLayout":
        return SubsystemLayout(self.dims + (dim,), self.labels + (label,), self.max_amplitudes)

    def without(self, label: str) -> "SubsystemLayout":
        p = self.position(label)
        return SubsystemLayout(
            self.dims[:p] + self.dims[p + 1:],
            self.labels[:p] + self.labels[p + 1:],
            self.max_amplitudes,
        )


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes in row-major order over ``layout.dims``. Treated as immutable."""

    layout: SubsystemLayout
    amps: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != self.layout.size:
            raise DimensionError(
                f"{amps.shape[0]} amplitudes for a layout of size {self.layout.size}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.layout.labels

    @property
    def dims(self) -> tuple[int, ...]:
        return self.layout.dims

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def probabilities(self, label: str) -> np.ndarray:
        return kernels.marginal_probs(self.amps, self.dims, self.layout.position(label))

    def __repr__(self):
        return f"StateVector(labels={self.labels}, dims={self.dims})"


@dataclass(frozen=True)
class MeasurementRecord:
    subsystem: str
    outcome: int
    probability: float


def basis_state(layout: SubsystemLayout, indices: Sequence[int]) -> StateVector:
    if len(indices) != len(layout.dims):
        raise DimensionError(f"{len(indices)} indices for {len(layout.dims)} subsystems")
    for label, i, d in zip(layout.labels, indices, layout.dims):
        if not 0 <= i < d:
            raise DimensionError(f"index {i} out of range for {label!r} (dimension {d})")
    amps = np.zeros(layout.size, dtype=np.complex128)
    amps[np.ravel_multi_index(tuple(indices), layout.dims)] = 1.0
    return StateVector(layout, amps)


def _diagonal_state(d: int, parties: int, labels) -> StateVector:
    if d < 2:
        raise DimensionError(f"dimension must be >= 2, got {d}")
    if labels is None:
        labels = tuple("ABC"[:parties])
    layout = SubsystemLayout((d,) * parties, tuple(labels))
    amps = np.zeros(layout.size, dtype=np.complex128)
    step = sum(d**k for k in range(parties))
    amps[::step] = 1 / np.sqrt(d)
    return StateVector(layout, amps)


def bell_state(d: int, labels=None) -> StateVector:
    """(1/sqrt d) sum_j |j, j>."""
    return _diagonal_state(d, 2, labels)


def ghz_state(d: int, labels=None) -> StateVector:
    """(1/sqrt d) sum_j |j, j, j>."""
    return _diagonal_state(d, 3, labels)


def product(a: StateVector, b: StateVector) -> StateVector:
    layout = SubsystemLayout(
        a.dims + b.dims, a.labels + b.labels, a.layout.max_amplitudes
    )
    return StateVector(layout, np.kron(a.amps, b.amps))


def extend(state: StateVector, label: str, dim: int, vector=0) -> StateVector:
    """Append a fresh subsystem in basis state ``vector`` (int) or the given amplitudes."""
    if isinstance(vector, (int, np.integer)):
        if not 0 <= vector < dim:
            raise DimensionError(f"index {vector} out of range for dimension {dim}")
        local = np.zeros(dim, dtype=np.complex128)
        local[vector] = 1.0
    else:
        local = np.asarray(vector, dtype=np.complex128)
        if local.shape != (dim,):
            raise DimensionError(f"local vector has shape {local.shape}, expected ({dim},)")
    layout = state.layout.extended(label, dim)
    return StateVector(layout, np.kron(state.amps, local))


def discard(state: StateVector, label: str, tol: float = NORM_TOL) -> StateVector:
    """Remove a subsystem that sits in a definite basis state (e.g. after measurement)."""
    pos = state.layout.position(label)
    probs = state.probabilities(label)
    k = int(np.argmax(probs))
    if abs(probs[k] - 1.0) > tol:
        raise NumericalError(f"{label!r} is not in a definite basis state; cannot discard")
    outer, inner = prod(state.dims[:pos]), prod(state.dims[pos + 1:])
    sub = state.amps.reshape(outer, state.dims[pos], inner)[:, k, :]
    sub = sub / np.linalg.norm(sub)
    return StateVector(state.layout.without(label), sub.reshape(-1))


def reorder(state: StateVector, labels: Sequence[str]) -> StateVector:
    """Permute subsystems into the given label order."""
    labels = tuple(labels)
    if sorted(labels) != sorted(state.labels):
        raise LayoutError(f"{labels} is not a permutation of {state.labels}")
    perm = [state.layout.position(lab) for lab in labels]
    dims = tuple(state.dims[p] for p in perm)
    amps = np.transpose(state.tensor(), perm).reshape(-1)
    return StateVector(SubsystemLayout(dims, labels, state.layout.max_amplitudes), amps)


def measure_z(state: StateVector, subsystem: str, rng, outcome: int | None = None):
    """Projective computational-basis measurement.

    The outcome is drawn by the Born rule from ``rng`` unless ``outcome`` is
    given, in which case the state is post-selected on it.
    """
    pos = state.layout.position(subsystem)
    probs = kernels.marginal_probs(state.amps, state.dims, pos)
    total = probs.sum()
    if outcome is None:
        cumulative = np.cumsum(probs)
        u = rng.random() * total
        outcome = int(np.searchsorted(cumulative, u, side="right"))
        outcome = min(outcome, len(probs) - 1)
        while probs[outcome] <= 0.0:
            outcome -= 1
    p = float(probs[outcome] / total)
    if p < 1e-14:
        raise NumericalError(f"outcome {outcome} on {subsystem!r} has zero probability")
    amps = kernels.collapse(state.amps, state.dims, pos, outcome, 1.0 / np.sqrt(probs[outcome]))
    return MeasurementRecord(subsystem, int(outcome), p), StateVector(state.layout, amps)


def _check_same_layout(a: StateVector, b: StateVector):
    if a.labels != b.labels or a.dims != b.dims:
        raise LayoutError(f"layouts differ: {a.labels}{a.dims} vs {b.labels}{b.dims}")


def fidelity(a: StateVector, b: StateVector) -> float:
    _check_same_layout(a, b)
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def reduced_density_matrix(state: StateVector, subsystems: Sequence[str]) -> np.ndarray:
    keep = [state.layout.position(s) for s in subsystems]
    rest = [p for p in range(len(state.dims)) if p not in keep]
    dk = prod(state.dims[p] for p in keep)
    psi = np.transpose(state.tensor(), keep + rest).reshape(dk, -1)
    return psi @ psi.conj().T


def partial_trace_rank(state: StateVector, subsystems: Sequence[str], cutoff: float = RANK_CUTOFF) -> int:
    """Numerical rank of the reduced density matrix on ``subsystems``."""
    subsystems = list(subsystems)
    if not subsystems or len(set(subsystems)) != len(subsystems):
        raise LayoutError("subsystems must be a nonempty set of distinct labels")
    if len(subsystems) >= len(state.labels):
        raise LayoutError("subsystems must be a proper subset of the register")
    keep = [state.layout.position(s) for s in subsystems]
    rest = [p for p in range(len(state.dims)) if p not in keep]
    dk = prod(state.dims[p] for p in keep)
    psi = np.transpose(state.tensor(), keep + rest).reshape(dk, -1)
    singular = np.linalg.svd(psi, compute_uv=False)
    return int(np.sum(singular**2 > cutoff))
