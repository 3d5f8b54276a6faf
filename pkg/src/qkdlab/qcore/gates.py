"""Single-qudit gates and the controlled gates used to encrypt carriers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import kernels
from .state import DimensionError, LayoutError, StateVector

UNITARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Gate:
    dim: int
    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if m.shape != (self.dim, self.dim):
            raise DimensionError(f"matrix shape {m.shape} does not match dim {self.dim}")
        err = np.max(np.abs(m.conj().T @ m - np.eye(self.dim)))
        if err >= UNITARY_TOL:
            raise ValueError(f"gate {self.name or '?'} is not unitary (deviation {err:.2e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dagger(self) -> "Gate":
        return Gate(self.dim, self.matrix.conj().T, f"{self.name}^dag")

    @property
    def conj(self) -> "Gate":
        return Gate(self.dim, self.matrix.conj(), f"{self.name}*")

    def power(self, k: int) -> np.ndarray:
        return np.linalg.matrix_power(self.matrix, k)

    def __matmul__(self, other: "Gate") -> "Gate":
        return Gate(self.dim, self.matrix @ other.matrix, f"{self.name}.{other.name}")


def identity_gate(d: int) -> Gate:
    return Gate(d, np.eye(d), "I")


def rotation_gate(theta: float) -> Gate:
    """Real rotation [[cos, sin], [-sin, cos]]."""
    if not np.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    c, s = np.cos(theta), np.sin(theta)
    return Gate(2, np.array([[c, s], [-s, c]]), f"R({theta:.6g})")


def hadamard_gate(d: int, conjugated: bool = False) -> Gate:
    """Generalized Hadamard with entries exp(2 pi i k l / d) / sqrt(d); H* if ``conjugated``."""
    if d < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")
    k = np.arange(d)
    m = np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)
    if conjugated:
        return Gate(d, m.conj(), f"H{d}*")
    return Gate(d, m, f"H{d}")


def shift_gate(d: int, k: int = 1) -> Gate:
    """X^k : |j> -> |j + k mod d>."""
    m = np.zeros((d, d))
    for j in range(d):
        m[(j + k) % d, j] = 1.0
    return Gate(d, m, f"X{d}^{k}")


def pauli_x() -> Gate:
    return Gate(2, np.array([[0, 1], [1, 0]]), "X")


def basis_change(vectors) -> Gate:
    """Unitary whose rows are the conjugated basis vectors; maps vectors[i] to |i>."""
    v = np.asarray(vectors, dtype=np.complex128)
    return Gate(v.shape[0], v.conj(), "basis")


class ControlKind(Enum):
    RIGHT_SHIFT = "right-shift"
    LEFT_SHIFT = "left-shift"
    POWER = "power-of-U"


@dataclass(frozen=True)
class ControlledGateSpec:
    kind: ControlKind
    base: Gate | None = None

    def __post_init__(self):
        if self.kind is ControlKind.POWER and self.base is None:
            raise ValueError("power-of-U controlled gate needs a base gate")

    def matrices(self, control_dim: int, target_dim: int) -> np.ndarray:
        """Stack of target unitaries indexed by control value (cached, read-only)."""
        return _controlled_stack(self, control_dim, target_dim)


@lru_cache(maxsize=256)
def _controlled_stack(spec: ControlledGateSpec, control_dim: int, target_dim: int) -> np.ndarray:
    if spec.kind is ControlKind.POWER:
        if target_dim != spec.base.dim:
            raise DimensionError(
                f"target dimension {target_dim} != base gate dimension {spec.base.dim}"
            )
        mats = [spec.base.power(i) for i in range(control_dim)]
    else:
        if control_dim != target_dim:
            raise DimensionError(
                f"shift gates need equal dimensions, got {control_dim} and {target_dim}"
            )
        sign = 1 if spec.kind is ControlKind.RIGHT_SHIFT else -1
        eye = np.eye(target_dim)
        mats = [np.roll(eye, sign * i, axis=0) for i in range(control_dim)]
    out = np.ascontiguousarray(np.stack(mats), dtype=np.complex128)
    out.setflags(write=False)
    return out


RIGHT_SHIFT = ControlledGateSpec(ControlKind.RIGHT_SHIFT)
LEFT_SHIFT = ControlledGateSpec(ControlKind.LEFT_SHIFT)
CNOT = RIGHT_SHIFT  # the two-dimensional right shift


def power_of(gate: Gate) -> ControlledGateSpec:
    return ControlledGateSpec(ControlKind.POWER, gate)


def apply_single(state: StateVector, gate: Gate, subsystem: str) -> StateVector:
    pos = state.layout.position(subsystem)
    if state.dims[pos] != gate.dim:
        raise DimensionError(
            f"gate of dimension {gate.dim} on {subsystem!r} of dimension {state.dims[pos]}"
        )
    return StateVector(state.layout, kernels.apply_matrix(state.amps, state.dims, pos, gate.matrix))


def apply_controlled(state: StateVector, spec: ControlledGateSpec, control: str, target: str) -> StateVector:
    if control == target:
        raise LayoutError("control and target must differ")
    pc = state.layout.position(control)
    pt = state.layout.position(target)
    mats = spec.matrices(state.dims[pc], state.dims[pt])
    return StateVector(state.layout, kernels.apply_controlled(state.amps, state.dims, pc, pt, mats))
