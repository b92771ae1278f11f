"""Exact Pauli and diagonal-gate algebra with phases as powers of w = exp(i pi/4).

A Pauli is ``w**phase_exp * X**x * Z**z`` with X factors to the left. A
diagonal gate is ``w**global_exp * prod_v diag(1, w**rot_v)``, so T, S and Z on
a qubit are rotations 1, 2 and 4. All arithmetic is on integers mod 8.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from cscc.errors import LengthMismatchError, NotXTypeError, OddRotationError

logger = logging.getLogger(__name__)


def _bits(values: Sequence[int] | np.ndarray) -> np.ndarray:
    return (np.asarray(values, dtype=np.int64) % 2).astype(np.uint8)


def _ids(bits: np.ndarray, qubit_map: Sequence[int] | None) -> list[int]:
    cols = np.flatnonzero(bits).tolist()
    return [qubit_map[c] for c in cols] if qubit_map is not None else cols


@dataclass(frozen=True, eq=False)
class PauliWithPhase:
    """Pauli operator with an exact w-power phase."""

    x: np.ndarray
    z: np.ndarray
    phase_exp: int = 0

    def __post_init__(self) -> None:
        x, z = _bits(self.x), _bits(self.z)
        if x.shape != z.shape:
            raise LengthMismatchError(f"X part has {x.size} qubits, Z part {z.size}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase_exp", int(self.phase_exp) % 8)

    @classmethod
    def identity(cls, n: int) -> "PauliWithPhase":
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @classmethod
    def x_type(cls, bits: Sequence[int] | np.ndarray, phase_exp: int = 0) -> "PauliWithPhase":
        x = _bits(bits)
        return cls(x, np.zeros_like(x), phase_exp)

    @classmethod
    def z_type(cls, bits: Sequence[int] | np.ndarray, phase_exp: int = 0) -> "PauliWithPhase":
        z = _bits(bits)
        return cls(np.zeros_like(z), z, phase_exp)

    @property
    def n(self) -> int:
        return int(self.x.size)

    @property
    def is_x_type(self) -> bool:
        return not self.z.any()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliWithPhase):
            return NotImplemented
        return (
            self.phase_exp == other.phase_exp
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.z.tobytes(), self.phase_exp))

    def to_dict(self, qubit_map: Sequence[int] | None = None) -> dict[str, Any]:
        return {
            "x": _ids(self.x, qubit_map),
            "z": _ids(self.z, qubit_map),
            "phase_exp": self.phase_exp,
        }


@dataclass(frozen=True, eq=False)
class DiagonalGate:
    """Product of single-qubit phase rotations times a global phase."""

    rot: np.ndarray
    global_exp: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "rot", np.asarray(self.rot, dtype=np.int64) % 8)
        object.__setattr__(self, "global_exp", int(self.global_exp) % 8)

    @classmethod
    def identity(cls, n: int) -> "DiagonalGate":
        return cls(np.zeros(n, dtype=np.int64))

    @property
    def n(self) -> int:
        return int(self.rot.size)

    @property
    def is_s_layer(self) -> bool:
        return not (self.rot % 2).any()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiagonalGate):
            return NotImplemented
        return self.global_exp == other.global_exp and np.array_equal(
            self.rot, other.rot
        )

    def __hash__(self) -> int:
        return hash((self.rot.tobytes(), self.global_exp))

    def to_dict(self, qubit_map: Sequence[int] | None = None) -> dict[str, Any]:
        return {
            "rot": [
                {"id": qubit_map[c] if qubit_map is not None else c, "exp": int(self.rot[c])}
                for c in np.flatnonzero(self.rot)
            ],
            "global_exp": self.global_exp,
        }


def transversal_t(signs: Sequence[int] | np.ndarray) -> DiagonalGate:
    """T on qubits with sign +1, T-dagger on qubits with sign -1."""
    return DiagonalGate(np.asarray(signs, dtype=np.int64))


def _require_same_length(first: int, second: int) -> None:
    if first != second:
        raise LengthMismatchError(f"Operands act on {first} and {second} qubits")


def multiply(left: PauliWithPhase, right: PauliWithPhase) -> PauliWithPhase:
    """Group product ``left * right``.

    Moving the Z part of ``left`` past the X part of ``right`` costs a sign per
    shared qubit.

    Raises:
        LengthMismatchError: If the operands act on different qubit counts
    """
    _require_same_length(left.n, right.n)
    swaps = int(left.z.astype(np.int64) @ right.x.astype(np.int64))
    return PauliWithPhase(
        x=left.x ^ right.x,
        z=left.z ^ right.z,
        phase_exp=left.phase_exp + right.phase_exp + 4 * swaps,
    )


def commutator_diag_with_xpauli(gate: DiagonalGate, pauli: PauliWithPhase) -> DiagonalGate:
    """Group commutator ``P D P D^dagger`` of a diagonal gate with an X-type Pauli.

    Per qubit in the support, X T^a X T^-a = w^a diag(1, w^-2a).

    Args:
        gate: Diagonal gate D
        pauli: X-type Pauli P

    Returns:
        Diagonal gate with rotations -2a on the support of P

    Raises:
        NotXTypeError: If P has Z components
        LengthMismatchError: If D and P act on different qubit counts
    """
    _require_same_length(gate.n, pauli.n)
    if not pauli.is_x_type:
        raise NotXTypeError("Commutator partner must be an X-type Pauli")
    support = pauli.x.astype(bool)
    rot = np.zeros(gate.n, dtype=np.int64)
    rot[support] = -2 * gate.rot[support]
    return DiagonalGate(
        rot=rot, global_exp=int(gate.rot[support].sum()) + 2 * pauli.phase_exp
    )


def commutator_slayer_with_xpauli(gate: DiagonalGate, pauli: PauliWithPhase) -> PauliWithPhase:
    """Group commutator ``P D P D^dagger`` of an S-layer with an X-type Pauli.

    Per qubit, X S X S^dagger = iZ, X S^dagger X S = -iZ and X Z X Z = -1.

    Raises:
        OddRotationError: If D has an odd rotation, making the result non-Pauli
        NotXTypeError: If P has Z components
        LengthMismatchError: If D and P act on different qubit counts
    """
    _require_same_length(gate.n, pauli.n)
    if not pauli.is_x_type:
        raise NotXTypeError("Commutator partner must be an X-type Pauli")
    if not gate.is_s_layer:
        odd = np.flatnonzero(gate.rot % 2).tolist()
        raise OddRotationError(f"Rotations on qubits {odd} are odd")
    support = pauli.x.astype(bool)
    z = np.zeros(gate.n, dtype=np.uint8)
    z[support] = (gate.rot[support] // 2) % 2
    return PauliWithPhase(
        x=np.zeros(gate.n, dtype=np.uint8),
        z=z,
        phase_exp=int(gate.rot[support].sum()) + 2 * pauli.phase_exp,
    )
