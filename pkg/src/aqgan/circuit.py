"""Gate sequences with named parameter slots.

A Circuit is immutable after construction and pre-compiled to parallel
arrays (kind codes, qubit bit masks, base angles, slot indices) that the
kernel backends consume directly.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .state import StateVector, qubit_stride

GATE_KINDS = ("H", "RX", "RY", "RZ", "CZ", "CNOT")
ROTATION_KINDS = ("RX", "RY", "RZ")
TWO_QUBIT_KINDS = ("CZ", "CNOT")
KIND_CODE = {k: i for i, k in enumerate(GATE_KINDS)}


class UnboundParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple
    angle: float = None
    slot: str = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        arity = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("qubit indices must be distinct")
        if self.kind in ROTATION_KINDS:
            if (self.angle is None) == (self.slot is None):
                raise ValueError("rotation gate needs exactly one of angle or slot")
        elif self.angle is not None or self.slot is not None:
            raise ValueError(f"{self.kind} takes no angle or slot")

    @property
    def is_rotation(self):
        return self.kind in ROTATION_KINDS


class Circuit:
    """Ordered gate sequence over n qubits with named parameter slots."""

    def __init__(self, n_qubits, gates, parameter_slots=None):
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        gates = tuple(gates)
        for g in gates:
            for q in g.qubits:
                if not 0 <= q < n_qubits:
                    raise ValueError(f"qubit index {q} out of range for n={n_qubits}")
        referenced = [g.slot for g in gates if g.slot is not None]
        if parameter_slots is None:
            seen = {}
            for s in referenced:
                seen.setdefault(s, None)
            parameter_slots = tuple(seen)
        else:
            parameter_slots = tuple(parameter_slots)
            missing = set(referenced) - set(parameter_slots)
            if missing:
                raise ValueError(f"undeclared parameter slots: {sorted(missing)}")
        if len(set(parameter_slots)) != len(parameter_slots):
            raise ValueError("duplicate parameter slot names")

        self.n_qubits = n_qubits
        self.gates = gates
        self.parameter_slots = parameter_slots

        slot_pos = {s: i for i, s in enumerate(parameter_slots)}
        n = len(gates)
        self.kinds = np.array([KIND_CODE[g.kind] for g in gates], dtype=np.int64)
        self.s1 = np.array(
            [qubit_stride(n_qubits, g.qubits[0]) for g in gates], dtype=np.int64
        )
        self.s2 = np.array(
            [qubit_stride(n_qubits, g.qubits[1]) if len(g.qubits) == 2 else 0
             for g in gates],
            dtype=np.int64,
        )
        self.base_angles = np.array(
            [g.angle if g.angle is not None else 0.0 for g in gates], dtype=np.float64
        )
        self.slot_of_gate = np.array(
            [slot_pos[g.slot] if g.slot is not None else -1 for g in gates],
            dtype=np.int64,
        )
        self._gates_for_slot = [[] for _ in parameter_slots]
        for gi, si in enumerate(self.slot_of_gate):
            if si >= 0:
                self._gates_for_slot[si].append(gi)

    @property
    def n_parameters(self):
        return len(self.parameter_slots)

    def gates_for_slot(self, slot_index):
        return tuple(self._gates_for_slot[slot_index])

    def bound_angles(self, params=None, offsets=None):
        """Concrete per-gate angles for a parameter vector, plus optional
        per-gate angle offsets ({gate_index: delta})."""
        if params is None:
            params = ()
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (self.n_parameters,):
            raise UnboundParameterError(
                f"expected {self.n_parameters} parameters, got {params.shape}"
            )
        angles = self.base_angles.copy()
        bound = self.slot_of_gate >= 0
        if bound.any():
            angles[bound] += params[self.slot_of_gate[bound]]
        if offsets:
            for gi, delta in offsets.items():
                angles[gi] += delta
        return angles

    def run(self, params=None, initial=None, offsets=None):
        """Apply all gates in order with bound parameters; returns a new state."""
        if initial is None:
            state = StateVector.zero(self.n_qubits)
        else:
            if initial.n_qubits != self.n_qubits:
                raise ValueError("initial state has wrong qubit count")
            state = initial.copy()
        angles = self.bound_angles(params, offsets)
        backend.K.run(state.amplitudes, self.kinds, self.s1, self.s2, angles)
        return state

    def compose(self, other):
        """This circuit followed by `other`; slot names must not collide."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        overlap = set(self.parameter_slots) & set(other.parameter_slots)
        if overlap:
            raise ValueError(f"colliding slot names: {sorted(overlap)}")
        return Circuit(
            self.n_qubits,
            self.gates + other.gates,
            self.parameter_slots + other.parameter_slots,
        )

    def dump(self):
        """One gate per line: kind, qubits, angle or slot name."""
        lines = []
        for g in self.gates:
            qubits = ",".join(str(q) for q in g.qubits)
            if g.slot is not None:
                lines.append(f"{g.kind} {qubits} @{g.slot}")
            elif g.angle is not None:
                lines.append(f"{g.kind} {qubits} {g.angle!r}")
            else:
                lines.append(f"{g.kind} {qubits}")
        return "\n".join(lines)


def apply_gate(state, gate):
    """Apply one fully bound gate; returns the new state."""
    if gate.slot is not None:
        raise UnboundParameterError(f"gate has unresolved slot {gate.slot!r}")
    for q in gate.qubits:
        if not 0 <= q < state.n_qubits:
            raise ValueError(f"qubit index {q} out of range")
    new = state.copy()
    s1 = qubit_stride(state.n_qubits, gate.qubits[0])
    s2 = qubit_stride(state.n_qubits, gate.qubits[1]) if len(gate.qubits) == 2 else 0
    angle = gate.angle if gate.angle is not None else 0.0
    backend.K.apply_gate(new.amplitudes, KIND_CODE[gate.kind], s1, s2, angle)
    return new


def run_circuit(circuit, params=None, initial=None):
    return circuit.run(params, initial)
