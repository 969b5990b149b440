"""Variational circuit builders for the generator and discriminator.

Generator: Hadamard layer, then k_G blocks of [RY on every qubit, CZ
entangler], then a final RY layer; (k_G + 1) * n parameters and k_G * n CZ
gates for n >= 3.  Discriminator: Hadamard layer, k_D blocks of [RZ RY RZ on
every qubit, CZ entangler], a CNOT fan-in onto the last qubit, and RX RY RZ
on the last qubit; 3 * (k_D * n + 1) parameters.

The entangler is a nearest-neighbour chain CZ(i, i+1) with a ring-closing
CZ(n-1, 0) for n >= 3 (omitted for n <= 2 to avoid duplicating the only
pair).  Slot names carry the qubit and layer indices for traceable logs.
"""

from dataclasses import dataclass

from .circuit import Circuit, Gate


@dataclass(frozen=True)
class GeneratorSpec:
    n_qubits: int
    depth: int  # k_G

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")

    @property
    def n_parameters(self):
        return (self.depth + 1) * self.n_qubits


@dataclass(frozen=True)
class DiscriminatorSpec:
    n_qubits: int
    depth: int  # k_D

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")

    @property
    def n_parameters(self):
        return 3 * (self.depth * self.n_qubits + 1)


def _entangler(n):
    gates = [Gate("CZ", (i, i + 1)) for i in range(n - 1)]
    if n >= 3:
        gates.append(Gate("CZ", (n - 1, 0)))
    return gates


def build_generator(spec, prefix=""):
    n, k = spec.n_qubits, spec.depth
    gates = [Gate("H", (q,)) for q in range(n)]
    for layer in range(k):
        gates += [
            Gate("RY", (q,), slot=f"{prefix}ry.q{q}.l{layer}") for q in range(n)
        ]
        gates += _entangler(n)
    gates += [Gate("RY", (q,), slot=f"{prefix}ry.q{q}.l{k}") for q in range(n)]
    return Circuit(n, gates)


def build_discriminator(spec, prefix=""):
    n, k = spec.n_qubits, spec.depth
    gates = [Gate("H", (q,)) for q in range(n)]
    for layer in range(k):
        for q in range(n):
            gates.append(Gate("RZ", (q,), slot=f"{prefix}rz.q{q}.l{layer}a"))
            gates.append(Gate("RY", (q,), slot=f"{prefix}ry.q{q}.l{layer}"))
            gates.append(Gate("RZ", (q,), slot=f"{prefix}rz.q{q}.l{layer}b"))
        gates += _entangler(n)
    gates += [Gate("CNOT", (i, n - 1)) for i in range(n - 1)]
    gates.append(Gate("RX", (n - 1,), slot=f"{prefix}rx.out"))
    gates.append(Gate("RY", (n - 1,), slot=f"{prefix}ry.out"))
    gates.append(Gate("RZ", (n - 1,), slot=f"{prefix}rz.out"))
    return Circuit(n, gates)
