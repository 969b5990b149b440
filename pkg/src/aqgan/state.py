"""Pure n-qubit statevectors and the fixed Z-on-last-qubit observable.

Basis convention (fixed package-wide): qubit 0 is the most significant bit
of the basis index, so the last qubit (index n-1) is the least significant
bit.  The observable measured throughout is Z on the last qubit.
"""

import numpy as np

from . import backend

NORM_TOL = 1e-10


class StateVector:
    """Amplitudes over the 2^n computational basis states."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits, amplitudes, copy=True, check=True):
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        amps = np.array(amplitudes, dtype=np.complex128, copy=copy)
        if amps.shape != (2**n_qubits,):
            raise ValueError(
                f"expected {2**n_qubits} amplitudes, got {amps.shape}"
            )
        if check and abs(np.vdot(amps, amps).real - 1.0) > 1e-8:
            raise ValueError("state is not normalized")
        self.n_qubits = n_qubits
        self.amplitudes = amps

    @classmethod
    def zero(cls, n_qubits):
        amps = np.zeros(2**n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps, copy=False, check=False)

    def copy(self):
        return StateVector(self.n_qubits, self.amplitudes, copy=True, check=False)

    def norm_error(self):
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0)

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


def zero_state(n_qubits):
    return StateVector.zero(n_qubits)


def qubit_stride(n_qubits, qubit):
    """Bit mask of `qubit` in the basis index (qubit 0 = most significant)."""
    return 1 << (n_qubits - 1 - qubit)


def expectation_z_last(state):
    """Exact <Z> on the last qubit, in [-1, 1]."""
    return float(backend.K.expect_z(state.amplitudes, 1))


def fidelity(a, b):
    """|<a|b>|^2 for equally sized pure states."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit counts differ")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
