"""Analytic gradients of circuit expectations via the pi/2 shift rule."""

import numpy as np

from . import backend
from .shots import estimate_expectation_shots

SHIFT = np.pi / 2


class CircuitExpectation:
    """f(params) = <Z> on the last qubit after running `circuit`, averaged
    over the given initial states (default |0...0>).

    Exact by default; passing `shots` switches to shot-based estimation with
    the given noise model and rng.
    """

    def __init__(self, circuit, initial=None, shots=None, noise=None, rng=None):
        self.circuit = circuit
        self.shots = shots
        self.noise = noise
        self.rng = rng
        if initial is None:
            self._states = None
        else:
            states = initial if isinstance(initial, (list, tuple)) else [initial]
            for s in states:
                if s.n_qubits != circuit.n_qubits:
                    raise ValueError("initial state has wrong qubit count")
            self._states = list(states)
            self._stack = np.stack([s.amplitudes for s in states])

    def _exact(self, params, offsets):
        c = self.circuit
        angles = c.bound_angles(params, offsets)
        if self._states is None:
            amps = np.zeros((1, 2**c.n_qubits), dtype=np.complex128)
            amps[0, 0] = 1.0
        else:
            amps = self._stack.copy()
        backend.K.run_batch(amps, c.kinds, c.s1, c.s2, angles)
        return float(np.mean(backend.K.expect_z_batch(amps, 1)))

    def _sampled(self, params, offsets):
        states = self._states if self._states is not None else [None]
        vals = [
            estimate_expectation_shots(
                self.circuit, params, self.shots, self.noise, self.rng,
                initial=s, offsets=offsets,
            )
            for s in states
        ]
        return float(np.mean(vals))

    def evaluate(self, params, offsets=None):
        if self.shots is None:
            return self._exact(params, offsets)
        return self._sampled(params, offsets)

    def __call__(self, params):
        return self.evaluate(params)


def parameter_shift_gradient(f, params, slots=None):
    """Gradient of a CircuitExpectation w.r.t. its parameter vector.

    Component i is the sum over gates fed by slot i of
    (f(+pi/2 shift on that gate) - f(-pi/2 shift)) / 2.  `slots` restricts
    the computation to a subset of slot indices (other entries stay 0).
    """
    circuit = f.circuit
    params = np.asarray(params, dtype=np.float64)
    grad = np.zeros(circuit.n_parameters)
    indices = range(circuit.n_parameters) if slots is None else slots
    for i in indices:
        for gi in circuit.gates_for_slot(i):
            if not circuit.gates[gi].is_rotation:
                raise ValueError(
                    f"slot {circuit.parameter_slots[i]!r} feeds a non-rotation gate"
                )
            plus = f.evaluate(params, offsets={gi: SHIFT})
            minus = f.evaluate(params, offsets={gi: -SHIFT})
            grad[i] += 0.5 * (plus - minus)
    return grad
