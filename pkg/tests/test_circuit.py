import numpy as np
import pytest

from aqgan.circuit import Circuit, Gate, UnboundParameterError, run_circuit
from aqgan.state import zero_state

import oracles


def test_gate_rotation_needs_exactly_one_of_angle_or_slot():
    Gate("RY", (0,), angle=0.3)
    Gate("RY", (0,), slot="a")
    with pytest.raises(ValueError):
        Gate("RY", (0,))
    with pytest.raises(ValueError):
        Gate("RY", (0,), angle=0.3, slot="a")


def test_gate_non_rotation_rejects_angle():
    with pytest.raises(ValueError):
        Gate("H", (0,), angle=0.1)
    with pytest.raises(ValueError):
        Gate("CZ", (0, 1), slot="a")


def test_gate_validates_qubit_arity():
    with pytest.raises(ValueError):
        Gate("CZ", (0,))
    with pytest.raises(ValueError):
        Gate("H", (0, 1))
    with pytest.raises(ValueError):
        Gate("CZ", (1, 1))


def test_unknown_gate_kind_rejected():
    with pytest.raises(ValueError):
        Gate("SWAP", (0, 1))


def test_run_fixed_circuit_matches_dense_oracle(rng):
    for n in (1, 2, 3, 4):
        circ = oracles.random_circuit(n, 20, rng)
        out = circ.run(None if circ.n_parameters else None)
        psi = oracles.run_dense(circ)
        np.testing.assert_allclose(out.amplitudes, psi, atol=1e-12)


def test_run_parameterized_matches_dense_oracle(rng):
    gates = [
        Gate("H", (0,)),
        Gate("RY", (0,), slot="a"),
        Gate("CNOT", (0, 1)),
        Gate("RZ", (1,), slot="b"),
        Gate("RX", (1,), slot="a"),  # slot reuse
        Gate("CZ", (0, 1)),
    ]
    circ = Circuit(2, gates)
    assert circ.n_parameters == 2
    params = rng.uniform(-np.pi, np.pi, 2)
    out = circ.run(params)
    psi = oracles.run_dense(circ, params)
    np.testing.assert_allclose(out.amplitudes, psi, atol=1e-12)


def test_parameter_slots_first_appearance_order():
    gates = [
        Gate("RY", (0,), slot="later"),
        Gate("RZ", (0,), slot="early"),
        Gate("RX", (0,), slot="later"),
    ]
    circ = Circuit(1, gates)
    assert circ.parameter_slots == ("later", "early")
    assert circ.gates_for_slot(0) == (0, 2)
    assert circ.gates_for_slot(1) == (1,)


def test_bound_angles_offsets_shift_one_gate(rng):
    gates = [Gate("RY", (0,), slot="a"), Gate("RY", (0,), slot="a")]
    circ = Circuit(1, gates)
    angles = circ.bound_angles(np.array([0.5]), offsets={1: np.pi / 2})
    np.testing.assert_allclose(angles, [0.5, 0.5 + np.pi / 2])


def test_unbound_parameters_raise():
    circ = Circuit(1, [Gate("RY", (0,), slot="a")])
    with pytest.raises(UnboundParameterError):
        circ.run(None)
    with pytest.raises(ValueError):
        circ.run(np.array([0.1, 0.2]))


def test_run_with_initial_state(rng):
    circ = oracles.random_circuit(3, 10, rng)
    amps = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    amps /= np.linalg.norm(amps)
    from aqgan.state import StateVector

    init = StateVector(3, amps)
    out = circ.run(None, initial=init)
    psi = oracles.run_dense(circ, initial=amps)
    np.testing.assert_allclose(out.amplitudes, psi, atol=1e-12)
    # the input state must not be mutated
    np.testing.assert_array_equal(init.amplitudes, amps)


def test_compose_runs_sequentially(rng):
    a = Circuit(2, [Gate("H", (0,)), Gate("RY", (1,), slot="x")])
    b = Circuit(2, [Gate("CNOT", (0, 1)), Gate("RZ", (0,), slot="y")])
    c = a.compose(b)
    assert c.n_parameters == 2
    params = rng.uniform(-np.pi, np.pi, 2)
    out = c.run(params)
    mid = a.run(params[:1])
    end = b.run(params[1:], initial=mid)
    np.testing.assert_allclose(out.amplitudes, end.amplitudes, atol=1e-12)


def test_compose_rejects_shared_slot_names():
    a = Circuit(1, [Gate("RY", (0,), slot="x")])
    b = Circuit(1, [Gate("RZ", (0,), slot="x")])
    with pytest.raises(ValueError):
        a.compose(b)


def test_compose_rejects_mismatched_widths():
    a = Circuit(1, [Gate("H", (0,))])
    b = Circuit(2, [Gate("H", (0,))])
    with pytest.raises(ValueError):
        a.compose(b)


def test_run_circuit_function_matches_method(rng):
    circ = oracles.random_circuit(2, 8, rng)
    s = zero_state(2)
    out = run_circuit(circ, None, s)
    np.testing.assert_allclose(
        out.amplitudes, circ.run(None).amplitudes, atol=1e-12
    )
