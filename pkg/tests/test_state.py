import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqgan.state import (
    StateVector,
    expectation_z_last,
    fidelity,
    qubit_stride,
    zero_state,
)

import oracles


def test_zero_state_is_all_zeros_basis():
    s = zero_state(3)
    expected = np.zeros(8, dtype=complex)
    expected[0] = 1
    assert np.array_equal(s.amplitudes, expected)
    assert s.n_qubits == 3


def test_qubit_stride_most_significant_first():
    # qubit 0 owns the highest bit, the last qubit has stride 1
    assert qubit_stride(3, 0) == 4
    assert qubit_stride(3, 1) == 2
    assert qubit_stride(3, 2) == 1


def test_statevector_rejects_wrong_length():
    with pytest.raises(ValueError):
        StateVector(2, np.array([1.0, 0.0, 0.0], dtype=complex))


def test_expectation_z_last_against_dense_oracle(rng):
    for n in (1, 2, 3, 4):
        amps = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        amps /= np.linalg.norm(amps)
        s = StateVector(n, amps)
        assert expectation_z_last(s) == pytest.approx(
            oracles.z_last_dense(amps, n), abs=1e-12
        )


def test_expectation_z_last_basis_states():
    up = zero_state(2)
    assert expectation_z_last(up) == pytest.approx(1.0)
    amps = np.zeros(4, dtype=complex)
    amps[1] = 1  # |01>, last qubit set
    assert expectation_z_last(StateVector(2, amps)) == pytest.approx(-1.0)


def test_fidelity_properties(rng):
    n = 3
    a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    a /= np.linalg.norm(a)
    b = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    b /= np.linalg.norm(b)
    sa, sb = StateVector(n, a), StateVector(n, b)
    assert fidelity(sa, sa) == pytest.approx(1.0)
    f = fidelity(sa, sb)
    assert 0.0 <= f <= 1.0 + 1e-12
    assert f == pytest.approx(fidelity(sb, sa))
    assert f == pytest.approx(abs(np.vdot(a, b)) ** 2)


def test_probabilities_sum_to_one(rng):
    a = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    a /= np.linalg.norm(a)
    p = StateVector(4, a).probabilities()
    assert p.sum() == pytest.approx(1.0)
    assert np.all(p >= 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=2**31))
def test_norm_error_small_for_normalized_states(n, seed):
    r = np.random.default_rng(seed)
    a = r.standard_normal(2**n) + 1j * r.standard_normal(2**n)
    a /= np.linalg.norm(a)
    assert StateVector(n, a).norm_error() < 1e-12
