"""Equivalence of the compiled and pure-numpy kernel backends.

The two implementations agree to within a few ulps per gate (numpy's SIMD
complex multiply uses fused multiply-adds, the scalar C loop does not), so
state comparisons use a tight tolerance rather than bit equality.  Seeded
shot-mode estimates still match exactly: both backends draw from the same
RNG substreams and a last-ulp probability difference does not flip the
binomial draws in practice.
"""

import numpy as np
import pytest

from aqgan import backend
from aqgan.shots import NoiseModel, estimate_expectation_shots

import oracles

pytestmark = pytest.mark.skipif(
    not backend.HAS_COMPILED, reason="compiled kernels not built"
)


@pytest.fixture
def both_backends():
    yield
    backend.use("compiled")


def _random_state(n, rng):
    a = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    a /= np.linalg.norm(a)
    return a


def test_run_agrees_across_backends(rng, both_backends):
    for n in (1, 2, 4):
        circ = oracles.random_circuit(n, 30, rng, parameterized=True)
        params = rng.uniform(-np.pi, np.pi, circ.n_parameters)
        backend.use("compiled")
        a = circ.run(params).amplitudes
        backend.use("python")
        b = circ.run(params).amplitudes
        np.testing.assert_allclose(a, b, atol=1e-13, rtol=0)


def test_apply_gate_and_pauli_agree(rng, both_backends):
    from aqgan._kernels import apply_gate as cg, apply_pauli as cp
    from aqgan._kernels_py import apply_gate as pg, apply_pauli as pp

    for kind in range(6):
        a = _random_state(3, rng)
        b = a.copy()
        s1, s2 = 4, 1
        cg(a, kind, s1, s2, 0.7)
        pg(b, kind, s1, s2, 0.7)
        np.testing.assert_allclose(a, b, atol=1e-13, rtol=0)
    for p in (1, 2, 3):
        a = _random_state(3, rng)
        b = a.copy()
        cp(a, 2, p)
        pp(b, 2, p)
        np.testing.assert_allclose(a, b, atol=1e-13, rtol=0)


def test_run_prefix_agrees(rng, both_backends):
    circ = oracles.random_circuit(3, 15, rng)
    init = _random_state(3, rng)
    results = {}
    for name in ("compiled", "python"):
        backend.use(name)
        prefix = np.empty((16, 8), dtype=np.complex128)
        prefix[0] = init
        backend.K.run_prefix(prefix, circ.kinds, circ.s1, circ.s2,
                             circ.bound_angles(()))
        results[name] = prefix.copy()
    np.testing.assert_allclose(results["compiled"], results["python"], atol=1e-13, rtol=0)
    # final prefix row equals a straight run
    np.testing.assert_allclose(
        results["compiled"][-1], oracles.run_dense(circ, initial=init),
        atol=1e-12,
    )


def test_expectations_identical(rng, both_backends):
    a = np.stack([_random_state(3, rng) for _ in range(4)])
    backend.use("compiled")
    ec = backend.K.expect_z_batch(a.copy(), 1)
    pc = backend.K.prob_one(a[0], 1)
    backend.use("python")
    ep = backend.K.expect_z_batch(a.copy(), 1)
    pp = backend.K.prob_one(a[0], 1)
    np.testing.assert_allclose(ec, ep, atol=1e-13)
    assert pc == pytest.approx(pp, abs=1e-13)


def test_noisy_shot_estimates_identical(rng, both_backends):
    circ = oracles.random_circuit(3, 20, rng, parameterized=True)
    params = rng.uniform(-np.pi, np.pi, circ.n_parameters)
    noise = NoiseModel(0.01, 0.05, 0.002)
    vals = {}
    for name in ("compiled", "python"):
        backend.use(name)
        r = np.random.default_rng(99)
        vals[name] = [
            estimate_expectation_shots(circ, params, 2000, noise, r)
            for _ in range(5)
        ]
    assert vals["compiled"] == vals["python"]
