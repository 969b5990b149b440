import numpy as np
import pytest

from aqgan import effdim
from aqgan.ansatz import GeneratorSpec, build_generator
from aqgan.cgan import Mlp


def test_scaling_constant_formula_and_validation():
    kappa = effdim.scaling_constant(0.5, 1000)
    assert kappa == pytest.approx(0.5 * 1000 / (2 * np.pi * np.log(1000)))
    with pytest.raises(ValueError):
        effdim.scaling_constant(0.0, 1000)
    with pytest.raises(ValueError):
        effdim.scaling_constant(0.5, 1)
    with pytest.raises(ValueError):
        effdim.scaling_constant(1e-3, 100)  # kappa <= 1


@pytest.fixture
def qstat():
    return effdim.QuantumStatModel(build_generator(GeneratorSpec(3, 1)))


def test_quantum_probs_normalized(qstat, rng):
    theta = rng.uniform(-1, 1, qstat.n_params)
    x = rng.uniform(-np.pi / 2, np.pi / 2, 3)
    p = qstat.probs(theta, x)
    assert p.shape == (8,)
    assert np.all(p >= 0)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)


def test_quantum_prob_jacobian_vs_finite_difference(qstat, rng):
    theta = rng.uniform(-1, 1, qstat.n_params)
    x = rng.uniform(-np.pi / 2, np.pi / 2, 3)
    jac = qstat.prob_jacobian(theta, x)
    eps = 1e-6
    fd = np.zeros_like(jac)
    for i in range(qstat.n_params):
        tp, tm = theta.copy(), theta.copy()
        tp[i] += eps
        tm[i] -= eps
        fd[:, i] = (qstat.probs(tp, x) - qstat.probs(tm, x)) / (2 * eps)
    np.testing.assert_allclose(jac, fd, atol=1e-8)
    # probability gradients sum to zero over outcomes
    np.testing.assert_allclose(jac.sum(axis=0), 0.0, atol=1e-12)


@pytest.fixture
def cstat():
    net, _ = effdim.matched_classical_net(3, 12, seed=7)
    return effdim.ClassicalStatModel(net)


def test_classical_probs_normalized(cstat, rng):
    theta = rng.uniform(-1, 1, cstat.n_params)
    x = rng.uniform(-np.pi / 2, np.pi / 2, 3)
    p = cstat.probs(theta, x)
    assert p.shape == (8,)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)


def test_classical_prob_jacobian_vs_finite_difference(cstat, rng):
    theta = rng.uniform(-1, 1, cstat.n_params)
    x = rng.uniform(-np.pi / 2, np.pi / 2, 3)
    jac = cstat.prob_jacobian(theta, x)
    eps = 1e-6
    fd = np.zeros_like(jac)
    for i in range(cstat.n_params):
        tp, tm = theta.copy(), theta.copy()
        tp[i] += eps
        tm[i] -= eps
        fd[:, i] = (cstat.probs(tp, x) - cstat.probs(tm, x)) / (2 * eps)
    np.testing.assert_allclose(jac, fd, atol=1e-7)


def test_classical_model_validation():
    net = Mlp.create([3, 4, 2], ["leaky_relu", "identity"],
                     rng=np.random.default_rng(0))
    with pytest.raises(ValueError):
        effdim.ClassicalStatModel(net)
    sq, _ = effdim.matched_classical_net(3, 12, seed=0)
    with pytest.raises(ValueError):
        effdim.ClassicalStatModel(sq, temperature=0.0)


def test_empirical_fisher_is_psd_and_matches_definition(qstat, rng):
    thetas = rng.uniform(-1, 1, (2, qstat.n_params))
    inputs = rng.uniform(-np.pi / 2, np.pi / 2, (3, 3))
    est = effdim.empirical_fisher(qstat, thetas, inputs)
    assert est.fishers.shape == (2, qstat.n_params, qstat.n_params)
    for k, theta in enumerate(thetas):
        expected = np.zeros((qstat.n_params, qstat.n_params))
        for x in inputs:
            p = qstat.probs(theta, x)
            jac = qstat.prob_jacobian(theta, x)
            for y in range(len(p)):
                if p[y] > 1e-12:
                    expected += np.outer(jac[y], jac[y]) / p[y]
        expected /= len(inputs)
        np.testing.assert_allclose(est.fishers[k], expected, atol=1e-10)
        eigs = np.linalg.eigvalsh(est.fishers[k])
        assert eigs.min() > -1e-10


def test_normalize_fishers_trace(rng):
    fishers = np.stack([np.diag(rng.uniform(0.5, 2.0, 4)) for _ in range(3)])
    out = effdim.normalize_fishers(fishers)
    assert np.mean(np.trace(out, axis1=1, axis2=2)) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        effdim.normalize_fishers(np.zeros((2, 3, 3)))


def test_effective_dimension_identity_fisher_closed_form():
    # F_hat = I gives d_eff = P * log(1 + kappa) / log(kappa)
    p = 6
    gamma, n_data = 1.0, 5000
    kappa = effdim.scaling_constant(gamma, n_data)
    fishers = np.stack([np.eye(p)] * 4)
    ed = effdim.effective_dimension_from_fishers(fishers, gamma, n_data,
                                                 normalized=True)
    assert ed == pytest.approx(p * np.log1p(kappa) / np.log(kappa), abs=1e-9)


def test_effective_dimension_bounded_by_param_count(qstat):
    ed = effdim.effective_dimension(qstat, n_theta=3, n_inputs=2,
                                    gamma=1.0, n_data=5000, seed=0)
    assert 0.0 < ed <= qstat.n_params + 1e-9


def test_effective_dimension_deterministic(cstat):
    kwargs = dict(n_theta=3, n_inputs=2, gamma=1.0, n_data=2000, seed=3)
    assert effdim.effective_dimension(cstat, **kwargs) \
        == effdim.effective_dimension(cstat, **kwargs)


def test_matched_classical_net_param_count():
    net, count = effdim.matched_classical_net(4, 16, seed=0)
    assert count == 16  # 2 * h * n with h = 2
    assert net.in_dim == 4 and net.out_dim == 4
    net2, count2 = effdim.matched_classical_net(3, 100, seed=0, hidden=5)
    assert count2 == 2 * 5 * 3
