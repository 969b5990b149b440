"""Effective dimension: a data-size-aware capacity measure for statistical
models, used here to compare the parameterized quantum generator with a
parameter-matched classical network.

A statistical model maps (parameters, input) to a distribution over 2^n
outcomes.  The empirical Fisher information is averaged over sampled inputs,
normalized so its trace averages to the parameter count, and the effective
dimension at data size N follows from log E_theta sqrt det(I + kappa F).
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .cgan import Mlp
from .data import encode_angles
from .gradients import SHIFT


def scaling_constant(gamma, n_data):
    """kappa = gamma * N / (2 pi log N); must exceed 1 for the log base."""
    if n_data < 2:
        raise ValueError("data size must be at least 2")
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must be in (0, 1]")
    kappa = gamma * n_data / (2.0 * np.pi * np.log(n_data))
    if kappa <= 1.0:
        raise ValueError(
            f"scaling constant {kappa:.4f} <= 1; increase gamma or data size"
        )
    return kappa


class QuantumStatModel:
    """Born distribution of the generator circuit over computational basis
    outcomes, with the probability jacobian from the pi/2 shift rule.

    Inputs are angle vectors fed through the product-state encoding and used
    as the circuit's initial state.
    """

    def __init__(self, circuit):
        self.circuit = circuit
        self.n_params = circuit.n_parameters
        self.n_outcomes = 2 ** circuit.n_qubits

    def _probs(self, params, x, offsets=None):
        amps = encode_angles(x).amplitudes[None, :].copy()
        angles = self.circuit.bound_angles(params, offsets)
        backend.K.run_batch(amps, self.circuit.kinds, self.circuit.s1,
                            self.circuit.s2, angles)
        return np.abs(amps[0]) ** 2

    def probs(self, params, x):
        return self._probs(params, x)

    def prob_jacobian(self, params, x):
        c = self.circuit
        jac = np.zeros((self.n_outcomes, self.n_params))
        for i in range(self.n_params):
            for gi in c.gates_for_slot(i):
                plus = self._probs(params, x, offsets={gi: SHIFT})
                minus = self._probs(params, x, offsets={gi: -SHIFT})
                jac[:, i] += 0.5 * (plus - minus)
        return jac


class ClassicalStatModel:
    """Product-Bernoulli distribution over 2^n outcomes from a dense network.

    The network maps an n-dimensional input to n logits; sigmoid(logit / tau)
    gives per-bit probabilities and the joint factorizes over bits.  Gradients
    of the outcome probabilities are assembled from per-logit backprop.
    """

    def __init__(self, net, temperature=1.0):
        if net.out_dim != net.in_dim:
            raise ValueError("network must map n inputs to n logits")
        if temperature <= 0:
            raise ValueError("temperature must be positive")
        self.net = net
        self.tau = float(temperature)
        self.n_params = net.n_params
        self.n_bits = net.out_dim
        self.n_outcomes = 2 ** net.out_dim
        # bits[y, j] = j-th bit of outcome y, qubit-0-most-significant order
        y = np.arange(self.n_outcomes)
        self.bits = (y[:, None] >> np.arange(self.n_bits - 1, -1, -1)) & 1

    def _bit_probs(self, params, x):
        self.net.set_params(params)
        logits, cache = self.net.forward(np.asarray(x, float)[None, :])
        q = 1.0 / (1.0 + np.exp(-logits[0] / self.tau))
        return q, logits, cache

    def probs(self, params, x):
        q, _, _ = self._bit_probs(params, x)
        return np.prod(np.where(self.bits == 1, q, 1.0 - q), axis=1)

    def prob_jacobian(self, params, x):
        q, _, cache = self._bit_probs(params, x)
        # dq_j / dparams via one backward pass per logit
        dq = np.empty((self.n_bits, self.n_params))
        for j in range(self.n_bits):
            dy = np.zeros((1, self.n_bits))
            dy[0, j] = q[j] * (1.0 - q[j]) / self.tau
            dq[j], _ = self.net.backward(cache, dy)
        p = np.prod(np.where(self.bits == 1, q, 1.0 - q), axis=1)
        # d log p / dq_j = b_j/q_j - (1-b_j)/(1-q_j); dp = p * sum_j (...) dq_j
        coef = np.where(self.bits == 1, 1.0 / q, -1.0 / (1.0 - q))
        return (p[:, None] * coef) @ dq


@dataclass
class FisherEstimate:
    fishers: np.ndarray  # (n_theta, P, P), unnormalized
    n_skipped: int  # outcome terms dropped for probability below cutoff


def empirical_fisher(model, thetas, inputs, prob_cutoff=1e-12):
    """Fisher information averaged over inputs, one matrix per theta sample.

    F(theta) = mean_x sum_y grad p_y grad p_y^T / p_y; outcome terms with
    p_y below `prob_cutoff` are skipped and counted.
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    fishers = np.zeros((len(thetas), model.n_params, model.n_params))
    skipped = 0
    for k, theta in enumerate(thetas):
        for x in inputs:
            p = model.probs(theta, x)
            jac = model.prob_jacobian(theta, x)
            keep = p > prob_cutoff
            skipped += int(np.sum(~keep))
            scaled = jac[keep] / np.sqrt(p[keep])[:, None]
            fishers[k] += scaled.T @ scaled
        fishers[k] /= len(inputs)
    return FisherEstimate(fishers=fishers, n_skipped=skipped)


def normalize_fishers(fishers):
    """Scale so the trace averaged over theta samples equals n_params."""
    fishers = np.asarray(fishers, dtype=np.float64)
    n_params = fishers.shape[1]
    avg_trace = float(np.mean(np.trace(fishers, axis1=1, axis2=2)))
    if avg_trace <= 0:
        raise ValueError("average Fisher trace is not positive")
    return fishers * (n_params / avg_trace)


def effective_dimension_from_fishers(fishers, gamma, n_data,
                                     normalized=False):
    """d_eff = 2 log( E_theta sqrt det(I + kappa F_hat) ) / log kappa."""
    kappa = scaling_constant(gamma, n_data)
    f_hat = np.asarray(fishers, float) if normalized \
        else normalize_fishers(fishers)
    n_params = f_hat.shape[1]
    eye = np.eye(n_params)
    half_logdets = np.empty(len(f_hat))
    for k, f in enumerate(f_hat):
        sign, logdet = np.linalg.slogdet(eye + kappa * f)
        if sign <= 0:
            raise FloatingPointError("I + kappa*F is not positive definite")
        half_logdets[k] = 0.5 * logdet
    # log-mean-exp for numerical stability
    m = half_logdets.max()
    log_mean = m + np.log(np.mean(np.exp(half_logdets - m)))
    return float(2.0 * log_mean / np.log(kappa))


def effective_dimension(model, n_theta, n_inputs, gamma, n_data, seed,
                        theta_range=(-1.0, 1.0)):
    """Monte-Carlo effective dimension with uniform theta and input draws."""
    from .utils import substream

    rng = substream(seed, "effdim")
    thetas = rng.uniform(*theta_range, size=(n_theta, model.n_params))
    inputs = rng.uniform(-np.pi / 2, np.pi / 2,
                         size=(n_inputs, _model_input_dim(model)))
    est = empirical_fisher(model, thetas, inputs)
    return effective_dimension_from_fishers(est.fishers, gamma, n_data)


def _model_input_dim(model):
    if isinstance(model, QuantumStatModel):
        return model.circuit.n_qubits
    if isinstance(model, ClassicalStatModel):
        return model.net.in_dim
    return model.n_bits  # duck-typed fallback


def matched_classical_net(n_qubits, n_target_params, seed, hidden=None):
    """Dense n -> h -> n network (no biases) whose parameter count matches
    the quantum model's as closely as possible; returns (net, count)."""
    from .utils import substream

    if hidden is None:
        # 2*h*n parameters; round to the nearest achievable count
        hidden = max(1, int(round(n_target_params / (2 * n_qubits))))
    rng = substream(seed, "effdim-net")
    net = Mlp.create(
        [n_qubits, hidden, n_qubits],
        activations=["leaky_relu", "identity"],
        bias=False,
        rng=rng,
    )
    return net, net.n_params
