"""Adversarial training of the quantum generator/discriminator pair.

The discriminator labels a state as real when the Z measurement on the last
qubit yields -1, so C = (1 - <Z>)/2 is the probability of a "real" label.
The generator minimizes -C(generated); by default the discriminator
maximizes C(data) - C(generated), which restores the adversarial tension
(the as-printed objective with the opposite sign is available behind
`disc_objective_sign="as-printed"` for comparison).
"""

from dataclasses import dataclass, field

import numpy as np

from .ansatz import DiscriminatorSpec, GeneratorSpec, build_discriminator, build_generator
from .data import EncodedEvent, encode_angles, encoding_circuit
from .gradients import SHIFT, CircuitExpectation, parameter_shift_gradient
from .optim import Amsgrad
from .shots import NOISELESS, NoiseModel, estimate_expectation_shots
from .state import StateVector, expectation_z_last
from .utils import substream

GEN_PREFIX = "G."
DISC_PREFIX = "D."


class TrainingDiverged(RuntimeError):
    def __init__(self, message, history):
        super().__init__(message)
        self.history = history


@dataclass
class QGanModel:
    generator: object  # Circuit
    discriminator: object  # Circuit
    theta_g: np.ndarray
    theta_d: np.ndarray
    gen_spec: GeneratorSpec = None
    disc_spec: DiscriminatorSpec = None

    def __post_init__(self):
        self.theta_g = np.asarray(self.theta_g, dtype=np.float64)
        self.theta_d = np.asarray(self.theta_d, dtype=np.float64)
        if self.theta_g.shape != (self.generator.n_parameters,):
            raise ValueError("generator parameter vector has wrong length")
        if self.theta_d.shape != (self.discriminator.n_parameters,):
            raise ValueError("discriminator parameter vector has wrong length")

    @property
    def n_qubits(self):
        return self.generator.n_qubits

    def generator_state(self):
        return self.generator.run(self.theta_g)

    def discriminate_z(self, state):
        """<Z> on the last qubit after the discriminator circuit."""
        return expectation_z_last(self.discriminator.run(self.theta_d, initial=state))


def new_model(n_qubits, k_g, k_d, seed=0, init_scale=0.1):
    gen_spec = GeneratorSpec(n_qubits, k_g)
    disc_spec = DiscriminatorSpec(n_qubits, k_d)
    gen = build_generator(gen_spec, prefix=GEN_PREFIX)
    disc = build_discriminator(disc_spec, prefix=DISC_PREFIX)
    rng = substream(seed, "init")
    theta_g = rng.uniform(-init_scale, init_scale, gen.n_parameters)
    theta_d = rng.uniform(-init_scale, init_scale, disc.n_parameters)
    return QGanModel(gen, disc, theta_g, theta_d, gen_spec, disc_spec)


def _as_state(x):
    if isinstance(x, StateVector):
        return x
    if isinstance(x, EncodedEvent):
        return encode_angles(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a quantum state")


def c_generated(model):
    """Probability the discriminator labels the generated state as real."""
    z = model.discriminate_z(model.generator_state())
    return 0.5 - 0.5 * z


def c_data(model, batch):
    """Mean probability of a real label over a batch of embedded data points."""
    if not len(batch):
        raise ValueError("empty batch")
    zs = [model.discriminate_z(_as_state(x)) for x in batch]
    return 0.5 - 0.5 * float(np.mean(zs))


def generator_loss(model):
    return -c_generated(model)


def discriminator_objective(model, batch, sign="corrected"):
    """Objective the discriminator maximizes."""
    if sign == "corrected":
        return c_data(model, batch) - c_generated(model)
    if sign == "as-printed":
        return c_generated(model) - c_data(model, batch)
    raise ValueError(f"unknown objective sign {sign!r}")


def amsgrad_step(state, params, grads, lr, beta1, beta2, eps=1e-8):
    """One AMSGRAD update; `state` is an Amsgrad instance (kept for reuse)."""
    state.lr, state.beta1, state.beta2, state.eps = lr, beta1, beta2, eps
    return state.step(np.asarray(params, dtype=np.float64), grads)


@dataclass
class TrainConfig:
    epochs: int = 500
    learning_rate: float = 1e-3
    beta1: float = 0.7
    beta2: float = 0.99
    batch_size: int = 10
    disc_steps_per_gen_step: int = 5
    mode: str = "exact"  # "exact" | "shots"
    shots: int = 10_000
    noise: NoiseModel = field(default_factory=NoiseModel)
    seed: int = 0
    k_g: int = 3
    k_d: int = 2
    init_scale: float = 0.1
    disc_objective_sign: str = "corrected"

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.disc_steps_per_gen_step < 1:
            raise ValueError("disc_steps_per_gen_step must be >= 1")
        if self.mode not in ("exact", "shots"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.disc_objective_sign not in ("corrected", "as-printed"):
            raise ValueError(f"unknown objective sign {self.disc_objective_sign!r}")


def _z_grad_exact(circuit, params, initial, slots=None):
    f = CircuitExpectation(circuit, initial=initial)
    return parameter_shift_gradient(f, params, slots=slots)


def _estimate(circuit, params, shots, noise, rng, offsets=None):
    return estimate_expectation_shots(
        circuit, params, shots, noise, rng, offsets=offsets
    )


class _ShotEvaluator:
    """Shot-mode values and z-gradients on the composed circuits.

    Data circuits embed the (fixed-angle) encoding in front of the
    discriminator; the generated-state circuit is generator + discriminator.
    Gate-shift indices are offset accordingly.
    """

    def __init__(self, model, data, shots, noise, rng):
        self.disc = model.discriminator
        self.gen = model.generator
        self.data_circuits = [
            encoding_circuit(e).compose(self.disc) for e in data
        ]
        self.gen_circuit = self.gen.compose(self.disc)
        self.n_enc_gates = len(data[0].angles)
        self.n_gen_gates = len(self.gen.gates)
        self.shots = shots
        self.noise = noise
        self.rng = rng

    def z_data(self, theta_d, batch_idx, disc_gate=None, delta=0.0):
        offs = None
        if disc_gate is not None:
            offs = {self.n_enc_gates + disc_gate: delta}
        vals = [
            _estimate(self.data_circuits[b], theta_d, self.shots, self.noise,
                      self.rng, offsets=offs)
            for b in batch_idx
        ]
        return float(np.mean(vals))

    def z_gen(self, theta_g, theta_d, gate=None, delta=0.0, in_disc=True):
        offs = None
        if gate is not None:
            offs = {(self.n_gen_gates + gate) if in_disc else gate: delta}
        params = np.concatenate([theta_g, theta_d])
        return _estimate(self.gen_circuit, params, self.shots, self.noise,
                         self.rng, offsets=offs)


def train_qgan(config, data):
    """Alternating AMSGRAD training; returns (model, history).

    History holds one entry per epoch with the generator loss and the
    discriminator objective.  Fully deterministic for a fixed seed.
    """
    if not len(data):
        raise ValueError("training data is empty")
    n = len(data[0].angles)
    model = new_model(n, config.k_g, config.k_d, config.seed, config.init_scale)
    gen, disc = model.generator, model.discriminator
    pg, pd = gen.n_parameters, disc.n_parameters
    composed = gen.compose(disc)

    shuffle_rng = substream(config.seed, "shuffle")
    obj_sign = 1.0 if config.disc_objective_sign == "corrected" else -1.0

    opt_d = Amsgrad(pd, config.learning_rate, config.beta1, config.beta2)
    opt_g = Amsgrad(pg, config.learning_rate, config.beta1, config.beta2)

    exact = config.mode == "exact"
    states = [encode_angles(e) for e in data] if exact else None
    evaluator = None
    if not exact:
        shot_rng = substream(config.seed, "shots")
        evaluator = _ShotEvaluator(model, data, config.shots, config.noise, shot_rng)

    history = []
    try:
        for _ in range(config.epochs):
            perm = shuffle_rng.permutation(len(data))
            for at in range(0, len(data), config.batch_size):
                batch_idx = perm[at:at + config.batch_size]
                if exact:
                    batch_states = [states[i] for i in batch_idx]
                    gen_state = gen.run(model.theta_g)
                for _ in range(config.disc_steps_per_gen_step):
                    if exact:
                        gz_data = _z_grad_exact(disc, model.theta_d, batch_states)
                        gz_gen = _z_grad_exact(disc, model.theta_d, gen_state)
                    else:
                        gz_data = np.zeros(pd)
                        gz_gen = np.zeros(pd)
                        for i in range(pd):
                            for gi in disc.gates_for_slot(i):
                                zp = evaluator.z_data(model.theta_d, batch_idx, gi, SHIFT)
                                zm = evaluator.z_data(model.theta_d, batch_idx, gi, -SHIFT)
                                gz_data[i] += 0.5 * (zp - zm)
                                zp = evaluator.z_gen(model.theta_g, model.theta_d, gi, SHIFT)
                                zm = evaluator.z_gen(model.theta_g, model.theta_d, gi, -SHIFT)
                                gz_gen[i] += 0.5 * (zp - zm)
                    # C = (1 - z)/2, so dC = -dz/2; ascent on the objective.
                    grad_obj = obj_sign * (-0.5) * (gz_data - gz_gen)
                    model.theta_d = opt_d.step(model.theta_d, -grad_obj)

                # generator descent on C_G = -(1 - z)/2
                if exact:
                    full = np.concatenate([model.theta_g, model.theta_d])
                    gz = parameter_shift_gradient(
                        CircuitExpectation(composed), full, slots=range(pg)
                    )[:pg]
                else:
                    gz = np.zeros(pg)
                    for i in range(pg):
                        for gi in gen.gates_for_slot(i):
                            zp = evaluator.z_gen(model.theta_g, model.theta_d,
                                                 gi, SHIFT, in_disc=False)
                            zm = evaluator.z_gen(model.theta_g, model.theta_d,
                                                 gi, -SHIFT, in_disc=False)
                            gz[i] += 0.5 * (zp - zm)
                model.theta_g = opt_g.step(model.theta_g, 0.5 * gz)

            if exact:
                cg = c_generated(model)
                cd = c_data(model, states)
            else:
                cg = 0.5 - 0.5 * evaluator.z_gen(model.theta_g, model.theta_d)
                cd = 0.5 - 0.5 * evaluator.z_data(model.theta_d, range(len(data)))
            entry = {
                "generator_loss": -cg,
                "discriminator_objective": obj_sign * (cd - cg),
            }
            history.append(entry)
            if not all(np.isfinite(v) for v in entry.values()):
                raise FloatingPointError("non-finite objective")
    except FloatingPointError as exc:
        raise TrainingDiverged(str(exc), history) from exc
    return model, history
