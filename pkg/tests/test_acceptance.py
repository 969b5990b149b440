"""End-to-end acceptance suite.

Covers the package-level guarantees: architecture parameter counts, gradient
correctness against finite differences, simulator invariants, AUC oracle
equivalence, adversarial learning on a single point, the full synthetic
detection benchmark in exact and shot-noise modes, the quantum-vs-classical
capacity comparison, and byte-identical manifest replay.  The shot-mode
benchmark dominates the runtime of the whole test session.
"""

import numpy as np
import pytest

from aqgan import effdim, persist
from aqgan.ansatz import (DiscriminatorSpec, GeneratorSpec,
                          build_discriminator, build_generator)
from aqgan.anomaly import AnomalyConfig, QuantumScorer, run_pipeline
from aqgan.cgan import default_model, gan_losses, mlp_forward
from aqgan.circuit import run_circuit
from aqgan.cli import main as cli_main
from aqgan.data import (EncodedEvent, default_synth_config, encode_angles,
                        fit_normalizer, fit_pca, synth_generate,
                        transform_many)
from aqgan.gradients import CircuitExpectation, parameter_shift_gradient
from aqgan.metrics import roc_auc
from aqgan.qgan import (TrainConfig, c_data, c_generated, new_model,
                        train_qgan)
from aqgan.shots import NOISELESS, NoiseModel, estimate_expectation_shots
from aqgan.state import fidelity

from oracles import mann_whitney_auc, random_circuit


# -- 1. architecture parameter counts ----------------------------------------

def test_parameter_counts_match_architecture():
    assert build_generator(GeneratorSpec(7, 9)).n_parameters == 70
    assert build_discriminator(DiscriminatorSpec(7, 3)).n_parameters == 66
    assert build_discriminator(DiscriminatorSpec(3, 2)).n_parameters == 21


# -- 2. gradient correctness --------------------------------------------------

def _fd(fun, params, eps=1e-6):
    grad = np.zeros_like(params)
    for i in range(len(params)):
        up, dn = params.copy(), params.copy()
        up[i] += eps
        dn[i] -= eps
        grad[i] = (fun(up) - fun(dn)) / (2 * eps)
    return grad


def test_parameter_shift_matches_finite_differences():
    rng = np.random.default_rng(2024)
    for n in (2, 3, 4):
        model = new_model(n, 2, 1, seed=n)
        gen, disc = model.generator, model.discriminator
        pg = gen.n_parameters
        composed = gen.compose(disc)
        batch = [EncodedEvent(rng.uniform(-np.pi / 2, np.pi / 2, n))
                 for _ in range(3)]
        states = [encode_angles(e) for e in batch]
        for _ in range(7):
            model.theta_g = rng.uniform(-np.pi, np.pi, pg)
            model.theta_d = rng.uniform(-np.pi, np.pi, disc.n_parameters)

            # d c_data / d theta_d:  C = (1 - z)/2 so dC = -dz/2
            gz = parameter_shift_gradient(
                CircuitExpectation(disc, initial=states), model.theta_d)
            grad_cdata = -0.5 * gz

            def f_cdata(td, model=model, batch=batch):
                saved = model.theta_d
                model.theta_d = td
                try:
                    return c_data(model, batch)
                finally:
                    model.theta_d = saved

            assert np.max(np.abs(grad_cdata - _fd(f_cdata, model.theta_d))) \
                < 1e-5

            # d c_generated / d (theta_g, theta_d) through the joint circuit
            full = np.concatenate([model.theta_g, model.theta_d])
            gz = parameter_shift_gradient(CircuitExpectation(composed), full)
            grad_cgen = -0.5 * gz

            def f_cgen(p, model=model, pg=pg):
                sg, sd = model.theta_g, model.theta_d
                model.theta_g, model.theta_d = p[:pg], p[pg:]
                try:
                    return c_generated(model)
                finally:
                    model.theta_g, model.theta_d = sg, sd

            assert np.max(np.abs(grad_cgen - _fd(f_cgen, full))) < 1e-5

            # the two training losses are signed combinations of the above
            grad_gen_loss = 0.5 * gz[:pg]  # d(-c_generated)/d theta_g
            assert np.max(np.abs(
                grad_gen_loss - _fd(lambda p: -f_cgen(
                    np.concatenate([p, model.theta_d])), model.theta_g)
            )) < 1e-5
            grad_obj = grad_cdata - grad_cgen[pg:]
            assert np.max(np.abs(
                grad_obj - _fd(lambda td: f_cdata(td) - f_cgen(
                    np.concatenate([model.theta_g, td])), model.theta_d)
            )) < 1e-5


def test_classical_backprop_matches_finite_differences():
    rng = np.random.default_rng(7)
    model = default_model(3, seed=3)
    gen, disc = model.generator, model.discriminator
    x = rng.uniform(-1, 1, (4, 3))
    z = rng.standard_normal((4, 3))
    m = len(x)

    # generator loss gradient w.r.t. generator parameters
    fake, cache_g = gen.forward(z)
    d_fake, cache_f = disc.forward(fake)
    g_gen, _ = gen.backward(
        cache_g, disc.backward(cache_f, -0.5 / (d_fake * m))[1])

    def f_closs(p, which):
        saved = which.get_params()
        which.set_params(p)
        try:
            return gan_losses(model, x, z)
        finally:
            which.set_params(saved)

    fd = _fd(lambda p: f_closs(p, gen)[0], gen.get_params())
    assert np.max(np.abs(g_gen - fd)) / max(np.max(np.abs(fd)), 1.0) < 1e-5

    # discriminator loss gradient w.r.t. discriminator parameters
    d_fake, cache_f = disc.forward(fake)
    d_real, cache_r = disc.forward(x)
    g_disc = disc.backward(cache_f, 0.5 / ((1.0 - d_fake) * m))[0] \
        + disc.backward(cache_r, -0.5 / (d_real * m))[0]
    fd = _fd(lambda p: f_closs(p, disc)[1], disc.get_params())
    assert np.max(np.abs(g_disc - fd)) / max(np.max(np.abs(fd)), 1.0) < 1e-5


# -- 3. simulator invariants ---------------------------------------------------

def test_norm_conserved_over_many_gates():
    rng = np.random.default_rng(11)
    circuit = random_circuit(4, 10_000, rng)
    params = rng.uniform(-np.pi, np.pi, circuit.n_parameters)
    state = run_circuit(circuit, params)
    assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-10


def test_shot_estimator_concentration():
    rng = np.random.default_rng(13)
    circuit = random_circuit(2, 6, rng)
    params = rng.uniform(-np.pi, np.pi, circuit.n_parameters)
    from aqgan.state import expectation_z_last
    exact = expectation_z_last(run_circuit(circuit, params))
    shots = 1000
    bound = 3.0 / np.sqrt(shots)
    hits = sum(
        abs(estimate_expectation_shots(circuit, params, shots, NOISELESS, rng)
            - exact) <= bound
        for _ in range(1000)
    )
    assert hits >= 990


# -- 4. AUC oracle equivalence -------------------------------------------------

def test_auc_matches_pairwise_oracle_with_ties():
    rng = np.random.default_rng(17)
    for _ in range(100):
        size = int(rng.integers(10, 60))
        scores = rng.integers(0, 10, size) / 10.0  # heavy ties
        truth = rng.integers(0, 2, size).astype(bool)
        if truth.all() or not truth.any():
            truth[0] = ~truth[0]
        _, auc = roc_auc(scores, truth, "higher-is-positive")
        assert abs(auc - mann_whitney_auc(scores, truth)) < 1e-9


# -- 5. adversarial learning on a single point ---------------------------------

def test_qgan_learns_single_point():
    target = EncodedEvent(np.array([0.7, -0.4]))
    # one distinct training point, replicated so each epoch makes several
    # generator updates at batch size 1
    data = [target] * 10
    wins = 0
    for seed in range(10):
        cfg = TrainConfig(epochs=500, batch_size=1,
                          disc_steps_per_gen_step=2, k_g=2, k_d=1, seed=seed)
        model, _ = train_qgan(cfg, data)
        f = fidelity(encode_angles(target), model.generator_state())
        wins += f > 0.9
    assert wins >= 8


# -- 6/7. synthetic detection benchmark, exact and shot-noise modes ------------

def _detection_auc(seed, **tc_kwargs):
    """Train on 100 background events, score 100 held-out background
    events against 100 mean-shifted anomalies, and return the best
    mixing-weight AUC."""
    sm = synth_generate(default_synth_config("SM", 0.0, seed=100), 200, seed)
    anom = synth_generate(default_synth_config("Graviton", 2.0, seed=100),
                          100, 1000 + seed)
    train, test = sm[:100], sm[100:]
    pca = fit_pca(train, 3)
    scaler = fit_normalizer(pca, train)
    cfg = TrainConfig(seed=seed, disc_steps_per_gen_step=1, **tc_kwargs)
    model, _ = train_qgan(cfg, transform_many(pca, scaler, train))
    report = run_pipeline(
        QuantumScorer(model),
        transform_many(pca, scaler, test),
        transform_many(pca, scaler, anom),
        AnomalyConfig(orientation="inverted"),
    )
    return report.auc_max


@pytest.fixture(scope="module")
def exact_benchmark_aucs():
    return [_detection_auc(seed, epochs=100) for seed in range(10)]


def test_detection_benchmark_exact(exact_benchmark_aucs):
    assert float(np.median(exact_benchmark_aucs)) >= 0.85


def test_detection_benchmark_shot_noise(exact_benchmark_aucs):
    noisy = [
        _detection_auc(seed, epochs=50, learning_rate=1e-2, mode="shots",
                       shots=10_000, noise=NoiseModel(0.001, 0.01, 0.0))
        for seed in range(10)
    ]
    degradation = float(np.median(exact_benchmark_aucs)) \
        - float(np.median(noisy))
    assert degradation < 0.15


# -- 8. capacity comparison -----------------------------------------------------

def test_effective_dimension_identity_closed_form():
    gamma, n_data, p = 1.0, 100_000, 8
    kappa = effdim.scaling_constant(gamma, n_data)
    ed = effdim.effective_dimension_from_fishers(
        np.stack([np.eye(p)] * 3), gamma, n_data, normalized=True)
    assert abs(ed - p * np.log1p(kappa) / np.log(kappa)) < 1e-9


def test_quantum_capacity_exceeds_matched_classical():
    for n in (3, 4, 5):
        wins = 0
        for seed in range(5):
            qmodel = effdim.QuantumStatModel(
                build_generator(GeneratorSpec(n, 1)))
            net, n_classical = effdim.matched_classical_net(
                n, qmodel.n_params, seed)
            assert n_classical == qmodel.n_params
            cmodel = effdim.ClassicalStatModel(net)
            d_q = effdim.effective_dimension(
                qmodel, 10, 10, 1.0, 100_000, seed,
                theta_range=(-np.pi, np.pi))
            d_c = effdim.effective_dimension(cmodel, 10, 10, 1.0, 100_000,
                                             seed)
            wins += d_q > d_c
        assert wins >= 4


# -- 9. byte-identical manifest replay ------------------------------------------

def test_manifest_rerun_is_byte_identical(tmp_path):
    normal = tmp_path / "normal.csv"
    anom = tmp_path / "anom.csv"
    preproc = tmp_path / "preproc.json"
    model = tmp_path / "model.json"
    hist = tmp_path / "hist.csv"
    scores = tmp_path / "scores.csv"
    report = tmp_path / "report.json"
    steps = [
        ["synth", "--label", "SM", "--size", "60", "--out", str(normal)],
        ["synth", "--label", "Graviton", "--shift", "2.0", "--size", "30",
         "--seed", "1", "--out", str(anom)],
        ["prep", "--data", str(normal), "--features", "3",
         "--train-size", "30", "--out", str(preproc)],
        ["train-qgan", "--data", str(normal), "--preproc", str(preproc),
         "--train-size", "30", "--epochs", "3", "--batch-size", "5",
         "--disc-steps", "1", "--kg", "1", "--kd", "1",
         "--out", str(model), "--history", str(hist)],
        ["score", "--model", str(model), "--preproc", str(preproc),
         "--normal", str(normal), "--anomalous", str(anom),
         "--alphas", "0,0.5,1", "--out", str(scores)],
        ["evaluate", "--scores", str(scores), "--normal-label", "SM",
         "--orientation", "inverted", "--out", str(report)],
    ]
    manifests = []
    for argv in steps:
        assert cli_main(argv) == 0
        out = argv[argv.index("--out") + 1]
        manifests.append(out + ".manifest.json")
    for manifest in manifests:
        before = {
            name: entry["sha256"]
            for name, entry
            in persist.read_manifest(manifest)["artifacts"].items()
        }
        assert cli_main(["rerun", "--manifest", manifest]) == 0
        doc = persist.read_manifest(manifest)
        for name, entry in doc["artifacts"].items():
            assert persist.sha256_file(entry["path"]) == before[name]
