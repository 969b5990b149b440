"""Command-line front end for the detection pipeline.

Every artifact-producing subcommand writes a manifest (<out>.manifest.json)
recording its arguments, seed, and sha256 digests of inputs and outputs;
`rerun` replays a manifest and verifies the regenerated artifacts match
byte for byte.

Exit codes: 0 success, 2 bad configuration, 3 missing input artifact,
4 training divergence, 5 rerun mismatch.
"""

import argparse
import json
import sys

import numpy as np

from . import anomaly, data, effdim, persist
from .cgan import GanTrainConfig, train_gan
from .qgan import TrainConfig, TrainingDiverged, train_qgan
from .shots import NoiseModel

EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_DIVERGED = 4
EXIT_MISMATCH = 5


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise CliError(f"config file not found: {path}", EXIT_MISSING)
    except json.JSONDecodeError as exc:
        raise CliError(f"cannot parse {path}: {exc}", EXIT_CONFIG)
    if not isinstance(doc, dict):
        raise CliError(f"{path}: config must be a JSON object", EXIT_CONFIG)
    return doc


def _merge_config(args):
    """File values fill in anything the command line left at its default."""
    if not getattr(args, "config", None):
        return vars(args)
    merged = dict(vars(args))
    for key, value in _load_config_file(args.config).items():
        key = key.replace("-", "_")
        if key not in merged:
            raise CliError(f"unknown config key {key!r}", EXIT_CONFIG)
        merged[key] = value
    return merged


def _require(path, what):
    import os

    if not os.path.exists(path):
        raise CliError(f"missing {what}: {path}", EXIT_MISSING)
    return path


def _load_events(csv_path, preproc_path):
    records = data.load_csv(_require(csv_path, "data file"))
    pca, scaler = persist.load_preproc(_require(preproc_path, "preprocessing file"))
    return records, data.transform_many(pca, scaler, records)


def _write_manifest(cfg, inputs, artifacts):
    out = dict(cfg)
    command = out.pop("command")
    seed = out.get("seed", 0)
    out.pop("func", None)
    out.pop("config", None)
    manifest_path = artifacts[next(iter(artifacts))] + ".manifest.json"
    persist.write_manifest(manifest_path, command, out, seed,
                           inputs, artifacts)
    return manifest_path


# -- subcommands -------------------------------------------------------------

def cmd_synth(cfg):
    synth = data.default_synth_config(cfg["label"], cfg["shift"], cfg["seed"])
    records = data.synth_generate(synth, cfg["size"], cfg["seed"])
    data.save_csv(cfg["out"], records)
    _write_manifest(cfg, {}, {"data": cfg["out"]})
    print(f"wrote {len(records)} events to {cfg['out']}")


def cmd_prep(cfg):
    records = data.load_csv(_require(cfg["data"], "data file"))
    train = data.sample_subset(records, cfg["train_size"], cfg["seed"])
    pca = data.fit_pca(train, cfg["features"])
    scaler = data.fit_normalizer(pca, train)
    persist.save_preproc(cfg["out"], pca, scaler)
    _write_manifest(cfg, {"data": cfg["data"]}, {"preproc": cfg["out"]})
    print(f"fitted {cfg['features']}-feature projection on "
          f"{cfg['train_size']} events -> {cfg['out']}")


def _noise_from(cfg):
    return NoiseModel(cfg["p1q"], cfg["p2q"], cfg["readout"])


def cmd_train_qgan(cfg):
    records, events = _load_events(cfg["data"], cfg["preproc"])
    train = data.sample_subset(events, cfg["train_size"], cfg["seed"])
    tc = TrainConfig(
        epochs=cfg["epochs"], learning_rate=cfg["lr"],
        batch_size=cfg["batch_size"],
        disc_steps_per_gen_step=cfg["disc_steps"],
        mode=cfg["mode"], shots=cfg["shots"], noise=_noise_from(cfg),
        seed=cfg["seed"], k_g=cfg["kg"], k_d=cfg["kd"],
    )
    model, history = train_qgan(tc, train)
    persist.save_qgan_model(cfg["out"], model)
    persist.save_history_csv(cfg["history"], history)
    _write_manifest(
        cfg,
        {"data": cfg["data"], "preproc": cfg["preproc"]},
        {"model": cfg["out"], "history": cfg["history"]},
    )
    print(f"trained quantum model ({cfg['epochs']} epochs, mode={cfg['mode']}) "
          f"-> {cfg['out']}")


def cmd_train_gan(cfg):
    records, events = _load_events(cfg["data"], cfg["preproc"])
    train = data.sample_subset(events, cfg["train_size"], cfg["seed"])
    rows = np.stack([e.angles for e in train])
    tc = GanTrainConfig(
        epochs=cfg["epochs"], learning_rate=cfg["lr"],
        batch_size=cfg["batch_size"],
        disc_steps_per_gen_step=cfg["disc_steps"],
        seed=cfg["seed"],
        gen_hidden=cfg["gen_hidden"], disc_hidden=cfg["disc_hidden"],
    )
    model, history = train_gan(tc, rows)
    persist.save_classical_model(cfg["out"], model)
    persist.save_history_csv(cfg["history"], history)
    _write_manifest(
        cfg,
        {"data": cfg["data"], "preproc": cfg["preproc"]},
        {"model": cfg["out"], "history": cfg["history"]},
    )
    print(f"trained classical model ({cfg['epochs']} epochs) -> {cfg['out']}")


def _load_any_model(path):
    doc = persist.read_json(_require(path, "model file"))
    kind = doc.get("format")
    if kind == "qgan-model":
        return "quantum", persist.load_qgan_model(path)
    if kind == "classical-gan-model":
        return "classical", persist.load_classical_model(path)
    raise CliError(f"{path}: unrecognized model format {kind!r}", EXIT_CONFIG)


def _parse_alphas(text):
    try:
        alphas = tuple(float(a) for a in text.split(","))
    except ValueError:
        raise CliError(f"cannot parse alpha grid {text!r}", EXIT_CONFIG)
    return alphas


def cmd_score(cfg):
    kind, model = _load_any_model(cfg["model"])
    _, normal = _load_events(cfg["normal"], cfg["preproc"])
    _, anomalous = _load_events(cfg["anomalous"], cfg["preproc"])
    alphas = _parse_alphas(cfg["alphas"])
    if kind == "quantum":
        scorer = anomaly.QuantumScorer(model)
    else:
        scorer = anomaly.ClassicalScorer(model, seed=cfg["seed"])
    rows = []
    for alpha in alphas:
        for offset, events in ((0, normal), (len(normal), anomalous)):
            scores = scorer.scores(events, alpha)
            rows.extend(
                (offset + i, e.label, alpha, s)
                for i, (e, s) in enumerate(zip(events, scores))
            )
    persist.save_scores_csv(cfg["out"], rows)
    _write_manifest(
        cfg,
        {"model": cfg["model"], "preproc": cfg["preproc"],
         "normal": cfg["normal"], "anomalous": cfg["anomalous"]},
        {"scores": cfg["out"]},
    )
    print(f"scored {len(normal)} normal + {len(anomalous)} anomalous events "
          f"at {len(alphas)} mixing values -> {cfg['out']}")


def cmd_evaluate(cfg):
    rows = persist.load_scores_csv(_require(cfg["scores"], "score table"))
    normal_label = cfg["normal_label"]
    by_alpha = {}
    for _, label, alpha, score in rows:
        sn, sa = by_alpha.setdefault(alpha, ([], []))
        (sn if label == normal_label else sa).append(score)
    if not by_alpha:
        raise CliError("score table is empty", EXIT_CONFIG)
    grid = tuple(sorted(by_alpha))
    try:
        acfg = anomaly.AnomalyConfig(alpha_grid=grid,
                                     orientation=cfg["orientation"])
        report = anomaly.report_from_scores(by_alpha, acfg)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_CONFIG)
    persist.save_report_json(cfg["out"], report)
    artifacts = {"report": cfg["out"]}
    if cfg["roc_out"]:
        persist.save_roc_csv(cfg["roc_out"], report.best.roc_points)
        artifacts["roc"] = cfg["roc_out"]
    _write_manifest(cfg, {"scores": cfg["scores"]}, artifacts)
    print(f"best mixing alpha={report.alpha_max} auc={report.auc_max:.4f} "
          f"-> {cfg['out']}")


def cmd_effdim(cfg):
    from .ansatz import GeneratorSpec, build_generator

    n = cfg["qubits"]
    spec = GeneratorSpec(n, cfg["depth"])
    qmodel = effdim.QuantumStatModel(build_generator(spec))
    net, n_classical = effdim.matched_classical_net(n, qmodel.n_params,
                                                    cfg["seed"])
    cmodel = effdim.ClassicalStatModel(net)
    d_q = effdim.effective_dimension(
        qmodel, cfg["n_theta"], cfg["n_inputs"], cfg["gamma"],
        cfg["data_size"], cfg["seed"], theta_range=(-np.pi, np.pi),
    )
    d_c = effdim.effective_dimension(
        cmodel, cfg["n_theta"], cfg["n_inputs"], cfg["gamma"],
        cfg["data_size"], cfg["seed"],
    )
    persist.write_json(cfg["out"], {
        "format": "effdim-study",
        "n_qubits": n,
        "depth": cfg["depth"],
        "gamma": cfg["gamma"],
        "data_size": cfg["data_size"],
        "n_params_quantum": qmodel.n_params,
        "n_params_classical": n_classical,
        "effdim_quantum": d_q,
        "effdim_classical": d_c,
    })
    _write_manifest(cfg, {}, {"effdim": cfg["out"]})
    print(f"n={n}: effective dimension quantum={d_q:.3f} "
          f"classical={d_c:.3f} (P={qmodel.n_params})")


def cmd_report(cfg):
    doc = persist.read_json(_require(cfg["report"], "report file"))
    if doc.get("format") != "anomaly-report":
        raise CliError(f"{cfg['report']}: not a report file", EXIT_CONFIG)
    print(f"orientation: {doc['orientation']}")
    for row in doc["per_alpha"]:
        star = " *" if row["alpha"] == doc["alpha_max"] else ""
        flag = " [degenerate scores]" if row["degenerate_scores"] else ""
        m = row["metrics"]
        print(f"  alpha={row['alpha']:<5} auc={row['auc']:.4f} "
              f"acc={m['accuracy']:.4f} f1={m['f1']:.4f}{star}{flag}")
    print(f"best: alpha={doc['alpha_max']} auc={doc['auc_max']:.4f}")


def cmd_rerun(cfg):
    manifest = persist.read_manifest(_require(cfg["manifest"], "manifest"))
    command = manifest["command"]
    handler = COMMANDS.get(command)
    if handler is None:
        raise CliError(f"manifest records unknown command {command!r}",
                       EXIT_CONFIG)
    replay = dict(manifest["config"])
    replay["command"] = command
    for name, entry in manifest["inputs"].items():
        if persist.sha256_file(_require(entry["path"], f"input {name}")) \
                != entry["sha256"]:
            raise CliError(f"input {name} ({entry['path']}) changed since "
                           "the recorded run", EXIT_MISMATCH)
    handler(replay)
    bad = [name for name, ok in persist.verify_artifacts(manifest).items()
           if not ok]
    if bad:
        raise CliError(
            "regenerated artifacts differ: " + ", ".join(sorted(bad)),
            EXIT_MISMATCH,
        )
    print(f"rerun of '{command}' reproduced "
          f"{len(manifest['artifacts'])} artifact(s) byte-identically")


# -- argument parsing --------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="aqgan",
        description="Quantum-GAN anomaly detection pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file with argument overrides")
        p.add_argument("--seed", type=int, default=0)
        return p

    p = add("synth", "generate a synthetic event sample")
    p.add_argument("--label", default="SM")
    p.add_argument("--shift", type=float, default=0.0,
                   help="per-axis mean shift in standard deviations")
    p.add_argument("--size", type=int, default=1000)
    p.add_argument("--out", required=True)

    p = add("prep", "fit the dimensionality reduction and angle scaling")
    p.add_argument("--data", required=True)
    p.add_argument("--features", type=int, default=3)
    p.add_argument("--train-size", type=int, default=100)
    p.add_argument("--out", required=True)

    p = add("train-qgan", "train the quantum generator/discriminator pair")
    p.add_argument("--data", required=True)
    p.add_argument("--preproc", required=True)
    p.add_argument("--train-size", type=int, default=100)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=10)
    p.add_argument("--disc-steps", type=int, default=5)
    p.add_argument("--mode", choices=("exact", "shots"), default="exact")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--p1q", type=float, default=0.0,
                   help="one-qubit depolarizing probability (shots mode)")
    p.add_argument("--p2q", type=float, default=0.0,
                   help="two-qubit depolarizing probability (shots mode)")
    p.add_argument("--readout", type=float, default=0.0,
                   help="readout flip probability (shots mode)")
    p.add_argument("--kg", type=int, default=3, help="generator depth")
    p.add_argument("--kd", type=int, default=2, help="discriminator depth")
    p.add_argument("--out", required=True)
    p.add_argument("--history", required=True)

    p = add("train-gan", "train the classical baseline")
    p.add_argument("--data", required=True)
    p.add_argument("--preproc", required=True)
    p.add_argument("--train-size", type=int, default=100)
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=10)
    p.add_argument("--disc-steps", type=int, default=1)
    p.add_argument("--gen-hidden", type=int, default=8)
    p.add_argument("--disc-hidden", type=int, default=8)
    p.add_argument("--out", required=True)
    p.add_argument("--history", required=True)

    p = add("score", "compute anomaly scores for two event samples")
    p.add_argument("--model", required=True)
    p.add_argument("--preproc", required=True)
    p.add_argument("--normal", required=True)
    p.add_argument("--anomalous", required=True)
    p.add_argument("--alphas", default="0,0.25,0.5,0.75,1")
    p.add_argument("--out", required=True)

    p = add("evaluate", "grid-search the mixing weight and build a report")
    p.add_argument("--scores", required=True)
    p.add_argument("--normal-label", default="SM")
    p.add_argument("--orientation", choices=("as-written", "inverted"),
                   default="as-written")
    p.add_argument("--roc-out", default=None,
                   help="also dump the best-alpha ROC curve")
    p.add_argument("--out", required=True)

    p = add("effdim", "compare quantum and classical model capacity")
    p.add_argument("--qubits", type=int, default=3)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--data-size", type=int, default=100_000)
    p.add_argument("--n-theta", type=int, default=20)
    p.add_argument("--n-inputs", type=int, default=10)
    p.add_argument("--out", required=True)

    p = add("report", "print a saved evaluation report")
    p.add_argument("--report", required=True)

    p = add("rerun", "replay a manifest and verify byte-identical artifacts")
    p.add_argument("--manifest", required=True)

    return parser


COMMANDS = {
    "synth": cmd_synth,
    "prep": cmd_prep,
    "train-qgan": cmd_train_qgan,
    "train-gan": cmd_train_gan,
    "score": cmd_score,
    "evaluate": cmd_evaluate,
    "effdim": cmd_effdim,
    "report": cmd_report,
    "rerun": cmd_rerun,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        COMMANDS[args.command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except TrainingDiverged as exc:
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
