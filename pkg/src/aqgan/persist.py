"""On-disk formats: model checkpoints, preprocessing state, score tables,
ROC curves, reports, and run manifests.

All JSON is written with sorted keys and repr-roundtripping floats so the
same inputs always produce the same bytes; manifests record sha256 digests
of every input and artifact so a run can be replayed and verified.
"""

import csv
import hashlib
import json
from dataclasses import asdict, is_dataclass

import numpy as np

from .ansatz import DiscriminatorSpec, GeneratorSpec, build_discriminator, build_generator
from .cgan import ClassicalGanModel, LayerSpec, Mlp
from .data import PcaModel, RangeNormalizer
from .qgan import DISC_PREFIX, GEN_PREFIX, QGanModel

FORMAT_VERSION = 1


def _to_jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if is_dataclass(obj) and not isinstance(obj, type):
        return _to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    return obj


def write_json(path, payload):
    text = json.dumps(_to_jsonable(payload), sort_keys=True, indent=2)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# -- quantum model ----------------------------------------------------------

def save_qgan_model(path, model):
    if model.gen_spec is None or model.disc_spec is None:
        raise ValueError("model is missing its architecture specs")
    write_json(path, {
        "format": "qgan-model",
        "version": FORMAT_VERSION,
        "n_qubits": model.n_qubits,
        "gen_depth": model.gen_spec.depth,
        "disc_depth": model.disc_spec.depth,
        "theta_g": model.theta_g,
        "theta_d": model.theta_d,
    })


def load_qgan_model(path):
    doc = read_json(path)
    if doc.get("format") != "qgan-model":
        raise ValueError(f"{path}: not a quantum model file")
    gen_spec = GeneratorSpec(doc["n_qubits"], doc["gen_depth"])
    disc_spec = DiscriminatorSpec(doc["n_qubits"], doc["disc_depth"])
    return QGanModel(
        build_generator(gen_spec, prefix=GEN_PREFIX),
        build_discriminator(disc_spec, prefix=DISC_PREFIX),
        np.array(doc["theta_g"]),
        np.array(doc["theta_d"]),
        gen_spec,
        disc_spec,
    )


# -- classical model --------------------------------------------------------

def _net_to_doc(net):
    return [
        {
            "w": l.w,
            "b": l.b if l.b is not None else None,
            "activation": l.activation,
            "dropout": l.dropout,
        }
        for l in net.layers
    ]


def _net_from_doc(doc):
    return Mlp([
        LayerSpec(
            np.array(l["w"], dtype=np.float64),
            None if l["b"] is None else np.array(l["b"], dtype=np.float64),
            l["activation"],
            l["dropout"],
        )
        for l in doc
    ])


def save_classical_model(path, model):
    write_json(path, {
        "format": "classical-gan-model",
        "version": FORMAT_VERSION,
        "z_dim": model.z_dim,
        "generator": _net_to_doc(model.generator),
        "discriminator": _net_to_doc(model.discriminator),
    })


def load_classical_model(path):
    doc = read_json(path)
    if doc.get("format") != "classical-gan-model":
        raise ValueError(f"{path}: not a classical model file")
    return ClassicalGanModel(
        _net_from_doc(doc["generator"]),
        _net_from_doc(doc["discriminator"]),
        z_dim=doc["z_dim"],
    )


# -- preprocessing ----------------------------------------------------------

def save_preproc(path, pca, scaler):
    write_json(path, {
        "format": "preproc",
        "version": FORMAT_VERSION,
        "pca_mean": pca.mean,
        "pca_components": pca.components,
        "pca_explained_variance": pca.explained_variance,
        "norm_lo": scaler.lo,
        "norm_hi": scaler.hi,
    })


def load_preproc(path):
    doc = read_json(path)
    if doc.get("format") != "preproc":
        raise ValueError(f"{path}: not a preprocessing file")
    pca = PcaModel(
        np.array(doc["pca_mean"]),
        np.array(doc["pca_components"]),
        np.array(doc["pca_explained_variance"]),
    )
    scaler = RangeNormalizer(np.array(doc["norm_lo"]), np.array(doc["norm_hi"]))
    return pca, scaler


# -- tabular artifacts ------------------------------------------------------

def save_history_csv(path, history):
    """Per-epoch loss curves; the second column name follows the model kind
    (quantum training logs an objective, classical training a loss)."""
    if not history:
        raise ValueError("empty history")
    disc_key = ("discriminator_objective"
                if "discriminator_objective" in history[0]
                else "discriminator_loss")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "generator_loss", disc_key])
        for i, row in enumerate(history):
            writer.writerow([
                i, repr(float(row["generator_loss"])),
                repr(float(row[disc_key])),
            ])


def load_history_csv(path):
    history = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        for row in reader:
            history.append({
                header[1]: float(row[1]),
                header[2]: float(row[2]),
            })
    return history


def save_scores_csv(path, rows):
    """rows: iterable of (event_id, label, alpha, score)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["event_id", "label", "alpha", "score"])
        for event_id, label, alpha, score in rows:
            writer.writerow([event_id, label, repr(float(alpha)),
                             repr(float(score))])


def load_scores_csv(path):
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rows.append((int(row["event_id"]), row["label"],
                         float(row["alpha"]), float(row["score"])))
    return rows


def save_roc_csv(path, points):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fpr", "tpr", "threshold"])
        for fpr, tpr, thr in points:
            writer.writerow([repr(float(fpr)), repr(float(tpr)),
                             repr(float(thr))])


def save_report_json(path, report):
    per_alpha = [
        {
            "alpha": r.alpha,
            "auc": r.auc,
            "auc_other_orientation": r.auc_other_orientation,
            "threshold": r.delta,
            "degenerate_scores": r.degenerate_scores,
            "metrics": r.metrics,
        }
        for r in report.per_alpha
    ]
    write_json(path, {
        "format": "anomaly-report",
        "version": FORMAT_VERSION,
        "orientation": report.config.orientation,
        "alpha_grid": list(report.config.alpha_grid),
        "alpha_max": report.alpha_max,
        "auc_max": report.auc_max,
        "flagged_degenerate": report.flagged,
        "per_alpha": per_alpha,
    })


# -- manifests --------------------------------------------------------------

def write_manifest(path, command, config, seed, inputs, artifacts):
    """Record what produced a set of artifacts.

    `inputs` and `artifacts` map logical names to file paths; both are
    digested.  The manifest carries everything `rerun` needs except the
    input files themselves.
    """
    write_json(path, {
        "format": "run-manifest",
        "version": FORMAT_VERSION,
        "command": command,
        "config": _to_jsonable(config),
        "seed": seed,
        "inputs": {name: {"path": p, "sha256": sha256_file(p)}
                   for name, p in sorted(inputs.items())},
        "artifacts": {name: {"path": p, "sha256": sha256_file(p)}
                      for name, p in sorted(artifacts.items())},
    })


def read_manifest(path):
    doc = read_json(path)
    if doc.get("format") != "run-manifest":
        raise ValueError(f"{path}: not a run manifest")
    return doc


def verify_artifacts(manifest):
    """Returns {name: bool} comparing recorded and current artifact digests."""
    return {
        name: sha256_file(entry["path"]) == entry["sha256"]
        for name, entry in manifest["artifacts"].items()
    }
