"""Event ingestion, PCA compression, range normalization and angle encoding.

Events carry 23 high-level features.  Preprocessing is fitted on the
non-anomalous training subset only: PCA to d components, then a per-feature
linear map of the training range onto [-pi/2, pi/2].  Test events outside
the training range are deliberately not clipped.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate
from .state import StateVector

N_FEATURES = 23
LABELS = ("SM", "Higgs", "Graviton", "unlabeled")

HALF_PI = np.pi / 2


@dataclass
class EventRecord:
    features: np.ndarray
    label: str = "unlabeled"

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} features, got {self.features.shape}")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("non-finite feature value")
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")


def feature_matrix(records):
    return np.stack([r.features for r in records])


@dataclass
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (d, 23), orthonormal rows
    explained_variance: np.ndarray  # (d,), descending

    @property
    def d(self):
        return self.components.shape[0]

    def project(self, features):
        return self.components @ (np.asarray(features) - self.mean)


@dataclass
class RangeNormalizer:
    lo: np.ndarray  # per-coordinate training minimum
    hi: np.ndarray  # per-coordinate training maximum

    def apply(self, coords):
        coords = np.asarray(coords, dtype=np.float64)
        span = self.hi - self.lo
        out = np.zeros_like(coords)
        ok = span > 0
        out[ok] = -HALF_PI + np.pi * (coords[ok] - self.lo[ok]) / span[ok]
        return out

    def invert(self, angles):
        angles = np.asarray(angles, dtype=np.float64)
        span = self.hi - self.lo
        out = self.lo.copy()
        ok = span > 0
        out[ok] += (angles[ok] + HALF_PI) / np.pi * span[ok]
        return out


@dataclass
class EncodedEvent:
    angles: np.ndarray
    label: str = "unlabeled"

    def __post_init__(self):
        self.angles = np.asarray(self.angles, dtype=np.float64)


def fit_pca(train, d):
    """Top-d principal components of the training records.

    Component signs are fixed so the first non-negligible entry of each row
    is positive, making encodings reproducible across runs.
    """
    x = feature_matrix(train)
    if d > x.shape[1]:
        raise ValueError("d exceeds the feature count")
    if len(train) < d + 1:
        raise ValueError("need at least d+1 training records")
    mean = x.mean(axis=0)
    centered = x - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s[d - 1] < 1e-12:
        raise ValueError(f"training data has rank below {d}")
    components = vt[:d].copy()
    for row in components:
        nz = np.nonzero(np.abs(row) > 1e-12)[0]
        if len(nz) and row[nz[0]] < 0:
            row *= -1
    explained = s[:d] ** 2 / (len(train) - 1)
    return PcaModel(mean=mean, components=components, explained_variance=explained)


def fit_normalizer(model, train):
    coords = np.stack([model.project(r.features) for r in train])
    return RangeNormalizer(lo=coords.min(axis=0), hi=coords.max(axis=0))


def transform(model, scaler, record):
    return EncodedEvent(
        angles=scaler.apply(model.project(record.features)), label=record.label
    )


def transform_many(model, scaler, records):
    return [transform(model, scaler, r) for r in records]


def encode_angles(event):
    """Product state with per-qubit amplitudes (cos(x_i/2), sin(x_i/2)).

    Accepts an EncodedEvent or a bare sequence of angles.
    """
    angles = getattr(event, "angles", event)
    amps = np.array([1.0 + 0.0j])
    for x in angles:
        amps = np.kron(amps, [np.cos(x / 2), np.sin(x / 2)])
    return StateVector(len(angles), amps, copy=False, check=False)


def encoding_circuit(event):
    """RY-per-qubit circuit preparing encode_angles(event) from |0...0>."""
    gates = [Gate("RY", (q,), angle=float(x)) for q, x in enumerate(event.angles)]
    return Circuit(len(event.angles), gates)


def load_csv(path):
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        expected = [f"f{i}" for i in range(N_FEATURES)]
        has_label = header == expected + ["label"]
        if not has_label and header != expected:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: wrong column count")
            try:
                features = [float(v) for v in row[:N_FEATURES]]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            label = row[N_FEATURES] if has_label else "unlabeled"
            records.append(EventRecord(np.array(features), label))
    return records


def save_csv(path, records):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i}" for i in range(N_FEATURES)] + ["label"])
        for r in records:
            writer.writerow([repr(float(v)) for v in r.features] + [r.label])


def sample_subset(records, size, seed):
    """Deterministic random subset; subsets of growing size are nested, so
    the larger training set for the classical baseline contains the smaller
    quantum one."""
    if size > len(records):
        raise ValueError("subset larger than the collection")
    perm = np.random.default_rng(seed).permutation(len(records))
    return [records[i] for i in perm[:size]]


def split_indices(n, sizes, seed):
    """Disjoint index blocks of the given sizes from a seeded permutation."""
    if sum(sizes) > n:
        raise ValueError("not enough records to split")
    perm = np.random.default_rng(seed).permutation(n)
    out, at = [], 0
    for s in sizes:
        out.append(perm[at:at + s])
        at += s
    return out


@dataclass
class MixtureComponent:
    weight: float
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.cov = np.asarray(self.cov, dtype=np.float64)


@dataclass
class SynthConfig:
    components: list
    label: str = "SM"


def default_synth_config(label="SM", shift=0.0, seed=0):
    """Correlated Gaussian surrogate; anomalies shift the mean along every
    principal axis by `shift` times the spread along that axis, so the
    displacement survives a later projection onto the leading components."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((N_FEATURES, N_FEATURES)))
    eig = np.logspace(0, -2, N_FEATURES)
    cov = q @ np.diag(eig) @ q.T
    mean = shift * (q * np.sqrt(eig)).sum(axis=1)
    return SynthConfig([MixtureComponent(1.0, mean, cov)], label=label)


def synth_generate(config, size, seed):
    rng = np.random.default_rng(seed)
    weights = np.array([c.weight for c in config.components], dtype=np.float64)
    if np.any(weights <= 0):
        raise ValueError("component weights must be positive")
    weights /= weights.sum()
    chols = []
    for c in config.components:
        try:
            chols.append(np.linalg.cholesky(c.cov))
        except np.linalg.LinAlgError:
            raise ValueError("non-positive covariance") from None
    which = rng.choice(len(weights), size=size, p=weights)
    records = []
    for k in which:
        z = rng.standard_normal(N_FEATURES)
        records.append(
            EventRecord(config.components[k].mean + chols[k] @ z, config.label)
        )
    return records
