"""Anomaly scores and the grid-search detection pipeline.

The quantum score combines the fidelity of the embedded event with the
trained generator state and a discriminator-agreement term; the classical
score minimizes a reconstruction + discriminator distance over the latent
prior.  Both are similarity-flavoured in places, so the pipeline supports
two threshold orientations and reports the AUC of both rather than silently
picking one.
"""

from dataclasses import dataclass

import numpy as np

from .cgan import mlp_forward
from .data import encode_angles
from .metrics import ConfusionCounts, confusion_metrics, roc_auc
from .state import fidelity

DEFAULT_ALPHA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass
class AnomalyConfig:
    alpha_grid: tuple = DEFAULT_ALPHA_GRID
    orientation: str = "as-written"  # anomalous iff score > delta
    restarts: int = 5
    iterations: int = 100
    step_size: float = 1e-2

    def __post_init__(self):
        grid = tuple(float(a) for a in self.alpha_grid)
        if any(a < 0 or a > 1 for a in grid):
            raise ValueError("alpha grid must lie in [0, 1]")
        if 0.0 not in grid or 1.0 not in grid:
            raise ValueError("alpha grid must contain 0 and 1")
        self.alpha_grid = grid
        if self.orientation not in ("as-written", "inverted"):
            raise ValueError(f"unknown orientation {self.orientation!r}")


def quantum_score(event, model, alpha):
    """(1-alpha) * fidelity(x, G) + alpha * (1 + <Z>_D|x> <Z>_D|G>) / 2."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    x_state = encode_angles(event)
    g_state = model.generator_state()
    residual = fidelity(x_state, g_state)
    z_x = model.discriminate_z(x_state)
    z_g = model.discriminate_z(g_state)
    return (1.0 - alpha) * residual + alpha * 0.5 * (1.0 + z_x * z_g)


class QuantumScorer:
    """Batch quantum scoring with the generator-side quantities cached."""

    def __init__(self, model):
        self.model = model
        self._g_state = model.generator_state()
        self._z_g = model.discriminate_z(self._g_state)

    def scores(self, events, alpha):
        out = np.empty(len(events))
        for i, e in enumerate(events):
            x_state = encode_angles(e)
            residual = fidelity(x_state, self._g_state)
            z_x = self.model.discriminate_z(x_state)
            out[i] = (1.0 - alpha) * residual \
                + alpha * 0.5 * (1.0 + z_x * self._z_g)
        return out


def _classical_loss_and_grad(x, model, alpha, z):
    """L(z) = (1-a) ||x - G(z)|| + a ||D(x) - D(G(z))|| and dL/dz."""
    gen, disc = model.generator, model.discriminator
    g, cache_g = gen.forward(z[None, :])
    d_x = mlp_forward(disc, x[None, :]).ravel()[0]
    d_g, cache_d = disc.forward(g)
    diff = x - g[0]
    res = float(np.linalg.norm(diff))
    ddist = float(abs(d_x - d_g[0, 0]))
    loss = (1.0 - alpha) * res + alpha * ddist

    dg = np.zeros_like(g)
    if res > 0:
        dg[0] = (1.0 - alpha) * (-diff / res)
    if ddist > 0:
        sign = np.sign(d_x - d_g[0, 0])
        _, d_input = disc.backward(cache_d, np.array([[-alpha * sign]]))
        dg += d_input
    _, dz = gen.backward(cache_g, dg)
    return loss, dz[0]


def classical_score(x, model, alpha, config=None, rng=None):
    """min over latent z of the anomaly loss, via restarted gradient descent."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    config = config or AnomalyConfig()
    rng = rng or np.random.default_rng()
    x = np.asarray(x, dtype=np.float64)
    best = np.inf
    for _ in range(config.restarts):
        z = rng.standard_normal(model.z_dim)
        loss, _ = _classical_loss_and_grad(x, model, alpha, z)
        best = min(best, loss)
        for _ in range(config.iterations):
            loss, grad = _classical_loss_and_grad(x, model, alpha, z)
            z = z - config.step_size * grad
        loss, _ = _classical_loss_and_grad(x, model, alpha, z)
        best = min(best, loss)
    return float(best)


class ClassicalScorer:
    def __init__(self, model, config=None, seed=0):
        self.model = model
        self.config = config or AnomalyConfig()
        self.seed = seed

    def scores(self, events, alpha):
        from .utils import substream

        rng = substream(self.seed, "classical-score")
        return np.array([
            classical_score(np.asarray(e.angles), self.model, alpha,
                            self.config, rng)
            for e in events
        ])


def label_event(score, delta, orientation="as-written"):
    """'anomalous' iff score > delta (as written) or score < delta (inverted)."""
    if not np.isfinite(delta):
        raise ValueError("threshold must be finite")
    if orientation == "as-written":
        return "anomalous" if score > delta else "normal"
    if orientation == "inverted":
        return "anomalous" if score < delta else "normal"
    raise ValueError(f"unknown orientation {orientation!r}")


@dataclass
class AlphaResult:
    alpha: float
    scores_normal: np.ndarray
    scores_anomaly: np.ndarray
    roc_points: np.ndarray
    auc: float  # in the configured orientation
    auc_other_orientation: float
    delta: float
    metrics: object  # MetricSet at delta
    degenerate_scores: bool = False


@dataclass
class AnomalyReport:
    config: AnomalyConfig
    per_alpha: list
    alpha_max: float
    auc_max: float
    flagged: bool = False

    @property
    def best(self):
        for r in self.per_alpha:
            if r.alpha == self.alpha_max:
                return r
        raise LookupError("alpha_max missing from results")


def evaluate_alpha(alpha, scores_normal, scores_anomaly, config):
    """ROC/AUC plus confusion metrics at the mean-midpoint threshold."""
    scores_normal = np.asarray(scores_normal, dtype=np.float64)
    scores_anomaly = np.asarray(scores_anomaly, dtype=np.float64)
    scores = np.concatenate([scores_normal, scores_anomaly])
    truth = np.concatenate(
        [np.zeros(len(scores_normal), bool), np.ones(len(scores_anomaly), bool)]
    )
    direction = ("higher-is-positive" if config.orientation == "as-written"
                 else "lower-is-positive")
    degenerate = bool(np.ptp(scores) == 0.0)
    if degenerate:
        points = np.array([[0.0, 0.0, np.inf], [1.0, 1.0, scores[0]]])
        auc = 0.5
    else:
        points, auc = roc_auc(scores, truth, direction)
    delta = 0.5 * (scores_normal.mean() + scores_anomaly.mean())
    predicted = [
        label_event(s, delta, config.orientation) == "anomalous" for s in scores
    ]
    counts = ConfusionCounts.from_predictions(predicted, truth)
    return AlphaResult(
        alpha=alpha,
        scores_normal=scores_normal,
        scores_anomaly=scores_anomaly,
        roc_points=points,
        auc=auc,
        auc_other_orientation=1.0 - auc,
        delta=delta,
        metrics=confusion_metrics(counts),
        degenerate_scores=degenerate,
    )


def report_from_scores(scores_by_alpha, config):
    """Assemble the report from {alpha: (normal scores, anomaly scores)}."""
    per_alpha = [
        evaluate_alpha(alpha, sn, sa, config)
        for alpha, (sn, sa) in sorted(scores_by_alpha.items())
    ]
    best = max(per_alpha, key=lambda r: r.auc)
    return AnomalyReport(
        config=config,
        per_alpha=per_alpha,
        alpha_max=best.alpha,
        auc_max=best.auc,
        flagged=any(r.degenerate_scores for r in per_alpha),
    )


def run_pipeline(scorer, sm_test, anomalies, config=None):
    """Full grid-search pipeline over alpha for one anomaly data set.

    `scorer` exposes scores(events, alpha); sm_test and anomalies must be
    disjoint, nonempty event collections.
    """
    config = config or AnomalyConfig()
    if not len(sm_test) or not len(anomalies):
        raise ValueError("both event sets must be nonempty")
    scores_by_alpha = {}
    for alpha in config.alpha_grid:
        scores_by_alpha[alpha] = (
            scorer.scores(sm_test, alpha),
            scorer.scores(anomalies, alpha),
        )
    return report_from_scores(scores_by_alpha, config)
