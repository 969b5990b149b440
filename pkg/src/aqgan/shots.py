"""Shot-based expectation estimation under stochastic Pauli noise.

Noise model: each gate is followed, with its depolarizing probability, by a
uniformly random non-identity Pauli on its qubit(s); measurement of the last
qubit suffers an independent classical bit flip.  Shots are sampled exactly
from this process, but shots sharing the same error pattern are grouped and
their outcomes drawn binomially, which is distributionally equivalent and
keeps the cost proportional to the number of distinct error patterns.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .state import StateVector


@dataclass(frozen=True)
class NoiseModel:
    p_depol_1q: float = 0.0
    p_depol_2q: float = 0.0
    p_readout_flip: float = 0.0

    def __post_init__(self):
        for name in ("p_depol_1q", "p_depol_2q", "p_readout_flip"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")

    @property
    def is_noiseless(self):
        return self.p_depol_1q == self.p_depol_2q == self.p_readout_flip == 0.0


NOISELESS = NoiseModel()

_CZ_CODE = 4  # kind codes >= this are two-qubit gates


def estimate_expectation_shots(circuit, params, shots, noise=None, rng=None,
                               initial=None, offsets=None):
    """Shot-sampled estimate of <Z> on the last qubit after the circuit.

    Deterministic for a fixed numpy Generator state; all randomness is drawn
    from `rng`.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if noise is None:
        noise = NOISELESS
    if rng is None:
        rng = np.random.default_rng()

    angles = circuit.bound_angles(params, offsets)
    kinds, s1, s2 = circuit.kinds, circuit.s1, circuit.s2
    n_gates = len(kinds)
    if initial is None:
        initial = StateVector.zero(circuit.n_qubits)

    pgate = np.where(kinds >= _CZ_CODE, noise.p_depol_2q, noise.p_depol_1q)
    survive = np.cumprod(1.0 - pgate)
    q_clean = float(survive[-1]) if n_gates else 1.0
    r = noise.p_readout_flip

    if q_clean < 1.0:
        prefix = np.empty((n_gates + 1, 2**circuit.n_qubits), dtype=np.complex128)
        prefix[0] = initial.amplitudes
        backend.K.run_prefix(prefix, kinds, s1, s2, angles)
        p1_clean = backend.K.prob_one(prefix[-1], 1)
        m = int(rng.binomial(shots, 1.0 - q_clean))
    else:
        final = circuit.run(params, initial, offsets)
        p1_clean = backend.K.prob_one(final.amplitudes, 1)
        m = 0

    sum_z = 0
    n_clean = shots - m
    if n_clean:
        p_eff = p1_clean * (1.0 - r) + (1.0 - p1_clean) * r
        ones = int(rng.binomial(n_clean, min(max(p_eff, 0.0), 1.0)))
        sum_z += n_clean - 2 * ones

    if m:
        # first error location: P(j) = p_j * prod_{k<j}(1-p_k) / (1-q)
        w = pgate.copy()
        w[1:] *= survive[:-1]
        cum = np.cumsum(w) / (1.0 - q_clean)
        j = np.searchsorted(cum, rng.random(m), side="right")
        np.clip(j, 0, n_gates - 1, out=j)
        two_q = kinds[j] >= _CZ_CODE
        ncodes = np.where(two_q, 15, 3)
        code = 1 + np.minimum((rng.random(m) * ncodes).astype(np.int64), ncodes - 1)

        # independent later errors per shot
        gate_idx = np.arange(n_gates)
        sub = (rng.random((m, n_gates)) < pgate[None, :]) & (gate_idx[None, :] > j[:, None])
        rows, cols = np.nonzero(sub)
        nc_sub = np.where(kinds[cols] >= _CZ_CODE, 15, 3)
        sub_code = 1 + np.minimum(
            (rng.random(len(cols)) * nc_sub).astype(np.int64), nc_sub - 1
        )

        has_sub = sub.any(axis=1)
        simple = ~has_sub

        # single-error shots: group identical (gate, pauli) patterns
        key = j[simple] * 16 + code[simple]
        uniq, counts_simple = np.unique(key, return_counts=True)
        eg_simple = uniq // 16
        ep_simple = uniq % 16
        starts_simple = np.arange(len(uniq) + 1, dtype=np.int64)

        # multi-error shots: one trajectory each, events sorted by gate
        multi_ids = np.nonzero(has_sub)[0]
        ev_shot = np.concatenate([multi_ids, rows])
        ev_gate = np.concatenate([j[multi_ids], cols])
        ev_code = np.concatenate([code[multi_ids], sub_code])
        order = np.lexsort((ev_gate, ev_shot))
        ev_shot, ev_gate, ev_code = ev_shot[order], ev_gate[order], ev_code[order]
        per_multi = np.bincount(
            np.searchsorted(multi_ids, ev_shot), minlength=len(multi_ids)
        )
        starts_multi = np.concatenate(
            [[0], np.cumsum(per_multi)]
        ).astype(np.int64)

        err_gate = np.concatenate([eg_simple, ev_gate]).astype(np.int64)
        err_code = np.concatenate([ep_simple, ev_code]).astype(np.int64)
        starts = np.concatenate(
            [starts_simple, starts_simple[-1] + starts_multi[1:]]
        ).astype(np.int64)
        traj_counts = np.concatenate(
            [counts_simple, np.ones(len(multi_ids), dtype=np.int64)]
        )

        p1 = backend.K.trajectories_p1(
            prefix, kinds, s1, s2, angles, starts, err_gate, err_code, 1
        )
        p_eff = np.clip(p1 * (1.0 - r) + (1.0 - p1) * r, 0.0, 1.0)
        ones = rng.binomial(traj_counts, p_eff)
        sum_z += int(traj_counts.sum() - 2 * ones.sum())

    return sum_z / shots
