"""Pure-numpy twin of the compiled gate kernels in ``aqgan._kernels``.

Same call signatures and in-place semantics; used when the extension is
not built (or when forced via AQGAN_PURE_PYTHON=1).
"""

import numpy as np

K_H, K_RX, K_RY, K_RZ, K_CZ, K_CNOT = range(6)

_SQRT1_2 = 2.0 ** -0.5


def _one_qubit(a, stride, m00, m01, m10, m11):
    v = a.reshape(-1, 2, stride)
    x = v[:, 0, :].copy()
    y = v[:, 1, :]
    v[:, 0, :] = m00 * x + m01 * y
    v[:, 1, :] = m10 * x + m11 * y


def _cz(a, s1, s2):
    idx = np.arange(a.shape[-1])
    mask = ((idx & s1) > 0) & ((idx & s2) > 0)
    a[..., mask] *= -1


def _cnot(a, sc, st):
    idx = np.arange(a.shape[-1])
    lo = idx[((idx & sc) > 0) & ((idx & st) == 0)]
    hi = lo | st
    tmp = a[..., lo].copy()
    a[..., lo] = a[..., hi]
    a[..., hi] = tmp


def _pauli_1d(a, stride, p):
    if p == 1:
        _one_qubit(a, stride, 0, 1, 1, 0)
    elif p == 2:
        _one_qubit(a, stride, 0, -1j, 1j, 0)
    else:
        idx = np.arange(a.shape[0])
        a[(idx & stride) > 0] *= -1


def _gate_1d(a, kind, s1, s2, ang):
    if kind == K_H:
        _one_qubit(a, s1, _SQRT1_2, _SQRT1_2, _SQRT1_2, -_SQRT1_2)
    elif kind == K_RX:
        c, s = np.cos(0.5 * ang), np.sin(0.5 * ang)
        _one_qubit(a, s1, c, -1j * s, -1j * s, c)
    elif kind == K_RY:
        c, s = np.cos(0.5 * ang), np.sin(0.5 * ang)
        _one_qubit(a, s1, c, -s, s, c)
    elif kind == K_RZ:
        c, s = np.cos(0.5 * ang), np.sin(0.5 * ang)
        _one_qubit(a, s1, c - 1j * s, 0, 0, c + 1j * s)
    elif kind == K_CZ:
        _cz(a, s1, s2)
    else:
        _cnot(a, s1, s2)


def apply_gate(a, kind, s1, s2, angle):
    _gate_1d(a, kind, s1, s2, angle)


def apply_pauli(a, stride, p):
    _pauli_1d(a, stride, p)


def run(a, kinds, s1, s2, angles):
    for g in range(len(kinds)):
        _gate_1d(a, kinds[g], s1[g], s2[g], angles[g])


def run_batch(a, kinds, s1, s2, angles):
    for b in range(a.shape[0]):
        run(a[b], kinds, s1, s2, angles)


def run_prefix(states, kinds, s1, s2, angles):
    for g in range(len(kinds)):
        states[g + 1] = states[g]
        _gate_1d(states[g + 1], kinds[g], s1[g], s2[g], angles[g])


def _weights(a, stride):
    w = (a.real * a.real + a.imag * a.imag)
    idx = np.arange(a.shape[-1])
    return w, (idx & stride) > 0


def expect_z(a, stride):
    w, hi = _weights(a, stride)
    return float(w[~hi].sum() - w[hi].sum())


def expect_z_batch(a, stride):
    w, hi = _weights(a, stride)
    return w[:, ~hi].sum(axis=1) - w[:, hi].sum(axis=1)


def prob_one(a, stride):
    w, hi = _weights(a, stride)
    return float(w[hi].sum())


def _apply_error(buf, kinds, s1, s2, gate, code):
    if kinds[gate] >= K_CZ:
        pa, pb = code >> 2, code & 3
        if pa:
            _pauli_1d(buf, s1[gate], pa)
        if pb:
            _pauli_1d(buf, s2[gate], pb)
    else:
        _pauli_1d(buf, s1[gate], code)


def trajectories_p1(prefix, kinds, s1, s2, angles, starts, err_gate,
                    err_pauli, z_stride):
    n_gates = len(kinds)
    out = np.empty(len(starts) - 1, dtype=np.float64)
    for t in range(len(starts) - 1):
        e, e_end = starts[t], starts[t + 1]
        g0 = err_gate[e]
        buf = prefix[g0 + 1].copy()
        while e < e_end and err_gate[e] == g0:
            _apply_error(buf, kinds, s1, s2, g0, err_pauli[e])
            e += 1
        for g in range(g0 + 1, n_gates):
            _gate_1d(buf, kinds[g], s1[g], s2[g], angles[g])
            while e < e_end and err_gate[e] == g:
                _apply_error(buf, kinds, s1, s2, g, err_pauli[e])
                e += 1
        out[t] = prob_one(buf, z_stride)
    return out
