# cython: boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c
"""Compiled gate kernels: the hot inner loops of the statevector simulator.

All functions mutate complex128 amplitude buffers in place.  Gates are
encoded as parallel arrays (kind code, bit masks of the two target qubits,
angle); see aqgan.circuit for the encoding.  A pure-numpy twin of this
module lives in aqgan._kernels_py.
"""

from libc.math cimport cos, sin

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx

# gate kind codes, shared with circuit.py
DEF K_H = 0
DEF K_RX = 1
DEF K_RY = 2
DEF K_RZ = 3
DEF K_CZ = 4
DEF K_CNOT = 5

DEF SQRT1_2 = 0.7071067811865476


cdef inline void _one_qubit(cplx* a, Py_ssize_t dim, Py_ssize_t stride,
                            cplx m00, cplx m01, cplx m10, cplx m11) nogil:
    cdef Py_ssize_t g = 0, i
    cdef cplx x, y
    while g < dim:
        for i in range(g, g + stride):
            x = a[i]
            y = a[i + stride]
            a[i] = m00 * x + m01 * y
            a[i + stride] = m10 * x + m11 * y
        g += 2 * stride


cdef inline void _cz(cplx* a, Py_ssize_t dim, Py_ssize_t s1, Py_ssize_t s2) nogil:
    cdef Py_ssize_t i
    for i in range(dim):
        if (i & s1) and (i & s2):
            a[i] = -a[i]


cdef inline void _cnot(cplx* a, Py_ssize_t dim, Py_ssize_t sc, Py_ssize_t st) nogil:
    cdef Py_ssize_t i
    cdef cplx tmp
    for i in range(dim):
        if (i & sc) and not (i & st):
            tmp = a[i]
            a[i] = a[i | st]
            a[i | st] = tmp


cdef inline void _pauli(cplx* a, Py_ssize_t dim, Py_ssize_t stride, int p) nogil:
    # p: 1 = X, 2 = Y, 3 = Z
    cdef Py_ssize_t g = 0, i
    cdef cplx x, y
    if p == 3:
        for i in range(dim):
            if i & stride:
                a[i] = -a[i]
        return
    while g < dim:
        for i in range(g, g + stride):
            x = a[i]
            y = a[i + stride]
            if p == 1:
                a[i] = y
                a[i + stride] = x
            else:
                a[i] = -1j * y
                a[i + stride] = 1j * x
        g += 2 * stride


cdef inline void _gate(cplx* a, Py_ssize_t dim, long kind,
                       Py_ssize_t s1, Py_ssize_t s2, double ang) nogil:
    cdef double c, s
    if kind == K_H:
        _one_qubit(a, dim, s1, SQRT1_2, SQRT1_2, SQRT1_2, -SQRT1_2)
    elif kind == K_RX:
        c = cos(0.5 * ang)
        s = sin(0.5 * ang)
        _one_qubit(a, dim, s1, c, -1j * s, -1j * s, c)
    elif kind == K_RY:
        c = cos(0.5 * ang)
        s = sin(0.5 * ang)
        _one_qubit(a, dim, s1, c, -s, s, c)
    elif kind == K_RZ:
        c = cos(0.5 * ang)
        s = sin(0.5 * ang)
        _one_qubit(a, dim, s1, c - 1j * s, 0, 0, c + 1j * s)
    elif kind == K_CZ:
        _cz(a, dim, s1, s2)
    else:
        _cnot(a, dim, s1, s2)


def apply_gate(cplx[::1] a, long kind, long s1, long s2, double angle):
    _gate(&a[0], a.shape[0], kind, s1, s2, angle)


def apply_pauli(cplx[::1] a, long stride, int p):
    _pauli(&a[0], a.shape[0], stride, p)


def run(cplx[::1] a, long[::1] kinds, long[::1] s1, long[::1] s2,
        double[::1] angles):
    cdef Py_ssize_t dim = a.shape[0], g
    with nogil:
        for g in range(kinds.shape[0]):
            _gate(&a[0], dim, kinds[g], s1[g], s2[g], angles[g])


def run_batch(cplx[:, ::1] a, long[::1] kinds, long[::1] s1, long[::1] s2,
              double[::1] angles):
    cdef Py_ssize_t dim = a.shape[1], b, g
    with nogil:
        for b in range(a.shape[0]):
            for g in range(kinds.shape[0]):
                _gate(&a[b, 0], dim, kinds[g], s1[g], s2[g], angles[g])


def run_prefix(cplx[:, ::1] states, long[::1] kinds, long[::1] s1,
               long[::1] s2, double[::1] angles):
    """states[0] holds the input; fills states[g+1] with the post-gate-g state."""
    cdef Py_ssize_t dim = states.shape[1], g, i
    with nogil:
        for g in range(kinds.shape[0]):
            for i in range(dim):
                states[g + 1, i] = states[g, i]
            _gate(&states[g + 1, 0], dim, kinds[g], s1[g], s2[g], angles[g])


def expect_z(cplx[::1] a, long stride):
    cdef Py_ssize_t i
    cdef double r = 0.0, w
    for i in range(a.shape[0]):
        w = a[i].real * a[i].real + a[i].imag * a[i].imag
        if i & stride:
            r -= w
        else:
            r += w
    return r


def expect_z_batch(cplx[:, ::1] a, long stride):
    cdef Py_ssize_t b, i
    cdef double r, w
    out = np.empty(a.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    for b in range(a.shape[0]):
        r = 0.0
        for i in range(a.shape[1]):
            w = a[b, i].real * a[b, i].real + a[b, i].imag * a[b, i].imag
            if i & stride:
                r -= w
            else:
                r += w
        o[b] = r
    return out


def prob_one(cplx[::1] a, long stride):
    cdef Py_ssize_t i
    cdef double r = 0.0
    for i in range(a.shape[0]):
        if i & stride:
            r += a[i].real * a[i].real + a[i].imag * a[i].imag
    return r


def trajectories_p1(cplx[:, ::1] prefix, long[::1] kinds, long[::1] s1,
                    long[::1] s2, double[::1] angles, long[::1] starts,
                    long[::1] err_gate, long[::1] err_pauli, long z_stride):
    """P(last qubit = 1) per error trajectory.

    Trajectory t carries the error events err_gate/err_pauli[starts[t]:starts[t+1]],
    sorted by gate index; an event at gate g inserts a Pauli right after gate g.
    Pauli codes: 1..3 = X/Y/Z on the gate's first qubit mask; for two-qubit
    gates 1..15 = (code >> 2) on mask s1 and (code & 3) on mask s2.
    Starts from the cached noiseless prefix state of the first error's gate.
    """
    cdef Py_ssize_t dim = prefix.shape[1]
    cdef Py_ssize_t n_gates = kinds.shape[0]
    cdef Py_ssize_t n_traj = starts.shape[0] - 1
    cdef Py_ssize_t t, g, i, e, e_end, g0
    cdef long code, pa, pb, kind
    cdef double p, c, s
    buf_arr = np.empty(dim, dtype=np.complex128)
    out = np.empty(n_traj, dtype=np.float64)
    mat_arr = np.empty((n_gates, 4), dtype=np.complex128)
    cdef cplx[::1] buf = buf_arr
    cdef double[::1] o = out
    cdef cplx[:, ::1] mat = mat_arr
    with nogil:
        # hoist the rotation matrices: trajectories reuse the same angles
        for g in range(n_gates):
            kind = kinds[g]
            if kind == K_H:
                mat[g, 0] = SQRT1_2
                mat[g, 1] = SQRT1_2
                mat[g, 2] = SQRT1_2
                mat[g, 3] = -SQRT1_2
            elif kind <= K_RZ:
                c = cos(0.5 * angles[g])
                s = sin(0.5 * angles[g])
                if kind == K_RX:
                    mat[g, 0] = c
                    mat[g, 1] = -1j * s
                    mat[g, 2] = -1j * s
                    mat[g, 3] = c
                elif kind == K_RY:
                    mat[g, 0] = c
                    mat[g, 1] = -s
                    mat[g, 2] = s
                    mat[g, 3] = c
                else:
                    mat[g, 0] = c - 1j * s
                    mat[g, 1] = 0
                    mat[g, 2] = 0
                    mat[g, 3] = c + 1j * s
        for t in range(n_traj):
            e = starts[t]
            e_end = starts[t + 1]
            g0 = err_gate[e]
            for i in range(dim):
                buf[i] = prefix[g0 + 1, i]
            while e < e_end and err_gate[e] == g0:
                code = err_pauli[e]
                if kinds[err_gate[e]] >= K_CZ:
                    pa = code >> 2
                    pb = code & 3
                    if pa:
                        _pauli(&buf[0], dim, s1[err_gate[e]], pa)
                    if pb:
                        _pauli(&buf[0], dim, s2[err_gate[e]], pb)
                else:
                    _pauli(&buf[0], dim, s1[err_gate[e]], code)
                e += 1
            for g in range(g0 + 1, n_gates):
                kind = kinds[g]
                if kind == K_CZ:
                    _cz(&buf[0], dim, s1[g], s2[g])
                elif kind == K_CNOT:
                    _cnot(&buf[0], dim, s1[g], s2[g])
                else:
                    _one_qubit(&buf[0], dim, s1[g],
                               mat[g, 0], mat[g, 1], mat[g, 2], mat[g, 3])
                while e < e_end and err_gate[e] == g:
                    code = err_pauli[e]
                    if kinds[g] >= K_CZ:
                        pa = code >> 2
                        pb = code & 3
                        if pa:
                            _pauli(&buf[0], dim, s1[g], pa)
                        if pb:
                            _pauli(&buf[0], dim, s2[g], pb)
                    else:
                        _pauli(&buf[0], dim, s1[g], code)
                    e += 1
            p = 0.0
            for i in range(dim):
                if i & z_stride:
                    p += buf[i].real * buf[i].real + buf[i].imag * buf[i].imag
            o[t] = p
    return out
