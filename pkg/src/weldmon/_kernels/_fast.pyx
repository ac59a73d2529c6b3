# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-loop kernels. Same contracts as weldmon._kernels._numpy."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def moving_average(const double[::1] x, Py_ssize_t window):
    """Centered moving mean with shrinking windows at the edges."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t left = (window - 1) // 2
    cdef Py_ssize_t right = window // 2
    cdef cnp.ndarray out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double base = x[0]
    cdef double s = 0.0
    cdef Py_ssize_t i, j, lo, hi, newlo, newhi
    lo = 0
    hi = right if right < n - 1 else n - 1
    for j in range(hi + 1):
        s += x[j] - base
    for i in range(n):
        if i > 0:
            newhi = i + right
            if newhi > n - 1:
                newhi = n - 1
            if newhi > hi:
                s += x[newhi] - base
                hi = newhi
            newlo = i - left
            if newlo < 0:
                newlo = 0
            while lo < newlo:
                s -= x[lo] - base
                lo += 1
        ov[i] = base + s / <double>(hi - lo + 1)
    return out


def som_epoch(double[:, ::1] weights, const double[:, ::1] data,
              const cnp.intp_t[::1] order, double alpha, double radius,
              const cnp.intp_t[::1] coords):
    """One online training pass over the data in the given order, in place."""
    cdef Py_ssize_t k = weights.shape[0]
    cdef Py_ssize_t d = weights.shape[1]
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t p, c, f, idx, bmu
    cdef double best, dist, diff
    cdef cnp.intp_t cd
    for p in range(n):
        idx = order[p]
        bmu = 0
        best = -1.0
        for c in range(k):
            dist = 0.0
            for f in range(d):
                diff = weights[c, f] - data[idx, f]
                dist += diff * diff
            if best < 0.0 or dist < best:
                best = dist
                bmu = c
        for c in range(k):
            cd = coords[c] - coords[bmu]
            if cd < 0:
                cd = -cd
            if cd <= radius:
                for f in range(d):
                    weights[c, f] += alpha * (data[idx, f] - weights[c, f])


cdef inline double _sig(double z) noexcept nogil:
    return 1.0 / (1.0 + exp(-z))


cdef double _mlp_pattern_h1(double[:, ::1] w1, double[::1] b1,
                            double[:, ::1] w2, double[::1] b2,
                            const double[:, ::1] x, const double[:, ::1] t,
                            Py_ssize_t idx, double lr,
                            double[::1] a1, double[::1] out,
                            double[::1] dout, double[::1] dh) noexcept nogil:
    cdef Py_ssize_t d = w1.shape[0]
    cdef Py_ssize_t h = w1.shape[1]
    cdef Py_ssize_t no = w2.shape[1]
    cdef Py_ssize_t i, j, o
    cdef double z, e, loss
    for j in range(h):
        z = b1[j]
        for i in range(d):
            z += x[idx, i] * w1[i, j]
        a1[j] = _sig(z)
    loss = 0.0
    for o in range(no):
        z = b2[o]
        for j in range(h):
            z += a1[j] * w2[j, o]
        out[o] = _sig(z)
        e = out[o] - t[idx, o]
        loss += e * e
        dout[o] = 2.0 * e * out[o] * (1.0 - out[o])
    for j in range(h):
        z = 0.0
        for o in range(no):
            z += w2[j, o] * dout[o]
        dh[j] = z * a1[j] * (1.0 - a1[j])
    for j in range(h):
        for o in range(no):
            w2[j, o] -= lr * (a1[j] * dout[o])
    for o in range(no):
        b2[o] -= lr * dout[o]
    for i in range(d):
        for j in range(h):
            w1[i, j] -= lr * (x[idx, i] * dh[j])
    for j in range(h):
        b1[j] -= lr * dh[j]
    return loss


cdef double _mlp_pattern_h2(double[:, ::1] w1, double[::1] b1,
                            double[:, ::1] w2, double[::1] b2,
                            double[:, ::1] w3, double[::1] b3,
                            const double[:, ::1] x, const double[:, ::1] t,
                            Py_ssize_t idx, double lr,
                            double[::1] a1, double[::1] a2, double[::1] out,
                            double[::1] dout, double[::1] d2, double[::1] d1) noexcept nogil:
    cdef Py_ssize_t d = w1.shape[0]
    cdef Py_ssize_t h1 = w1.shape[1]
    cdef Py_ssize_t h2 = w2.shape[1]
    cdef Py_ssize_t no = w3.shape[1]
    cdef Py_ssize_t i, j, k, o
    cdef double z, e, loss
    for j in range(h1):
        z = b1[j]
        for i in range(d):
            z += x[idx, i] * w1[i, j]
        a1[j] = _sig(z)
    for k in range(h2):
        z = b2[k]
        for j in range(h1):
            z += a1[j] * w2[j, k]
        a2[k] = _sig(z)
    loss = 0.0
    for o in range(no):
        z = b3[o]
        for k in range(h2):
            z += a2[k] * w3[k, o]
        out[o] = _sig(z)
        e = out[o] - t[idx, o]
        loss += e * e
        dout[o] = 2.0 * e * out[o] * (1.0 - out[o])
    for k in range(h2):
        z = 0.0
        for o in range(no):
            z += w3[k, o] * dout[o]
        d2[k] = z * a2[k] * (1.0 - a2[k])
    for j in range(h1):
        z = 0.0
        for k in range(h2):
            z += w2[j, k] * d2[k]
        d1[j] = z * a1[j] * (1.0 - a1[j])
    for k in range(h2):
        for o in range(no):
            w3[k, o] -= lr * (a2[k] * dout[o])
    for o in range(no):
        b3[o] -= lr * dout[o]
    for j in range(h1):
        for k in range(h2):
            w2[j, k] -= lr * (a1[j] * d2[k])
    for k in range(h2):
        b2[k] -= lr * d2[k]
    for i in range(d):
        for j in range(h1):
            w1[i, j] -= lr * (x[idx, i] * d1[j])
    for j in range(h1):
        b1[j] -= lr * d1[j]
    return loss


def mlp_epoch(list ws, list bs, const double[:, ::1] x, const double[:, ::1] t,
              const cnp.intp_t[::1] order, double lr):
    """One per-pattern gradient-descent pass, in place. Returns epoch MSE."""
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t p
    cdef double total = 0.0
    cdef double[:, ::1] w1, w2, w3
    cdef double[::1] b1, b2, b3
    cdef double[::1] a1, a2, out, dout, d2, d1
    w1 = ws[0]
    b1 = bs[0]
    w2 = ws[1]
    b2 = bs[1]
    if len(ws) == 2:
        a1 = np.empty(w1.shape[1])
        out = np.empty(w2.shape[1])
        dout = np.empty(w2.shape[1])
        d1 = np.empty(w1.shape[1])
        for p in range(n):
            total += _mlp_pattern_h1(w1, b1, w2, b2, x, t, order[p], lr,
                                     a1, out, dout, d1)
    else:
        w3 = ws[2]
        b3 = bs[2]
        a1 = np.empty(w1.shape[1])
        a2 = np.empty(w2.shape[1])
        out = np.empty(w3.shape[1])
        dout = np.empty(w3.shape[1])
        d2 = np.empty(w2.shape[1])
        d1 = np.empty(w1.shape[1])
        for p in range(n):
            total += _mlp_pattern_h2(w1, b1, w2, b2, w3, b3, x, t, order[p], lr,
                                     a1, a2, out, dout, d2, d1)
    return total / (2.0 * n)


def linear_epoch(double[:, ::1] wout, const double[:, ::1] phi, const double[:, ::1] t,
                 const cnp.intp_t[::1] order, double lr, double l2):
    """Per-pattern gradient descent on a linear layer, in place.

    Row 0 of ``wout`` is the bias row, excluded from the L2 decay term.
    """
    cdef Py_ssize_t c = phi.shape[1]
    cdef Py_ssize_t no = wout.shape[1]
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t p, j, o, idx
    cdef double z, e
    cdef double total = 0.0
    cdef cnp.ndarray ev_arr = np.empty(no, dtype=np.float64)
    cdef double[::1] ev = ev_arr
    for p in range(n):
        idx = order[p]
        for o in range(no):
            z = wout[0, o]
            for j in range(c):
                z += phi[idx, j] * wout[j + 1, o]
            e = z - t[idx, o]
            ev[o] = e
            total += e * e
        for o in range(no):
            wout[0, o] -= lr * (2.0 * ev[o])
        for j in range(c):
            for o in range(no):
                wout[j + 1, o] -= lr * (2.0 * phi[idx, j] * ev[o] + 2.0 * l2 * wout[j + 1, o])
    return total / (2.0 * n)
