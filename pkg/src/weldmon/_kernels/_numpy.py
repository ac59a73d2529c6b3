"""Pure-numpy fallback kernels.

Mirrors the compiled kernels in ``_fast.pyx``: same per-pattern update order,
same elementwise update formulas. Dot products here use numpy/BLAS summation,
so results can differ from the compiled path in the last bits; each backend
is bit-deterministic on its own.
"""

import numpy as np


def moving_average(x, window):
    """Centered moving mean with shrinking windows at the edges.

    Sums are taken over residuals against the first sample, which keeps a
    constant input bit-exactly constant on output.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    left = (window - 1) // 2
    right = window // 2
    base = x[0]
    cs = np.empty(n + 1, dtype=np.float64)
    cs[0] = 0.0
    np.cumsum(x - base, out=cs[1:])
    idx = np.arange(n)
    lo = np.maximum(idx - left, 0)
    hi = np.minimum(idx + right, n - 1) + 1
    return base + (cs[hi] - cs[lo]) / (hi - lo)


def som_epoch(weights, data, order, alpha, radius, coords):
    """One online training pass over ``data`` in the given order, in place.

    Bubble neighborhood on integer chain coordinates: every unit whose
    coordinate is within ``radius`` of the winner's moves toward the pattern.
    """
    for idx in order:
        x = data[idx]
        diff = weights - x
        bmu = int(np.argmin(np.einsum("ij,ij->i", diff, diff)))
        near = np.abs(coords - coords[bmu]) <= radius
        weights[near] += alpha * (x - weights[near])


def _sigmoid(z):
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-z))


def mlp_epoch(ws, bs, x, t, order, lr):
    """One per-pattern gradient-descent pass, in place.

    Squared-error loss against the targets, logistic activations everywhere.
    Returns the epoch mean squared error per output unit, accumulated from
    each pattern's forward pass as the weights evolve.
    """
    n_layers = len(ws)
    total = 0.0
    for idx in order:
        acts = [x[idx]]
        a = x[idx]
        for w, b in zip(ws, bs):
            a = _sigmoid(a @ w + b)
            acts.append(a)
        err = acts[-1] - t[idx]
        total += float(err @ err)
        delta = 2.0 * err * acts[-1] * (1.0 - acts[-1])
        for layer in range(n_layers - 1, -1, -1):
            if layer > 0:
                a = acts[layer]
                prev_delta = (ws[layer] @ delta) * a * (1.0 - a)
            ws[layer] -= lr * np.outer(acts[layer], delta)
            bs[layer] -= lr * delta
            if layer > 0:
                delta = prev_delta
    return total / (2.0 * len(order))


def linear_epoch(wout, phi, t, order, lr, l2):
    """Per-pattern gradient descent on a linear layer, in place.

    ``wout`` row 0 is the bias row; it is excluded from the L2 decay term.
    Returns the epoch mean squared error per output unit (data term only).
    """
    b = wout[0]
    w = wout[1:]
    total = 0.0
    for idx in order:
        p = phi[idx]
        e = (b + p @ w) - t[idx]
        total += float(e @ e)
        b -= lr * 2.0 * e
        w -= lr * (2.0 * np.outer(p, e) + 2.0 * l2 * w)
    return total / (2.0 * len(order))
