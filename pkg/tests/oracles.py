"""Independent reference computations used to freeze and cross-check values.

Nothing here calls into the code under test.
"""

import numpy as np


def ridge_gradient_descent(x, y, mu, steps=20000):
    """Minimize ||Y - W X||^2 + mu ||W||^2 by plain gradient descent."""
    w = np.zeros((y.shape[0], x.shape[0]))
    lipschitz = 2 * (np.linalg.eigvalsh(x @ x.T).max() + mu)
    lr = 1.0 / lipschitz
    for _ in range(steps):
        grad = -2 * (y - w @ x) @ x.T + 2 * mu * w
        w -= lr * grad
    return w


def simplex_grid(v, step=1e-3):
    """All points of the V-simplex (V in {2, 3}) on a regular grid."""
    n = int(round(1 / step))
    if v == 2:
        a = np.arange(n + 1) / n
        return np.stack([a, 1 - a], axis=1)
    if v == 3:
        i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        mask = i + j <= n
        a, b = i[mask] / n, j[mask] / n
        return np.stack([a, b, 1 - a - b], axis=1)
    raise ValueError(v)


def grid_search_weights(losses, eta, step=1e-3):
    pts = simplex_grid(len(losses), step)
    obj = pts @ np.asarray(losses) + eta * np.sum(pts * pts, axis=1)
    return pts[np.argmin(obj)]


def weighted_argmax(view_scores, omega):
    """Per column, the class maximizing sum_v omega_v * s_v[c, j], by explicit loops."""
    c, m = view_scores[0].shape
    out = []
    for j in range(m):
        best, best_c = -np.inf, None
        for k in range(c):
            val = sum(w * s[k, j] for w, s in zip(omega, view_scores))
            if val > best:
                best, best_c = val, k
        out.append(best_c)
    return np.array(out)


def tally(true, pred, c):
    out = [[0] * c for _ in range(c)]
    for t, p in zip(true, pred):
        out[t][p] += 1
    return np.array(out)


def explicit_laplacian(x, k):
    """Binary symmetric kNN Laplacian from a double loop over pairs."""
    m = x.shape[1]
    d = np.array([[np.sum((x[:, i] - x[:, j]) ** 2) for j in range(m)] for i in range(m)])
    w = np.zeros((m, m))
    for i in range(m):
        order = sorted((d[i, j], j) for j in range(m) if j != i)
        for _, j in order[:k]:
            w[i, j] = w[j, i] = 1.0
    return np.diag(w.sum(1)) - w


def fiedler_vector(lap):
    values, vectors = np.linalg.eigh(lap)
    return vectors[:, 1]


def max_entry_scan(soft):
    best = (-np.inf, None, None)
    c, n = soft.shape
    for j in range(n):
        for k in range(c):
            if soft[k, j] > best[0]:
                best = (soft[k, j], j, k)
    return best[1], best[2]


def random_spd(rng, n):
    m = rng.standard_normal((n, n))
    return m.T @ m + np.eye(n)


