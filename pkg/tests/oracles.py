"""Independent reference computations used as test oracles.

Everything here works on dense matrices with numpy's full SVD or with
scipy's LP solver, so it shares no code path with the library under test.
"""

import numpy as np
from scipy.optimize import linprog


def dense_objective(mat, r):
    s = np.linalg.svd(mat, compute_uv=False)
    return float(np.sum(s[:r] ** 2))


def dense_gradient(mat, r):
    u, s, vt = np.linalg.svd(mat)
    return 2.0 * (u[:, :r] * s[:r]) @ vt[:r]


def product(mats):
    out = np.eye(mats[0].shape[0])
    for m in mats:
        out = out @ m
    return out


def lp_minimum(coef, w, budget):
    """min <coef, x> over 0 <= x <= w, sum(w - x) <= budget (x in support coords)."""
    coef = np.asarray(coef, dtype=float)
    w = np.asarray(w, dtype=float)
    # sum(w - x) <= B  <=>  -sum(x) <= B - sum(w)
    res = linprog(
        coef,
        A_ub=-np.ones((1, len(w))),
        b_ub=[budget - w.sum()],
        bounds=list(zip(np.zeros(len(w)), w)),
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    assert res.status == 0, res.message
    return float(res.fun)


def project(y, w, budget):
    """Euclidean projection onto {0 <= x <= w, sum(w - x) <= budget}."""
    d = np.clip(w - y, 0.0, w)
    if d.sum() <= budget:
        return w - d
    lo, hi = 0.0, float(np.max(w - y))
    for _ in range(64):
        tau = 0.5 * (lo + hi)
        if np.clip(w - y - tau, 0.0, w).sum() > budget:
            lo = tau
        else:
            hi = tau
    return w - np.clip(w - y - hi, 0.0, w)


def projected_reference(w_mat, budget, r, iters=10_000):
    """Reference minimum of the top-r objective by projected gradient descent.

    Steps shrink as ``c / sqrt(k)`` with ``c`` scaled to the initial gradient;
    the best objective seen is returned together with its iterate.
    """
    rows, cols = np.nonzero(w_mat)
    w = w_mat[rows, cols]
    x = w.copy()
    mat = np.zeros_like(w_mat)

    def f_and_grad(v):
        mat[rows, cols] = v
        u, s, vt = np.linalg.svd(mat)
        g = 2.0 * ((u[rows, :r] * s[:r]) * vt[:r, cols].T).sum(axis=1)
        return float(np.sum(s[:r] ** 2)), g

    f, g = f_and_grad(x)
    best_f, best_x = f, x.copy()
    c = float(np.max(w)) / max(float(np.max(np.abs(g))), 1e-300)
    for k in range(iters):
        # backtrack from the diminishing step so descent never diverges
        step = c / np.sqrt(k + 1.0)
        for _ in range(30):
            y = project(x - step * g, w, budget)
            fy, gy = f_and_grad(y)
            if fy <= f:
                break
            step *= 0.5
        else:
            # no descent even for tiny steps: stationary to working precision
            break
        x, f, g = y, fy, gy
        if f < best_f:
            best_f, best_x = f, x.copy()
    return best_f, best_x
