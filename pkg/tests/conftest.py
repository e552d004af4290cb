"""Shared test helpers: independent oracles kept deliberately naive."""

import numpy as np

from treeid.core import TreeBuildConfig
from treeid.treebuild import build_tree


def brute_force_min_cost(costs, m, M) -> int:
    """Exhaustive minimum over all k^N assignments meeting the load bounds."""
    costs = np.asarray(costs, dtype=np.int64)
    n, k = costs.shape
    grids = np.indices((k,) * n).reshape(n, -1).T  # (k^n, n)
    loads = np.stack([(grids == j).sum(axis=1) for j in range(k)], axis=1)
    feasible = (loads >= m).all(axis=1) & (loads <= M).all(axis=1)
    assert feasible.any(), "oracle called on an infeasible instance"
    totals = costs[np.arange(n)[None, :], grids].sum(axis=1)
    return int(totals[feasible].min())


def central_diff(f, x, eps=1e-5):
    """Central finite-difference gradient of scalar f at 1-D point x."""
    x = np.asarray(x, dtype=np.float64)
    g = np.empty_like(x)
    for i in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi[i] += eps
        lo[i] -= eps
        g[i] = (f(hi) - f(lo)) / (2.0 * eps)
    return g


def rel_err(analytic, numeric) -> float:
    analytic = np.asarray(analytic, dtype=np.float64).ravel()
    numeric = np.asarray(numeric, dtype=np.float64).ravel()
    denom = max(1e-12, float(np.abs(numeric).max()), float(np.abs(analytic).max()))
    return float(np.abs(analytic - numeric).max()) / denom


def rand_tree(rng, n, k, dim=4, method="greedy"):
    """A real built tree over random points (greedy keeps this fast)."""
    pts = rng.normal(size=(n, dim)).astype(np.float32)
    cfg = TreeBuildConfig(
        k=k,
        method=method,
        seed=int(rng.integers(1 << 31)),
        lloyd_max_iters=5,
        outer_max_iters=2,
        greedy_threshold=max(k, 64),
    )
    return build_tree(pts, cfg)


def table_scorer(tree, rng, scale=1.0):
    """Random but fixed per-node child scores; pure per query by construction."""
    table = {
        node: rng.normal(scale=scale, size=len(kids))
        for node, kids in enumerate(tree.children)
        if kids
    }

    def scorer(context, node):
        return table[node]

    return scorer


def exhaustive_ranking(tree, scorer, context):
    """Score every leaf by walking its full path; rank by (-score, path)."""
    results = []
    for item in range(tree.n_items):
        tokens = [int(t) for t in tree.paths[item] if t != tree.k]
        node = 0
        score = 0.0
        path = ()
        for tok in tokens:
            score += float(np.asarray(scorer(context, node)).ravel()[tok])
            node = tree.children[node][tok]
            path = path + (tok,)
        results.append((score, path, item))
    results.sort(key=lambda r: (-r[0], r[1]))
    return [(item, score) for score, _, item in results]
