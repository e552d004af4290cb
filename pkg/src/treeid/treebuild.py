"""Recursive balanced identifier construction and tree lookups.

A group of n > k items is split into k balanced clusters, one child per
cluster; a group of n <= k items becomes a leaf group whose items take the
sequential branch ordinals 0..n-1 in ascending item order. Shorter identifiers
are padded with the pad token (value k) to the uniform tree depth.

Every split derives its own RNG stream from (seed, node id), with node ids
assigned in breadth-first order, so sibling subtrees can be clustered
concurrently and still reproduce the serial result bit for bit.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .clustering import cluster_level
from .core import EmbeddingMatrix, IdentifierTree, TreeBuildConfig, validate_embeddings


class InvalidEmbeddingsError(ValueError):
    """Input embeddings failed validation; the message lists the violations."""


@dataclass(frozen=True)
class BuildStats:
    """Byproducts of a build: summed per-split SSE and the split count."""

    total_sse: float
    n_splits: int


def _node_rng(seed: int, node_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(node_id,)))


def build_tree_with_stats(X, cfg: TreeBuildConfig, threads: int = 1) -> tuple[IdentifierTree, BuildStats]:
    """Build the identifier tree and report the summed assignment cost.

    threads > 1 clusters the split groups of a level concurrently; the output
    is identical for any worker count.
    """
    if isinstance(X, EmbeddingMatrix):
        m = X
    else:
        m = EmbeddingMatrix.from_array(X)
    res = validate_embeddings(m)
    if not res.ok:
        raise InvalidEmbeddingsError("; ".join(res.violations))
    pts = m.as_array().astype(np.float64)
    k = cfg.k

    paths: list[tuple[int, ...] | None] = [None] * m.n_items
    total_sse = 0.0
    n_splits = 0
    next_id = 1
    # (node id, member item indices ascending, token prefix)
    level = [(0, np.arange(m.n_items, dtype=np.int64), ())]

    while level:
        splits = [(nid, items) for nid, items, _ in level if items.size > k]
        if threads > 1 and len(splits) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(
                    pool.map(
                        lambda t: cluster_level(pts[t[1]], cfg, rng=_node_rng(cfg.seed, t[0])),
                        splits,
                    )
                )
            assignments = dict(zip((nid for nid, _ in splits), results))
        else:
            assignments = {
                nid: cluster_level(pts[items], cfg, rng=_node_rng(cfg.seed, nid))
                for nid, items in splits
            }

        next_level = []
        for nid, items, prefix in level:
            n = items.size
            if n > k:
                a = assignments[nid]
                total_sse += a.cost
                n_splits += 1
                for j in range(k):
                    child_items = items[a.cluster_of == j]
                    next_level.append((next_id, child_items, prefix + (j,)))
                    next_id += 1
            else:
                for rank in range(n):
                    paths[int(items[rank])] = prefix + (rank,)
                    next_id += 1
        level = next_level

    depth = max(len(p) for p in paths)
    matrix = np.full((m.n_items, depth), k, dtype=np.int32)
    for item, p in enumerate(paths):
        matrix[item, : len(p)] = p
    tree = IdentifierTree.from_paths(k, matrix)
    return tree, BuildStats(total_sse=total_sse, n_splits=n_splits)


def build_tree(X, cfg: TreeBuildConfig, threads: int = 1) -> IdentifierTree:
    """Build a balanced k-ary identifier tree over the embedding rows."""
    tree, _ = build_tree_with_stats(X, cfg, threads=threads)
    return tree


def path_of(t: IdentifierTree, item: int) -> np.ndarray:
    """The stored token path of an item, padded to the tree depth."""
    if not 0 <= item < t.n_items:
        raise IndexError(f"item {item} out of range [0, {t.n_items})")
    return t.paths[item].copy()


def item_of(t: IdentifierTree, path) -> int | None:
    """The item at a leaf path, or None when the path does not reach a leaf.

    Accepts padded or unpadded token sequences. Any out-of-range token, a real
    token after a pad, or a walk that ends anywhere but a leaf yields None.
    """
    tokens = [int(x) for x in np.asarray(path).ravel()]
    trimmed = []
    seen_pad = False
    for tok in tokens:
        if tok == t.k:
            seen_pad = True
            continue
        if seen_pad or tok < 0 or tok > t.k:
            return None
        trimmed.append(tok)
    node = 0
    for tok in trimmed:
        kids = t.children[node]
        if tok >= len(kids):
            return None
        nxt = kids[tok]
        if nxt < 0:
            return None
        node = nxt
    item = int(t.node_item[node])
    return item if item >= 0 else None


def node_embeddings(t: IdentifierTree, X) -> np.ndarray:
    """Per-node vectors: item row at a leaf, mean of descendant leaves inside.

    X must be the matrix the tree was built from (same item count and a single
    consistent dimension).
    """
    pts = X.as_array() if isinstance(X, EmbeddingMatrix) else np.asarray(X)
    if pts.ndim != 2 or pts.shape[0] != t.n_items:
        raise ValueError(
            f"embedding matrix shape {pts.shape} does not cover the tree's {t.n_items} items"
        )
    pts = pts.astype(np.float64)
    n_nodes = t.n_nodes
    sums = np.zeros((n_nodes, pts.shape[1]), dtype=np.float64)
    counts = np.zeros(n_nodes, dtype=np.int64)
    sums[t.leaf_of_item] = pts
    counts[t.leaf_of_item] = 1

    node_depth = np.zeros(n_nodes, dtype=np.int32)
    for nid in range(1, n_nodes):
        node_depth[nid] = node_depth[t.parent[nid]] + 1
    for d in range(int(node_depth.max()), 0, -1):
        ids = np.nonzero(node_depth == d)[0]
        np.add.at(sums, t.parent[ids], sums[ids])
        np.add.at(counts, t.parent[ids], counts[ids])
    return sums / counts[:, None]
