"""Prefix-constrained beam search over an identifier tree.

Hypotheses only ever expand along edges that exist in the tree, so decoding
cannot leave the set of valid identifiers. Scores are summed log-scores from a
pluggable child scorer; scorers need not be normalized, only finite.
"""

from dataclasses import dataclass

import numpy as np

from .core import IdentifierTree


@dataclass(frozen=True)
class BeamConfig:
    """beam_width live hypotheses per level; top_n completed results returned."""

    beam_width: int
    top_n: int

    def __post_init__(self):
        if not 1 <= self.top_n <= self.beam_width:
            raise ValueError(
                f"require 1 <= top_n <= beam_width, got top_n={self.top_n}, "
                f"beam_width={self.beam_width}"
            )


class ScorerContractError(ValueError):
    """A child scorer returned the wrong arity or a non-finite score."""


def beam_search(t: IdentifierTree, scorer, context, cfg: BeamConfig) -> list[tuple[int, float]]:
    """Rank items for one query by beam search from the root.

    At each level every live hypothesis expands to all existing children of
    its node; the beam keeps the cfg.beam_width best accumulated scores, ties
    going to the lexicographically smaller path. Hypotheses that reach a leaf
    above the maximum depth complete immediately and are never rescored, so
    the scorer runs at most beam_width times per level. Returns the top_n
    completed (item, log-score) pairs, best first.
    """
    # (score, path, node); root may itself be the single leaf when N == 1
    beam = [(0.0, (), 0)]
    completed = []
    live = beam if t.node_item[0] < 0 else []
    if not live:
        completed = beam

    while live:
        pool = completed[:]
        for score, path, node in live:
            kids = t.children[node]
            raw = np.asarray(scorer(context, node), dtype=np.float64).ravel()
            if raw.size != len(kids):
                raise ScorerContractError(
                    f"scorer returned {raw.size} scores for a node with {len(kids)} children"
                )
            if not np.isfinite(raw).all():
                raise ScorerContractError("scorer returned a non-finite score")
            for tok, child in enumerate(kids):
                pool.append((score + float(raw[tok]), path + (tok,), child))
        pool.sort(key=lambda h: (-h[0], h[1]))
        beam = pool[: cfg.beam_width]
        live = [h for h in beam if t.node_item[h[2]] < 0]
        completed = [h for h in beam if t.node_item[h[2]] >= 0]

    completed.sort(key=lambda h: (-h[0], h[1]))
    return [(int(t.node_item[node]), score) for score, _, node in completed[: cfg.top_n]]


def dot_scorer(node_embs: np.ndarray, t: IdentifierTree):
    """Child scorer scoring each child by the dot product with the query.

    node_embs is the per-node vector table (see treebuild.node_embeddings);
    stands in for a trained decoder's next-token scores at desk scale.
    """
    child_ids = [np.asarray(kids, dtype=np.int64) for kids in t.children]

    def scorer(context, node: int) -> np.ndarray:
        q = np.asarray(context, dtype=np.float64).ravel()
        if q.size != node_embs.shape[1]:
            raise ValueError(
                f"query dim {q.size} does not match node embedding dim {node_embs.shape[1]}"
            )
        return node_embs[child_ids[node]] @ q

    return scorer
