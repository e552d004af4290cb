"""Shared domain types: embedding matrices, build configs, identifier trees.

All types are immutable after construction and safe to share across threads.
Validation helpers return structured results instead of raising, so malformed
data can be inspected and reported.
"""

from dataclasses import dataclass, field

import numpy as np

PAD_SENTINEL_DOC = "pad token value is always k, one past the largest branch ordinal"

_METHODS = ("constrained", "greedy", "hybrid")


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class EmbeddingMatrix:
    """N x d item embeddings stored as a flat row-major float32 buffer.

    Row i is the embedding of item i. Instances are allowed to be malformed
    (wrong buffer length, non-finite values) so that validate_embeddings can
    report the problem; use from_array for checked construction.
    """

    n_items: int
    dim: int
    values: np.ndarray  # 1-D float32, length n_items * dim when well formed

    @classmethod
    def from_array(cls, arr) -> "EmbeddingMatrix":
        arr = np.asarray(arr, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got ndim={arr.ndim}")
        n, d = arr.shape
        return cls(n_items=n, dim=d, values=np.ascontiguousarray(arr).reshape(-1))

    def as_array(self) -> np.ndarray:
        """Return the (n_items, dim) float32 view; requires a consistent buffer."""
        if self.values.size != self.n_items * self.dim:
            raise ValueError(
                f"values length {self.values.size} != n_items*dim = {self.n_items * self.dim}"
            )
        return self.values.reshape(self.n_items, self.dim)


def validate_embeddings(m: EmbeddingMatrix) -> ValidationResult:
    """Check declared shape against the buffer and reject non-finite entries."""
    violations = []
    if m.n_items < 1:
        violations.append(f"n_items must be >= 1, got {m.n_items}")
    if m.dim < 1:
        violations.append(f"dim must be >= 1, got {m.dim}")
    expected = m.n_items * m.dim
    if m.values.size != expected:
        violations.append(
            f"values length {m.values.size} does not match n_items*dim = {expected}"
        )
    else:
        finite = np.isfinite(m.values)
        if not finite.all():
            first = int(np.argmin(finite))
            violations.append(f"non-finite value at flat index {first}")
    return ValidationResult(ok=not violations, violations=violations)


@dataclass(frozen=True)
class CapacityBounds:
    """Per-cluster load bounds used by the capacity-respecting assignments."""

    min_size: int
    max_size: int

    def __post_init__(self):
        if not (0 <= self.min_size <= self.max_size):
            raise ValueError(
                f"require 0 <= min_size <= max_size, got [{self.min_size}, {self.max_size}]"
            )


def balanced_bounds(n: int, k: int) -> CapacityBounds:
    """Bounds [floor(n/k), floor(n/k)+1] used for every balanced split."""
    return CapacityBounds(min_size=n // k, max_size=n // k + 1)


@dataclass(frozen=True)
class TreeBuildConfig:
    """Knobs for hierarchical identifier construction.

    method picks the per-level assignment backend; hybrid switches from greedy
    to the exact constrained backend once a group has at most greedy_threshold
    items. The seed drives every random choice; rebuilding with the same seed
    is bit-identical.
    """

    k: int
    method: str = "hybrid"
    greedy_threshold: int = 2000
    seed: int = 0
    lloyd_max_iters: int = 100
    lloyd_tol: float = 1e-4
    outer_max_iters: int = 20

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"branching factor k must be >= 2, got {self.k}")
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        if self.greedy_threshold < self.k:
            raise ValueError(
                f"greedy_threshold must be >= k, got {self.greedy_threshold} < {self.k}"
            )
        if self.lloyd_max_iters < 1 or self.outer_max_iters < 1:
            raise ValueError("iteration caps must be >= 1")
        if not self.lloyd_tol > 0:
            raise ValueError(f"lloyd_tol must be > 0, got {self.lloyd_tol}")


@dataclass(frozen=True)
class ClusterAssignment:
    """Item-to-cluster map plus per-cluster sizes and the squared-distance cost."""

    cluster_of: np.ndarray  # int32, one cluster index per item
    sizes: np.ndarray  # int64, per-cluster counts
    cost: float  # total squared euclidean distance to assigned centroids


class TreeStructureError(ValueError):
    """Raised when token paths cannot be assembled into a coherent tree."""


def _trim_paths(paths: np.ndarray, k: int) -> list[tuple[int, ...]]:
    """Per-item token tuples truncated at the first pad (bulk conversion)."""
    is_pad = paths == k
    lens = np.where(is_pad.any(axis=1), is_pad.argmax(axis=1), paths.shape[1]).tolist()
    return [tuple(row[:ln]) for row, ln in zip(paths.tolist(), lens)]


@dataclass(frozen=True)
class IdentifierTree:
    """Balanced k-ary identifier tree: a node arena plus per-item token paths.

    paths is an (n_items, depth) int32 matrix. Row i is item i's identifier:
    branch ordinals in [0, k-1] followed by pad tokens (value k) when the leaf
    sits above the maximum depth. The arena is derived from paths, with node
    ids assigned in breadth-first order so equal path sets produce identical
    arenas. children[n] lists child node ids indexed by branch ordinal;
    node_item[n] is the item at a leaf and -1 elsewhere.
    """

    k: int
    depth: int
    n_items: int
    paths: np.ndarray  # (n_items, depth) int32
    parent: np.ndarray  # (n_nodes,) int32, -1 at the root
    children: tuple  # tuple of tuples of child node ids, index == branch ordinal
    node_item: np.ndarray  # (n_nodes,) int32, -1 for internal nodes
    leaf_of_item: np.ndarray  # (n_items,) int32

    @property
    def pad_token(self) -> int:
        return self.k

    @property
    def n_nodes(self) -> int:
        return len(self.children)

    @classmethod
    def from_paths(cls, k: int, paths) -> "IdentifierTree":
        """Build the canonical arena for a path matrix.

        Tolerates unbalanced path sets (validate_tree reports those) but
        rejects sets that cannot form a trie at all, such as duplicate paths
        or a path that is a strict prefix of another.
        """
        paths = np.asarray(paths, dtype=np.int32)
        if paths.ndim != 2:
            raise TreeStructureError("paths must be a 2-D matrix")
        n_items, depth = paths.shape
        trimmed = _trim_paths(paths, k)

        parent = [-1]
        children: list[dict] = [{}]
        node_item = [-1]
        leaf_of_item = np.full(n_items, -1, dtype=np.int32)
        # Breadth-first insertion: walk all paths one level at a time so node
        # ids come out in canonical BFS order regardless of insertion order.
        frontier = [(0, list(range(n_items)))]
        level = 0
        while frontier:
            next_frontier = []
            for node, items in frontier:
                groups: dict[int, list[int]] = {}
                for it in items:
                    p = trimmed[it]
                    if len(p) == level:
                        if node_item[node] != -1 or groups:
                            raise TreeStructureError(
                                f"path of item {it} is a prefix of another path"
                            )
                        node_item[node] = it
                        leaf_of_item[it] = node
                    else:
                        if node_item[node] != -1:
                            raise TreeStructureError(
                                f"path of item {node_item[node]} is a prefix of another path"
                            )
                        groups.setdefault(p[level], []).append(it)
                if len(items) > 1 and node_item[node] != -1:
                    raise TreeStructureError("duplicate path in tree")
                for tok in sorted(groups):
                    child = len(parent)
                    parent.append(node)
                    children.append({})
                    node_item.append(-1)
                    children[node][tok] = child
                    next_frontier.append((child, groups[tok]))
            frontier = next_frontier
            level += 1

        # Freeze children dicts into ordinal-indexed tuples. Missing ordinals
        # (possible only for malformed inputs) are padded with -1.
        frozen = []
        for d in children:
            if d:
                width = max(d) + 1
                frozen.append(tuple(d.get(t, -1) for t in range(width)))
            else:
                frozen.append(())
        return cls(
            k=k,
            depth=depth,
            n_items=n_items,
            paths=paths,
            parent=np.asarray(parent, dtype=np.int32),
            children=tuple(frozen),
            node_item=np.asarray(node_item, dtype=np.int32),
            leaf_of_item=leaf_of_item,
        )


def validate_paths(k: int, depth: int, paths: np.ndarray) -> ValidationResult:
    """Validate a path matrix without needing an arena.

    Checks token ranges, the pad-suffix rule, path uniqueness and
    prefix-freeness, the per-split balance bounds, and that depth equals the
    longest real path.
    """
    violations = []
    paths = np.asarray(paths)
    n_items = paths.shape[0]
    if paths.ndim != 2 or paths.shape[1] != depth:
        return ValidationResult(False, [f"paths must have shape (N, {depth})"])

    bad = (paths < 0) | (paths > k)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        violations.append(f"token {paths[i, j]} out of range at item {i}, position {j}")
        return ValidationResult(False, violations)

    is_pad = paths == k
    # A real token after a pad breaks the suffix rule.
    resumed = is_pad[:, :-1] & ~is_pad[:, 1:] if depth > 1 else np.zeros((n_items, 0), bool)
    if resumed.any():
        i = int(np.argwhere(resumed)[0][0])
        violations.append(f"item {i} has a non-pad token after a pad token")
    if is_pad.all(axis=1).any():
        i = int(np.argmax(is_pad.all(axis=1)))
        violations.append(f"item {i} has an all-pad path")
    if violations:
        return ValidationResult(False, violations)

    trimmed = _trim_paths(paths.astype(np.int32), k)
    longest = max(len(p) for p in trimmed)
    if longest != depth:
        violations.append(f"declared depth {depth} but longest path has {longest} tokens")

    seen = {}
    for it, p in enumerate(trimmed):
        if p in seen:
            violations.append(f"items {seen[p]} and {it} share the same path")
            return ValidationResult(False, violations)
        seen[p] = it

    # Walk the implicit trie and check split arity and balance level by level.
    frontier = [((), list(range(n_items)))]
    while frontier:
        next_frontier = []
        for prefix, items in frontier:
            n = len(items)
            level = len(prefix)
            groups: dict[int, list[int]] = {}
            for it in items:
                p = trimmed[it]
                if len(p) == level:
                    if n > 1:
                        violations.append(
                            f"path of item {it} is a prefix of another path"
                        )
                        return ValidationResult(False, violations)
                else:
                    groups.setdefault(p[level], []).append(it)
            if not groups:
                continue  # leaf
            sizes = {tok: len(g) for tok, g in groups.items()}
            if n > k:
                lo, hi = n // k, n // k + 1
                if len(groups) != k:
                    violations.append(
                        f"split of {n} items at prefix {prefix} has {len(groups)} children, expected {k}"
                    )
                for tok, s in sorted(sizes.items()):
                    if not lo <= s <= hi:
                        violations.append(
                            f"split of {n} items at prefix {prefix}: child {tok} has size {s}, "
                            f"outside [{lo}, {hi}]"
                        )
            else:
                if sorted(groups) != list(range(n)) or any(s != 1 for s in sizes.values()):
                    violations.append(
                        f"leaf group of {n} items at prefix {prefix} must use ordinals 0..{n - 1} once each"
                    )
            next_frontier.extend((prefix + (tok,), g) for tok, g in sorted(groups.items()))
        frontier = next_frontier

    return ValidationResult(ok=not violations, violations=violations)


def validate_tree(t: IdentifierTree) -> ValidationResult:
    """Validate an identifier tree: leaf count, bijection, balance, pad rule."""
    violations = []
    if t.n_items != t.paths.shape[0]:
        violations.append(
            f"n_items {t.n_items} does not match paths rows {t.paths.shape[0]}"
        )
        return ValidationResult(False, violations)
    res = validate_paths(t.k, t.depth, t.paths)
    violations.extend(res.violations)

    n_leaves = int((t.node_item >= 0).sum())
    if n_leaves != t.n_items:
        violations.append(f"arena has {n_leaves} leaves for {t.n_items} items")
    leaf_items = t.node_item[t.node_item >= 0]
    if len(np.unique(leaf_items)) != len(leaf_items):
        violations.append("two leaves share an item id")
    return ValidationResult(ok=not violations, violations=violations)
