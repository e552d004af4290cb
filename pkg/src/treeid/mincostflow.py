"""Exact capacity-bounded assignment via successive shortest augmenting paths.

Assigns each of N rows to one of k columns so that every column load lands in
[min_size, max_size] and the total integer cost is minimal. The underlying
network: a source feeding each row one unit, complete row-to-column edges
with the given costs, and column-to-sink edges carrying the capacity bounds.
Rows are inserted one at a time along a shortest augmenting path in the
residual graph; node potentials keep reduced costs non-negative so each
search is a Dijkstra pass. Column minimums are enforced by treating the first
min_size units of every column as demand that augmenting paths must serve
before the sink absorbs the remainder.

All arithmetic is exact 64-bit integer; callers discretize real distances.
Work grows superlinearly in N because the column-to-column relocation costs
are rebuilt from the full membership of every column an augmenting path
touches.
"""

from dataclasses import dataclass

import numpy as np

from .core import CapacityBounds

INF = 1 << 62


class InfeasibleBoundsError(ValueError):
    """Capacity bounds cannot cover the rows; the message names the violated inequality."""


class CostOverflowError(OverflowError):
    """Worst-case total cost would not fit the 64-bit accumulator."""


@dataclass(frozen=True)
class TransportInstance:
    """N x k non-negative integer cost matrix plus per-column load bounds."""

    costs: np.ndarray  # (N, k) int64
    bounds: CapacityBounds

    def __post_init__(self):
        costs = np.ascontiguousarray(np.asarray(self.costs, dtype=np.int64))
        if costs.ndim != 2:
            raise ValueError(f"costs must be 2-D, got ndim={costs.ndim}")
        if costs.size and int(costs.min()) < 0:
            raise ValueError("costs must be non-negative")
        object.__setattr__(self, "costs", costs)


def solve_balanced_transport(inst: TransportInstance) -> tuple[np.ndarray, int]:
    """Return (per-row column index, minimal total cost) for the instance.

    Output is deterministic: every tie in the search is broken toward the
    lower column index and then the lower row index (rows are inserted in
    ascending order and all argmins take the first minimum).

    Raises InfeasibleBoundsError when the bounds cannot hold N rows, and
    CostOverflowError when N * max(costs) exceeds the 64-bit budget.
    """
    costs = inst.costs
    n, k = costs.shape
    m, big = inst.bounds.min_size, inst.bounds.max_size
    if k * big < n:
        raise InfeasibleBoundsError(f"k*max_size = {k * big} < N = {n}")
    if k * m > n:
        raise InfeasibleBoundsError(f"k*min_size = {k * m} > N = {n}")
    max_cost = int(costs.max()) if costs.size else 0
    if max_cost and n > (1 << 62) // max_cost:
        raise CostOverflowError(
            f"N * max cost = {n} * {max_cost} exceeds the 64-bit cost budget"
        )

    assign = np.full(n, -1, dtype=np.int32)
    c_own = np.zeros(n, dtype=np.int64)  # cost of each assigned row's column
    load = [0] * k
    flow_t = [0] * k  # per-column units beyond min_size, i.e. flow on column->sink
    t_need = n - k * m  # units the sink still has to absorb
    n_deficit = k if m > 0 else 0  # columns still short of min_size
    spare = big - m
    tnode = k
    v = [0] * (k + 1)  # node potentials, columns then sink side
    # trans_val[a][j]: cheapest raw cost delta for moving one of column a's
    # rows to column j; trans_row names the row achieving it.
    trans_val = [[INF] * k for _ in range(k)]
    trans_row = [[-1] * k for _ in range(k)]
    members: list[list[int]] = [[] for _ in range(k)]
    col_range = range(k)
    all_range = range(k + 1)
    arange_k = np.arange(k)

    def retrans(a):
        if not members[a]:
            trans_val[a] = [INF] * k
            trans_row[a] = [-1] * k
            return
        rows = np.asarray(members[a], dtype=np.int64)
        rows.sort()  # ascending rows keep argmin ties on the lowest row index
        diff = costs[rows] - c_own[rows, None]
        idx = np.argmin(diff, axis=0)
        tv = diff[idx, arange_k].tolist()
        tr = rows[idx].tolist()
        tv[a] = INF
        trans_val[a] = tv
        trans_row[a] = tr

    for i in range(n):
        ci = costs[i].tolist()
        dist = [ci[j] - v[j] for j in col_range]

        # Fast paths: when the globally cheapest entry column can absorb the
        # unit as a terminal step, the shortest augmenting path is that single
        # edge and every potential update is zero, so the full search below
        # would do exactly this.
        u, best = 0, dist[0]
        for j in range(1, k):
            if dist[j] < best:
                u, best = j, dist[j]
        if load[u] - flow_t[u] < m:
            assign[i] = u
            c_own[i] = ci[u]
            if load[u] - flow_t[u] == m - 1:
                n_deficit -= 1
            load[u] += 1
            members[u].append(i)
            retrans(u)
            continue
        if n_deficit == 0 and t_need > 0 and flow_t[u] < spare and v[u] == v[tnode]:
            assign[i] = u
            c_own[i] = ci[u]
            load[u] += 1
            flow_t[u] += 1
            t_need -= 1
            members[u].append(i)
            retrans(u)
            continue

        dist.append(INF)
        pred_node = [-1] * (k + 1)  # -1 marks direct entry of row i
        pred_node[tnode] = -2
        done = [False] * (k + 1)

        for _ in all_range:
            u, best = -1, INF
            for x in all_range:
                if not done[x] and dist[x] < best:
                    u, best = x, dist[x]
            if u < 0:
                break
            done[u] = True
            if u == tnode:
                vt = v[tnode]
                for b in col_range:
                    if not done[b] and flow_t[b] > 0:
                        nd = best + vt - v[b]
                        if nd < dist[b]:
                            dist[b] = nd
                            pred_node[b] = tnode
            else:
                tu = trans_val[u]
                vu = v[u]
                for j in col_range:
                    if not done[j]:
                        w = tu[j]
                        if w < INF:
                            nd = best + w + vu - v[j]
                            if nd < dist[j]:
                                dist[j] = nd
                                pred_node[j] = u
                if not done[tnode] and flow_t[u] < spare:
                    nd = best + vu - v[tnode]
                    if nd < dist[tnode]:
                        dist[tnode] = nd
                        pred_node[tnode] = u

        # Nearest remaining demand wins; ties prefer lower column index, the
        # sink last.
        target, dstar = -1, INF
        for j in col_range:
            if load[j] - flow_t[j] < m and dist[j] < dstar:
                target, dstar = j, dist[j]
        if t_need > 0 and dist[tnode] < dstar:
            target, dstar = tnode, dist[tnode]
        if target < 0:
            raise RuntimeError("no augmenting path on a feasible instance")

        if target == tnode:
            t_need -= 1

        # Walk the path back to the source, collecting row moves and applying
        # sink-edge adjustments.
        moves = []
        x = target
        while True:
            p = pred_node[x]
            if p == -1:
                moves.append((i, x))
                break
            if x == tnode:
                flow_t[p] += 1
                x = p
            elif p == tnode:
                flow_t[x] -= 1
                x = tnode
            else:
                moves.append((int(trans_row[p][x]), x))
                x = p

        touched = set()
        for r, dest in moves:
            src = int(assign[r])
            if src >= 0:
                load[src] -= 1
                members[src].remove(r)
                touched.add(src)
            assign[r] = dest
            c_own[r] = costs[r, dest]
            load[dest] += 1
            members[dest].append(r)
            touched.add(dest)

        # Intermediate path nodes keep their demand balance; only the target
        # gains one mandatory unit.
        if target != tnode and load[target] - flow_t[target] == m:
            n_deficit -= 1

        for x in all_range:
            dx = dist[x]
            if dx < dstar:
                v[x] += dx - dstar

        for a in sorted(touched):
            retrans(a)

    loads = np.bincount(assign, minlength=k)
    if loads.min() < m or loads.max() > big or int(loads.sum()) != n:
        raise RuntimeError("solver produced loads outside the requested bounds")
    total = int(costs[np.arange(n), assign].sum())
    return assign, total
