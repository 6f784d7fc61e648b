"""Pure-Python exact max-flow (Dinic), twin of the compiled extension.

Both implementations share the same data layout and iteration order: arc i
becomes residual edges 2*i (forward) and 2*i+1 (reverse), adjacency is CSR
sorted by tail with stable arc order, BFS and DFS visit edges in CSR order.
Identical inputs therefore produce bit-identical flows and partitions in
either implementation.

The returned partition is the set of nodes reachable from the source in the
final residual graph, which is the canonical minimal source-side min-cut and
is unique over all maximum flows.
"""

from __future__ import annotations

import numpy as np


def max_flow(num_nodes, tails, heads, caps, source, sink):
    """Exact max-flow on a directed graph given as parallel arc arrays.

    Returns (flow_value, source_mask) where source_mask is a bool array of
    length num_nodes marking the source side of the min cut.
    """
    m = len(tails)
    n_edges = 2 * m
    eto = [0] * n_edges
    ecap = [0.0] * n_edges
    efrom = [0] * n_edges
    for i in range(m):
        t = int(tails[i])
        h = int(heads[i])
        eto[2 * i] = h
        efrom[2 * i] = t
        ecap[2 * i] = float(caps[i])
        eto[2 * i + 1] = t
        efrom[2 * i + 1] = h
        # reverse edge starts with zero capacity

    # CSR adjacency: edges sorted by tail, stable in edge-id order
    start = [0] * (num_nodes + 1)
    for e in range(n_edges):
        start[efrom[e] + 1] += 1
    for u in range(num_nodes):
        start[u + 1] += start[u]
    adj = [0] * n_edges
    fill = list(start[:num_nodes])
    for e in range(n_edges):
        u = efrom[e]
        adj[fill[u]] = e
        fill[u] += 1

    level = [-1] * num_nodes
    queue = [0] * num_nodes

    def bfs():
        for u in range(num_nodes):
            level[u] = -1
        level[source] = 0
        queue[0] = source
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            for idx in range(start[u], start[u + 1]):
                e = adj[idx]
                v = eto[e]
                if ecap[e] > 0.0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue[tail] = v
                    tail += 1
        return level[sink] >= 0

    it = [0] * num_nodes
    flow = 0.0
    path_edges = [0] * (num_nodes + 1)
    path_nodes = [0] * (num_nodes + 2)

    while bfs():
        for u in range(num_nodes):
            it[u] = start[u]
        # one DFS walk augments every path of this phase
        u = source
        depth = 0
        path_nodes[0] = source
        while True:
            if u == sink:
                bottleneck = ecap[path_edges[0]]
                for idx in range(1, depth):
                    c = ecap[path_edges[idx]]
                    if c < bottleneck:
                        bottleneck = c
                for idx in range(depth):
                    e = path_edges[idx]
                    ecap[e] -= bottleneck
                    ecap[e ^ 1] += bottleneck
                flow += bottleneck
                # retreat to just before the first saturated edge
                cut_at = 0
                for idx in range(depth):
                    if ecap[path_edges[idx]] <= 0.0:
                        cut_at = idx
                        break
                depth = cut_at
                u = path_nodes[depth]
                continue
            advanced = False
            while it[u] < start[u + 1]:
                e = adj[it[u]]
                v = eto[e]
                if ecap[e] > 0.0 and level[v] == level[u] + 1:
                    path_edges[depth] = e
                    depth += 1
                    path_nodes[depth] = v
                    u = v
                    advanced = True
                    break
                it[u] += 1
            if advanced:
                continue
            if u == source:
                break  # phase exhausted
            # dead end: prune this node from the level graph and retreat
            level[u] = -1
            depth -= 1
            u = path_nodes[depth]
            it[u] += 1

    # canonical min cut: residual reachability from the source
    source_mask = np.zeros(num_nodes, dtype=bool)
    source_mask[source] = True
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        for idx in range(start[u], start[u + 1]):
            e = adj[idx]
            v = eto[e]
            if ecap[e] > 0.0 and not source_mask[v]:
                source_mask[v] = True
                queue[tail] = v
                tail += 1
    return flow, source_mask
