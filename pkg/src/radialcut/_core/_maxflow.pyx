# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled exact max-flow (Dinic); see maxflow_py for the reference twin.

Same data layout and iteration order as the pure-Python implementation, so
both produce bit-identical flows and partitions.
"""

import numpy as np


def max_flow(int num_nodes, int[::1] tails, int[::1] heads, double[::1] caps,
             int source, int sink):
    """Exact max-flow; returns (flow_value, source_mask bool array)."""
    cdef int m = tails.shape[0]
    cdef int n_edges = 2 * m

    eto_arr = np.empty(n_edges, dtype=np.int32)
    efrom_arr = np.empty(n_edges, dtype=np.int32)
    ecap_arr = np.empty(n_edges, dtype=np.float64)
    cdef int[::1] eto = eto_arr
    cdef int[::1] efrom = efrom_arr
    cdef double[::1] ecap = ecap_arr

    cdef int i, e, u, v, idx, head, tail, depth, cut_at
    for i in range(m):
        eto[2 * i] = heads[i]
        efrom[2 * i] = tails[i]
        ecap[2 * i] = caps[i]
        eto[2 * i + 1] = tails[i]
        efrom[2 * i + 1] = heads[i]
        ecap[2 * i + 1] = 0.0

    start_arr = np.zeros(num_nodes + 1, dtype=np.int32)
    cdef int[::1] start = start_arr
    for e in range(n_edges):
        start[efrom[e] + 1] += 1
    for u in range(num_nodes):
        start[u + 1] += start[u]
    adj_arr = np.empty(n_edges, dtype=np.int32)
    fill_arr = np.array(start_arr[:num_nodes], dtype=np.int32)
    cdef int[::1] adj = adj_arr
    cdef int[::1] fill = fill_arr
    for e in range(n_edges):
        u = efrom[e]
        adj[fill[u]] = e
        fill[u] += 1

    level_arr = np.empty(num_nodes, dtype=np.int32)
    queue_arr = np.empty(num_nodes, dtype=np.int32)
    it_arr = np.empty(num_nodes, dtype=np.int32)
    path_edges_arr = np.empty(num_nodes + 1, dtype=np.int32)
    path_nodes_arr = np.empty(num_nodes + 2, dtype=np.int32)
    cdef int[::1] level = level_arr
    cdef int[::1] queue = queue_arr
    cdef int[::1] it = it_arr
    cdef int[::1] path_edges = path_edges_arr
    cdef int[::1] path_nodes = path_nodes_arr

    cdef double flow = 0.0
    cdef double bottleneck, c
    cdef bint advanced, reachable

    while True:
        # BFS level assignment
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
        if level[sink] < 0:
            break

        for u in range(num_nodes):
            it[u] = start[u]
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
                break
            level[u] = -1
            depth -= 1
            u = path_nodes[depth]
            it[u] += 1

    source_mask_arr = np.zeros(num_nodes, dtype=bool)
    cdef unsigned char[::1] source_mask = source_mask_arr.view(np.uint8)
    source_mask[source] = 1
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        for idx in range(start[u], start[u + 1]):
            e = adj[idx]
            v = eto[e]
            if ecap[e] > 0.0 and source_mask[v] == 0:
                source_mask[v] = 1
                queue[tail] = v
                tail += 1
    return flow, source_mask_arr
