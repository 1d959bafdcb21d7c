"""Compiled inner loops for the exact predicates that are too slow in Python.

Graphs arrive in CSR form (``indptr``, ``indices``) of the simple projection.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# residual moves recorded per BFS node
_EDGE_FWD = 0
_VERT_FWD = 1
_VERT_REV = 2
_EDGE_REV = 3


@njit(cache=True)
def _local_at_least(indptr, indices, n, s, t, k, flow_e, flow_v, in_from, in_pos,
                    stamp, tick, parent, move, aux, queue):
    """True iff ``k`` internally vertex-disjoint s-t paths exist (s, t non-adjacent).

    Unit-capacity augmenting paths on the vertex-split graph: node ``2x`` is
    x_in, ``2x+1`` is x_out, with a unit arc x_in -> x_out for x != s, t.
    """
    flow_e[:] = 0
    flow_v[:] = 0
    in_from[:] = -1
    found = 0
    while found < k:
        tick += 1
        head = 0
        tail = 0
        src = 2 * s + 1
        sink = 2 * t
        stamp[src] = tick
        queue[tail] = src
        tail += 1
        reached = False
        while head < tail and not reached:
            node = queue[head]
            head += 1
            x = node >> 1
            if node & 1:
                # x_out: forward edge arcs, or undo x's vertex arc
                for p in range(indptr[x], indptr[x + 1]):
                    if flow_e[p] == 0:
                        y = indices[p]
                        if y == s:
                            continue
                        nxt = 2 * y
                        if stamp[nxt] != tick:
                            stamp[nxt] = tick
                            parent[nxt] = node
                            move[nxt] = _EDGE_FWD
                            aux[nxt] = p
                            if nxt == sink:
                                reached = True
                                break
                            queue[tail] = nxt
                            tail += 1
                if not reached and x != s and flow_v[x] == 1:
                    nxt = 2 * x
                    if stamp[nxt] != tick:
                        stamp[nxt] = tick
                        parent[nxt] = node
                        move[nxt] = _VERT_REV
                        queue[tail] = nxt
                        tail += 1
            else:
                # x_in (x != s, t): use the vertex arc, or cancel the flow entering x
                if flow_v[x] == 0:
                    nxt = 2 * x + 1
                    if stamp[nxt] != tick:
                        stamp[nxt] = tick
                        parent[nxt] = node
                        move[nxt] = _VERT_FWD
                        queue[tail] = nxt
                        tail += 1
                w = in_from[x]
                if w >= 0:
                    nxt = 2 * w + 1
                    if stamp[nxt] != tick:
                        stamp[nxt] = tick
                        parent[nxt] = node
                        move[nxt] = _EDGE_REV
                        queue[tail] = nxt
                        tail += 1
        if not reached:
            return False, tick
        # augment, walking back from the sink
        node = sink
        while node != src:
            prev = parent[node]
            mv = move[node]
            if mv == _EDGE_FWD:
                p = aux[node]
                flow_e[p] = 1
                y = node >> 1
                if y != t:
                    in_from[y] = prev >> 1
                    in_pos[y] = p
            elif mv == _VERT_FWD:
                flow_v[node >> 1] = 1
            elif mv == _VERT_REV:
                flow_v[node >> 1] = 0
            else:
                x = prev >> 1
                flow_e[in_pos[x]] = 0
                in_from[x] = -1
            node = prev
        found += 1
    return True, tick


@njit(cache=True)
def k_connected_csr(indptr, indices, n, k):
    """Exact k-vertex-connectivity test.

    Take v of minimum degree; the graph is k-connected iff v has >= k
    disjoint paths to every non-neighbour and every two non-adjacent
    neighbours of v have >= k disjoint paths between them.
    """
    if n <= k:
        return False
    if k <= 0:
        return True
    v = 0
    mind = indptr[1] - indptr[0]
    for x in range(n):
        d = indptr[x + 1] - indptr[x]
        if d < mind:
            mind = d
            v = x
    if mind < k:
        return False
    if mind == n - 1:
        return True
    m2 = indptr[n]
    flow_e = np.zeros(m2, np.int8)
    flow_v = np.zeros(n, np.int8)
    in_from = np.full(n, -1, np.int64)
    in_pos = np.zeros(n, np.int64)
    stamp = np.zeros(2 * n, np.int64)
    parent = np.zeros(2 * n, np.int64)
    move = np.zeros(2 * n, np.int8)
    aux = np.zeros(2 * n, np.int64)
    queue = np.zeros(2 * n, np.int64)
    mark = np.zeros(n, np.int64)
    tick = 0
    for p in range(indptr[v], indptr[v + 1]):
        mark[indices[p]] = 1
    mark[v] = 1
    for t in range(n):
        if mark[t]:
            continue
        ok, tick = _local_at_least(indptr, indices, n, v, t, k, flow_e, flow_v, in_from, in_pos,
                                   stamp, tick, parent, move, aux, queue)
        if not ok:
            return False
    nb = indices[indptr[v]:indptr[v + 1]]
    adj_mark = np.full(n, -1, np.int64)
    for i in range(len(nb)):
        x = nb[i]
        for p in range(indptr[x], indptr[x + 1]):
            adj_mark[indices[p]] = x
        for j in range(i + 1, len(nb)):
            y = nb[j]
            if adj_mark[y] == x:
                continue
            ok, tick = _local_at_least(indptr, indices, n, x, y, k, flow_e, flow_v, in_from, in_pos,
                                       stamp, tick, parent, move, aux, queue)
            if not ok:
                return False
    return True


@njit(cache=True)
def hamilton_dp(adj_bits, n):
    """Held-Karp style reachability over subsets containing vertex 0.

    ``reach[m]`` is a bitmask of end vertices of paths from 0 that visit
    exactly the vertex set ``(m << 1) | 1``.
    """
    if n < 3:
        return False
    size = 1 << (n - 1)
    reach = np.zeros(size, np.uint32)
    for u in range(1, n):
        if (adj_bits[0] >> u) & 1:
            reach[1 << (u - 1)] |= np.uint32(1 << u)
    for m in range(1, size):
        ends = np.int64(reach[m])
        if ends == 0:
            continue
        full = (np.int64(m) << 1) | 1
        while ends:
            low = ends & -ends
            v = 0
            while (low >> v) != 1:
                v += 1
            ends ^= low
            cand = adj_bits[v] & ~full
            while cand:
                lowu = cand & -cand
                u = 0
                while (lowu >> u) != 1:
                    u += 1
                cand ^= lowu
                nm = m | (1 << (u - 1))
                reach[nm] |= np.uint32(1 << u)
    ends = np.int64(reach[size - 1])
    for v in range(1, n):
        if (ends >> v) & 1 and (adj_bits[v] & 1):
            return True
    return False
