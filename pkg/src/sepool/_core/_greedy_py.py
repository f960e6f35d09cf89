"""Pure-Python greedy hierarchy kernel (stages 1 and 2 of the tree build).

Node ids: graph nodes ``0..n-1`` are leaves, merge nodes follow in creation
order and the root is the last id. On return ``parent[v]`` is ``-1`` for the
root and ``-2`` for nodes deleted in stage 2.

Stage 1 keeps heap entries for pairs of root children that share an edge,
keyed by ``(-gain, min_leaf_lo, min_leaf_hi)`` and tagged with the pair
weight. A merge pushes fresh entries only for pairs whose weight changed.
The other pairs of the merged cluster keep their old keys, which are upper
bounds because a pair's gain can only fall as a member's volume grows; they
are recomputed when they reach the top. Once no positive gain is left every
remaining pair gains exactly zero, so the tie-break reduces to folding the
remaining children in min-leaf order.

Stage 2 keys internal nodes by ``(cost, min_leaf, size)`` with per-node
version counters for lazy invalidation.

The compiled kernel must reproduce this module's float operations in the
same order so both backends return identical trees.
"""

import heapq
from math import log2


def merge_gain(w, vol_a, vol_b, vol_g):
    joint = vol_a + vol_b
    if w <= 0.0 or joint <= 0.0:
        return 0.0
    return (2.0 * w / vol_g) * log2(vol_g / joint)


def remove_cost(inner, vol_v, vol_p, vol_g):
    if vol_v <= 0.0:
        return 0.0
    return (inner / vol_g) * log2(vol_p / vol_v)


def greedy_hierarchy(n, indptr, indices, data, degree, vol_g, k, record=False):
    cap = 2 * n
    parent = [-1] * cap
    vol = [0.0] * cap
    cut = [0.0] * cap
    inner = [0.0] * cap  # sum of children's cuts minus own cut
    min_leaf = list(range(cap))
    size = [1] * cap
    children = [None] * cap
    merges, removals = [], []

    deg = [float(x) for x in degree]
    # clusters are addressed by a handle (one of their leaves) so the larger
    # adjacency map survives a merge and only the smaller one is rewritten
    node_of = list(range(n))
    alive = [True] * n
    adj = [None] * n
    heap = []
    for u in range(n):
        vol[u] = cut[u] = deg[u]
        nb = {}
        for j in range(indptr[u], indptr[u + 1]):
            v = int(indices[j])
            w = float(data[j])
            nb[v] = w
            if u < v:
                heap.append((-merge_gain(w, deg[u], deg[v], vol_g), u, v, u, v, w))
        adj[u] = nb
    heapq.heapify(heap)

    # ---- stage 1: bottom-up binary merges
    nxt = n
    live = n

    def do_merge(h1, h2, gain):
        nonlocal nxt, live
        a, b = node_of[h1], node_of[h2]
        e = nxt
        nxt += 1
        live -= 1
        w = adj[h1].get(h2, 0.0)
        vol[e] = vol[a] + vol[b]
        c = cut[a] + cut[b] - 2.0 * w
        cut[e] = c if c > 0.0 else 0.0
        inner[e] = cut[a] + cut[b] - cut[e]
        min_leaf[e] = min_leaf[a] if min_leaf[a] < min_leaf[b] else min_leaf[b]
        size[e] = size[a] + size[b]
        children[e] = {a, b}
        parent[a] = parent[b] = e
        if len(adj[h1]) >= len(adj[h2]):
            hb, hs = h1, h2
        else:
            hb, hs = h2, h1
        big = adj[hb]
        big.pop(hs, None)
        for x, wx in adj[hs].items():
            if x == hb:
                continue
            ax = adj[x]
            del ax[hs]
            nw = ax[hb] + wx if hb in ax else wx
            ax[hb] = nw
            big[x] = nw
            g = merge_gain(nw, vol[e], vol[node_of[x]], vol_g)
            if g > 0.0:
                lo, hi = min_leaf[e], min_leaf[node_of[x]]
                if lo > hi:
                    lo, hi = hi, lo
                heapq.heappush(heap, (-g, lo, hi, hb, x, nw))
        adj[hs] = None
        alive[hs] = False
        node_of[hb] = e
        if record:
            merges.append((a, b, gain))
        return hb

    while live > 2:
        top = None
        while heap:
            neg, lo, hi, h1, h2, w = heap[0]
            if not (alive[h1] and alive[h2]) or adj[h1].get(h2) != w:
                heapq.heappop(heap)  # dead cluster or superseded weight
                continue
            a, b = node_of[h1], node_of[h2]
            g = merge_gain(w, vol[a], vol[b], vol_g)
            clo, chi = min_leaf[a], min_leaf[b]
            if clo > chi:
                clo, chi = chi, clo
            if -g != neg or clo != lo or chi != hi:
                # volumes only grow, so the stored gain was an upper bound
                heapq.heappop(heap)
                if g > 0.0:
                    heapq.heappush(heap, (-g, clo, chi, h1, h2, w))
                continue
            if neg < 0.0:
                top = heapq.heappop(heap)
            break
        if top is None:
            break
        do_merge(top[3], top[4], -top[0])

    if live > 2:
        rest = sorted((h for h in range(n) if alive[h]), key=lambda h: min_leaf[node_of[h]])
        acc = rest[0]
        for x in rest[1:]:
            if live <= 2:
                break
            w = adj[acc].get(x, 0.0)
            acc = do_merge(acc, x, merge_gain(w, vol[node_of[acc]], vol[node_of[x]], vol_g))

    root = nxt
    top_level = [v for v in range(nxt) if parent[v] == -1]
    for v in top_level:
        parent[v] = root
    parent[root] = -1
    vol[root] = vol_g
    cut[root] = 0.0
    min_leaf[root] = 0
    size[root] = n
    children[root] = set(top_level)
    total = root + 1

    # ---- stage 2: squeeze to height k
    # The removal order does not depend on heights, only the stopping point
    # does. Removals run ahead with heights checked at doubling checkpoints,
    # then the exact stopping prefix is found by bisection on the stage-1
    # parents. Every parent id exceeds its children's ids throughout.
    base = parent[:total]
    order = []
    heap = [
        (remove_cost(inner[v], vol[v], vol[parent[v]], vol_g), min_leaf[v], size[v], v, 0)
        for v in range(n, root)
    ]
    heapq.heapify(heap)
    version = [0] * total
    lo_t, hi_t = 0, None
    checkpoint = 1
    if _height(parent, n, total) <= k:
        hi_t = 0
    while hi_t is None and heap:
        cost, _, _, v, ver = heapq.heappop(heap)
        if parent[v] == -2 or ver != version[v]:
            continue
        p = parent[v]
        kids = children[v]
        pk = children[p]
        pk.discard(v)
        for c in kids:
            parent[c] = p
            pk.add(c)
        inner[p] += inner[v]
        parent[v] = -2
        children[v] = None
        order.append((v, cost))

        for c in kids:
            if c >= n:
                version[c] += 1
                heapq.heappush(heap, (remove_cost(inner[c], vol[c], vol[p], vol_g),
                                      min_leaf[c], size[c], c, version[c]))
        if p != root:
            version[p] += 1
            heapq.heappush(heap, (remove_cost(inner[p], vol[p], vol[parent[p]], vol_g),
                                  min_leaf[p], size[p], p, version[p]))

        if len(order) == checkpoint or not heap:
            if _height(parent, n, total) <= k:
                hi_t = len(order)
            else:
                lo_t = len(order)
                checkpoint *= 2
    if hi_t is None:
        hi_t = len(order)

    # smallest t in (lo_t, hi_t] with height <= k; height(lo_t) > k unless t == 0
    gone = [total] * total
    for i, (v, _) in enumerate(order):
        gone[v] = i
    while hi_t - lo_t > 1:
        mid = (lo_t + hi_t) // 2
        if _prefix_height(base, gone, mid, n, total) <= k:
            hi_t = mid
        else:
            lo_t = mid
    t = hi_t

    # kept[v]: v itself if it survives the first t removals, else its
    # nearest surviving ancestor
    out = [-1] * total
    kept = list(range(total))
    for v in range(total - 2, -1, -1):
        q = kept[base[v]]
        if gone[v] < t:
            out[v] = -2
            kept[v] = q
        else:
            out[v] = q
    if record:
        removals.extend(order[:t])
    return out, vol[:total], cut[:total], merges, removals


def _height(parent, n, total):
    depth = [0] * total
    best = 0
    for v in range(total - 2, -1, -1):
        p = parent[v]
        if p >= 0:
            d = depth[p] + 1
            depth[v] = d
            if v < n and d > best:
                best = d
    return best


def _prefix_height(base, gone, t, n, total):
    """Tree height after the first ``t`` removals, from the stage-1 parents."""
    depth = [0] * total
    best = 0
    for v in range(total - 2, -1, -1):
        p = base[v]
        d = depth[p] + (1 if gone[p] >= t else 0)
        depth[v] = d
        if v < n and d > best:
            best = d
    return best
