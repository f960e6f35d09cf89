# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled greedy hierarchy kernel; semantics match ``_greedy_py`` exactly."""

import numpy as np

from libc.math cimport log2
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.algorithm cimport sort as std_sort
from libcpp.pair cimport pair
from cython.operator cimport dereference as deref, preincrement as inc


cdef extern from *:
    """
    #include <queue>
    #include <vector>
    struct MergeEntry { double key; int lo, hi, a, b; double w; };
    struct MergeCmp {
        bool operator()(const MergeEntry& x, const MergeEntry& y) const {
            if (x.key != y.key) return x.key > y.key;
            if (x.lo != y.lo) return x.lo > y.lo;
            if (x.hi != y.hi) return x.hi > y.hi;
            if (x.a != y.a) return x.a > y.a;
            if (x.b != y.b) return x.b > y.b;
            return x.w > y.w;
        }
    };
    typedef std::priority_queue<MergeEntry, std::vector<MergeEntry>, MergeCmp> MergeHeap;

    struct RemoveEntry { double key; int min_leaf, size, v, ver; };
    struct RemoveCmp {
        bool operator()(const RemoveEntry& x, const RemoveEntry& y) const {
            if (x.key != y.key) return x.key > y.key;
            if (x.min_leaf != y.min_leaf) return x.min_leaf > y.min_leaf;
            if (x.size != y.size) return x.size > y.size;
            if (x.v != y.v) return x.v > y.v;
            return x.ver > y.ver;
        }
    };
    typedef std::priority_queue<RemoveEntry, std::vector<RemoveEntry>, RemoveCmp> RemoveHeap;

    static inline MergeEntry make_merge(double key, int lo, int hi, int a, int b, double w) {
        MergeEntry e; e.key = key; e.lo = lo; e.hi = hi; e.a = a; e.b = b; e.w = w; return e;
    }
    static inline RemoveEntry make_remove(double key, int ml, int sz, int v, int ver) {
        RemoveEntry e; e.key = key; e.min_leaf = ml; e.size = sz; e.v = v; e.ver = ver; return e;
    }
    """
    cdef struct MergeEntry:
        double key
        int lo, hi, a, b
        double w
    cdef struct RemoveEntry:
        double key
        int min_leaf, size, v, ver
    cdef cppclass MergeHeap:
        void push(const MergeEntry&)
        const MergeEntry& top()
        void pop()
        bint empty()
    cdef cppclass RemoveHeap:
        void push(const RemoveEntry&)
        const RemoveEntry& top()
        void pop()
        bint empty()
    MergeEntry make_merge(double, int, int, int, int, double)
    RemoveEntry make_remove(double, int, int, int, int)


cdef inline double merge_gain(double w, double vol_a, double vol_b, double vol_g) nogil:
    cdef double joint = vol_a + vol_b
    if w <= 0.0 or joint <= 0.0:
        return 0.0
    return (2.0 * w / vol_g) * log2(vol_g / joint)


cdef inline double remove_cost(double inner, double vol_v, double vol_p, double vol_g) nogil:
    if vol_v <= 0.0:
        return 0.0
    return (inner / vol_g) * log2(vol_p / vol_v)


cdef class _Kernel:
    cdef int n, nxt, live
    cdef double vol_g
    cdef vector[int] parent, min_leaf, size, node_of
    cdef vector[char] alive
    cdef vector[double] vol, cut, inner
    cdef vector[unordered_map[int, double]] adj
    cdef vector[unordered_set[int]] children
    cdef MergeHeap mheap
    cdef bint record
    cdef list merges, removals

    def __init__(self, int n, double vol_g, bint record):
        cdef int cap = 2 * n if n > 0 else 1
        cdef int i
        self.n = n
        self.nxt = n
        self.live = n
        self.vol_g = vol_g
        self.parent.assign(cap, -1)
        self.vol.assign(cap, 0.0)
        self.cut.assign(cap, 0.0)
        self.inner.assign(cap, 0.0)
        self.min_leaf.resize(cap)
        for i in range(cap):
            self.min_leaf[i] = i
        self.size.assign(cap, 1)
        self.children.resize(cap)
        self.node_of.resize(n)
        for i in range(n):
            self.node_of[i] = i
        self.alive.assign(n, 1)
        self.adj.resize(n)
        self.record = record
        self.merges = []
        self.removals = []

    cdef int do_merge(self, int h1, int h2, double gain):
        cdef int a = self.node_of[h1], b = self.node_of[h2]
        cdef int e = self.nxt
        cdef int hb, hs, x, lo, hi, nx
        cdef double w = 0.0, c, wx, nw, g
        cdef unordered_map[int, double].iterator it, found
        self.nxt += 1
        self.live -= 1
        found = self.adj[h1].find(h2)
        if found != self.adj[h1].end():
            w = deref(found).second
        self.vol[e] = self.vol[a] + self.vol[b]
        c = self.cut[a] + self.cut[b] - 2.0 * w
        self.cut[e] = c if c > 0.0 else 0.0
        self.inner[e] = self.cut[a] + self.cut[b] - self.cut[e]
        self.min_leaf[e] = self.min_leaf[a] if self.min_leaf[a] < self.min_leaf[b] else self.min_leaf[b]
        self.size[e] = self.size[a] + self.size[b]
        self.children[e].insert(a)
        self.children[e].insert(b)
        self.parent[a] = e
        self.parent[b] = e
        if self.adj[h1].size() >= self.adj[h2].size():
            hb = h1
            hs = h2
        else:
            hb = h2
            hs = h1
        self.adj[hb].erase(hs)
        it = self.adj[hs].begin()
        while it != self.adj[hs].end():
            x = deref(it).first
            wx = deref(it).second
            inc(it)
            if x == hb:
                continue
            self.adj[x].erase(hs)
            found = self.adj[x].find(hb)
            if found != self.adj[x].end():
                nw = deref(found).second + wx
                deref(found).second = nw
            else:
                nw = wx
                self.adj[x][hb] = nw
            self.adj[hb][x] = nw
            nx = self.node_of[x]
            g = merge_gain(nw, self.vol[e], self.vol[nx], self.vol_g)
            if g > 0.0:
                lo = self.min_leaf[e]
                hi = self.min_leaf[nx]
                if lo > hi:
                    lo, hi = hi, lo
                self.mheap.push(make_merge(-g, lo, hi, hb, x, nw))
        unordered_map[int, double]().swap(self.adj[hs])
        self.alive[hs] = 0
        self.node_of[hb] = e
        if self.record:
            self.merges.append((a, b, gain))
        return hb

    cdef void stage1(self, const long[:] indptr, const int[:] indices,
                     const double[:] data, const double[:] degree):
        cdef int n = self.n, u, v, a, b, clo, chi, acc, i
        cdef long j
        cdef double w, g
        cdef MergeEntry top
        cdef bint found
        cdef unordered_map[int, double].iterator it
        for u in range(n):
            self.vol[u] = degree[u]
            self.cut[u] = degree[u]
        for u in range(n):
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                w = data[j]
                self.adj[u][v] = w
                if u < v:
                    self.mheap.push(make_merge(
                        -merge_gain(w, self.vol[u], self.vol[v], self.vol_g), u, v, u, v, w))

        while self.live > 2:
            found = False
            while not self.mheap.empty():
                top = self.mheap.top()
                if not (self.alive[top.a] and self.alive[top.b]):
                    self.mheap.pop()
                    continue
                it = self.adj[top.a].find(top.b)
                if it == self.adj[top.a].end() or deref(it).second != top.w:
                    self.mheap.pop()
                    continue
                a = self.node_of[top.a]
                b = self.node_of[top.b]
                g = merge_gain(top.w, self.vol[a], self.vol[b], self.vol_g)
                clo = self.min_leaf[a]
                chi = self.min_leaf[b]
                if clo > chi:
                    clo, chi = chi, clo
                if -g != top.key or clo != top.lo or chi != top.hi:
                    self.mheap.pop()
                    if g > 0.0:
                        self.mheap.push(make_merge(-g, clo, chi, top.a, top.b, top.w))
                    continue
                if top.key < 0.0:
                    self.mheap.pop()
                    found = True
                break
            if not found:
                break
            self.do_merge(top.a, top.b, -top.key)

        cdef vector[pair[int, int]] rest
        if self.live > 2:
            for u in range(n):
                if self.alive[u]:
                    rest.push_back(pair[int, int](self.min_leaf[self.node_of[u]], u))
            std_sort(rest.begin(), rest.end())
            acc = rest[0].second
            for i in range(1, rest.size()):
                if self.live <= 2:
                    break
                v = rest[i].second
                w = 0.0
                it = self.adj[acc].find(v)
                if it != self.adj[acc].end():
                    w = deref(it).second
                acc = self.do_merge(acc, v, merge_gain(
                    w, self.vol[self.node_of[acc]], self.vol[self.node_of[v]], self.vol_g))

    cdef int height(self, int total):
        cdef vector[int] depth
        cdef int v, p, d, best = 0
        depth.assign(total, 0)
        for v in range(total - 2, -1, -1):
            p = self.parent[v]
            if p >= 0:
                d = depth[p] + 1
                depth[v] = d
                if v < self.n and d > best:
                    best = d
        return best

    cdef list stage2(self, int k):
        cdef int n = self.n
        cdef int root = self.nxt
        cdef int total = root + 1
        cdef int v, c, p, t, lo_t = 0, hi_t = -1, mid, q, d, best
        cdef long checkpoint = 1
        cdef RemoveHeap heap
        cdef RemoveEntry ent
        cdef unordered_set[int].iterator it
        cdef vector[int] kids, version, base, gone, depth, kept
        cdef vector[pair[int, double]] order

        for v in range(root):
            if self.parent[v] == -1:
                self.parent[v] = root
                self.children[root].insert(v)
        self.parent[root] = -1
        self.vol[root] = self.vol_g
        self.cut[root] = 0.0
        self.min_leaf[root] = 0
        self.size[root] = n
        base.assign(self.parent.begin(), self.parent.begin() + total)

        version.assign(total, 0)
        for v in range(n, root):
            heap.push(make_remove(
                remove_cost(self.inner[v], self.vol[v], self.vol[self.parent[v]], self.vol_g),
                self.min_leaf[v], self.size[v], v, 0))
        if self.height(total) <= k:
            hi_t = 0

        while hi_t < 0 and not heap.empty():
            ent = heap.top()
            heap.pop()
            v = ent.v
            if self.parent[v] == -2 or ent.ver != version[v]:
                continue
            p = self.parent[v]
            kids.clear()
            it = self.children[v].begin()
            while it != self.children[v].end():
                kids.push_back(deref(it))
                inc(it)
            self.children[p].erase(v)
            for c in kids:
                self.parent[c] = p
                self.children[p].insert(c)
            self.inner[p] += self.inner[v]
            self.parent[v] = -2
            unordered_set[int]().swap(self.children[v])
            order.push_back(pair[int, double](v, ent.key))

            for c in kids:
                if c >= n:
                    version[c] += 1
                    heap.push(make_remove(
                        remove_cost(self.inner[c], self.vol[c], self.vol[p], self.vol_g),
                        self.min_leaf[c], self.size[c], c, version[c]))
            if p != root:
                version[p] += 1
                heap.push(make_remove(
                    remove_cost(self.inner[p], self.vol[p], self.vol[self.parent[p]], self.vol_g),
                    self.min_leaf[p], self.size[p], p, version[p]))

            if <long>order.size() == checkpoint or heap.empty():
                if self.height(total) <= k:
                    hi_t = order.size()
                else:
                    lo_t = order.size()
                    checkpoint *= 2
        if hi_t < 0:
            hi_t = order.size()

        gone.assign(total, total)
        for t in range(<int>order.size()):
            gone[order[t].first] = t
        depth.assign(total, 0)
        while hi_t - lo_t > 1:
            mid = (lo_t + hi_t) // 2
            best = 0
            for v in range(total - 2, -1, -1):
                q = base[v]
                d = depth[q] + (1 if gone[q] >= mid else 0)
                depth[v] = d
                if v < n and d > best:
                    best = d
            if best <= k:
                hi_t = mid
            else:
                lo_t = mid
        t = hi_t

        out = [-1] * total
        kept.resize(total)
        for v in range(total):
            kept[v] = v
        for v in range(total - 2, -1, -1):
            q = kept[base[v]]
            if gone[v] < t:
                out[v] = -2
                kept[v] = q
            else:
                out[v] = q
        if self.record:
            for v in range(t):
                self.removals.append((order[v].first, order[v].second))
        return out


def greedy_hierarchy(int n, indptr, indices, data, degree, double vol_g, int k, bint record=False):
    cdef _Kernel ker = _Kernel(n, vol_g, record)
    ker.stage1(np.ascontiguousarray(indptr, dtype=np.int_),
               np.ascontiguousarray(indices, dtype=np.intc),
               np.ascontiguousarray(data, dtype=np.float64),
               np.ascontiguousarray(degree, dtype=np.float64))
    parent = ker.stage2(k)
    total = len(parent)
    vol = [ker.vol[i] for i in range(total)]
    cut = [ker.cut[i] for i in range(total)]
    return parent, vol, cut, ker.merges, ker.removals
