# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contract and traversal order as ``_kernels_py``."""

from libc.stdlib cimport malloc, free as cfree

SOLVE = 0
COUNT = 1


cdef struct Search:
    int n
    int m
    int mode
    long long limit
    int *eu
    int *ev
    int *res
    int *need
    int *freec
    int *inc_start
    int *inc
    int *assign
    int *trail
    int ntrail
    int *queue
    int nqueue
    int *first
    int have_first
    long long nodes
    long long props
    int overflow


cdef inline void put(Search *s, int i, int c):
    cdef int u = s.eu[i]
    cdef int v = s.ev[i]
    if c == 0:
        s.res[u] = (s.res[u] + 2) % 3
        s.res[v] = (s.res[v] + 1) % 3
    else:
        s.res[v] = (s.res[v] + 2) % 3
        s.res[u] = (s.res[u] + 1) % 3
    s.assign[i] = c
    s.freec[u] -= 1
    s.freec[v] -= 1
    s.trail[s.ntrail] = i
    s.ntrail += 1


cdef inline void undo_to(Search *s, int mark):
    cdef int i, u, v
    while s.ntrail > mark:
        s.ntrail -= 1
        i = s.trail[s.ntrail]
        u = s.eu[i]
        v = s.ev[i]
        if s.assign[i] == 0:
            s.res[u] = (s.res[u] + 1) % 3
            s.res[v] = (s.res[v] + 2) % 3
        else:
            s.res[v] = (s.res[v] + 1) % 3
            s.res[u] = (s.res[u] + 2) % 3
        s.assign[i] = -1
        s.freec[u] += 1
        s.freec[v] += 1


cdef int settle(Search *s, int x):
    cdef int k, j = -1, c
    if s.freec[x] == 0:
        return s.res[x] == s.need[x]
    if s.freec[x] == 1:
        for k in range(s.inc_start[x], s.inc_start[x + 1]):
            j = s.inc[k]
            if s.assign[j] < 0:
                break
        if (s.res[x] + 1) % 3 == s.need[x]:
            c = 0 if s.ev[j] == x else 1
        elif (s.res[x] + 2) % 3 == s.need[x]:
            c = 0 if s.eu[j] == x else 1
        else:
            return 0
        put(s, j, c)
        s.props += 1
        s.queue[s.nqueue] = s.eu[j]
        s.queue[s.nqueue + 1] = s.ev[j]
        s.nqueue += 2
    return 1


cdef int propagate(Search *s):
    cdef int x
    while s.nqueue > 0:
        s.nqueue -= 1
        x = s.queue[s.nqueue]
        if not settle(s, x):
            s.nqueue = 0
            return 0
    return 1


cdef long long rec(Search *s, int start):
    cdef int i = start, c, mark, k
    cdef long long total = 0
    while i < s.m and s.assign[i] >= 0:
        i += 1
    if i == s.m:
        if not s.have_first:
            for k in range(s.m):
                s.first[k] = s.assign[k]
            s.have_first = 1
        return 1
    for c in range(2):
        s.nodes += 1
        mark = s.ntrail
        put(s, i, c)
        s.queue[0] = s.eu[i]
        s.queue[1] = s.ev[i]
        s.nqueue = 2
        if propagate(s):
            total += rec(s, i + 1)
            if s.overflow:
                return total
        undo_to(s, mark)
        if total and s.mode == SOLVE:
            return total
        if s.limit and s.nodes > s.limit:
            s.overflow = 1
            return total
    return total


def orient_search(int n, eu, ev, res0, need, int mode, long long limit=0):
    cdef Search s
    cdef int m = len(eu)
    cdef int i, x
    cdef long long count = 0
    s.n = n
    s.m = m
    s.mode = mode
    s.limit = limit
    s.ntrail = 0
    s.nqueue = 0
    s.have_first = 0
    s.nodes = 0
    s.props = 0
    s.overflow = 0
    s.eu = <int *> malloc((m + 1) * sizeof(int))
    s.ev = <int *> malloc((m + 1) * sizeof(int))
    s.res = <int *> malloc((n + 1) * sizeof(int))
    s.need = <int *> malloc((n + 1) * sizeof(int))
    s.freec = <int *> malloc((n + 1) * sizeof(int))
    s.inc_start = <int *> malloc((n + 2) * sizeof(int))
    s.inc = <int *> malloc((2 * m + 1) * sizeof(int))
    s.assign = <int *> malloc((m + 1) * sizeof(int))
    s.trail = <int *> malloc((m + 1) * sizeof(int))
    s.queue = <int *> malloc((2 * m + n + 2) * sizeof(int))
    s.first = <int *> malloc((m + 1) * sizeof(int))
    try:
        for x in range(n):
            s.res[x] = res0[x]
            s.need[x] = need[x]
            s.freec[x] = 0
        for i in range(m):
            s.eu[i] = eu[i]
            s.ev[i] = ev[i]
            s.assign[i] = -1
            s.freec[s.eu[i]] += 1
            s.freec[s.ev[i]] += 1
        s.inc_start[0] = 0
        for x in range(n):
            s.inc_start[x + 1] = s.inc_start[x] + s.freec[x]
        # incidence lists in edge order, matching the Python backend
        _fill_incidence(&s)
        # seed the queue with every vertex; popped from the end as in Python
        for x in range(n):
            s.queue[x] = x
        s.nqueue = n
        if not propagate(&s):
            return 0, None, s.nodes, s.props
        count = rec(&s, 0)
        if s.overflow:
            raise OverflowError("search node limit exceeded")
        first = None
        if s.have_first:
            first = [s.first[i] for i in range(m)]
        return count, first, s.nodes, s.props
    finally:
        cfree(s.eu)
        cfree(s.ev)
        cfree(s.res)
        cfree(s.need)
        cfree(s.freec)
        cfree(s.inc_start)
        cfree(s.inc)
        cfree(s.assign)
        cfree(s.trail)
        cfree(s.queue)
        cfree(s.first)


cdef void _fill_incidence(Search *s):
    cdef int i, x
    cdef int *fill = <int *> malloc((s.n + 1) * sizeof(int))
    for x in range(s.n):
        fill[x] = s.inc_start[x]
    for i in range(s.m):
        s.inc[fill[s.eu[i]]] = i
        fill[s.eu[i]] += 1
        s.inc[fill[s.ev[i]]] = i
        fill[s.ev[i]] += 1
    cfree(fill)


def cut_scan(int n, eu, ev, int kmax):
    cdef int m = len(eu)
    cdef int i, x, y, k, inside, delta, low
    cdef long long g, mask = 0, top
    cdef int size = 0, best = -1
    if n <= 1:
        return [], 0
    cdef int *deg = <int *> malloc((n + 1) * sizeof(int))
    cdef int *start = <int *> malloc((n + 2) * sizeof(int))
    cdef int *adj = <int *> malloc((2 * m + 1) * sizeof(int))
    cdef int *fill = <int *> malloc((n + 1) * sizeof(int))
    out = []
    try:
        for x in range(n):
            deg[x] = 0
        for i in range(m):
            if eu[i] != ev[i]:
                deg[<int> eu[i]] += 1
                deg[<int> ev[i]] += 1
        start[0] = 0
        for x in range(n):
            start[x + 1] = start[x] + deg[x]
            fill[x] = start[x]
        for i in range(m):
            x = eu[i]
            y = ev[i]
            if x != y:
                adj[fill[x]] = y
                fill[x] += 1
                adj[fill[y]] = x
                fill[y] += 1
        top = (<long long> 1) << (n - 1)
        g = 1
        while g < top:
            low = 0
            while not ((g >> low) & 1):
                low += 1
            x = low + 1
            inside = (mask >> x) & 1
            delta = 0
            for k in range(start[x], start[x + 1]):
                y = adj[k]
                if ((mask >> y) & 1) == inside:
                    delta += 1
                else:
                    delta -= 1
            mask ^= (<long long> 1) << x
            size += delta
            if best < 0 or size < best:
                best = size
            if size <= kmax:
                out.append(mask)
            g += 1
    finally:
        cfree(deg)
        cfree(start)
        cfree(adj)
        cfree(fill)
    out.sort()
    return out, best
