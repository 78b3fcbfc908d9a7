"""Pure-Python reference kernels.

These mirror ``_kernels.pyx`` line for line so both backends explore the
search tree in the same order and report identical statistics.

Vertices are dense indices ``0..n-1``. Residuals and demands are kept in
``{0, 1, 2}``.
"""

SOLVE = 0
COUNT = 1


def orient_search(n, eu, ev, res0, need, mode, limit=0):
    """Backtracking search for mod-3 orientations of the free edges.

    ``eu[i] < ev[i]`` index the endpoints of free edge ``i``; choice 0 puts
    the tail at ``eu[i]`` and is tried first. Returns
    ``(count, assignment, nodes, propagations)`` where ``assignment`` is the
    first solution found (or ``None``).
    """
    m = len(eu)
    res = list(res0)
    free = [0] * n
    inc = [[] for _ in range(n)]
    for i in range(m):
        inc[eu[i]].append(i)
        inc[ev[i]].append(i)
        free[eu[i]] += 1
        free[ev[i]] += 1
    assign = [-1] * m
    trail = []
    stats = [0, 0]  # nodes, propagations
    first = [None]

    def put(i, c):
        # c == 0: eu -> ev
        u, v = eu[i], ev[i]
        if c == 0:
            res[u] = (res[u] + 2) % 3
            res[v] = (res[v] + 1) % 3
        else:
            res[v] = (res[v] + 2) % 3
            res[u] = (res[u] + 1) % 3
        assign[i] = c
        free[u] -= 1
        free[v] -= 1
        trail.append(i)

    def undo_to(mark):
        while len(trail) > mark:
            i = trail.pop()
            u, v = eu[i], ev[i]
            if assign[i] == 0:
                res[u] = (res[u] + 1) % 3
                res[v] = (res[v] + 2) % 3
            else:
                res[v] = (res[v] + 1) % 3
                res[u] = (res[u] + 2) % 3
            assign[i] = -1
            free[u] += 1
            free[v] += 1

    def settle(x, queue):
        # returns False on conflict
        if free[x] == 0:
            return res[x] == need[x]
        if free[x] == 1:
            for j in inc[x]:
                if assign[j] < 0:
                    break
            if (res[x] + 1) % 3 == need[x]:
                c = 0 if ev[j] == x else 1
            elif (res[x] + 2) % 3 == need[x]:
                c = 0 if eu[j] == x else 1
            else:
                return False
            put(j, c)
            stats[1] += 1
            queue.append(eu[j])
            queue.append(ev[j])
        return True

    def propagate(queue):
        while queue:
            x = queue.pop()
            if not settle(x, queue):
                return False
        return True

    def rec(start):
        i = start
        while i < m and assign[i] >= 0:
            i += 1
        if i == m:
            if first[0] is None:
                first[0] = list(assign)
            return 1
        total = 0
        for c in (0, 1):
            stats[0] += 1
            mark = len(trail)
            put(i, c)
            if propagate([eu[i], ev[i]]):
                total += rec(i + 1)
            undo_to(mark)
            if total and mode == SOLVE:
                return total
            if limit and stats[0] > limit:
                raise OverflowError("search node limit exceeded")
        return total

    queue = list(range(n))
    if not propagate(queue):
        return 0, None, stats[0], stats[1]
    count = rec(0)
    return count, first[0], stats[0], stats[1]


def cut_scan(n, eu, ev, kmax):
    """All bipartitions of ``0..n-1`` with at most ``kmax`` crossing edges.

    Only masks not containing vertex 0 are visited, so each bipartition is
    seen once; the reported mask is the side without vertex 0. Walks masks
    in Gray-code order and updates the cut size incrementally. Returns
    ``(masks, global_min)`` with masks sorted ascending.
    """
    if n <= 1:
        return [], 0
    adj = [[] for _ in range(n)]
    for a, b in zip(eu, ev):
        if a != b:
            adj[a].append(b)
            adj[b].append(a)
    out = []
    best = -1
    mask = 0
    size = 0
    bits = n - 1
    for g in range(1, 1 << bits):
        # flip the lowest set bit position of g
        low = (g & -g).bit_length() - 1
        x = low + 1
        inside = (mask >> x) & 1
        delta = 0
        for y in adj[x]:
            if ((mask >> y) & 1) == inside:
                delta += 1
            else:
                delta -= 1
        mask ^= 1 << x
        size += delta
        if best < 0 or size < best:
            best = size
        if size <= kmax:
            out.append(mask)
    out.sort()
    return out, best
