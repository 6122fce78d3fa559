"""Hot inner loops: grid A* and 2-opt simulated annealing.

Every kernel here takes and returns plain numpy arrays and scalars so that
the same source compiles under numba or runs unchanged as Python (see
``_accel``).  A* additionally has a ``heapq`` implementation which is what the
pure-Python path dispatches to, because an array-backed heap interpreted by
CPython is several times slower than ``heapq``.

Random numbers for annealing come from SplitMix64 so that compiled and
interpreted runs consume an identical stream.
"""

import heapq
import math

import numpy as np

from ._accel import JIT_ENABLED, kernel

SA_RNG_NAME = "splitmix64"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO_NEG53 = 1.0 / 9007199254740992.0

# ---------------------------------------------------------------------------
# SplitMix64.  The state lives in a 1-element uint64 array.
# ---------------------------------------------------------------------------

if JIT_ENABLED:
    _G = np.uint64(_GOLDEN)
    _M1 = np.uint64(_MIX1)
    _M2 = np.uint64(_MIX2)
    _S11 = np.uint64(11)
    _S27 = np.uint64(27)
    _S30 = np.uint64(30)
    _S31 = np.uint64(31)

    @kernel
    def _next_u64(state):
        state[0] += _G
        z = state[0]
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        return z ^ (z >> _S31)

    @kernel
    def _rand_below(state, bound):
        return np.int64(_next_u64(state) % np.uint64(bound))

    @kernel
    def _rand_unit(state):
        return np.float64(_next_u64(state) >> _S11) * _TWO_NEG53

else:

    def _next_u64(state):
        s = (int(state[0]) + _GOLDEN) & _MASK64
        state[0] = s
        z = ((s ^ (s >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def _rand_below(state, bound):
        return _next_u64(state) % int(bound)

    def _rand_unit(state):
        return (_next_u64(state) >> 11) * _TWO_NEG53


def splitmix64(seed, count):
    """Reference SplitMix64 outputs, for tests and documentation."""
    state = np.array([seed & _MASK64], dtype=np.uint64)
    return [int(_next_u64(state)) for _ in range(count)]


# ---------------------------------------------------------------------------
# A*
# ---------------------------------------------------------------------------

_DR = np.array([-1, 0, 1, 0], dtype=np.int64)
_DC = np.array([0, -1, 0, 1], dtype=np.int64)


@kernel
def _heap_less(hf, hg, hs, i, j):
    if hf[i] != hf[j]:
        return hf[i] < hf[j]
    if hg[i] != hg[j]:
        return hg[i] > hg[j]
    return hs[i] < hs[j]


@kernel
def _heap_swap(hf, hg, hs, hn, i, j):
    hf[i], hf[j] = hf[j], hf[i]
    hg[i], hg[j] = hg[j], hg[i]
    hs[i], hs[j] = hs[j], hs[i]
    hn[i], hn[j] = hn[j], hn[i]


@kernel
def _heap_push(hf, hg, hs, hn, size, f, g, s, node):
    hf[size] = f
    hg[size] = g
    hs[size] = s
    hn[size] = node
    i = size
    while i > 0:
        p = (i - 1) // 2
        if _heap_less(hf, hg, hs, i, p):
            _heap_swap(hf, hg, hs, hn, i, p)
            i = p
        else:
            break
    return size + 1


@kernel
def _heap_pop(hf, hg, hs, hn, size):
    # Moves the minimum to slot size-1 and restores the heap on [0, size-1).
    last = size - 1
    _heap_swap(hf, hg, hs, hn, 0, last)
    i = 0
    while True:
        left = 2 * i + 1
        if left >= last:
            break
        child = left
        right = left + 1
        if right < last and _heap_less(hf, hg, hs, right, left):
            child = right
        if _heap_less(hf, hg, hs, child, i):
            _heap_swap(hf, hg, hs, hn, child, i)
            i = child
        else:
            break
    return last


@kernel
def astar_arrays(blocked, sr, sc, gr, gc):
    """A* over a boolean grid with an array-backed binary heap.

    Returns ``(cost, flat_path)``; ``cost`` is -1 and the path empty when the
    goal is unreachable.  Open-list order is (f, larger g, insertion order).
    """
    rows, cols = blocked.shape
    n = rows * cols
    g_best = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    closed = np.zeros(n, dtype=np.bool_)
    cap = 4 * n + 1
    hf = np.empty(cap, dtype=np.int64)
    hg = np.empty(cap, dtype=np.int64)
    hs = np.empty(cap, dtype=np.int64)
    hn = np.empty(cap, dtype=np.int64)
    start = sr * cols + sc
    goal = gr * cols + gc
    g_best[start] = 0
    size = _heap_push(hf, hg, hs, hn, 0, abs(sr - gr) + abs(sc - gc), 0, 0, start)
    seq = 1
    found = False
    while size > 0:
        size = _heap_pop(hf, hg, hs, hn, size)
        node = hn[size]
        g = hg[size]
        if closed[node] or g != g_best[node]:
            continue
        closed[node] = True
        if node == goal:
            found = True
            break
        r = node // cols
        c = node - r * cols
        for m in range(4):
            nr = r + _DR[m]
            nc = c + _DC[m]
            if nr < 0 or nr >= rows or nc < 0 or nc >= cols or blocked[nr, nc]:
                continue
            nb = nr * cols + nc
            if closed[nb]:
                continue
            ng = g + 1
            if g_best[nb] == -1 or ng < g_best[nb]:
                g_best[nb] = ng
                parent[nb] = node
                h = abs(nr - gr) + abs(nc - gc)
                size = _heap_push(hf, hg, hs, hn, size, ng + h, ng, seq, nb)
                seq += 1
    if not found:
        return -1, np.empty(0, dtype=np.int64)
    cost = g_best[goal]
    path = np.empty(cost + 1, dtype=np.int64)
    node = goal
    for k in range(cost, -1, -1):
        path[k] = node
        node = parent[node]
    return cost, path


def astar_heapq(blocked, sr, sc, gr, gc):
    """Same contract and tie-breaking as :func:`astar_arrays`, using heapq."""
    rows, cols = blocked.shape
    grid = blocked.tolist()
    g_best = {}
    parent = {}
    closed = set()
    start = (sr, sc)
    goal = (gr, gc)
    g_best[start] = 0
    heap = [(abs(sr - gr) + abs(sc - gc), 0, 0, start)]
    seq = 1
    found = False
    while heap:
        _, neg_g, _, node = heapq.heappop(heap)
        g = -neg_g
        if node in closed or g != g_best[node]:
            continue
        closed.add(node)
        if node == goal:
            found = True
            break
        r, c = node
        for dr, dc in ((-1, 0), (0, -1), (1, 0), (0, 1)):
            nr = r + dr
            nc = c + dc
            if nr < 0 or nr >= rows or nc < 0 or nc >= cols or grid[nr][nc]:
                continue
            nb = (nr, nc)
            if nb in closed:
                continue
            ng = g + 1
            old = g_best.get(nb)
            if old is None or ng < old:
                g_best[nb] = ng
                parent[nb] = node
                heapq.heappush(heap, (ng + abs(nr - gr) + abs(nc - gc), -ng, seq, nb))
                seq += 1
    if not found:
        return -1, np.empty(0, dtype=np.int64)
    cost = g_best[goal]
    path = np.empty(cost + 1, dtype=np.int64)
    node = goal
    for k in range(cost, -1, -1):
        path[k] = node[0] * cols + node[1]
        node = parent.get(node)
    return cost, path


astar_grid = astar_arrays if JIT_ENABLED else astar_heapq


# ---------------------------------------------------------------------------
# Simulated annealing over a visiting order
# ---------------------------------------------------------------------------


@kernel
def route_cost(d, order, closed):
    n = order.shape[0]
    total = 0
    for k in range(n - 1):
        total += d[order[k], order[k + 1]]
    if closed and n > 1:
        total += d[order[n - 1], order[0]]
    return total


def count_levels(t0, cooling, tmin):
    """Number of temperature levels the geometric schedule visits."""
    levels = 0
    t = t0
    while t > tmin:
        levels += 1
        t *= cooling
    return levels


@kernel
def anneal_route(d, order, lo, hi, closed, t0, cooling, iters, tmin, seed,
                 hist_iter, hist_temp, hist_cur, hist_best):
    """2-opt annealing of ``order[lo..hi]`` (inclusive) on a symmetric matrix.

    ``order`` is overwritten with the best order seen; the best cost is
    returned.  One history row is written per temperature level.
    """
    n = order.shape[0]
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    cur = order.copy()
    cur_cost = route_cost(d, cur, closed)
    best_cost = cur_cost
    span = hi - lo + 1
    t = t0
    level = 0
    done = 0
    while t > tmin:
        if span >= 2:
            for _ in range(iters):
                i = lo + _rand_below(state, span)
                j = lo + _rand_below(state, span - 1)
                if j >= i:
                    j += 1
                if i > j:
                    i, j = j, i
                a = cur[i - 1]
                b = cur[i]
                c = cur[j]
                e = cur[(j + 1) % n]
                delta = d[a, c] + d[b, e] - d[a, b] - d[c, e]
                accept = delta <= 0
                if not accept:
                    accept = _rand_unit(state) < math.exp(-delta / t)
                if accept:
                    lo_k = i
                    hi_k = j
                    while lo_k < hi_k:
                        cur[lo_k], cur[hi_k] = cur[hi_k], cur[lo_k]
                        lo_k += 1
                        hi_k -= 1
                    cur_cost += delta
                    if cur_cost < best_cost:
                        best_cost = cur_cost
                        for k in range(n):
                            order[k] = cur[k]
            done += iters
        hist_iter[level] = done
        hist_temp[level] = t
        hist_cur[level] = cur_cost
        hist_best[level] = best_cost
        level += 1
        t *= cooling
    return best_cost
