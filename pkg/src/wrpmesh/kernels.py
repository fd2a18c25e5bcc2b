"""Hot loops: float segment pricing, Dijkstra variants and polyline refinement.

Everything here works on flat numpy arrays so that it compiles under numba;
with ``WRP_NO_NUMBA=1`` the same code runs as plain Python.
"""
import math

import numpy as np

from ._accel import kernel

INF = np.inf
# Lattice corners are integers, so every breakpoint parameter of a corner-to-corner
# segment is a ratio of small integers; classification slack far below that grid.
CLASSIFY_TOL = 1e-9


@kernel
def cell_weight(hexmode, a, b, weights, width, height):
    """Weight of square cell (col=a, row=b) or hex cell (q=a, r=b); inf outside."""
    if hexmode:
        row = b
        col = a + (b // 2)
    else:
        col = a
        row = b
    if row < 0 or row >= height or col < 0 or col >= width:
        return INF
    return weights[row * width + col]


@kernel
def point_weight(hexmode, mx, my, weights, width, height):
    """Price of the open piece around lattice point (mx, my) of a corner segment."""
    if hexmode:
        qf = mx / 2.0 - my / 6.0
        rf = my / 3.0
        sf = -qf - rf
        rq = np.floor(qf + 0.5)
        rr = np.floor(rf + 0.5)
        rs = np.floor(sf + 0.5)
        dq = abs(rq - qf)
        dr = abs(rr - rf)
        ds = abs(rs - sf)
        if dq > dr and dq > ds:
            rq = -rr - rs
        elif dr > ds:
            rr = -rq - rs
        q0 = int(rq)
        r0 = int(rr)
        best = INF
        second = INF
        wbest = INF
        wsecond = INF
        for k in range(7):
            if k == 0:
                q, r = q0, r0
            elif k == 1:
                q, r = q0 + 1, r0
            elif k == 2:
                q, r = q0 + 1, r0 - 1
            elif k == 3:
                q, r = q0, r0 - 1
            elif k == 4:
                q, r = q0 - 1, r0
            elif k == 5:
                q, r = q0 - 1, r0 + 1
            else:
                q, r = q0, r0 + 1
            ex = mx - (2 * q + r)
            ey = my - 3 * r
            d = 3.0 * ex * ex + ey * ey
            wv = cell_weight(True, q, r, weights, width, height)
            if d < best:
                second = best
                wsecond = wbest
                best = d
                wbest = wv
            elif d < second:
                second = d
                wsecond = wv
        if second - best > CLASSIFY_TOL:
            return wbest
        return min(wbest, wsecond)
    rx = np.floor(mx + 0.5)
    ry = np.floor(my + 0.5)
    if abs(mx - rx) < CLASSIFY_TOL:
        yi = int(np.floor(my))
        xi = int(rx)
        return min(cell_weight(False, xi - 1, yi, weights, width, height),
                   cell_weight(False, xi, yi, weights, width, height))
    if abs(my - ry) < CLASSIFY_TOL:
        xi = int(np.floor(mx))
        yi = int(ry)
        return min(cell_weight(False, xi, yi - 1, weights, width, height),
                   cell_weight(False, xi, yi, weights, width, height))
    return cell_weight(False, int(np.floor(mx)), int(np.floor(my)), weights, width, height)


@kernel
def _add_breaks(lams, k, f0, f1, step):
    if f0 == f1:
        return k
    lo = min(f0, f1)
    hi = max(f0, f1)
    j = int(math.ceil(lo / step))
    while j * step <= hi:
        lam = (j * step - f0) / (f1 - f0)
        if lam > 0.0 and lam < 1.0:
            lams[k] = lam
            k += 1
        j += 1
    return k


@kernel
def corner_segment_cost(hexmode, x0, y0, x1, y1, weights, width, height, sx, sy):
    """Weighted length of the segment between two integer lattice points."""
    dx = x1 - x0
    dy = y1 - y0
    length = math.sqrt((dx * sx) ** 2 + (dy * sy) ** 2)
    cap = int(abs(dx) + abs(dx - dy) + abs(dx + dy) + abs(dy)) + 8
    lams = np.empty(cap)
    lams[0] = 0.0
    lams[1] = 1.0
    k = 2
    if hexmode:
        k = _add_breaks(lams, k, x0, x1, 1.0)
        k = _add_breaks(lams, k, x0 - y0, x1 - y1, 2.0)
        k = _add_breaks(lams, k, x0 + y0, x1 + y1, 2.0)
    else:
        k = _add_breaks(lams, k, x0, x1, 1.0)
        k = _add_breaks(lams, k, y0, y1, 1.0)
    ordered = np.sort(lams[:k])
    total = 0.0
    for i in range(k - 1):
        l0 = ordered[i]
        l1 = ordered[i + 1]
        if l1 - l0 < 1e-12:
            continue
        m = 0.5 * (l0 + l1)
        wv = point_weight(hexmode, x0 + m * dx, y0 + m * dy, weights, width, height)
        if wv == INF:
            return INF
        total += wv * (length * (l1 - l0))
    return total


@kernel
def complete_graph_dijkstra(hexmode, cx, cy, usable, weights, width, height, sx, sy, s, t):
    """Dijkstra on the complete corner graph, pricing each pair on first relaxation.

    Vertices are scanned in id order, so ties resolve towards the smaller id.
    Returns (dist, pred).
    """
    n = cx.shape[0]
    dist = np.full(n, INF)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    dist[s] = 0.0
    for _ in range(n):
        u = -1
        best = INF
        for v in range(n):
            if not done[v] and dist[v] < best:
                best = dist[v]
                u = v
        if u < 0:
            break
        done[u] = True
        if u == t:
            break
        for v in range(n):
            if done[v] or not (usable[v] or v == t):
                continue
            c = corner_segment_cost(hexmode, cx[u], cy[u], cx[v], cy[v], weights, width, height, sx, sy)
            if c == INF:
                continue
            nd = best + c
            if nd < dist[v] or (nd == dist[v] and u < pred[v]):
                dist[v] = nd
                pred[v] = u
    return dist, pred


@kernel
def _heap_push(keys, vals, size, key, val):
    i = size
    keys[i] = key
    vals[i] = val
    while i > 0:
        p = (i - 1) // 2
        if keys[p] < keys[i] or (keys[p] == keys[i] and vals[p] <= vals[i]):
            break
        keys[p], keys[i] = keys[i], keys[p]
        vals[p], vals[i] = vals[i], vals[p]
        i = p
    return size + 1


@kernel
def _heap_pop(keys, vals, size):
    key = keys[0]
    val = vals[0]
    size -= 1
    keys[0] = keys[size]
    vals[0] = vals[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        c = left
        right = left + 1
        if right < size and (keys[right] < keys[left] or (keys[right] == keys[left] and vals[right] < vals[left])):
            c = right
        if keys[i] < keys[c] or (keys[i] == keys[c] and vals[i] <= vals[c]):
            break
        keys[c], keys[i] = keys[i], keys[c]
        vals[c], vals[i] = vals[i], vals[c]
        i = c
    return key, val, size


@kernel
def csr_dijkstra(indptr, indices, costs, s, t):
    """Binary-heap Dijkstra keyed on (cost, vertex id); inf edges are skipped.

    ``t < 0`` computes the full tree.  Returns (dist, pred).
    """
    n = indptr.shape[0] - 1
    dist = np.full(n, INF)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    cap = indices.shape[0] + 2
    keys = np.empty(cap)
    vals = np.empty(cap, dtype=np.int64)
    size = 0
    dist[s] = 0.0
    size = _heap_push(keys, vals, size, 0.0, s)
    while size > 0:
        d, u, size = _heap_pop(keys, vals, size)
        if done[u] or d > dist[u]:
            continue
        done[u] = True
        if u == t:
            break
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            c = costs[e]
            if done[v] or c == INF:
                continue
            nd = d + c
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                size = _heap_push(keys, vals, size, nd, v)
            elif nd == dist[v] and u < pred[v]:
                pred[v] = u
    return dist, pred


# -- refinement of a fixed crossing sequence -------------------------------------


@kernel
def chain_cost(px, py, c):
    total = 0.0
    for i in range(c.shape[0]):
        if c[i] == 0.0:
            continue
        total += c[i] * math.hypot(px[i + 1] - px[i], py[i + 1] - py[i])
    return total


@kernel
def _local_grad(px, py, c, j, ux, uy):
    """First and second derivative of the two segment terms at node j along (ux, uy)."""
    g = 0.0
    h = 0.0
    for side in range(2):
        if side == 0:
            o = j - 1
            w = c[j - 1]
        else:
            o = j + 1
            w = c[j]
        if w == 0.0:
            continue
        dx = px[j] - px[o]
        dy = py[j] - py[o]
        ln = math.hypot(dx, dy)
        if ln <= 0.0:
            continue
        dot = dx * ux + dy * uy
        g += w * dot / ln
        cr = dx * uy - dy * ux
        h += w * cr * cr / (ln * ln * ln)
    return g, h


@kernel
def _set_node(px, py, j, ax, ay, ux, uy, t):
    px[j] = ax + t * ux
    py[j] = ay + t * uy


@kernel
def _minimize_node(px, py, c, j, ax, ay, ux, uy, t0):
    _set_node(px, py, j, ax, ay, ux, uy, 0.0)
    g0, _ = _local_grad(px, py, c, j, ux, uy)
    if g0 >= 0.0:
        return 0.0
    _set_node(px, py, j, ax, ay, ux, uy, 1.0)
    g1, _ = _local_grad(px, py, c, j, ux, uy)
    if g1 <= 0.0:
        return 1.0
    lo = 0.0
    hi = 1.0
    t = min(max(t0, 0.0), 1.0)
    for _ in range(200):
        _set_node(px, py, j, ax, ay, ux, uy, t)
        g, h = _local_grad(px, py, c, j, ux, uy)
        if g == 0.0:
            break
        if g > 0.0:
            hi = t
        else:
            lo = t
        if hi - lo <= 1e-17:
            break
        if h > 0.0:
            tn = t - g / h
        else:
            tn = -1.0
        if not (tn > lo and tn < hi):
            tn = 0.5 * (lo + hi)
        if tn == t:
            break
        t = tn
    _set_node(px, py, j, ax, ay, ux, uy, t)
    return t


@kernel
def coordinate_descent(px, py, c, free_idx, ax, ay, ux, uy, tv, tol, max_iters):
    """Sweep the free nodes, minimising exactly along each edge; returns sweep count."""
    prev = chain_cost(px, py, c)
    sweeps = 0
    while sweeps < max_iters:
        sweeps += 1
        for i in range(free_idx.shape[0]):
            j = free_idx[i]
            tv[i] = _minimize_node(px, py, c, j, ax[i], ay[i], ux[i], uy[i], tv[i])
        cur = chain_cost(px, py, c)
        if prev - cur <= tol * max(prev, 1e-300):
            break
        prev = cur
    return sweeps


@kernel
def _seg_hessian(px, py, a, b, w, uax, uay, ubx, uby):
    """u_a' K u_b for the segment term w*|P_b - P_a|, K = w/L (I - d d'/L^2)."""
    dx = px[b] - px[a]
    dy = py[b] - py[a]
    ln = math.hypot(dx, dy)
    if ln <= 0.0 or w == 0.0:
        return 0.0
    ex = dx / ln
    ey = dy / ln
    pa = uax * ex + uay * ey
    pb = ubx * ex + uby * ey
    return w / ln * (uax * ubx + uay * uby - pa * pb)


@kernel
def newton_polish(px, py, c, free_idx, ax, ay, ux, uy, tv, iters):
    """Projected Newton on the jointly convex chain objective.

    The Hessian is tridiagonal along the chain; nodes pinned at a bound with an
    outward gradient are held fixed for the step.
    """
    nf = free_idx.shape[0]
    if nf == 0:
        return 0
    g = np.zeros(nf)
    diag = np.zeros(nf)
    off = np.zeros(nf)
    step = np.zeros(nf)
    active = np.zeros(nf, dtype=np.bool_)
    cp = np.zeros(nf)
    dp = np.zeros(nf)
    trial_t = np.zeros(nf)
    bx = px.copy()
    by = py.copy()
    cost = chain_cost(px, py, c)
    used = 0
    for it in range(iters):
        used = it + 1
        gmax = 0.0
        for i in range(nf):
            j = free_idx[i]
            gi, _ = _local_grad(px, py, c, j, ux[i], uy[i])
            g[i] = gi
            diag[i] = (_seg_hessian(px, py, j - 1, j, c[j - 1], ux[i], uy[i], ux[i], uy[i])
                       + _seg_hessian(px, py, j, j + 1, c[j], ux[i], uy[i], ux[i], uy[i]))
            off[i] = 0.0
            if i + 1 < nf and free_idx[i + 1] == j + 1:
                off[i] = -_seg_hessian(px, py, j, j + 1, c[j], ux[i], uy[i], ux[i + 1], uy[i + 1])
            active[i] = (tv[i] <= 0.0 and gi > 0.0) or (tv[i] >= 1.0 and gi < 0.0)
            if not active[i]:
                gmax = max(gmax, abs(gi))
        if gmax < 1e-15:
            break
        # Thomas solve on the free subsystem
        for i in range(nf):
            if active[i]:
                diag[i] = 1.0
                g[i] = 0.0
                off[i] = 0.0
                if i > 0:
                    off[i - 1] = 0.0
        for i in range(nf):
            dmin = 1e-12 * (1.0 + abs(diag[i]))
            if diag[i] < dmin:
                diag[i] = dmin
        for i in range(nf):
            lower = off[i - 1] if i > 0 else 0.0
            denom = diag[i] - (lower * cp[i - 1] if i > 0 else 0.0)
            if abs(denom) < 1e-300:
                denom = 1e-300
            cp[i] = off[i] / denom
            dp[i] = (-g[i] - (lower * dp[i - 1] if i > 0 else 0.0)) / denom
        for i in range(nf - 1, -1, -1):
            step[i] = dp[i] - (cp[i] * step[i + 1] if i + 1 < nf else 0.0)
        alpha = 1.0
        improved = False
        while alpha > 1e-12:
            for k in range(px.shape[0]):
                bx[k] = px[k]
                by[k] = py[k]
            for i in range(nf):
                tt = tv[i] + alpha * step[i]
                if tt < 0.0:
                    tt = 0.0
                elif tt > 1.0:
                    tt = 1.0
                trial_t[i] = tt
                _set_node(bx, by, free_idx[i], ax[i], ay[i], ux[i], uy[i], tt)
            trial = chain_cost(bx, by, c)
            if trial <= cost:
                improved = trial < cost
                cost = trial
                for i in range(nf):
                    tv[i] = trial_t[i]
                for k in range(px.shape[0]):
                    px[k] = bx[k]
                    py[k] = by[k]
                break
            alpha *= 0.5
        if not improved:
            break
    return used
