"""Compiled inner loops.

Everything here works on flat int64 arrays so that the public modules can
stay readable while the per-vertex loops run at native speed.  Vertex ids of
plane trees are preorder indices.
"""

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# plane trees
# ---------------------------------------------------------------------------


@njit(cache=True)
def tree_structure(kids):
    """Parent, depth, child rank (1-based) and subtree size in preorder."""
    n = kids.shape[0]
    parent = np.full(n, -1, np.int64)
    depth = np.zeros(n, np.int64)
    rank = np.zeros(n, np.int64)
    size = np.ones(n, np.int64)
    st = np.empty(n, np.int64)
    rem = np.empty(n, np.int64)
    sp = 0
    for j in range(n):
        if j > 0:
            p = st[sp - 1]
            parent[j] = p
            depth[j] = depth[p] + 1
            rank[j] = kids[p] - rem[sp - 1] + 1
            rem[sp - 1] -= 1
            if rem[sp - 1] == 0:
                sp -= 1
        if kids[j] > 0:
            st[sp] = j
            rem[sp] = kids[j]
            sp += 1
    for j in range(n - 1, 0, -1):
        size[parent[j]] += size[j]
    return parent, depth, rank, size


@njit(cache=True)
def contour_sequence(kids, parent, size):
    """Vertices visited by the contour walk, 2N+1 entries."""
    n = kids.shape[0]
    m = 2 * (n - 1) + 1
    c = np.empty(m, np.int64)
    nxt = np.arange(1, n + 1).astype(np.int64)
    cnt = np.zeros(n, np.int64)
    cur = 0
    c[0] = 0
    for t in range(1, m):
        if cnt[cur] < kids[cur]:
            child = nxt[cur]
            nxt[cur] = child + size[child]
            cnt[cur] += 1
            cur = child
        else:
            cur = parent[cur]
        c[t] = cur
    return c


@njit(cache=True)
def modified_height(kids, parent, rank):
    """Strict ancestors whose last child is off the ancestral line."""
    n = kids.shape[0]
    out = np.zeros(n, np.int64)
    for j in range(1, n):
        p = parent[j]
        out[j] = out[p] + (1 if rank[j] < kids[p] else 0)
    return out


@njit(cache=True)
def record_count(w, strict):
    """#{i < j : W(i) (<|<=) min W[i+1..j]} for j = 0..len(w)-2.

    Monotone stack of candidate indices; this is the path-side formula for
    the height (non-strict) and the modified height (strict).
    """
    n = w.shape[0] - 1
    out = np.zeros(n, np.int64)
    st = np.empty(n + 1, np.int64)
    sp = 0
    for j in range(1, n):
        x = w[j]
        if strict:
            while sp > 0 and w[st[sp - 1]] >= x:
                sp -= 1
            if w[j - 1] < x:
                st[sp] = j - 1
                sp += 1
        else:
            while sp > 0 and w[st[sp - 1]] > x:
                sp -= 1
            if w[j - 1] <= x:
                st[sp] = j - 1
                sp += 1
        out[j] = sp
    return out


@njit(cache=True)
def bridge_increments(kids, fy_draws):
    """Label-bridge values b_u(1..k_u) for every vertex, flattened.

    Each internal vertex with k children gets a uniform (k-1)-subset of
    2k-1 slots (partial Fisher-Yates driven by ``fy_draws``); the gaps
    between these bars give a composition of k into k nonnegative parts.
    Returns the bridge values for children in preorder of the children.
    """
    n = kids.shape[0]
    vals = np.empty(n, np.int64)
    slots = np.empty(2 * n + 1, np.int64)
    bar = np.zeros(2 * n + 1, np.bool_)
    d = 0
    pos = 0  # index of next child in preorder filling order
    # children are filled by a second pass; here we store per-parent values
    # contiguously in vals, parent order by preorder.
    for u in range(n):
        k = kids[u]
        if k == 0:
            continue
        m = 2 * k - 1
        for t in range(m):
            slots[t] = t
            bar[t] = False
        for t in range(k - 1):
            r = fy_draws[d]
            d += 1
            tmp = slots[t]
            slots[t] = slots[r]
            slots[r] = tmp
            bar[slots[t]] = True
        acc = 0
        part = 0
        idx = 0
        for t in range(m):
            if bar[t]:
                acc += part - 1
                vals[pos + idx] = acc
                idx += 1
                part = 0
            else:
                part += 1
        vals[pos + idx] = acc + part - 1  # always 0
        pos += k
    return vals


@njit(cache=True)
def labels_from_bridges(kids, parent, rank, vals):
    """Labels from per-parent bridge values stored parent by parent."""
    n = kids.shape[0]
    start = np.zeros(n, np.int64)
    acc = 0
    for u in range(n):
        start[u] = acc
        acc += kids[u]
    lab = np.zeros(n, np.int64)
    for j in range(1, n):
        p = parent[j]
        lab[j] = lab[p] + vals[start[p] + rank[j] - 1]
    return lab


# ---------------------------------------------------------------------------
# two-type / one-type correspondence
# ---------------------------------------------------------------------------


@njit(cache=True)
def js_inverse_kernel(kids, parent, size):
    """One-type tree (preorder ``kids``) to two-type tree.

    Returns (kids2, order) where ``order[v]`` is the one-type index of the
    two-type vertex with preorder index v.
    """
    n = kids.shape[0]
    rl = np.empty(n, np.int64)
    for v in range(n):
        rl[v] = v + size[v] - 1
    # child counts in the two-type tree
    nch = np.zeros(n, np.int64)
    for v in range(n):
        if kids[v] > 0:
            nch[v] = kids[v] - 1
            nch[rl[v]] += 1
    off = np.zeros(n + 1, np.int64)
    for v in range(n):
        off[v + 1] = off[v] + nch[v]
    fill = off[:n].copy()
    ch = np.empty(off[n], np.int64)
    # white u: blacks b with rl[b] == u, top-down (increasing index)
    for b in range(n):
        if kids[b] > 0:
            u = rl[b]
            ch[fill[u]] = b
            fill[u] += 1
    # black b: rightmost leaves of its first k-1 children
    for b in range(n):
        k = kids[b]
        if k > 1:
            c = b + 1
            for _ in range(k - 1):
                ch[fill[b]] = rl[c]
                fill[b] += 1
                c = c + size[c]
    kids2 = np.empty(n, np.int64)
    order = np.empty(n, np.int64)
    st = np.empty(n, np.int64)
    sp = 0
    st[0] = n - 1
    sp = 1
    pos = 0
    while sp > 0:
        sp -= 1
        v = st[sp]
        order[pos] = v
        kids2[pos] = nch[v]
        pos += 1
        for t in range(off[v + 1] - 1, off[v] - 1, -1):
            st[sp] = ch[t]
            sp += 1
    return kids2, order


@njit(cache=True)
def js_forward_kernel(kids2, parent2, depth2, contour2):
    """Two-type tree to one-type tree.

    Returns (kids, order) where ``order[j]`` is the two-type vertex that
    becomes the j-th vertex in preorder of the one-type tree.
    """
    n = kids2.shape[0]
    N = n - 1
    kids = np.empty(n, np.int64)
    order = np.empty(n, np.int64)
    for j in range(N + 1):
        w = contour2[2 * j]
        v = w
        if j < N:
            nx = contour2[2 * j + 1]
            if parent2[nx] == w:
                v = nx
        order[j] = v
        if depth2[v] % 2 == 0:
            kids[j] = 0
        else:
            kids[j] = kids2[v] + 1
    return kids, order


# ---------------------------------------------------------------------------
# mobiles and maps
# ---------------------------------------------------------------------------


@njit(cache=True)
def bdg_kernel(white_corner, corner_label, n_white_ids):
    """Half-edge arrays of the map built from a labelled white contour.

    ``white_corner[i]`` is the vertex id of c_i (i < N) and
    ``corner_label[i]`` its label.  Half-edge 2i is the edge drawn from
    corner i, 2i+1 its twin.  Returns (twin, nextv, succ) with succ = -1
    for corners joined to the distinguished vertex.
    """
    N = white_corner.shape[0]
    lo = corner_label.min()
    hi = corner_label.max()
    span = hi - lo + 1
    nextpos = np.full(span + 1, -1, np.int64)
    succ = np.full(N, -1, np.int64)
    for k in range(2 * N - 1, -1, -1):
        i = k % N
        lab = corner_label[i] - lo
        if k < N and lab > 0:
            succ[k] = nextpos[lab - 1] % N
        nextpos[lab] = k
    twin = np.empty(2 * N, np.int64)
    for i in range(N):
        twin[2 * i] = 2 * i + 1
        twin[2 * i + 1] = 2 * i
    # incoming chords per corner, ordered by offset (k - t) mod N
    cnt = np.zeros(N + 1, np.int64)
    for k in range(N):
        if succ[k] >= 0:
            cnt[succ[k] + 1] += 1
    for t in range(N):
        cnt[t + 1] += cnt[t]
    inc = np.empty(cnt[N], np.int64)
    fill = cnt[:N].copy()
    for k in range(N):
        t = succ[k]
        if t >= 0:
            inc[fill[t]] = k
            fill[t] += 1
    tmp = np.empty(cnt[N], np.int64)
    for t in range(N):
        a = cnt[t]
        b = cnt[t + 1]
        if b - a > 1:
            s = a
            while s < b and inc[s] < t:
                s += 1
            q = 0
            for x in range(s, b):
                tmp[q] = inc[x]
                q += 1
            for x in range(a, s):
                tmp[q] = inc[x]
                q += 1
            for x in range(b - a):
                inc[a + x] = tmp[x]
    # corners per white vertex, ascending
    vc = np.zeros(n_white_ids + 1, np.int64)
    for i in range(N):
        vc[white_corner[i] + 1] += 1
    for v in range(n_white_ids):
        vc[v + 1] += vc[v]
    corners = np.empty(N, np.int64)
    vf = vc[:n_white_ids].copy()
    for i in range(N):
        w = white_corner[i]
        corners[vf[w]] = i
        vf[w] += 1
    nextv = np.empty(2 * N, np.int64)
    seq = np.empty(2 * N, np.int64)
    for v in range(n_white_ids):
        a = vc[v]
        b = vc[v + 1]
        if a == b:
            continue
        q = 0
        for x in range(b - 1, a - 1, -1):  # corners in reverse contour order
            i = corners[x]
            seq[q] = 2 * i
            q += 1
            for y in range(cnt[i], cnt[i + 1]):
                seq[q] = 2 * inc[y] + 1
                q += 1
        for x in range(q):
            nextv[seq[x]] = seq[(x + 1) % q]
    q = 0
    for i in range(N):
        if succ[i] < 0:
            seq[q] = 2 * i + 1
            q += 1
    for x in range(q):
        nextv[seq[x]] = seq[(x + 1) % q]
    return twin, nextv, succ


@njit(cache=True)
def orbit_ids(perm):
    """Cycle id of every element, cycles numbered by smallest element."""
    m = perm.shape[0]
    ids = np.full(m, -1, np.int64)
    c = 0
    for h in range(m):
        if ids[h] < 0:
            x = h
            while ids[x] < 0:
                ids[x] = c
                x = perm[x]
            c += 1
    return ids, c


@njit(cache=True)
def bfs_halfedges(twin, vertex_of, n_vertices, first_he, nextv, source):
    """Graph distances from ``source``; -1 for unreachable vertices."""
    dist = np.full(n_vertices, -1, np.int64)
    queue = np.empty(n_vertices, np.int64)
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        h0 = first_he[v]
        h = h0
        while True:
            w = vertex_of[twin[h]]
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
            h = nextv[h]
            if h == h0:
                break
    return dist


@njit(cache=True)
def canonical_relabel(twin, nextv, root):
    """Relabel half-edges in order of discovery from the root."""
    m = twin.shape[0]
    new = np.full(m, -1, np.int64)
    queue = np.empty(m, np.int64)
    new[root] = 0
    queue[0] = root
    head = 0
    tail = 1
    while head < tail:
        h = queue[head]
        head += 1
        for g in (twin[h], nextv[h]):
            if new[g] < 0:
                new[g] = tail
                queue[tail] = g
                tail += 1
    return new, tail


@njit(cache=True)
def mobile_from_map(twin, nextv, vertex_of, first_he, dist, face_of,
                    n_faces, h0, face_forward):
    """Recover the labelled two-type tree from a pointed map.

    ``h0`` is the root chord oriented downhill.  Returns (kids2, white_of)
    where white_of[v] is the map vertex of the two-type vertex v (or -1
    for black vertices).
    """
    m = twin.shape[0]
    down = np.zeros(m, np.bool_)
    for h in range(m):
        if dist[vertex_of[twin[h]]] == dist[vertex_of[h]] - 1:
            down[h] = True
    # per-face cyclic list of downhill half-edges, in face order
    sigma = np.empty(m, np.int64)
    for h in range(m):
        sigma[h] = nextv[twin[h]]
    if not face_forward:
        inv = np.empty(m, np.int64)
        for h in range(m):
            inv[sigma[h]] = h
        sigma = inv
    fnext = np.full(m, -1, np.int64)
    seen = np.zeros(n_faces, np.bool_)
    for h in range(m):
        f = face_of[h]
        if seen[f] or not down[h]:
            continue
        seen[f] = True
        first = h
        prev = h
        g = sigma[h]
        while g != first:
            if down[g]:
                fnext[prev] = g
                prev = g
            g = sigma[g]
        fnext[prev] = first
    # per-vertex cw successor among downhill half-edges
    vprev = np.empty(m, np.int64)
    for h in range(m):
        vprev[nextv[h]] = h
    cw = np.full(m, -1, np.int64)
    for h in range(m):
        if not down[h]:
            continue
        g = vprev[h]
        while not down[g]:
            g = vprev[g]
        cw[h] = g
    n_edges = m // 2
    kids2 = np.zeros(n_edges + 1, np.int64)
    white_of = np.full(n_edges + 1, -1, np.int64)
    # DFS; stack frames: (kind, anchor half-edge, next half-edge, pos)
    # kind 0: white vertex whose children are cw after anchor, 1: black
    skind = np.empty(2 * n_edges + 2, np.int64)
    sanc = np.empty(2 * n_edges + 2, np.int64)
    scur = np.empty(2 * n_edges + 2, np.int64)
    spos = np.empty(2 * n_edges + 2, np.int64)
    pos = 0
    white_of[0] = vertex_of[h0]
    sp = 0
    skind[0] = 0
    sanc[0] = h0
    scur[0] = h0
    spos[0] = 0
    sp = 1
    root_started = False
    pos = 1
    while sp > 0:
        t = sp - 1
        kind = skind[t]
        anc = sanc[t]
        cur = scur[t]
        if kind == 0:
            # next child: for the root the first child is at h0 itself
            if t == 0 and not root_started:
                root_started = True
                nxt = anc
            else:
                nxt = cw[cur]
                if nxt == anc:
                    sp -= 1
                    continue
            scur[t] = nxt
            kids2[spos[t]] += 1
            skind[sp] = 1
            sanc[sp] = nxt
            scur[sp] = nxt
            spos[sp] = pos
            pos += 1
            sp += 1
        else:
            nxt = fnext[cur]
            if nxt == anc:
                sp -= 1
                continue
            scur[t] = nxt
            kids2[spos[t]] += 1
            white_of[pos] = vertex_of[nxt]
            skind[sp] = 0
            sanc[sp] = nxt
            scur[sp] = nxt
            spos[sp] = pos
            pos += 1
            sp += 1
    return kids2, white_of, pos
