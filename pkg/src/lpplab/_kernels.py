"""Compiled inner loops. Every sweep reads only already-finished sites, so the
results are deterministic and independent of any outer scheduling."""
import numpy as np
from numba import njit

NEG_INF = -np.inf

# step codes of a forward passage table
SOURCE, FROM_E1, FROM_E2, TIE, UNREACHED = 0, 1, 2, 3, -1


@njit(cache=True, nogil=True)
def forward_table(w, si, sj):
    """G[v] = max over up-right paths si,sj -> v of the weights, last excluded."""
    W, H = w.shape
    G = np.full((W, H), NEG_INF)
    step = np.full((W, H), UNREACHED, dtype=np.int8)
    G[si, sj] = 0.0
    step[si, sj] = SOURCE
    for i in range(si, W):
        for j in range(sj, H):
            if i == si and j == sj:
                continue
            a = NEG_INF
            b = NEG_INF
            if i > si:
                a = G[i - 1, j] + w[i - 1, j]
            if j > sj:
                b = G[i, j - 1] + w[i, j - 1]
            if a > b:
                G[i, j] = a
                step[i, j] = FROM_E1
            elif b > a:
                G[i, j] = b
                step[i, j] = FROM_E2
            else:
                G[i, j] = a
                step[i, j] = TIE
    return G, step


@njit(cache=True, nogil=True)
def corner_passage_time(w):
    """G from (0,0) to (W-1,H-1) with a rolling column buffer."""
    W, H = w.shape
    col = np.empty(H)
    col[0] = 0.0
    for j in range(1, H):
        col[j] = col[j - 1] + w[0, j - 1]
    for i in range(1, W):
        col[0] = col[0] + w[i - 1, 0]
        for j in range(1, H):
            a = col[j] + w[i - 1, j]
            b = col[j - 1] + w[i, j - 1]
            col[j] = a if a > b else b
    return col[H - 1]


@njit(cache=True, nogil=True)
def reverse_table(w, vi, vj):
    """Gt[x] = G_{x,v} for all x <= v (v = (vi, vj)), last weight excluded."""
    Gt = np.empty((vi + 1, vj + 1))
    Gt[vi, vj] = 0.0
    for i in range(vi - 1, -1, -1):
        Gt[i, vj] = Gt[i + 1, vj] + w[i, vj]
    for j in range(vj - 1, -1, -1):
        Gt[vi, j] = Gt[vi, j + 1] + w[vi, j]
    for i in range(vi - 1, -1, -1):
        for j in range(vj - 1, -1, -1):
            a = Gt[i + 1, j]
            b = Gt[i, j + 1]
            Gt[i, j] = w[i, j] + (a if a > b else b)
    return Gt


@njit(cache=True, nogil=True)
def level_values(w, n):
    """G_{0,(k,n-k)} for k = 0..n by an antidiagonal sweep."""
    cur = np.zeros(1)
    for lvl in range(n):
        nxt = np.empty(lvl + 2)
        for k in range(lvl + 2):
            a = NEG_INF
            b = NEG_INF
            if k >= 1:
                a = cur[k - 1] + w[k - 1, lvl + 1 - k]
            if k <= lvl:
                b = cur[k] + w[k, lvl - k]
            nxt[k] = a if a > b else b
        cur = nxt
    return cur


@njit(cache=True, nogil=True)
def interface_levels(w, n):
    """Passage times from e1 and from e2 on every antidiagonal up to level n.

    Returns (G1, G2) of shape (n+1, n+1): row ``lvl`` holds G_{e_i,(k,lvl-k)}
    for k = 0..lvl, with -inf where no admissible path exists.
    """
    G1 = np.full((n + 1, n + 1), NEG_INF)
    G2 = np.full((n + 1, n + 1), NEG_INF)
    G1[1, 1] = 0.0
    G2[1, 0] = 0.0
    for lvl in range(1, n):
        for k in range(lvl + 2):
            a1 = NEG_INF
            b1 = NEG_INF
            a2 = NEG_INF
            b2 = NEG_INF
            if k >= 1:
                wa = w[k - 1, lvl + 1 - k]
                a1 = G1[lvl, k - 1] + wa
                a2 = G2[lvl, k - 1] + wa
            if k <= lvl:
                wb = w[k, lvl - k]
                b1 = G1[lvl, k] + wb
                b2 = G2[lvl, k] + wb
            G1[lvl + 1, k] = a1 if a1 > b1 else b1
            G2[lvl + 1, k] = a2 if a2 > b2 else b2
    return G1, G2


@njit(cache=True, nogil=True)
def interface_last_level(w, n):
    """Like ``interface_levels`` but keeps only level n (rolling buffers)."""
    c1 = np.full(2, NEG_INF)
    c2 = np.full(2, NEG_INF)
    c1[1] = 0.0
    c2[0] = 0.0
    for lvl in range(1, n):
        n1 = np.empty(lvl + 2)
        n2 = np.empty(lvl + 2)
        for k in range(lvl + 2):
            a1 = NEG_INF
            b1 = NEG_INF
            a2 = NEG_INF
            b2 = NEG_INF
            if k >= 1:
                wa = w[k - 1, lvl + 1 - k]
                a1 = c1[k - 1] + wa
                a2 = c2[k - 1] + wa
            if k <= lvl:
                wb = w[k, lvl - k]
                b1 = c1[k] + wb
                b2 = c2[k] + wb
            n1[k] = a1 if a1 > b1 else b1
            n2[k] = a2 if a2 > b2 else b2
        c1 = n1
        c2 = n2
    return c1, c2


@njit(cache=True, nogil=True)
def gne_table(w, horiz, vert):
    """Stationary passage times toward the corner v = (W, H) of a W x H bulk.

    ``horiz[k] = B(v-(k+1)e1, v-k e1)`` and ``vert[k] = B(v-(k+1)e2, v-k e2)``.
    Returns G of shape (W+1, H+1) with G[W, H] = 0.
    """
    W, H = w.shape
    G = np.empty((W + 1, H + 1))
    G[W, H] = 0.0
    for k in range(W):
        G[W - k - 1, H] = G[W - k, H] + horiz[k]
    for k in range(H):
        G[W, H - k - 1] = G[W, H - k] + vert[k]
    for i in range(W - 1, -1, -1):
        for j in range(H - 1, -1, -1):
            a = G[i + 1, j]
            b = G[i, j + 1]
            G[i, j] = w[i, j] + (a if a > b else b)
    return G


@njit(cache=True, nogil=True)
def tandem(A0, S):
    """Push inter-arrival times A0 (length N) through K FIFO stations.

    S has shape (N+1, K); returns A of shape (N, K+1) and W of shape (N+1, K)
    with W[0, k] = 0 (every station starts empty).
    """
    N = A0.shape[0]
    K = S.shape[1]
    A = np.empty((N, K + 1))
    W = np.empty((N + 1, K))
    for n in range(N):
        A[n, 0] = A0[n]
    for k in range(K):
        W[0, k] = 0.0
        for n in range(N):
            x = W[n, k] + S[n, k] - A[n, k]
            W[n + 1, k] = x if x > 0.0 else 0.0
            idle = A[n, k] - S[n, k] - W[n, k]
            A[n, k + 1] = (idle if idle > 0.0 else 0.0) + S[n + 1, k]
    return A, W


@njit(cache=True, nogil=True)
def lindley(A, S, w0):
    n = A.shape[0]
    W = np.empty(n + 1)
    W[0] = w0
    for i in range(n):
        x = W[i] + S[i] - A[i]
        W[i + 1] = x if x > 0.0 else 0.0
    return W


@njit(cache=True, nogil=True)
def follow_min_gradient(B1, B2, si, sj, tie_e2, max_len):
    """Walk from (si, sj) stepping along the smaller of B1, B2.

    B1 has shape (W, H+1) and B2 shape (W+1, H); the walk stops when the next
    step would leave the bulk [0, W) x [0, H). Returns the visited sites.
    """
    W = B1.shape[0]
    H = B2.shape[1]
    out = np.empty((max_len + 1, 2), dtype=np.int64)
    i, j = si, sj
    out[0, 0] = i
    out[0, 1] = j
    m = 0
    while m < max_len and i < W and j < H:
        b1 = B1[i, j]
        b2 = B2[i, j]
        if b1 < b2 or (b1 == b2 and not tie_e2):
            i += 1
        else:
            j += 1
        m += 1
        out[m, 0] = i
        out[m, 1] = j
    return out[: m + 1]


@njit(cache=True, nogil=True)
def percolation_front(U, p, offset, start_lo, start_hi):
    """Right edge of oriented site percolation, level by level.

    Site (k, n-k) is tracked by column ``k + offset`` of ``U``; it is open at
    level n >= 1 iff ``U[n-1, k + offset] < p``. Level 0 holds the occupied
    columns [start_lo, start_hi]. Returns a_n for n = 0..levels, with
    ``-(offset + 1)`` once the front has died.
    """
    levels, width = U.shape
    cur = np.zeros(width, dtype=np.bool_)
    for c in range(start_lo, start_hi + 1):
        cur[c] = True
    a = np.empty(levels + 1, dtype=np.int64)
    a[0] = start_hi - offset
    nxt = np.zeros(width, dtype=np.bool_)
    lo = start_lo
    hi = start_hi
    for n in range(levels):
        new_lo = width
        new_hi = -1
        top = hi + 1 if hi + 1 < width else width - 1
        for c in range(lo, top + 1):
            reach = cur[c] or (c >= 1 and cur[c - 1])
            o = reach and U[n, c] < p
            nxt[c] = o
            if o:
                if c < new_lo:
                    new_lo = c
                new_hi = c
        for c in range(lo, top + 1):
            cur[c] = nxt[c]
            nxt[c] = False
        if new_hi < 0:
            for m in range(n + 1, levels + 1):
                a[m] = -(offset + 1)
            return a
        lo = new_lo
        hi = new_hi
        a[n + 1] = hi - offset
    return a
