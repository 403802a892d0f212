"""Pure-Python kernels: persistence pairing and skip-gram training.

Fallback for the compiled extension in ``_core.pyx``. Both implementations
follow the exact same operation order (including the internal splitmix64
stream and IEEE double arithmetic), so for identical inputs they return
identical outputs. ``topomargin.backend`` picks one at import time.
"""

import math

import numpy as np

_MASK = (1 << 64) - 1
_GOLD = 0x9E3779B97F4A7C15


def _symdiff(a, b):
    """Symmetric difference of two ascending index lists (Z/2 column add)."""
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        x, y = a[i], b[j]
        if x < y:
            out.append(x)
            i += 1
        elif y < x:
            out.append(y)
            j += 1
        else:
            i += 1
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return out


def reduce_boundary(offsets, rows, dims, max_dim):
    """Z/2 boundary-matrix reduction with the twist (clearing) optimization.

    Columns are given in filtration order as CSR-like slices: the boundary of
    simplex j is rows[offsets[j]:offsets[j+1]], ascending. Dimensions are
    processed from max_dim down to 1; a simplex paired as a birth is cleared
    and never reduced itself. Pairing is identical to plain left-to-right
    reduction (property-tested against reduce_boundary_plain).

    Returns partner: partner[i] = j and partner[j] = i for each (birth i,
    death j) pair, -1 for unpaired simplices.
    """
    m = len(dims)
    partner = np.full(m, -1, dtype=np.int64)
    owner = [-1] * m  # row index -> column with that reduced low
    cleared = bytearray(m)
    stored = [None] * m  # reduced columns, kept per dimension pass
    for d in range(max_dim, 0, -1):
        reduced_here = []
        for j in range(m):
            if dims[j] != d or cleared[j]:
                continue
            col = list(rows[offsets[j]:offsets[j + 1]])
            while col:
                low = col[-1]
                k = owner[low]
                if k < 0:
                    owner[low] = j
                    partner[low] = j
                    partner[j] = low
                    cleared[low] = 1
                    stored[j] = col
                    reduced_here.append(j)
                    break
                col = _symdiff(col, stored[k])
        for j in reduced_here:  # only same-dimension columns ever read these
            stored[j] = None
    return partner


def reduce_boundary_plain(offsets, rows, dims, max_dim):
    """Reference: plain left-to-right column reduction, no clearing."""
    m = len(dims)
    partner = np.full(m, -1, dtype=np.int64)
    owner = [-1] * m
    stored = [None] * m
    for j in range(m):
        col = list(rows[offsets[j]:offsets[j + 1]])
        while col:
            low = col[-1]
            k = owner[low]
            if k < 0:
                owner[low] = j
                partner[low] = j
                partner[j] = low
                stored[j] = col
                break
            col = _symdiff(col, stored[k])
    return partner


def sgns_train(walks, offsets, n_nodes, dim, window, negatives, epochs,
               lr0, lr_min, noise_cdf, seed):
    """Skip-gram with negative sampling over a walk corpus.

    walks/offsets: flattened corpus, walk w = walks[offsets[w]:offsets[w+1]].
    noise_cdf: cumulative noise distribution over nodes for negative draws.
    Single-threaded sequential SGD, linear learning-rate decay from lr0 to
    lr_min over epochs * len(walks) center tokens; all randomness from one
    splitmix64 stream seeded with `seed`. Returns the input-vector matrix
    (n_nodes x dim).
    """
    state = seed & _MASK

    def nxt():
        nonlocal state
        state = (state + _GOLD) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    w_in = [0.0] * (n_nodes * dim)
    for i in range(n_nodes * dim):
        w_in[i] = ((nxt() >> 11) * 2.0**-53 - 0.5) / dim
    w_out = [0.0] * (n_nodes * dim)

    n_walks = len(offsets) - 1
    total_tokens = epochs * len(walks)
    processed = 0
    acc = [0.0] * dim
    for _ in range(epochs):
        for w in range(n_walks):
            s, e = int(offsets[w]), int(offsets[w + 1])
            length = e - s
            for t in range(length):
                lr = lr0 * (1.0 - processed / total_tokens)
                if lr < lr_min:
                    lr = lr_min
                processed += 1
                center = int(walks[s + t])
                cbase = center * dim
                lo_ctx = t - window
                if lo_ctx < 0:
                    lo_ctx = 0
                hi_ctx = t + window + 1
                if hi_ctx > length:
                    hi_ctx = length
                for u in range(lo_ctx, hi_ctx):
                    if u == t:
                        continue
                    ctx = int(walks[s + u])
                    for dd in range(dim):
                        acc[dd] = 0.0
                    for k in range(negatives + 1):
                        if k == 0:
                            target = ctx
                            label = 1.0
                        else:
                            r = (nxt() >> 11) * 2.0**-53
                            lo, hi = 0, n_nodes
                            while lo < hi:
                                mid = (lo + hi) // 2
                                if noise_cdf[mid] > r:
                                    hi = mid
                                else:
                                    lo = mid + 1
                            target = lo if lo < n_nodes else n_nodes - 1
                            label = 0.0
                        obase = target * dim
                        f = 0.0
                        for dd in range(dim):
                            f += w_in[cbase + dd] * w_out[obase + dd]
                        if f > 35.0:
                            f = 35.0
                        elif f < -35.0:
                            f = -35.0
                        g = (label - 1.0 / (1.0 + math.exp(-f))) * lr
                        for dd in range(dim):
                            acc[dd] += g * w_out[obase + dd]
                            w_out[obase + dd] += g * w_in[cbase + dd]
                    for dd in range(dim):
                        w_in[cbase + dd] += acc[dd]
    return np.asarray(w_in, dtype=np.float64).reshape(n_nodes, dim)
