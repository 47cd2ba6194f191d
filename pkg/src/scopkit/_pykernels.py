"""Pure-Python (numpy) order-theoretic kernels, used when the extension is unavailable."""

import numpy as np


def transitive_closure(adjacency):
    r = np.array(adjacency, dtype=bool, copy=True)
    np.fill_diagonal(r, True)
    for k in range(r.shape[0]):
        r |= r[:, k : k + 1] & r[k : k + 1, :]
    return r.astype(np.uint8)


def meet_table(leq):
    lq = np.asarray(leq, dtype=bool)
    n = lq.shape[0]
    down = lq.sum(axis=0)
    out = np.full((n, n), -1, dtype=np.int64)
    for a in range(n):
        # common[x, b]: x is below both a and b
        common = lq[:, a : a + 1] & lq
        scored = np.where(common, down[:, None], -1)
        best = scored.argmax(axis=0)
        has_lb = common.any(axis=0)
        dominated = ~(common & ~lq[:, best]).any(axis=0)
        out[a] = np.where(has_lb & dominated, best, -1)
    return out
