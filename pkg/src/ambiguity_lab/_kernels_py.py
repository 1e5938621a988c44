"""Numpy versions of the enumeration kernels, used when the extension is absent.

Same signatures and semantics as the compiled module: scan configuration
indices ``start <= idx < stop`` in lexicographic order and return
``(best_value, best_index)`` with the first minimum winning.  Configurations
are processed in vectorized blocks.
"""

import numpy as np

_BLOCK = 2048


def _digits(idx: np.ndarray, n_digits: int, radix: int) -> np.ndarray:
    powers = radix ** np.arange(n_digits - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % radix


def _scan(start, stop, n_digits, radix, values_of):
    best, best_idx = np.inf, -1
    for lo in range(start, stop, _BLOCK):
        idx = np.arange(lo, min(lo + _BLOCK, stop), dtype=np.int64)
        vals = values_of(_digits(idx, n_digits, radix))
        k = int(np.argmin(vals))
        if vals[k] < best:
            best, best_idx = float(vals[k]), int(idx[k])
    return best, best_idx


def enum_rank_tables(perm_ranks, n_cells, xs, ca, cb, w, powtab, start, stop):
    perm_ranks = np.asarray(perm_ranks)
    xs, ca, cb = np.asarray(xs), np.asarray(ca), np.asarray(cb)
    w, powtab = np.asarray(w), np.asarray(powtab)

    def values_of(d):
        ra = perm_ranks[d[:, ca], xs]
        rb = perm_ranks[d[:, cb], xs]
        return powtab[np.minimum(ra, rb)] @ w

    return _scan(start, stop, n_cells, perm_ranks.shape[0], values_of)


def enum_list_functions(ys, w, n_values, y_size, powtab, start, stop):
    ys, w, powtab = np.asarray(ys), np.asarray(w), np.asarray(powtab)
    n_keys = y_size * n_values

    def values_of(d):
        keys = ys[None, :] * n_values + d
        offset = np.arange(d.shape[0])[:, None] * n_keys
        counts = np.bincount((keys + offset).ravel(), minlength=d.shape[0] * n_keys)
        sizes = counts[keys + offset]
        return powtab[sizes] @ w

    return _scan(start, stop, ys.size, n_values, values_of)


def enum_sideinfo_functions(ys, w, n_values, y_size, powtab, start, stop):
    ys, w, powtab = np.asarray(ys), np.asarray(w), np.asarray(powtab)
    earlier = np.tril(np.ones((ys.size, ys.size), dtype=bool), k=-1)

    def values_of(d):
        keys = ys[None, :] * n_values + d
        same = keys[:, :, None] == keys[:, None, :]
        ranks = 1 + np.sum(same & earlier[None, :, :], axis=2)
        return powtab[ranks] @ w

    return _scan(start, stop, ys.size, n_values, values_of)
