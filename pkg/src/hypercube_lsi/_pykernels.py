"""Pure NumPy implementations of the hot loops.

Used when the compiled ``_ckernels`` extension is unavailable, and as the
reference the compiled kernels are tested against.
"""
import numpy as np


def fwht_inplace(a):
    """Unnormalized Walsh-Hadamard butterfly on a float64 array of length 2**n."""
    size = a.shape[0]
    h = 1
    while h < size:
        v = a.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = lo - v[:, 1, :]
        h *= 2
    return a


def heat_inplace(a, stay, flip):
    """Apply the two-point kernel ``[[stay, flip], [flip, stay]]`` along every coordinate."""
    size = a.shape[0]
    h = 1
    while h < size:
        v = a.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        hi = v[:, 1, :].copy()
        v[:, 0, :] = stay * lo + flip * hi
        v[:, 1, :] = flip * lo + stay * hi
        h *= 2
    return a


def laplacian(a):
    """Return ``sum_{y ~ x} (f(y) - f(x))`` for every x."""
    size = a.shape[0]
    out = np.zeros_like(a)
    h = 1
    while h < size:
        v = a.reshape(-1, 2, h)
        o = out.reshape(-1, 2, h)
        d = v[:, 1, :] - v[:, 0, :]
        o[:, 0, :] += d
        o[:, 1, :] -= d
        h *= 2
    return out


def gf2_weight_profile(rows, n):
    """Minimum codeword weight for each message weight over all 2**k messages.

    ``rows`` are the generator rows packed into unsigned 64-bit integers.
    Entry ``w`` of the result is ``min{|xM| : |x| = w}``.
    """
    rows = np.asarray(rows, dtype=np.uint64)
    k = rows.shape[0]
    words = np.zeros(1 << k, dtype=np.uint64)
    for i in range(k):
        half = 1 << i
        words[half:2 * half] = words[:half] ^ rows[i]
    cw = np.bitwise_count(words).astype(np.int64)
    mw = np.bitwise_count(np.arange(1 << k, dtype=np.uint64)).astype(np.int64)
    best = np.full(k + 1, n + 1, dtype=np.int64)
    np.minimum.at(best, mw, cw)
    return best
