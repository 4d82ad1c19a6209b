"""Counter-based random streams.

Every random number in the package is a pure function of
``(seed, stream, c0, c1, c3)`` through Philox4x32-10, so values do not
depend on generation order, chunking or worker count.
"""

import numpy as np

from ._backend import kernels

U64_MASK = (1 << 64) - 1

# stream tags occupy counter word 2
WIGNER = 1
INITIAL = 2
BROWNIAN = 3
SEMICIRCLE = 4
SPHERE = 5
EXPONENTIAL = 6
DERIVE = 0xD5EED


def split_key(seed):
    seed = int(seed)
    if seed < 0 or seed > U64_MASK:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed & 0xFFFFFFFF, seed >> 32


def _words(c0, c1):
    c0 = np.asarray(c0, dtype=np.uint32).reshape(-1)
    c1 = np.broadcast_to(np.asarray(c1, dtype=np.uint32), (c0.shape[0],))
    return c0, np.ascontiguousarray(c1)


def raw(seed, stream, c0, c1=0, c3=0):
    """Full Philox output, shape ``(n, 4)`` uint32."""
    k0, k1 = split_key(seed)
    c0, c1 = _words(c0, c1)
    ctr = np.empty((c0.shape[0], 4), dtype=np.uint32)
    ctr[:, 0] = c0
    ctr[:, 1] = c1
    ctr[:, 2] = stream
    ctr[:, 3] = c3
    return kernels.philox4x32(k0, k1, ctr)


def uniforms(seed, stream, c0, c1=0, c3=0):
    """Two independent uniforms on (0, 1) per counter."""
    k0, k1 = split_key(seed)
    c0, c1 = _words(c0, c1)
    return kernels.philox_uniforms(k0, k1, c0, c1, stream, c3)


def normals(seed, stream, c0, c1=0, c3=0):
    """One standard normal per counter."""
    k0, k1 = split_key(seed)
    c0, c1 = _words(c0, c1)
    return kernels.philox_normals(k0, k1, c0, c1, stream, c3)


def derive_seed(base_seed, *indices):
    """Child seed for ``(base_seed, i, j, ...)``; up to three indices."""
    if len(indices) > 3:
        raise ValueError("derive_seed takes at most three indices")
    idx = [int(i) & 0xFFFFFFFF for i in indices] + [0] * (3 - len(indices))
    k0, k1 = split_key(base_seed)
    # high bit of word 3 keeps derivation counters disjoint from sample streams
    marker = 0x80000000 | (DERIVE << 4) | len(indices)
    ctr = np.array([[idx[0], idx[1], idx[2], marker]], dtype=np.uint32)
    w = kernels.philox4x32(k0, k1, ctr)[0]
    return (int(w[1]) << 32) | int(w[0])
