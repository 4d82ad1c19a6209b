"""NumPy implementations of the hot kernels.

Same signatures as the compiled ``_kernels`` module; used when the extension
is not built or when ``SSKDYN_PURE_PYTHON=1``.
"""

import numpy as np

PHILOX_M0 = np.uint64(0xD2511F53)
PHILOX_M1 = np.uint64(0xCD9E8D57)
PHILOX_W0 = 0x9E3779B9
PHILOX_W1 = 0xBB67AE85
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_TWO_NEG53 = 1.0 / 9007199254740992.0


def philox4x32(key0, key1, ctr):
    """Philox4x32-10 applied row-wise to an ``(n, 4)`` uint32 counter array."""
    ctr = np.asarray(ctr, dtype=np.uint32)
    x0 = ctr[:, 0].astype(np.uint64)
    x1 = ctr[:, 1].astype(np.uint64)
    x2 = ctr[:, 2].astype(np.uint64)
    x3 = ctr[:, 3].astype(np.uint64)
    k0 = int(key0) & 0xFFFFFFFF
    k1 = int(key1) & 0xFFFFFFFF
    for _ in range(10):
        p0 = x0 * PHILOX_M0
        p1 = x2 * PHILOX_M1
        x0, x1, x2, x3 = (
            (p1 >> _SHIFT32) ^ x1 ^ np.uint64(k0),
            p1 & _MASK32,
            (p0 >> _SHIFT32) ^ x3 ^ np.uint64(k1),
            p0 & _MASK32,
        )
        k0 = (k0 + PHILOX_W0) & 0xFFFFFFFF
        k1 = (k1 + PHILOX_W1) & 0xFFFFFFFF
    out = np.empty((ctr.shape[0], 4), dtype=np.uint32)
    out[:, 0] = x0
    out[:, 1] = x1
    out[:, 2] = x2
    out[:, 3] = x3
    return out


def _open_unit(hi, lo):
    # 53-bit mantissa from two words, shifted half an ulp off zero: u in (0, 1)
    hi = hi.astype(np.uint64) >> np.uint64(5)
    lo = lo.astype(np.uint64) >> np.uint64(6)
    return ((hi * np.uint64(67108864) + lo).astype(np.float64) + 0.5) * _TWO_NEG53


def philox_uniforms(key0, key1, c0, c1, c2, c3):
    """Two open-interval uniforms per counter ``(c0[i], c1[i], c2, c3)``."""
    c0 = np.asarray(c0, dtype=np.uint32)
    ctr = np.empty((c0.shape[0], 4), dtype=np.uint32)
    ctr[:, 0] = c0
    ctr[:, 1] = c1
    ctr[:, 2] = c2
    ctr[:, 3] = c3
    w = philox4x32(key0, key1, ctr)
    return _open_unit(w[:, 0], w[:, 1]), _open_unit(w[:, 2], w[:, 3])


def philox_normals(key0, key1, c0, c1, c2, c3):
    """One standard normal per counter, by Box-Muller on the two uniforms."""
    u1, u2 = philox_uniforms(key0, key1, c0, c1, c2, c3)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def volterra_march(g, c, beta, dt, log_limit):
    """Implicit-trapezoid march of the rescaled integrating factor.

    Solves ``r' = -4 r + 2c (g + conv(r, g) / beta)`` on the grid where
    ``g`` is sampled. Returns ``(r, conv_g, n_done)``; ``n_done < len(g)``
    means ``log r`` passed ``log_limit`` at index ``n_done``.
    """
    g = np.ascontiguousarray(g, dtype=np.float64)
    m = g.shape[0]
    r = np.zeros(m)
    conv = np.zeros(m)
    r[0] = 1.0
    ib = 1.0 / beta
    a = -4.0 + c * ib * dt * g[0]
    denom = 1.0 - 0.5 * dt * a
    f_prev = -4.0 + 2.0 * c * g[0]
    limit = np.exp(log_limit)
    grev = g[::-1]
    for n in range(1, m):
        known = 0.5 * r[0] * g[n]
        if n > 1:
            # sum_{j=1}^{n-1} r_j g_{n-j}
            known += np.dot(r[1:n], grev[m - n:m - 1])
        known *= dt
        b = 2.0 * c * (g[n] + ib * known)
        rn = (r[n - 1] + 0.5 * dt * (f_prev + b)) / denom
        r[n] = rn
        conv[n] = known + 0.5 * dt * rn * g[0]
        f_prev = a * rn + b
        if not rn < limit:
            return r, conv, n
    return r, conv, m


def convolve_trapezoid(r, kernel, dt):
    """``out[n] = trapezoid over [0, t_n] of r(s) kernel(t_n - s)``."""
    r = np.ascontiguousarray(r, dtype=np.float64)
    kernel = np.ascontiguousarray(kernel, dtype=np.float64)
    m = r.shape[0]
    out = np.zeros(m)
    krev = kernel[::-1]
    for n in range(1, m):
        s = 0.5 * (r[0] * kernel[n] + r[n] * kernel[0])
        if n > 1:
            s += np.dot(r[1:n], krev[m - n:m - 1])
        out[n] = dt * s
    return out


def euler_diag_step(y, sigma, noise, c, k, dt, amp):
    """One Euler-Maruyama step of the rotated Langevin system, in place.

    ``noise`` holds standard normals; they are scaled by ``amp * sqrt(dt)``.
    Returns the updated ``(K_N, H_N)``.
    """
    drift = (sigma - c * k) * dt
    y += drift * y + (amp * np.sqrt(dt)) * noise
    y2 = y * y
    n = y.shape[0]
    return float(np.sum(y2)) / n, float(np.dot(sigma, y2)) / n
