# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Signatures mirror ``sskdyn._fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, cos, exp, M_PI
from libc.stdint cimport uint32_t, uint64_t

cnp.import_array()

cdef uint64_t M0 = 0xD2511F53
cdef uint64_t M1 = 0xCD9E8D57
cdef uint32_t W0 = 0x9E3779B9
cdef uint32_t W1 = 0xBB67AE85
cdef double TWO_NEG53 = 1.0 / 9007199254740992.0


cdef inline void _philox(uint32_t k0, uint32_t k1, uint32_t* x) noexcept nogil:
    cdef uint64_t p0, p1
    cdef uint32_t y0, y1, y2, y3
    cdef int i
    for i in range(10):
        p0 = <uint64_t>x[0] * M0
        p1 = <uint64_t>x[2] * M1
        y0 = <uint32_t>(p1 >> 32) ^ x[1] ^ k0
        y1 = <uint32_t>p1
        y2 = <uint32_t>(p0 >> 32) ^ x[3] ^ k1
        y3 = <uint32_t>p0
        x[0] = y0
        x[1] = y1
        x[2] = y2
        x[3] = y3
        k0 = k0 + W0
        k1 = k1 + W1


cdef inline double _open_unit(uint32_t hi, uint32_t lo) noexcept nogil:
    return ((<double>((<uint64_t>(hi >> 5)) * 67108864 + (lo >> 6))) + 0.5) * TWO_NEG53


def philox4x32(key0, key1, ctr):
    cdef uint32_t k0 = <uint32_t>(int(key0) & 0xFFFFFFFF)
    cdef uint32_t k1 = <uint32_t>(int(key1) & 0xFFFFFFFF)
    cdef cnp.ndarray[cnp.uint32_t, ndim=2, mode="c"] src = np.ascontiguousarray(ctr, dtype=np.uint32)
    cdef cnp.ndarray[cnp.uint32_t, ndim=2, mode="c"] out = src.copy()
    cdef Py_ssize_t i, n = out.shape[0]
    cdef uint32_t* base = <uint32_t*>out.data
    with nogil:
        for i in range(n):
            _philox(k0, k1, base + 4 * i)
    return out


def philox_uniforms(key0, key1, c0, c1, c2, c3):
    cdef uint32_t k0 = <uint32_t>(int(key0) & 0xFFFFFFFF)
    cdef uint32_t k1 = <uint32_t>(int(key1) & 0xFFFFFFFF)
    cdef cnp.ndarray[cnp.uint32_t, ndim=1] a0 = np.ascontiguousarray(c0, dtype=np.uint32)
    cdef Py_ssize_t i, n = a0.shape[0]
    cdef cnp.ndarray[cnp.uint32_t, ndim=1] a1 = np.ascontiguousarray(np.broadcast_to(np.asarray(c1, dtype=np.uint32), (n,)))
    cdef uint32_t s2 = <uint32_t>(int(c2) & 0xFFFFFFFF)
    cdef uint32_t s3 = <uint32_t>(int(c3) & 0xFFFFFFFF)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u1 = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u2 = np.empty(n)
    cdef uint32_t x[4]
    with nogil:
        for i in range(n):
            x[0] = a0[i]
            x[1] = a1[i]
            x[2] = s2
            x[3] = s3
            _philox(k0, k1, x)
            u1[i] = _open_unit(x[0], x[1])
            u2[i] = _open_unit(x[2], x[3])
    return u1, u2


def philox_normals(key0, key1, c0, c1, c2, c3):
    u1, u2 = philox_uniforms(key0, key1, c0, c1, c2, c3)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a = u1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = u2
    cdef Py_ssize_t i, n = a.shape[0]
    with nogil:
        for i in range(n):
            a[i] = sqrt(-2.0 * log(a[i])) * cos(2.0 * M_PI * b[i])
    return a


def volterra_march(g_in, double c, double beta, double dt, double log_limit):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] g = np.ascontiguousarray(g_in, dtype=np.float64)
    cdef Py_ssize_t m = g.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] r = np.zeros(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] conv = np.zeros(m)
    cdef double ib = 1.0 / beta
    cdef double a = -4.0 + c * ib * dt * g[0]
    cdef double denom = 1.0 - 0.5 * dt * a
    cdef double f_prev = -4.0 + 2.0 * c * g[0]
    cdef double limit = exp(log_limit)
    cdef double known, b, rn
    cdef Py_ssize_t n, j, done = m
    r[0] = 1.0
    with nogil:
        for n in range(1, m):
            known = 0.5 * r[0] * g[n]
            for j in range(1, n):
                known += r[j] * g[n - j]
            known *= dt
            b = 2.0 * c * (g[n] + ib * known)
            rn = (r[n - 1] + 0.5 * dt * (f_prev + b)) / denom
            r[n] = rn
            conv[n] = known + 0.5 * dt * rn * g[0]
            f_prev = a * rn + b
            if not rn < limit:
                done = n
                break
    return r, conv, done


def convolve_trapezoid(r_in, kernel_in, double dt):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] r = np.ascontiguousarray(r_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] k = np.ascontiguousarray(kernel_in, dtype=np.float64)
    cdef Py_ssize_t m = r.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(m)
    cdef Py_ssize_t n, j
    cdef double s
    with nogil:
        for n in range(1, m):
            s = 0.5 * (r[0] * k[n] + r[n] * k[0])
            for j in range(1, n):
                s += r[j] * k[n - j]
            out[n] = dt * s
    return out


def euler_diag_step(cnp.ndarray[cnp.float64_t, ndim=1] y,
                    cnp.ndarray[cnp.float64_t, ndim=1] sigma,
                    cnp.ndarray[cnp.float64_t, ndim=1] noise,
                    double c, double k, double dt, double amp):
    cdef Py_ssize_t i, n = y.shape[0]
    cdef double scale = amp * sqrt(dt)
    cdef double ck = c * k
    cdef double ksum = 0.0, hsum = 0.0, v
    with nogil:
        for i in range(n):
            v = y[i] + (sigma[i] - ck) * dt * y[i] + scale * noise[i]
            y[i] = v
            ksum += v * v
            hsum += sigma[i] * v * v
    return ksum / n, hsum / n
