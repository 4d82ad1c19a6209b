"""Modified Bessel functions and transforms of the semicircle law.

For sigma drawn from the semicircle law on [-2, 2]:

* ``mgf_semicircle(t)  = E[exp(t sigma)]         = I_1(2t) / t``
* ``dmgf_semicircle(t) = E[sigma exp(t sigma)]   = 2 I_2(2t) / t``
* ``charfn_semicircle(t) = E[exp(i t sigma)]     = J_1(2t) / t``

These agree with direct quadrature against the density. Scalar functions
use plain ``math`` loops; the ``*_scaled`` array variants return values
multiplied by ``exp(-2t)`` and feed the Volterra solver.
"""

import math

import numpy as np

from .errors import DomainError

SERIES_MAX_X = 30.0
_REL = 1e-17


def _check_order(n):
    if int(n) != n or n < 0:
        raise DomainError(f"Bessel order must be a non-negative integer, got {n}")
    return int(n)


def _series(n, x):
    # sum_k (x/2)^(2k+n) / (k! (k+n)!)
    half = 0.5 * x
    term = half**n / math.factorial(n)
    total = term
    q = half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + n))
        total += term
        if term <= _REL * total:
            return total


def _asymptotic_scaled(n, x):
    # e^{-x} I_n(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(n) / x^k
    mu = 4.0 * n * n
    term = 1.0
    total = 1.0
    prev = math.inf
    for k in range(1, 200):
        term *= -(mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        a = abs(term)
        if a >= prev:
            break
        total += term
        if a <= _REL * abs(total):
            break
        prev = a
    return total / math.sqrt(2.0 * math.pi * x)


def _use_series(n, x):
    return x <= SERIES_MAX_X or x <= n * n


def bessel_i(n: int, x: float) -> float:
    """Modified Bessel function of the first kind, integer order, ``x >= 0``."""
    n = _check_order(n)
    if x < 0:
        raise DomainError("bessel_i is defined here for x >= 0 only")
    if x == 0:
        return 1.0 if n == 0 else 0.0
    if _use_series(n, x):
        return _series(n, x)
    return _asymptotic_scaled(n, x) * math.exp(x)


def bessel_ie(n: int, x: float) -> float:
    """``exp(-x) * I_n(x)``, finite for every ``x >= 0``."""
    n = _check_order(n)
    if x < 0:
        raise DomainError("bessel_ie is defined here for x >= 0 only")
    if x == 0:
        return 1.0 if n == 0 else 0.0
    if _use_series(n, x):
        return _series(n, x) * math.exp(-x)
    return _asymptotic_scaled(n, x)


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind via the periodic trapezoid rule.

    ``J_n(x) = (1/2pi) int_0^{2pi} cos(n theta - x sin theta) d theta``; the
    integrand is analytic and periodic, so ``|x| + 40`` nodes reach
    round-off.
    """
    n = _check_order(n)
    m = int(abs(x)) + n + 40
    h = 2.0 * math.pi / m
    s = 0.0
    for k in range(m):
        th = k * h
        s += math.cos(n * th - x * math.sin(th))
    return s / m


def _check_t(t):
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")


def mgf_semicircle(t: float) -> float:
    """``E[exp(t sigma)]``; equals 1 at ``t = 0``."""
    _check_t(t)
    if t == 0:
        return 1.0
    return bessel_i(1, 2.0 * t) / t


def dmgf_semicircle(t: float) -> float:
    """``E[sigma exp(t sigma)]``, the derivative of the MGF."""
    _check_t(t)
    if t == 0:
        return 0.0
    return 2.0 * bessel_i(2, 2.0 * t) / t


def charfn_semicircle(t: float) -> float:
    """``E[exp(i t sigma)]``; real because the law is symmetric."""
    if t == 0:
        return 1.0
    return bessel_j(1, 2.0 * t) / t


# ---------------------------------------------------------------------------
# vectorized, exponentially scaled variants


def bessel_ie_array(n: int, x) -> np.ndarray:
    """Vectorized ``exp(-x) I_n(x)`` for ``x >= 0``."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("bessel_ie_array requires x >= 0")
    out = np.empty_like(x)
    small = (x <= SERIES_MAX_X) | (x <= n * n)
    xs = x[small]
    if xs.size:
        half = 0.5 * xs
        q = half * half
        term = half**n / math.factorial(n)
        total = term.copy()
        for k in range(1, 400):
            term = term * q / (k * (k + n))
            total += term
            if np.all(term <= _REL * total):
                break
        out[small] = total * np.exp(-xs)
    xl = x[~small]
    if xl.size:
        mu = 4.0 * n * n
        term = np.ones_like(xl)
        total = np.ones_like(xl)
        # x > 30 keeps the first 25 terms well inside the convergent range
        for k in range(1, 26):
            term = term * (-(mu - (2 * k - 1) ** 2) / (8.0 * k * xl))
            total += term
            if np.all(np.abs(term) <= _REL * np.abs(total)):
                break
        out[~small] = total / np.sqrt(2.0 * np.pi * xl)
    return out


def mgf_scaled(t) -> np.ndarray:
    """``exp(-2t) E[exp(t sigma)]``, vectorized; lies in (0, 1]."""
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    pos = t > 0
    out[pos] = bessel_ie_array(1, 2.0 * t[pos]) / t[pos]
    return out


def dmgf_scaled(t) -> np.ndarray:
    """``exp(-2t) E[sigma exp(t sigma)]``, vectorized."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = 2.0 * bessel_ie_array(2, 2.0 * t[pos]) / t[pos]
    return out
