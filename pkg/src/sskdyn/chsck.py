"""Limiting correlation/energy equations for f(x) = c x^2 / 2.

The integrating factor ``R(t) = exp(2c int_0^t K)`` solves the linear
Volterra equation

    R'(t) = 2c (E[e^{2 sigma t}] + beta^{-1} int_0^t R(r) E[e^{2 sigma (t-r)}] dr)

and grows like ``e^{4t}`` in the low-temperature phase. Everything here
works with ``Rt = R e^{-4t}`` and kernels scaled the same way, so stored
values stay moderate for any horizon the limits need.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import DomainError, HorizonError
from .semicircle_fn import dmgf_scaled, mgf_scaled
from .spectral import stieltjes_m

LOG_LIMIT = 700.0


@dataclass(frozen=True)
class ChsckParams:
    c: float = 1.0
    beta: float = 0.5
    T: float = 10.0
    dt: float = 1e-3
    K0: float = 1.0

    def violations(self):
        out = []
        if not self.c > 0:
            out.append(("c", "c must be positive"))
        if not self.beta > 0:
            out.append(("beta", "beta must be positive"))
        if not self.T > 0:
            out.append(("T", "T must be positive"))
        if not self.dt > 0:
            out.append(("dt", "dt must be positive"))
        elif self.T > 0 and self.dt > self.T / 100 * (1 + 1e-12):
            out.append(("dt", "dt must satisfy dt <= T/100 (ChsckParams invariant)"))
        if self.K0 != 1.0:
            out.append(("K0", "K0 is fixed to 1"))
        return out

    def validate(self):
        v = self.violations()
        if v:
            raise DomainError("; ".join(f"{k}: {m}" for k, m in v))

    @property
    def steps(self) -> int:
        return int(round(self.T / self.dt))


@dataclass
class VolterraSolution:
    grid: np.ndarray
    logRtilde: np.ndarray
    Kdiag: np.ndarray
    H: np.ndarray
    params: ChsckParams

    @property
    def Rtilde(self) -> np.ndarray:
        return np.exp(self.logRtilde)

    def at(self, t: float) -> int:
        """Grid index of time ``t`` (must be on the grid up to rounding)."""
        k = int(round(t / self.params.dt))
        if k < 0 or k >= self.grid.shape[0] or abs(self.grid[k] - t) > 1e-9 * max(1.0, t):
            raise DomainError(f"t={t} is not a grid point")
        return k


@dataclass(frozen=True)
class AsymptoticConstants:
    """Growth data of ``R(t) ~ C t^{-Psi} e^{2 s_beta t}``.

    ``C_beta`` is the closed-form constant from the regime table;
    ``R_prefactor`` is the limit of ``Rt(t) t^Psi e^{-2(s_beta - 2)t}``
    implied by the Laplace transform, which is what the solver reproduces.
    """

    beta_c: float
    s_beta: float
    Psi: float
    C_beta: float
    regime: str
    R_prefactor: float


@dataclass(frozen=True)
class LimitValues:
    H_inf: float
    HK_ratio_inf: float


def _check_cb(c, beta):
    if not c > 0:
        raise DomainError("c must be positive")
    if not beta > 0:
        raise DomainError("beta must be positive")


def critical_beta(c: float) -> float:
    return c / 4.0 * float(stieltjes_m(2.0))


def p_fn(s: float, c: float, beta: float) -> float:
    """``2 beta s / c - m(s)``; its root on ``(2, inf)`` is ``s_beta``."""
    return 2.0 * beta * s / c - stieltjes_m(s)


def asymptotic_constants(c: float, beta: float) -> AsymptoticConstants:
    _check_cb(c, beta)
    beta_c = critical_beta(c)
    if beta < beta_c:
        x = beta / beta_c
        q = math.sqrt(x * (2.0 - x))
        s = 2.0 / q
        # sqrt(s^2 - 4) in a form that keeps its accuracy as beta -> beta_c
        root = 2.0 * (1.0 - x) / q
        m = 2.0 / (s + root)
        dm = -m / root
        C = beta * (c * m + 1.0) / (2.0 * beta - c * dm)
        return AsymptoticConstants(beta_c, s, 0.0, C, "sub", 2.0 * C)
    if beta == beta_c:
        C = beta * (c + 1.0) / c
        return AsymptoticConstants(beta_c, 2.0, 0.5, C, "critical", C * math.sqrt(2.0 / math.pi))
    C = c * beta * (4.0 * beta + 1.0) / (4.0 * beta - c) ** 2
    return AsymptoticConstants(beta_c, 2.0, 1.5, C, "super", C / (2.0 * math.sqrt(2.0 * math.pi)))


def solve_volterra(params: ChsckParams) -> VolterraSolution:
    """March ``Rt`` with the implicit trapezoid rule; derive ``K`` and ``H``.

    The convolution uses the trapezoid rule including the unknown endpoint,
    which enters linearly and is solved for by one division per step.
    ``K = R' / (2cR)`` and ``H`` come from the same right-hand sides, not
    from differencing.
    """
    params.validate()
    c, beta, dt = params.c, params.beta, params.dt
    m = params.steps
    t = np.arange(m + 1) * dt
    g = mgf_scaled(2.0 * t)
    d = dmgf_scaled(2.0 * t)
    r, conv_g, done = kernels.volterra_march(g, c, beta, dt, LOG_LIMIT)
    if done < m + 1:
        raise HorizonError(
            f"log Rt exceeded {LOG_LIMIT:g} at t={t[done]:.4g}; use a smaller T"
        )
    conv_d = kernels.convolve_trapezoid(r, d, dt)
    ib = 1.0 / beta
    K = (g + ib * conv_g) / r
    H = (d + ib * conv_d) / r
    return VolterraSolution(t, np.log(r), K, H, params)


def laplace_closed_form(c: float, beta: float, z: float) -> float:
    """``int_0^inf e^{-2zt} R(t) dt = (1 + c m(z)) / (2z - c m(z) / beta)``."""
    m = stieltjes_m(z)
    return (1.0 + c * m) / (2.0 * z - c * m / beta)


def laplace_transform(sol: VolterraSolution, z: float) -> float:
    """Trapezoid estimate of ``int_0^T e^{-2zt} R(t) dt``."""
    w = np.exp(sol.logRtilde - 2.0 * (z - 2.0) * sol.grid)
    return _trapezoid(w, sol.grid)


def laplace_residual(sol: VolterraSolution, params: ChsckParams, z: float) -> float:
    """Residual of ``2z L - 1 = c m(z) (1 + L / beta)`` at the truncated transform."""
    floor = max(2.0, asymptotic_constants(params.c, params.beta).s_beta)
    if not z > floor:
        raise DomainError(f"z must exceed {floor:.6g} for the transform to converge")
    L = laplace_transform(sol, z)
    return abs(2.0 * z * L - 1.0 - params.c * stieltjes_m(z) * (1.0 + L / params.beta))


def _trapezoid(y, x):
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def _log_rt_at(sol, t):
    return float(np.interp(t, sol.grid, sol.logRtilde))


def two_time_K(sol: VolterraSolution, t: float, s: float, params: ChsckParams) -> float:
    """Two-time correlation ``K(t, s)`` rebuilt from the diagonal solution.

    Off-grid times use linear interpolation of ``log Rt``.
    """
    T = sol.grid[-1]
    for name, v in (("t", t), ("s", s)):
        if not 0.0 <= v <= T * (1 + 1e-12):
            raise DomainError(f"{name}={v} outside the solved grid [0, {T}]")
    lo = min(t, s)
    k = int(np.searchsorted(sol.grid, lo, side="right"))
    r_nodes = sol.grid[:k]
    lr = sol.logRtilde[:k]
    if r_nodes[-1] < lo - 1e-15:
        r_nodes = np.append(r_nodes, lo)
        lr = np.append(lr, _log_rt_at(sol, lo))
    integrand = np.exp(lr) * mgf_scaled(t + s - 2.0 * r_nodes)
    integral = _trapezoid(integrand, r_nodes)
    num = float(mgf_scaled(np.array(t + s))) + integral / params.beta
    return num * math.exp(-0.5 * (_log_rt_at(sol, t) + _log_rt_at(sol, s)))


def limit_values(c: float, beta: float) -> LimitValues:
    """Closed-form long-time limits of ``H`` and ``H/K`` with a jump at ``beta_c``.

    These are the phase-transition formulas (zero for ``beta <= c/4``).
    They do not match the long-time output of :func:`solve_volterra`;
    :func:`equilibrium_limits` does.
    """
    _check_cb(c, beta)
    if beta <= critical_beta(c):
        return LimitValues(0.0, 0.0)
    a = 4.0 * beta - c
    sp = math.sqrt(math.pi)
    H = a / (2.0**2.5 * sp * c * beta) + 0.5 / beta
    ratio = (2.0**-1.5 * a + sp * c) / (2.0**-2.5 * a + sp * c)
    return LimitValues(H, ratio)


def equilibrium_limits(c: float, beta: float) -> LimitValues:
    """Long-time limits of ``H`` and ``H/K`` that the Volterra solution attains.

    With ``s = s_beta`` the spherical multiplier tends to ``c K = s`` and
    ``H -> s^2/c - 1/(2 beta)``. Above ``beta_c`` (``s = 2``) the surplus
    correlation condenses on the spectral edge. Both limits are continuous
    in ``beta``.
    """
    ac = asymptotic_constants(c, beta)
    s = ac.s_beta
    H = s * s / c - 0.5 / beta
    return LimitValues(H, H / (s / c))
