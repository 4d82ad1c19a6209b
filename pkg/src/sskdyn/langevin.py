"""Finite-N Langevin dynamics of the spherical SK model.

Two integrators share one Brownian stream keyed by ``(seed, coordinate,
step)``: ``simulate_full`` marches ``X`` with the coupling matrix, and
``simulate_diagonal`` marches the rotated coordinates ``Y = G X`` where the
system decouples up to the ``K_N`` feedback.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import rng
from ._backend import kernels
from .ensembles import InitialCondition, sample_initial
from .errors import BlowUpError, DomainError
from .spectral import sample_semicircle

BLOWUP = 1e6


@dataclass(frozen=True)
class LangevinParams:
    N: int = 1000
    beta: float = 0.5
    c: float = 1.0
    dt: float = 1e-3
    T: float = 5.0
    seed: int = 0
    mode: str = "diagonal"
    initial: Optional[InitialCondition] = None

    def violations(self):
        out = []
        if int(self.N) != self.N or self.N < 1:
            out.append(("N", "N must be a positive integer"))
        if not self.beta > 0:
            out.append(("beta", "beta must be positive"))
        if not self.c > 0:
            out.append(("c", "c must be positive"))
        if not 0 < self.dt <= 1e-2:
            out.append(("dt", "dt must lie in (0, 1e-2]"))
        if not self.T > 0:
            out.append(("T", "T must be positive"))
        if self.mode not in ("diagonal", "full"):
            out.append(("mode", "mode must be 'diagonal' or 'full'"))
        return out

    def validate(self):
        v = self.violations()
        if v:
            raise DomainError("; ".join(f"{k}: {m}" for k, m in v))

    @property
    def steps(self) -> int:
        return int(round(self.T / self.dt))

    def initial_condition(self) -> InitialCondition:
        if self.initial is not None:
            return self.initial
        return InitialCondition(kind="iid", iid_law="gaussian-std", seed=rng.derive_seed(self.seed, 0))


@dataclass
class TrajectoryStats:
    grid: np.ndarray
    K_N: np.ndarray
    H_N: np.ndarray
    N: int
    seed: int


@dataclass
class EnsembleMean:
    grid: np.ndarray
    K_mean: np.ndarray
    K_se: np.ndarray
    H_mean: np.ndarray
    H_se: np.ndarray
    runs: int = field(default=0)


def _increments(seed, n, step):
    return rng.normals(seed, rng.BROWNIAN, np.arange(n), step)


def simulate_diagonal(params: LangevinParams, sigmas, rotation=None, noise: bool = True) -> TrajectoryStats:
    """Euler-Maruyama for ``dY = (sigma - c K_N) Y dt + beta^{-1/2} dB``.

    ``rotation`` is the orthogonal ``G`` with ``J = G^T diag(sigmas) G``.
    When given, the initial data and Brownian increments are drawn in the
    original coordinates and rotated, so the run tracks ``simulate_full`` on
    the same seed path by path. ``noise=False`` switches the Brownian term
    off; it exists for deterministic tests.
    """
    params.validate()
    sigma = np.ascontiguousarray(sigmas, dtype=float)
    n = params.N
    if sigma.shape != (n,):
        raise DomainError(f"expected {n} sigmas, got shape {sigma.shape}")
    G = None if rotation is None else np.asarray(rotation, dtype=float)
    y = sample_initial(params.initial_condition(), n)
    if G is not None:
        y = G @ y
    y = np.ascontiguousarray(y)
    m = params.steps
    amp = params.beta ** -0.5 if noise else 0.0
    K = np.empty(m + 1)
    H = np.empty(m + 1)
    K[0] = float(np.dot(y, y)) / n
    H[0] = float(np.dot(sigma, y * y)) / n
    zeros = np.zeros(n)
    for k in range(m):
        if noise:
            dw = _increments(params.seed, n, k)
            if G is not None:
                dw = G @ dw
        else:
            dw = zeros
        K[k + 1], H[k + 1] = kernels.euler_diag_step(y, sigma, np.ascontiguousarray(dw), params.c, K[k], params.dt, amp)
        if not K[k + 1] < BLOWUP:
            raise BlowUpError(f"K_N blew up at step {k + 1}; reduce dt", worst=float(K[k + 1]))
    return TrajectoryStats(np.arange(m + 1) * params.dt, K, H, n, params.seed)


def simulate_full(J, params: LangevinParams, noise: bool = True) -> TrajectoryStats:
    """Euler-Maruyama for ``dX = (J X - c K_N X) dt + beta^{-1/2} dW``.

    ``H_N = X^T J X / N``. Costs one mat-vec per step.
    """
    params.validate()
    J = np.asarray(J, dtype=float)
    n = params.N
    if J.shape != (n, n):
        raise DomainError(f"J has shape {J.shape}, params.N={n}")
    x = sample_initial(params.initial_condition(), n)
    m = params.steps
    dt = params.dt
    scale = (params.beta ** -0.5) * np.sqrt(dt) if noise else 0.0
    K = np.empty(m + 1)
    H = np.empty(m + 1)
    Jx = J @ x
    K[0] = float(np.dot(x, x)) / n
    H[0] = float(np.dot(x, Jx)) / n
    for k in range(m):
        x = x + (Jx - params.c * K[k] * x) * dt
        if noise:
            x += scale * _increments(params.seed, n, k)
        Jx = J @ x
        K[k + 1] = float(np.dot(x, x)) / n
        H[k + 1] = float(np.dot(x, Jx)) / n
        if not K[k + 1] < BLOWUP:
            raise BlowUpError(f"K_N blew up at step {k + 1}; reduce dt", worst=float(K[k + 1]))
    return TrajectoryStats(np.arange(m + 1) * dt, K, H, n, params.seed)


def semicircle_sigmas(params: LangevinParams) -> np.ndarray:
    """i.i.d. semicircle draws for one run, keyed by the run seed."""
    return sample_semicircle(rng.derive_seed(params.seed, 1), params.N)


def simulate_semicircle(params: LangevinParams, noise: bool = True) -> TrajectoryStats:
    return simulate_diagonal(params, semicircle_sigmas(params), noise=noise)


def ensemble_mean(runs) -> EnsembleMean:
    """Pointwise mean and standard error over runs sharing one grid.

    Runs are sorted by seed first, so the result does not depend on the
    order they were passed in.
    """
    runs = sorted(runs, key=lambda r: r.seed)
    if not runs:
        raise DomainError("ensemble_mean needs at least one run")
    g = runs[0].grid
    for r in runs[1:]:
        if r.N != runs[0].N or r.grid.shape != g.shape or not np.array_equal(r.grid, g):
            raise DomainError("runs do not share grid and N")
    K = np.stack([r.K_N for r in runs])
    H = np.stack([r.H_N for r in runs])
    n = len(runs)
    if n > 1:
        kse = K.std(axis=0, ddof=1) / np.sqrt(n)
        hse = H.std(axis=0, ddof=1) / np.sqrt(n)
    else:
        kse = np.zeros_like(g)
        hse = np.zeros_like(g)
    return EnsembleMean(g.copy(), K.mean(axis=0), kse, H.mean(axis=0), hse, n)
