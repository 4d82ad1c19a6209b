"""Normalized Wigner matrices and initial spin configurations."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rng
from .errors import ConfigError, DomainError

LAWS = ("gaussian-orthogonal", "gaussian-unit-diag", "rademacher", "uniform-sym")
INITIAL_KINDS = ("sphere-uniform", "iid")
IID_LAWS = ("gaussian-std", "rademacher")

_SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class WignerSpec:
    """Ensemble description.

    ``diagonal_variance=None`` resolves to 2 for the GOE law and to the
    off-diagonal variance (1) for every other law.
    """

    N: int
    entry_law: str = "gaussian-orthogonal"
    diagonal_variance: Optional[float] = None
    seed: int = 0

    @property
    def diag_var(self) -> float:
        if self.diagonal_variance is not None:
            return float(self.diagonal_variance)
        return 2.0 if self.entry_law == "gaussian-orthogonal" else 1.0

    def validate(self):
        if self.entry_law not in LAWS:
            raise ConfigError(f"unsupported entry law {self.entry_law!r}; expected one of {LAWS}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.N}")
        if not self.diag_var > 0:
            raise DomainError("diagonal_variance must be positive")
        rng.split_key(self.seed)


@dataclass(frozen=True)
class InitialCondition:
    kind: str = "sphere-uniform"
    radius: float = 1.0
    iid_law: str = "gaussian-std"
    seed: int = 0


@dataclass
class AuditReport:
    mean: float
    variance: float
    fourth_moment: float
    max_symmetry_defect: float
    diagonal_variance: float
    entries: int


def _unit_draws(law, seed, i, j):
    """Mean-zero, unit-variance draws for counters ``(i[k], j[k])``."""
    if law.startswith("gaussian"):
        return rng.normals(seed, rng.WIGNER, i, j)
    if law == "rademacher":
        w = rng.raw(seed, rng.WIGNER, i, j)[:, 0]
        return np.where(w >> np.uint32(31), 1.0, -1.0)
    u, _ = rng.uniforms(seed, rng.WIGNER, i, j)
    return _SQRT3 * (2.0 * u - 1.0)


def sample_wigner(spec: WignerSpec) -> np.ndarray:
    """Draw ``J = Z / sqrt(N)``; entry ``(i, j)`` depends only on ``(seed, i, j)``."""
    spec.validate()
    n = int(spec.N)
    iu, ju = np.triu_indices(n)
    z = _unit_draws(spec.entry_law, spec.seed, iu, ju)
    diag = iu == ju
    z[diag] *= np.sqrt(spec.diag_var)
    vals = z / np.sqrt(n)
    J = np.empty((n, n))
    J[iu, ju] = vals
    J[ju, iu] = vals
    return J


def sample_initial(cond: InitialCondition, N: int) -> np.ndarray:
    if int(N) != N or N < 1:
        raise DomainError(f"dimension must be a positive integer, got {N}")
    if not cond.radius > 0:
        raise DomainError(f"radius must be positive, got {cond.radius}")
    idx = np.arange(N)
    if cond.kind == "sphere-uniform":
        x = rng.normals(cond.seed, rng.SPHERE, idx)
        return x * (cond.radius / np.linalg.norm(x))
    if cond.kind != "iid":
        raise ConfigError(f"unknown initial condition kind {cond.kind!r}")
    if cond.iid_law == "gaussian-std":
        return rng.normals(cond.seed, rng.INITIAL, idx)
    if cond.iid_law == "rademacher":
        w = rng.raw(cond.seed, rng.INITIAL, idx)[:, 0]
        return np.where(w >> np.uint32(31), 1.0, -1.0)
    raise ConfigError(f"unknown iid law {cond.iid_law!r}")


def moment_audit(sample: np.ndarray, spec: WignerSpec) -> AuditReport:
    """Moments of the sqrt(N)-rescaled entries plus the symmetry defect.

    Statistics are taken over the strict upper triangle; for ``N = 1`` the
    single diagonal entry is used instead.
    """
    sample = np.asarray(sample, dtype=float)
    n = int(spec.N)
    if sample.shape != (n, n):
        raise DomainError(f"sample has shape {sample.shape}, spec says N={n}")
    z = sample * np.sqrt(n)
    if n >= 2:
        vals = z[np.triu_indices(n, k=1)]
    else:
        vals = z.ravel()
    d = np.diag(z)
    return AuditReport(
        mean=float(vals.mean()),
        variance=float(vals.var()),
        fourth_moment=float(np.mean(vals**4)),
        max_symmetry_defect=float(np.max(np.abs(sample - sample.T))),
        diagonal_variance=float(np.mean(d * d)),
        entries=int(vals.size),
    )
