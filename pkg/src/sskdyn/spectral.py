"""Symmetric eigendecomposition, semicircle-law functions, edge gaps."""

import math
from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from . import rng
from ._parallel import pmap
from .ensembles import WignerSpec, sample_wigner
from .errors import DomainError, NumericalError

SYMMETRY_TOL = 1e-12
EDGES = ("bottom", "top", "abs-top")


@dataclass
class SpectralData:
    """Ascending eigenvalues with column-paired orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def N(self) -> int:
        return int(self.eigenvalues.shape[0])

    def abs_order(self):
        """Indices ordering the spectrum by decreasing ``|lambda|``.

        Walks inward from both ends of the ascending spectrum; ties go to the
        positive edge.
        """
        lam = self.eigenvalues
        lo, hi = 0, self.N - 1
        order = np.empty(self.N, dtype=int)
        for k in range(self.N):
            if abs(lam[hi]) >= abs(lam[lo]):
                order[k] = hi
                hi -= 1
            else:
                order[k] = lo
                lo += 1
        return order

    def by_abs(self) -> "SpectralData":
        """Same decomposition reordered so that ``|sigma_1| >= |sigma_2| >= ...``."""
        order = self.abs_order()
        return SpectralData(self.eigenvalues[order], self.eigenvectors[:, order])


def _check_symmetric(J):
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {J.shape}")
    defect = float(np.max(np.abs(J - J.T))) if J.size else 0.0
    if defect > SYMMETRY_TOL:
        raise DomainError(f"matrix is not symmetric (max defect {defect:.3g})")
    return J


def fix_signs(V):
    """Flip columns so each one's largest-magnitude entry is positive.

    ``argmax`` returns the first maximizer, which is the lowest-index tie-break.
    """
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def eig_sym(J, tol_eig: float = 1e-10, tol_orth: float = 1e-10) -> SpectralData:
    """Eigendecomposition of a real symmetric matrix with verified residuals."""
    J = _check_symmetric(J)
    try:
        lam, V = np.linalg.eigh(J)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    V = fix_signs(V)
    scale = max(1.0, abs(lam[0]), abs(lam[-1])) if lam.size else 1.0
    resid = np.linalg.norm(J @ V - V * lam, axis=0)
    worst = float(resid.max()) if resid.size else 0.0
    if worst > tol_eig * scale:
        raise NumericalError(f"eigen-residual {worst:.3g} exceeds tolerance", worst=worst)
    orth = float(np.max(np.abs(V.T @ V - np.eye(J.shape[0])))) if lam.size else 0.0
    if orth > tol_orth:
        raise NumericalError(f"eigenvector orthogonality defect {orth:.3g}", worst=orth)
    return SpectralData(lam, V)


def eigvals_sym(J) -> np.ndarray:
    """Ascending eigenvalues only."""
    J = _check_symmetric(J)
    try:
        return np.linalg.eigvalsh(J)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc


# ---------------------------------------------------------------------------
# semicircle law


def semicircle_pdf(x):
    x = np.asarray(x, dtype=float)
    out = np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * np.pi)
    return out if out.ndim else float(out)


def semicircle_cdf(x):
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    out = 0.5 + (x * np.sqrt(4.0 - x * x)) / (4.0 * np.pi) + np.arcsin(x / 2.0) / np.pi
    return out if out.ndim else float(out)


def semicircle_ppf(u, tol: float = 1e-14, max_iter: int = 100):
    """Inverse CDF by safeguarded Newton (bisection fallback near the edges)."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)):
        raise DomainError("quantile level must lie in [0, 1]")
    lo = np.full(u.shape, -2.0)
    hi = np.full(u.shape, 2.0)
    # sin-law initial guess is exact at u in {0, 1/2, 1}
    x = 2.0 * np.sin(np.pi * (u - 0.5))
    for _ in range(max_iter):
        f = semicircle_cdf(x) - u
        lo = np.where(f < 0, x, lo)
        hi = np.where(f > 0, x, hi)
        d = semicircle_pdf(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(d > 0, f / d, 0.0)
        xn = x - step
        bad = (xn <= lo) | (xn >= hi) | (d <= 0)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        if np.all(np.abs(xn - x) <= tol):
            x = xn
            break
        x = xn
    return x if x.ndim else float(x)


def sample_semicircle(seed: int, n: int) -> np.ndarray:
    """``n`` i.i.d. semicircle draws; draw ``i`` depends only on ``(seed, i)``."""
    u, _ = rng.uniforms(seed, rng.SEMICIRCLE, np.arange(n))
    return semicircle_ppf(u)


def stieltjes_m(s: float) -> float:
    """``E[1 / (s - sigma)] = 2 / (s + sqrt(s^2 - 4))`` for ``s >= 2``.

    ``s = 2`` is accepted as the boundary value ``m(2) = 1``.
    """
    if not s >= 2.0:
        raise DomainError(f"Stieltjes transform needs s >= 2 (right of the support), got {s}")
    return 2.0 / (s + math.sqrt(s * s - 4.0))


def stieltjes_dm(s: float) -> float:
    """Derivative ``m'(s) = -m(s) / sqrt(s^2 - 4)`` for ``s > 2``."""
    if not s > 2.0:
        raise DomainError("m'(s) diverges at the edge; need s > 2")
    return -stieltjes_m(s) / math.sqrt(s * s - 4.0)


# ---------------------------------------------------------------------------
# edge gaps


def rescaled_gap(eigenvalues, which: str = "bottom") -> float:
    """``N^{2/3}`` times the gap between the two extreme eigenvalues at one edge."""
    lam = np.asarray(eigenvalues, dtype=float)
    n = lam.shape[0]
    if n < 2:
        raise DomainError("need at least two eigenvalues for a gap")
    if which == "bottom":
        gap = lam[1] - lam[0]
    elif which == "top":
        gap = lam[-1] - lam[-2]
    elif which == "abs-top":
        a = np.sort(np.abs(lam))
        gap = a[-1] - a[-2]
    else:
        raise DomainError(f"unknown edge {which!r}; expected one of {EDGES}")
    return float(n ** (2.0 / 3.0) * gap)


def _trial_eigvals(spec, trial):
    s = replace(spec, seed=rng.derive_seed(spec.seed, trial))
    return eigvals_sym(sample_wigner(s))


def trial_spectra(spec: WignerSpec, trials: int, workers: int = 1):
    """Eigenvalues of ``trials`` independent draws keyed by ``(spec.seed, trial)``."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    return pmap(partial(_trial_eigvals, spec), range(trials), workers)


def edge_gap_stats(spec: WignerSpec, trials: int, which: str = "bottom", workers: int = 1) -> np.ndarray:
    """One rescaled edge gap per independent draw, ordered by trial index."""
    if which not in EDGES:
        raise DomainError(f"unknown edge {which!r}; expected one of {EDGES}")
    spectra = trial_spectra(spec, trials, workers)
    return np.array([rescaled_gap(lam, which) for lam in spectra])
