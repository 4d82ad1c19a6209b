"""Hitting times of spherical gradient descent and power iteration.

Gradient descent on the unit sphere has overlaps with the eigenbasis in
closed form,

    |h_j(t)| = |h_j(0)| e^{-2 lam_j t} / sqrt(sum_i h_i(0)^2 e^{-4 lam_i t}),

evaluated here with every exponent shifted by ``lam_1`` so nothing
overflows. ``T_eps`` is the first time ``|h_1|`` reaches ``eps``; for power
iteration it is the first step ``k`` with ``|q_k . u_1| >= eps``.
"""

import math
from dataclasses import asdict, dataclass, replace
from functools import partial
from typing import List, Optional

import numpy as np

from . import rng
from ._parallel import pmap
from .ensembles import InitialCondition, WignerSpec, sample_initial, sample_wigner
from .errors import DegenerateInputError, DomainError, NotHitError, NumericalError
from .spectral import SpectralData, eig_sym

UNIT_TOL = 1e-10
DEGENERATE_GAP = 1e-14


@dataclass
class HittingRecord:
    N: int
    epsilon: float
    T_eps: float
    lower_bound: float
    upper_bound: float
    initial_overlap: float
    gap: float
    seed: int
    trial: int = 0
    algorithm: str = "gd"

    def as_row(self):
        return asdict(self)


@dataclass
class ScalingFit:
    Ns: List[int]
    medians: List[float]
    slope: float
    intercept: float
    r_squared: float
    algorithm: str = "gd"
    epsilon: float = 0.5
    trials: int = 0
    failures: int = 0


def _check_unit(x0):
    x0 = np.asarray(x0, dtype=float)
    nrm = float(np.linalg.norm(x0))
    if abs(nrm - 1.0) > UNIT_TOL:
        raise DomainError(f"initial vector must have unit norm, got {nrm:.15g}")
    return x0


def _check_eps(epsilon):
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")


# ---------------------------------------------------------------------------
# gradient descent


def overlaps(spectral: SpectralData, x0, t: float) -> np.ndarray:
    """All ``|h_j(t)|`` at once, in gap-shifted form."""
    x0 = _check_unit(x0)
    if t < 0:
        raise DomainError("t must be non-negative")
    h0 = spectral.eigenvectors.T @ x0
    shift = spectral.eigenvalues - spectral.eigenvalues[0]
    num = np.abs(h0) * np.exp(-2.0 * shift * t)
    return num / math.sqrt(float(np.sum(num * num)))


def overlap_closed_form(spectral: SpectralData, x0, t: float, j: int) -> float:
    """``|h_j(t)|`` for gradient descent from ``x0`` (``j`` is 0-based)."""
    return float(overlaps(spectral, x0, t)[j])


def _h1_at(h0sq, shift, h1sq, t):
    return math.sqrt(h1sq / float(np.sum(h0sq * np.exp(-4.0 * shift * t))))


def gd_bounds(spectral: SpectralData, x0, epsilon: float, k: int = 5):
    """Deterministic sandwich ``lower <= T_eps <= upper``.

    ``lower`` keeps the first ``k`` eigen-directions and bounds their rates
    by ``lam_k - lam_1``; ``upper`` bounds every rate below by the gap
    ``lam_2 - lam_1``. Both clamp at zero when their log argument is <= 1.
    """
    x0 = _check_unit(x0)
    _check_eps(epsilon)
    lam = spectral.eigenvalues
    if k < 2 or k > lam.shape[0]:
        raise DomainError(f"k must lie in [2, N], got {k}")
    gap = lam[1] - lam[0]
    if gap <= DEGENERATE_GAP:
        raise DegenerateInputError("lambda_2 == lambda_1; hitting time undefined")
    h0 = spectral.eigenvectors.T @ x0
    h1sq = h0[0] ** 2
    if h1sq == 0.0:
        raise DegenerateInputError("initial overlap with v_1 is zero")
    odds = 1.0 / epsilon**2 - 1.0
    arg_lo = float(np.sum(h0[1:k] ** 2)) / (h1sq * odds)
    lower = math.log(arg_lo) / (4.0 * (lam[k - 1] - lam[0])) if arg_lo > 1.0 else 0.0
    arg_up = (1.0 / h1sq - 1.0) / odds
    upper = math.log(arg_up) / (4.0 * gap) if arg_up > 1.0 else 0.0
    return {"lower": lower, "upper": upper}


def gd_hitting_time(spectral: SpectralData, x0, epsilon: float, tol: float = 1e-10) -> float:
    """First ``t >= 0`` with ``|h_1(t)| = eps``, by bisection on the closed form.

    ``|h_1|`` is non-decreasing in ``t``, so the root is unique; the bracket
    is ``[0, upper + 1]`` from :func:`gd_bounds`.
    """
    x0 = _check_unit(x0)
    _check_eps(epsilon)
    h0 = spectral.eigenvectors.T @ x0
    h0sq = h0 * h0
    h1sq = float(h0sq[0])
    if h1sq == 0.0:
        raise DegenerateInputError("initial overlap with v_1 is zero")
    if math.sqrt(h1sq) >= epsilon:
        return 0.0
    shift = spectral.eigenvalues - spectral.eigenvalues[0]
    lo, hi = 0.0, gd_bounds(spectral, x0, epsilon, k=2)["upper"] + 1.0
    if _h1_at(h0sq, shift, h1sq, hi) < epsilon:
        raise NumericalError("bisection bracket does not contain the hitting time")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _h1_at(h0sq, shift, h1sq, mid) >= epsilon:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def gd_ode_oracle(J, x0, t_end: float, dt: float, record: Optional[list] = None) -> np.ndarray:
    """RK4 for ``dX = -2 J X + 2 (X^T J X) X``, renormalized each step.

    Independent of the spectral closed form. Appends ``(t, X)`` pairs to
    ``record`` when a list is given.
    """
    J = np.asarray(J, dtype=float)
    x = _check_unit(x0).copy()
    if not dt > 0 or t_end < 0:
        raise DomainError("need dt > 0 and t_end >= 0")

    def field(v):
        Jv = J @ v
        return -2.0 * Jv + 2.0 * float(np.dot(v, Jv)) * v

    steps = int(math.ceil(t_end / dt - 1e-9))
    h = t_end / steps if steps else 0.0
    if record is not None:
        record.append((0.0, x.copy()))
    for k in range(steps):
        k1 = field(x)
        k2 = field(x + 0.5 * h * k1)
        k3 = field(x + 0.5 * h * k2)
        k4 = field(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        nrm = float(np.linalg.norm(x))
        if not np.isfinite(nrm) or nrm == 0.0:
            raise NumericalError("gradient-descent integration blew up")
        x /= nrm
        if record is not None:
            record.append(((k + 1) * h, x.copy()))
    return x


# ---------------------------------------------------------------------------
# power iteration


def _abs_spectrum(spectral: SpectralData) -> SpectralData:
    return spectral.by_abs()


def power_overlap_closed_form(spectral_abs: SpectralData, q0, k: int) -> float:
    """``|q_k . u_1| = |a_1| / sqrt(sum_i a_i^2 (sigma_i/sigma_1)^{2k})``."""
    a = spectral_abs.eigenvectors.T @ q0
    ratio = (spectral_abs.eigenvalues / spectral_abs.eigenvalues[0]) ** 2
    return abs(a[0]) / math.sqrt(float(np.sum(a * a * ratio**k)))


def default_power_cap(N: int) -> int:
    return int(math.ceil(1e4 * N ** (2.0 / 3.0)))


def power_hitting_time(spectral: SpectralData, q0, epsilon: float, k_max: Optional[int] = None, J=None) -> int:
    """First ``k >= 0`` with ``|q_k . u_1| >= eps``.

    Computed both by explicit iteration ``q_k = J q_{k-1} / |J q_{k-1}|`` and
    from the spectral closed form; a disagreement raises. ``spectral`` may be
    in either ordering; ``J`` defaults to ``V diag(lam) V^T``.
    """
    q = _check_unit(q0)
    _check_eps(epsilon)
    sp = _abs_spectrum(spectral)
    sig = sp.eigenvalues
    if sig.shape[0] > 1 and abs(sig[0]) - abs(sig[1]) <= DEGENERATE_GAP:
        raise DegenerateInputError("|sigma_1| == |sigma_2|; dominant direction undefined")
    u1 = sp.eigenvectors[:, 0]
    a = sp.eigenvectors.T @ q
    if a[0] == 0.0:
        raise DegenerateInputError("initial overlap with u_1 is zero")
    if k_max is None:
        k_max = default_power_cap(sig.shape[0])
    if J is None:
        J = (spectral.eigenvectors * spectral.eigenvalues) @ spectral.eigenvectors.T
    a2 = a * a
    ratio2 = (sig / sig[0]) ** 2
    weights = np.ones_like(ratio2)
    k_explicit = None
    k_closed = None
    overlap = abs(float(np.dot(q, u1)))
    for k in range(k_max + 1):
        if k_closed is None:
            closed = math.sqrt(a2[0] / float(np.sum(a2 * weights)))
            if closed >= epsilon:
                k_closed = k
        if k_explicit is None and overlap >= epsilon:
            k_explicit = k
        if k_closed is not None and k_explicit is not None:
            break
        if k == k_max:
            break
        q = J @ q
        q /= np.linalg.norm(q)
        overlap = abs(float(np.dot(q, u1)))
        weights *= ratio2
    if k_closed is None or k_explicit is None:
        raise NotHitError(f"overlap did not reach {epsilon} within {k_max} iterations", last_overlap=overlap, iterations=k_max)
    if k_closed != k_explicit:
        raise NumericalError(f"explicit iteration hit at k={k_explicit}, closed form at k={k_closed}")
    return k_explicit


def power_bounds(spectral: SpectralData, q0, epsilon: float, l: int = 5):
    """Sandwich for the power-iteration hitting step; bounds clamp at zero."""
    q0 = _check_unit(q0)
    _check_eps(epsilon)
    sp = _abs_spectrum(spectral)
    sig = np.abs(sp.eigenvalues)
    if l < 2 or l > sig.shape[0]:
        raise DomainError(f"l must lie in [2, N], got {l}")
    if sig[0] - sig[1] <= DEGENERATE_GAP:
        raise DegenerateInputError("|sigma_1| == |sigma_2|; dominant direction undefined")
    a = sp.eigenvectors.T @ q0
    a1sq = a[0] ** 2
    if a1sq == 0.0:
        raise DegenerateInputError("initial overlap with u_1 is zero")
    odds = 1.0 / epsilon**2 - 1.0
    arg_lo = float(np.sum(a[1:l] ** 2)) / (a1sq * odds)
    if arg_lo > 1.0 and sig[0] > sig[l - 1]:
        lower = 0.5 * math.log(arg_lo) / math.log(sig[0] / sig[l - 1])
    else:
        lower = 0.0
    arg_up = (1.0 / a1sq - 1.0) / (2.0 * (1.0 - epsilon))
    upper = 2.0 * math.log(arg_up) / math.log(sig[0] / sig[1]) if arg_up > 1.0 else 0.0
    return {"lower": lower, "upper": upper}


def abs_ratio_gap(eigenvalues) -> float:
    """``|sigma_1| / |sigma_2| - 1`` for the two largest-magnitude eigenvalues."""
    a = np.sort(np.abs(np.asarray(eigenvalues, dtype=float)))
    return float(a[-1] / a[-2] - 1.0)


# ---------------------------------------------------------------------------
# experiments


def _instance(N, trial, epsilon, algorithm, base_seed, k_bound):
    seed = rng.derive_seed(base_seed, N, trial)
    J = sample_wigner(WignerSpec(N=N, entry_law="gaussian-orthogonal", seed=rng.derive_seed(seed, 0)))
    sp = eig_sym(J)
    x0 = sample_initial(InitialCondition(kind="sphere-uniform", radius=1.0, seed=rng.derive_seed(seed, 1)), N)
    if algorithm == "gd":
        T = gd_hitting_time(sp, x0, epsilon)
        b = gd_bounds(sp, x0, epsilon, k_bound)
        h1 = float(sp.eigenvectors[:, 0] @ x0)
        gap = float(sp.eigenvalues[1] - sp.eigenvalues[0])
    else:
        T = float(power_hitting_time(sp, x0, epsilon, J=J))
        b = power_bounds(sp, x0, epsilon, k_bound)
        h1 = float(sp.by_abs().eigenvectors[:, 0] @ x0)
        gap = abs_ratio_gap(sp.eigenvalues)
    return HittingRecord(N, epsilon, T, b["lower"], b["upper"], h1, gap, seed, trial, algorithm)


def _safe_instance(args):
    try:
        return _instance(*args)
    except NotHitError as exc:
        return exc


def hitting_records(Ns, trials: int, epsilon: float = 0.5, algorithm: str = "gd", base_seed: int = 0, k_bound: int = 5, workers: int = 1):
    """Records for every ``(N, trial)``, sorted by ``(N, trial)``.

    Returns ``(records, failures)``; cap failures are counted, not dropped
    silently.
    """
    if algorithm not in ("gd", "power"):
        raise DomainError(f"algorithm must be 'gd' or 'power', got {algorithm!r}")
    _check_eps(epsilon)
    jobs = [(int(N), t, epsilon, algorithm, base_seed, k_bound) for N in sorted(Ns) for t in range(trials)]
    out = pmap(_safe_instance, jobs, workers)
    records = [r for r in out if isinstance(r, HittingRecord)]
    failures = [r for r in out if not isinstance(r, HittingRecord)]
    return records, failures


def fit_scaling(records, algorithm="gd", epsilon=0.5, trials=0, failures=0) -> ScalingFit:
    """Least-squares line through ``(log N, log median T_eps)``."""
    Ns = sorted({r.N for r in records})
    if len(Ns) < 2:
        raise DomainError("a scaling fit needs at least two distinct N")
    med = [float(np.median([r.T_eps for r in records if r.N == n])) for n in Ns]
    if min(med) <= 0:
        raise DomainError("median hitting time is zero; cannot take logs")
    x = np.log(np.asarray(Ns, dtype=float))
    y = np.log(np.asarray(med))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return ScalingFit(Ns, med, float(slope), float(intercept), r2, algorithm, epsilon, trials, failures)


def scaling_experiment(Ns, trials: int, epsilon: float = 0.5, algorithm: str = "gd", base_seed: int = 0, workers: int = 1, k_bound: int = 5):
    """Fresh GOE draw and sphere-uniform start per ``(N, trial)``; fit the medians.

    Returns ``(fit, records)``.
    """
    Ns = sorted(int(n) for n in Ns)
    if len(set(Ns)) < 2:
        raise DomainError("a scaling fit needs at least two distinct N")
    if min(Ns) < 100:
        raise DomainError("each N must be at least 100")
    if trials < 10:
        raise DomainError("trials must be at least 10")
    records, failures = hitting_records(Ns, trials, epsilon, algorithm, base_seed, k_bound, workers)
    fit = fit_scaling(records, algorithm, epsilon, trials, len(failures))
    return fit, records


# ---------------------------------------------------------------------------
# probabilistic ingredients of the lower bounds


def sum_ratio_frequency(k: int = 10, C: float = 2.0, draws: int = 100_000, seed: int = 0) -> float:
    """Empirical ``P((X_1+...+X_k)/X_1 > C)`` for i.i.d. unit exponentials.

    For any positive i.i.d. sequence this probability is at least ``1 - C/k``.
    """
    if k < 1 or draws < 1:
        raise DomainError("k and draws must be positive")
    idx = np.arange(draws)
    cols = []
    for j in range((k + 1) // 2):
        u1, u2 = rng.uniforms(seed, rng.EXPONENTIAL, idx, j)
        cols += [-np.log(u1), -np.log(u2)]
    X = np.stack(cols[:k], axis=1)
    return float(np.mean(X.sum(axis=1) / X[:, 0] > C))


def scaled_initial_overlaps(N: int = 1000, draws: int = 10_000, seed: int = 0) -> np.ndarray:
    """``sqrt(N) h_1(0)`` for sphere-uniform starts against one GOE ground state."""
    J = sample_wigner(WignerSpec(N=N, seed=rng.derive_seed(seed, 0)))
    v1 = eig_sym(J).eigenvectors[:, 0]
    out = np.empty(draws)
    for d in range(draws):
        x0 = sample_initial(InitialCondition(kind="sphere-uniform", seed=rng.derive_seed(seed, 1, d)), N)
        out[d] = v1 @ x0
    return math.sqrt(N) * out
