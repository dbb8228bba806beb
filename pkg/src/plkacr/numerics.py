"""Numerical side: rate evaluation, positive steady states, Laplacian kernels."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .kinetics import KineticSystem
from .model import linear_maps, linkage_partitions, structural_summary

SVD_CUTOFF = 1e-10
SUPPORT_TOL = 1e-9


@dataclass(frozen=True)
class _Arrays:
    F: np.ndarray
    N: np.ndarray
    Ia: np.ndarray
    Y: np.ndarray


@lru_cache(maxsize=128)
def _arrays(sys: KineticSystem) -> _Arrays:
    maps = linear_maps(sys.net)

    def arr(rows, shape):
        return np.array([[float(x) for x in row] for row in rows], dtype=float).reshape(shape)

    net = sys.net
    return _Arrays(
        F=sys.F_array(),
        N=arr(maps.N, (net.m, net.r)),
        Ia=arr(maps.Ia, (net.n, net.r)),
        Y=arr(maps.Y, (net.m, net.n)),
    )


def _rates(sys: KineticSystem, k) -> np.ndarray:
    if k is None:
        return sys.numeric_rates()
    k = np.asarray(k, dtype=float)
    if k.shape != (sys.net.r,):
        raise ValueError(f"rate vector must have {sys.net.r} entries")
    if np.any(k <= 0):
        raise ValueError("rate constants must be positive")
    return k


@dataclass(frozen=True)
class Rates:
    K: np.ndarray
    f: np.ndarray
    g: np.ndarray


def evaluate(sys: KineticSystem, k, c: Sequence[float]) -> Rates:
    """Reaction rates ``K``, species formation rate ``f = N K`` and complex formation rate ``g = Ia K``."""
    k = _rates(sys, k)
    c = np.asarray(c, dtype=float)
    if c.shape != (sys.net.m,):
        raise ValueError(f"state must have {sys.net.m} entries")
    if np.any(~(c > 0)):
        raise ValueError("concentrations must be strictly positive")
    a = _arrays(sys)
    K = k * np.exp(a.F @ np.log(c))
    return Rates(K=K, f=a.N @ K, g=a.Ia @ K)


def check_complex_balanced(sys: KineticSystem, k, c, tol: float = 1e-8) -> bool:
    return float(np.max(np.abs(evaluate(sys, k, c).g))) <= tol


@dataclass(frozen=True)
class SteadyStateSet:
    """Converged multistart results.

    ``converged`` holds every converged run (sorted lexicographically);
    ``states`` is the same list after merging runs that agree to the
    relative ``dedupe_tol`` in every coordinate.
    """

    states: np.ndarray
    residuals: np.ndarray
    g_residuals: np.ndarray
    converged: np.ndarray
    converged_g_residuals: np.ndarray
    dedupe_tol: float
    trials: int

    def __len__(self) -> int:
        return len(self.states)


LOG_BOUND = 50.0


def _newton(u, log_k, a: _Arrays, tol, rel_tol, max_iter, max_halvings):
    absN = np.abs(a.N)

    def resid(v):
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            K = np.exp(log_k + a.F @ v)
            f = a.N @ K
            s = absN @ K
            scaled = f / np.where(s > 0, s, 1.0)
        return K, f, s, scaled

    def done(v, f, scaled):
        return (
            np.max(np.abs(f)) <= tol
            and np.max(np.abs(scaled)) <= rel_tol
            and np.max(np.abs(v)) <= LOG_BOUND
        )

    K, f, s, r = resid(u)
    if not np.all(np.isfinite(r)):
        return None
    for _ in range(max_iter):
        if done(u, f, r):
            return u
        if np.max(np.abs(u)) > LOG_BOUND:
            return None
        Jf = a.N @ (K[:, None] * a.F)
        Js = absN @ (K[:, None] * a.F)
        safe = np.where(s > 0, s, 1.0)
        Jr = (Jf - r[:, None] * Js) / safe[:, None]
        step = -np.linalg.lstsq(Jr, r, rcond=None)[0]
        merit = np.linalg.norm(r)
        t = 1.0
        for _ in range(max_halvings + 1):
            cand = u + t * step
            K_new, f_new, s_new, r_new = resid(cand)
            if np.all(np.isfinite(r_new)) and np.linalg.norm(r_new) < merit:
                break
            t /= 2
        else:
            return None
        u, K, f, s, r = cand, K_new, f_new, s_new, r_new
    return u if done(u, f, r) else None


def _dedupe(states: np.ndarray, rtol: float) -> list[int]:
    kept: list[int] = []
    for i, x in enumerate(states):
        if not any(
            np.all(np.abs(x - states[j]) <= rtol * np.maximum(np.abs(x), np.abs(states[j])))
            for j in kept
        ):
            kept.append(i)
    return kept


def find_steady_states(
    sys: KineticSystem,
    k=None,
    trials: int = 20,
    seed: int = 0,
    tol: float = 1e-10,
    rel_tol: float = 1e-8,
    box: tuple[float, float] = (-2.0, 2.0),
    max_iter: int = 200,
    max_halvings: int = 50,
    dedupe_tol: float = 1e-6,
) -> SteadyStateSet:
    """Multistart damped Newton on ``u -> f(exp(u))`` in log-concentration space.

    Starts are drawn uniformly from the log10 ``box`` with a seeded
    generator.  Newton works on the row-equilibrated residual
    ``r_i = f_i / sum_j |N_ij| K_j``, which has the same positive roots as
    ``f`` but is blind to a monomial factor shared by a whole row (a
    concentration raised to -68 would otherwise pull iterates to the
    boundary).  Steps solve the often rank-deficient system in the
    least-squares sense and are halved until ``|r|`` drops.

    A run converges once ``max|f| <= tol`` and ``max|r| <= rel_tol``.  Runs
    leaving ``|log c| <= 50`` are dropped.
    """
    k = _rates(sys, k)
    a = _arrays(sys)
    rng = np.random.default_rng(seed)
    starts = rng.uniform(box[0], box[1], size=(trials, sys.net.m)) * np.log(10.0)
    log_k = np.log(k)
    found = []
    for u0 in starts:
        u = _newton(u0, log_k, a, tol, rel_tol, max_iter, max_halvings)
        if u is not None:
            found.append(np.exp(u))
    m = sys.net.m
    if not found:
        empty = np.empty((0, m))
        return SteadyStateSet(empty, np.empty(0), np.empty(0), empty, np.empty(0), dedupe_tol, trials)
    conv = np.array(sorted(found, key=tuple))
    g_all = np.array([np.max(np.abs(evaluate(sys, k, c).g)) for c in conv])
    keep = _dedupe(conv, dedupe_tol)
    states = conv[keep]
    res = np.array([np.max(np.abs(evaluate(sys, k, c).f)) for c in states])
    return SteadyStateSet(states, res, g_all[keep], conv, g_all, dedupe_tol, trials)


@dataclass(frozen=True)
class RobustnessCheck:
    """Empirical spread of one species over the steady states found.

    This is evidence over sampled equilibria, never a proof.
    """

    species: str
    acr_spread: float | None
    bcr_spread: float | None
    states_used: int
    balanced_states_used: int
    tol_spread: float

    @property
    def acr_verdict(self) -> str:
        if self.acr_spread is None:
            return "insufficient-evidence"
        return "pass" if self.acr_spread <= self.tol_spread else "fail"

    @property
    def bcr_verdict(self) -> str:
        if self.bcr_spread is None:
            return "insufficient-evidence"
        return "pass" if self.bcr_spread <= self.tol_spread else "fail"


def verify_robustness(
    sys: KineticSystem,
    k,
    species: str,
    trials: int = 20,
    seed: int = 0,
    tol_spread: float = 1e-6,
    cb_tol: float = 1e-8,
    steady: SteadyStateSet | None = None,
) -> RobustnessCheck:
    """Spread (max - min) of ``species`` across converged multistart runs.

    The balanced spread only looks at runs whose complex formation rate
    vanishes to ``cb_tol``.  Fewer than two runs gives no verdict.
    """
    if steady is None:
        steady = find_steady_states(sys, k, trials=trials, seed=seed)
    i = sys.net.species_index(species)
    vals = steady.converged[:, i]
    balanced = vals[steady.converged_g_residuals <= cb_tol]

    def spread(v):
        return float(v.max() - v.min()) if len(v) >= 2 else None

    return RobustnessCheck(species, spread(vals), spread(balanced), len(vals), len(balanced), tol_spread)


@dataclass(frozen=True)
class KernelReport:
    basis: np.ndarray
    supports: tuple[tuple[int, ...], ...]
    dim_ker_A: int
    dim_ker_YA: int
    expected_dim_ker_YA: int | None
    warnings: tuple[str, ...]

    @property
    def consistent(self) -> bool:
        return not self.warnings


def laplacian_matrix(sys: KineticSystem, kappa) -> np.ndarray:
    kappa = np.asarray(kappa, dtype=float)
    if kappa.shape != (sys.net.r,) or np.any(kappa <= 0):
        raise ValueError("kappa must be a positive vector over reactions")
    A = np.zeros((sys.net.n, sys.net.n))
    for j, rx in enumerate(sys.net.reactions):
        A[rx.reactant, rx.reactant] -= kappa[j]
        A[rx.product, rx.reactant] += kappa[j]
    return A


def _null_space(M: np.ndarray, cutoff: float) -> np.ndarray:
    if M.shape[0] == 0:
        return np.eye(M.shape[1])
    _, s, vt = np.linalg.svd(M)
    top = s[0] if s.size else 0.0
    rank = int(np.sum(s > cutoff * top)) if top > 0 else 0
    return vt[rank:].T


def laplacian_kernel(sys: KineticSystem, kappa) -> KernelReport:
    """Kernel of the Laplacian with one non-negative basis vector per terminal class.

    The kernel comes from an SVD of ``A_kappa``.  Inside it, each terminal
    strong linkage class is matched to the vectors vanishing off that class;
    that subspace has to be one-dimensional and positive on the class.
    """
    A = laplacian_matrix(sys, kappa)
    n = sys.net.n
    kernel = _null_space(A, SVD_CUTOFF)
    d = kernel.shape[1]
    terminal = linkage_partitions(sys.net).terminal_strong_linkage_classes
    summary = structural_summary(sys.net)
    warnings = []
    if d != len(terminal):
        warnings.append(f"kernel dimension {d} differs from the {len(terminal)} terminal classes")

    basis, supports = [], []
    for cls in terminal:
        outside = [i for i in range(n) if i not in set(cls)]
        z = _null_space(kernel[outside, :], SVD_CUTOFF) if outside else np.eye(d)
        if z.shape[1] != 1:
            warnings.append(f"terminal class {list(cls)} does not pin down a single kernel vector")
            continue
        v = kernel @ z[:, 0]
        if v.sum() < 0:
            v = -v
        v = v / np.max(np.abs(v))
        v[np.abs(v) <= SUPPORT_TOL] = 0.0
        if np.any(v < 0):
            warnings.append(f"kernel vector on {list(cls)} has mixed signs")
        basis.append(v)
        supports.append(tuple(int(i) for i in np.flatnonzero(v)))
    if warnings:
        basis = list(kernel.T)
        supports = [tuple(int(i) for i in np.flatnonzero(np.abs(v) > SUPPORT_TOL)) for v in basis]

    a = _arrays(sys)
    dim_ya = _null_space(a.Y @ A, SVD_CUTOFF).shape[1]
    expected = summary.delta + summary.t if summary.weakly_reversible else None
    if expected is not None and dim_ya != expected:
        warnings.append(f"dim Ker(Y A) = {dim_ya}, expected deficiency + t = {expected}")
    return KernelReport(
        basis=np.array(basis).reshape(len(basis), n),
        supports=tuple(supports),
        dim_ker_A=d,
        dim_ker_YA=dim_ya,
        expected_dim_ker_YA=expected,
        warnings=tuple(warnings),
    )
