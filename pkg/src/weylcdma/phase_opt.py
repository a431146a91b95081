"""Optimal phase assignment on the unit circle.

Minimizes sum over user pairs of 1/sin(pi * d(rho_i, rho_k)), the
aggregate crosscorrelation bound, over K phases. The minimizer is the
equispaced assignment rho_i = gamma + (i-1)/K; this module evaluates the
objective, produces that closed-form solution together with its slack
values, constructs the Lagrange multipliers that certify it, and checks
the full KKT system (stationarity, primal feasibility, complementary
slackness) numerically. A random-sampling falsifier provides an
independent empirical cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhaseAssignment",
    "SlackMatrix",
    "LagrangeMultipliers",
    "SamplingReport",
    "circle_distance",
    "objective",
    "global_solution",
    "alpha_tilde",
    "construct_multipliers",
    "stationarity_vector",
    "kkt_residual",
    "verify_optimality_by_sampling",
]


@dataclass(frozen=True)
class PhaseAssignment:
    """Sorted user phases in [0, 1) plus the offset they were built from."""

    rhos: np.ndarray
    gamma: float = 0.0

    def __post_init__(self) -> None:
        rhos = np.asarray(self.rhos, dtype=np.float64)
        if rhos.ndim != 1 or rhos.size < 1:
            raise ValueError("rhos must be a non-empty 1-D vector")
        if np.any(rhos < 0.0) or np.any(rhos >= 1.0):
            raise ValueError("phases must lie in [0, 1)")
        if np.any(np.diff(rhos) < 0.0):
            raise ValueError("phases must be nondecreasing")
        object.__setattr__(self, "rhos", rhos)

    @property
    def n_users(self) -> int:
        return int(self.rhos.size)


@dataclass(frozen=True)
class SlackMatrix:
    """Strictly-upper-triangular slack values t[i, k] for i < k (0-based)."""

    t: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=np.float64)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("t must be a square matrix")
        object.__setattr__(self, "t", t)


@dataclass(frozen=True)
class LagrangeMultipliers:
    """Multipliers for the slack-form problem; zero outside the i < k triangle."""

    lam: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    xi_1: float
    xi_k: float
    o: np.ndarray


def circle_distance(rho_i: float, rho_k: float) -> float:
    """Wrap-around distance min(|rho_i - rho_k|, 1 - |rho_i - rho_k|) in [0, 1/2]."""
    diff = abs(rho_i - rho_k) % 1.0
    return min(diff, 1.0 - diff)


def _rhos(assignment) -> np.ndarray:
    if isinstance(assignment, PhaseAssignment):
        return assignment.rhos
    return np.asarray(assignment, dtype=np.float64)


def objective(assignment) -> float:
    """Sum over pairs i < k of 1/sin(pi * d(rho_i, rho_k)).

    Duplicate phases make a pair distance zero; the objective is then
    signaled as math.inf rather than raising, so samplers can keep going.
    """
    rhos = _rhos(assignment)
    k = rhos.size
    if k < 2:
        return 0.0
    diff = np.abs(rhos[:, None] - rhos[None, :]) % 1.0
    d = np.minimum(diff, 1.0 - diff)
    iu = np.triu_indices(k, 1)
    s = np.sin(np.pi * d[iu])
    if np.any(s == 0.0):
        return math.inf
    return float(np.sum(1.0 / s))


def global_solution(n_users: int, gamma: float) -> tuple[PhaseAssignment, SlackMatrix]:
    """Closed-form minimizer: equispaced phases gamma + (i-1)/K (mod 1).

    The offset enters mod 1/K: shifting gamma by 1/K permutes the same
    phase set, so the sorted representative uses gamma reduced to
    [0, 1/K), keeping the assignment sorted for any real gamma.  Slack
    values are t[i, k] = min(|k-i|/K, 1 - |k-i|/K), which equals
    d(rho_i, rho_k) at this solution.
    """
    k = int(n_users)
    if k < 2:
        raise ValueError("n_users must be >= 2")
    base = (gamma % 1.0) % (1.0 / k)
    rhos = base + np.arange(k, dtype=np.float64) / k
    rhos = np.minimum(rhos, np.nextafter(1.0, 0.0))  # guard rounding at the top edge
    t = np.zeros((k, k))
    for i, j in itertools.combinations(range(k), 2):
        m = j - i
        t[i, j] = min(m / k, 1.0 - m / k)
    return PhaseAssignment(rhos=rhos, gamma=float(gamma)), SlackMatrix(t=t)


def _alpha(t: float) -> float:
    """pi * cos(pi t) / sin(pi t)**2, the magnitude of d/dt 1/sin(pi t)."""
    return math.pi * math.cos(math.pi * t) / math.sin(math.pi * t) ** 2


def alpha_tilde(m: int, n_users: int) -> float:
    """Multiplier magnitude for a pair with index gap m; symmetric under m <-> K-m."""
    k = int(n_users)
    if not 1 <= m <= k - 1:
        raise ValueError(f"gap must lie in [1, {k - 1}], got {m}")
    t = min(m / k, 1.0 - m / k)
    return _alpha(t)


def construct_multipliers(
    n_users: int, solution: tuple[PhaseAssignment, SlackMatrix]
) -> LagrangeMultipliers:
    """Multipliers certifying the equispaced solution.

    Only the pair multipliers lam (lower-distance constraint) and mu
    (wrap-around constraint) are nonzero.  With gap m = k - i: for m < K/2
    the lower constraint is active and lam carries alpha_tilde(m); for
    m > K/2 the wrap constraint is active and mu carries it; for even K
    the antipodal gap m = K/2 has both constraints active and the weight
    splits evenly.
    """
    k = int(n_users)
    _, slack = solution
    lam = np.zeros((k, k))
    mu = np.zeros((k, k))
    half = k / 2.0
    for i, j in itertools.combinations(range(k), 2):
        gap = j - i
        a = _alpha(slack.t[i, j])
        if gap < half:
            lam[i, j] = a
        elif gap > half:
            mu[i, j] = a
        else:
            lam[i, j] = a / 2.0
            mu[i, j] = a / 2.0
    return LagrangeMultipliers(
        lam=lam, mu=mu, nu=np.zeros(k - 1), xi_1=0.0, xi_k=0.0, o=np.zeros((k, k))
    )


def stationarity_vector(
    solution: tuple[PhaseAssignment, SlackMatrix], multipliers: LagrangeMultipliers
) -> np.ndarray:
    """Gradient of the Lagrangian at the solution, stacked as (rhos, t-pairs).

    The t-pairs block is ordered (1,2), (1,3), ..., (1,K), (2,3), ...,
    (K-1,K); the whole vector vanishes at a KKT point.
    """
    assign, slack = solution
    k = assign.n_users
    pairs = list(itertools.combinations(range(k), 2))
    grad_rho = np.zeros(k)
    grad_t = np.zeros(len(pairs))
    for idx, (i, j) in enumerate(pairs):
        grad_t[idx] = -_alpha(slack.t[i, j])  # objective term d/dt 1/sin(pi t)
        lam = multipliers.lam[i, j]
        mu = multipliers.mu[i, j]
        o = multipliers.o[i, j]
        grad_rho[i] += lam - mu
        grad_rho[j] += mu - lam
        grad_t[idx] += lam + mu - o
    for i in range(k - 1):
        nu = multipliers.nu[i]
        grad_rho[i] += nu
        grad_rho[i + 1] -= nu
    grad_rho[0] -= multipliers.xi_1
    grad_rho[k - 1] += multipliers.xi_k
    return np.concatenate([grad_rho, grad_t])


def kkt_residual(
    solution: tuple[PhaseAssignment, SlackMatrix], multipliers: LagrangeMultipliers
) -> float:
    """Max-norm stationarity defect plus the worst complementary-slackness
    and primal-feasibility violations; near-zero certifies global
    optimality of the convex slack-form problem."""
    assign, slack = solution
    rhos = assign.rhos
    k = assign.n_users
    stat = float(np.max(np.abs(stationarity_vector(solution, multipliers))))

    comp = 0.0
    primal = 0.0
    neg = 0.0

    def account(value: float, mult: float) -> None:
        nonlocal comp, primal, neg
        comp = max(comp, abs(mult * value))
        primal = max(primal, value)
        neg = max(neg, -mult)

    for i, j in itertools.combinations(range(k), 2):
        t = slack.t[i, j]
        account(t + rhos[i] - rhos[j], multipliers.lam[i, j])
        account(t - 1.0 - rhos[i] + rhos[j], multipliers.mu[i, j])
        account(-t, multipliers.o[i, j])
    for i in range(k - 1):
        account(rhos[i] - rhos[i + 1], multipliers.nu[i])
    account(-rhos[0], multipliers.xi_1)
    account(rhos[k - 1] - 1.0, multipliers.xi_k)

    return stat + comp + max(primal, 0.0) + max(neg, 0.0)


@dataclass(frozen=True)
class SamplingReport:
    """Outcome of the random-sampling falsification run."""

    n_users: int
    n_samples: int
    seed: int
    optimal_objective: float
    best_sampled_objective: float
    shortfall: float  # best sampled minus optimal; negative would beat the optimum
    optimum_beaten: bool


def verify_optimality_by_sampling(n_users: int, samples: int, seed: int) -> SamplingReport:
    """Draw random feasible sorted phase vectors and compare their objectives.

    Reports the best sampled objective and whether any sample improved on
    the closed-form optimum by more than 1e-12.  Samples are drawn
    vectorized from one seeded PCG64 stream.
    """
    k = int(n_users)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    assign, _ = global_solution(k, 0.0)
    opt = objective(assign)
    rng = np.random.default_rng(seed)
    best = math.inf
    chunk = max(1, min(int(samples), 200_000 // max(k, 1)))
    remaining = int(samples)
    while remaining > 0:
        m = min(chunk, remaining)
        remaining -= m
        rho = np.sort(rng.random((m, k)), axis=1)
        diff = np.abs(rho[:, :, None] - rho[:, None, :])
        d = np.minimum(diff, 1.0 - diff)
        iu = np.triu_indices(k, 1)
        s = np.sin(np.pi * d[:, iu[0], iu[1]])
        with np.errstate(divide="ignore"):
            vals = np.where(np.any(s == 0.0, axis=1), np.inf, np.sum(1.0 / s, axis=1))
        best = min(best, float(np.min(vals)))
    return SamplingReport(
        n_users=k,
        n_samples=int(samples),
        seed=int(seed),
        optimal_objective=opt,
        best_sampled_objective=best,
        shortfall=best - opt,
        optimum_beaten=bool(opt > best + 1e-12),
    )
