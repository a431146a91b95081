"""Correlation machinery for spreading-sequence pairs.

Provides the lag-windowed aperiodic partial correlation C(l), its periodic
and odd combinations theta(l) = C(l) + C(l-N) and theta_hat(l) =
C(l) - C(l-N), the closed form and crosscorrelation bound for Weyl-class
pairs, and the adjacent-lag interference moment r used by the analytic
SNR.

Lag conventions match 1-indexed chips: for 0 <= l <= N-1,
C(l) = sum_{n=1}^{N-l} conj(x[n+l]) * y[n]; for 1-N <= l < 0,
C(l) = sum_{n=1}^{N+l} conj(x[n]) * y[n-l]; C vanishes for |l| >= N.
Sums are evaluated with pairwise accumulation (np.dot), so rounding error
stays far below the tolerances used by callers.
"""

from __future__ import annotations

import math
import operator
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegeneratePhaseError",
    "DegeneratePhaseWarning",
    "CorrelationProfile",
    "aperiodic_c",
    "periodic_theta",
    "odd_theta_hat",
    "weyl_c_closed_form",
    "cross_bound",
    "r_ik",
    "aperiodic_table",
    "correlation_profile",
]


class DegeneratePhaseError(ValueError):
    """Raised when two phases coincide mod 1 and the requested bound diverges."""


class DegeneratePhaseWarning(UserWarning):
    """Emitted when coincident phases force the closed form onto its limit value N - l."""


def _chips(x) -> np.ndarray:
    a = np.asarray(getattr(x, "chips", x), dtype=np.complex128)
    if a.ndim != 1:
        raise ValueError("expected a 1-D chip vector")
    return a


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    a, b = _chips(x), _chips(y)
    if a.size != b.size:
        raise ValueError(f"sequence lengths differ: {a.size} != {b.size}")
    return a, b


def aperiodic_c(x, y, lag: int) -> complex:
    """Aperiodic partial correlation C_{x,y}(lag); zero for |lag| >= N."""
    a, b = _pair(x, y)
    n = a.size
    l = operator.index(lag)
    if abs(l) >= n:
        return 0j
    if l >= 0:
        return complex(np.dot(np.conj(a[l:]), b[: n - l]))
    return complex(np.dot(np.conj(a[: n + l]), b[-l:]))


def _check_lag(lag: int, n: int) -> int:
    l = operator.index(lag)
    if not 0 <= l < n:
        raise ValueError(f"lag must lie in [0, {n}), got {lag}")
    return l


def periodic_theta(x, y, lag: int) -> complex:
    """Periodic correlation theta(lag) = C(lag) + C(lag - N) for lag in [0, N)."""
    a, b = _pair(x, y)
    l = _check_lag(lag, a.size)
    return aperiodic_c(a, b, l) + aperiodic_c(a, b, l - a.size)


def odd_theta_hat(x, y, lag: int) -> complex:
    """Odd correlation theta_hat(lag) = C(lag) - C(lag - N) for lag in [0, N)."""
    a, b = _pair(x, y)
    l = _check_lag(lag, a.size)
    return aperiodic_c(a, b, l) - aperiodic_c(a, b, l - a.size)


def weyl_c_closed_form(rho_i: float, rho_k: float, lag: int, n_chips: int) -> float:
    """|C(lag)| for a Weyl pair: |sin(pi*(N-lag)*(rho_k-rho_i)) / sin(pi*(rho_k-rho_i))|.

    Coincident phases (rho_i == rho_k mod 1) are a removable singularity of
    the quotient; the limit value N - lag is returned and a
    DegeneratePhaseWarning is emitted, because the companion bound
    ``cross_bound`` is genuinely infinite there.
    """
    n = int(n_chips)
    l = _check_lag(lag, n)
    diff = (rho_k - rho_i) % 1.0
    denom = math.sin(math.pi * diff)
    if denom == 0.0:
        warnings.warn(
            "coincident phases: closed form degenerates to |C| = N - lag",
            DegeneratePhaseWarning,
            stacklevel=2,
        )
        return float(n - l)
    return abs(math.sin(math.pi * (n - l) * diff) / denom)


def cross_bound(rho_i: float, rho_k: float) -> float:
    """Upper bound 1 / sin(pi * d(rho_i, rho_k)) on |C| over all lags.

    Symmetric in its arguments.  Raises DegeneratePhaseError when the
    phases coincide mod 1: the bound is infinite and callers must not
    treat it as finite.
    """
    diff = abs(rho_i - rho_k) % 1.0
    d = min(diff, 1.0 - diff)
    s = math.sin(math.pi * d)
    if s == 0.0:
        raise DegeneratePhaseError(
            f"phases coincide mod 1 (rho_i={rho_i}, rho_k={rho_k}); bound is infinite"
        )
    return 1.0 / s


def r_ik(x, y) -> float:
    """Adjacent-lag interference moment of a sequence pair.

    Sum over lags l = 0..N-1 of the squared partial correlations at
    l-N, l-N+1, l, l+1 plus the real cross terms of each adjacent pair.
    Equals 6*N**3 times the variance of the per-interferer despread output
    under uniform random delay, carrier phase, and symbol signs, so that
    {sum_k r/(6N^3) + N0/2E}^(-1/2) is the analytic SNR.
    """
    a, b = _pair(x, y)
    n = a.size
    c = {l: aperiodic_c(a, b, l) for l in range(-n, n + 2)}
    total = 0.0
    for l in range(n):
        cm, cm1 = c[l - n], c[l - n + 1]
        cl, cl1 = c[l], c[l + 1]
        total += (
            abs(cm) ** 2
            + (cm * cm1.conjugate()).real
            + abs(cm1) ** 2
            + abs(cl) ** 2
            + (cl * cl1.conjugate()).real
            + abs(cl1) ** 2
        )
    return total


def aperiodic_table(family) -> np.ndarray:
    """All pairwise aperiodic correlations of a family of equal-length codes.

    Returns an (F, F, 2N+1) complex array T with T[i, k, lag + N] =
    C_{i,k}(lag) for lag in [-N, N]; the lag = +-N planes are zero.
    """
    if isinstance(family, np.ndarray) and family.ndim == 2:
        x = np.asarray(family, dtype=np.complex128)
    else:
        x = np.vstack([_chips(s) for s in family])
    f, n = x.shape
    table = np.zeros((f, f, 2 * n + 1), dtype=np.complex128)
    xc = np.conj(x)
    for l in range(n):
        table[:, :, n + l] = xc[:, l:] @ x[:, : n - l].T
        if l:
            table[:, :, n - l] = xc[:, : n - l] @ x[:, l:].T
    return table


@dataclass(frozen=True)
class CorrelationProfile:
    """Per-lag correlation summary of one sequence pair.

    ``lags`` runs over 1-N .. N-1 and indexes ``c_values``; ``theta`` and
    ``theta_hat`` hold the periodic/odd combinations for lags 0 .. N-1.
    """

    lags: np.ndarray
    c_values: np.ndarray
    theta: np.ndarray
    theta_hat: np.ndarray


def correlation_profile(x, y) -> CorrelationProfile:
    """Evaluate C over all lags plus theta and theta_hat for one pair."""
    a, b = _pair(x, y)
    n = a.size
    lags = np.arange(1 - n, n)
    c_values = np.array([aperiodic_c(a, b, int(l)) for l in lags])
    c_at = lambda l: c_values[l - (1 - n)] if -n < l < n else 0j
    theta = np.array([c_at(l) + c_at(l - n) for l in range(n)])
    theta_hat = np.array([c_at(l) - c_at(l - n) for l in range(n)])
    return CorrelationProfile(lags=lags, c_values=c_values, theta=theta, theta_hat=theta_hat)
