"""Trial-level Monte-Carlo simulator for asynchronous BPSK CDMA.

Per trial, every user gets a uniform delay tau in [0, N*Tc), a uniform
carrier phase, previous/current symbol signs, and (under the random
policy) a fresh draw of distinct family-member slots.  Each user is then
demodulated as the coherent reference: its decision statistic is

    Z_i = b_{i,0} + (1/(N*Tc)) * sum_{k != i} Re[I_{i,k}(tau_k)] + g,

with I the two-lag partial-correlation interference term and g Gaussian
with standard deviation sqrt(N0/2E).  With this normalization the variance
of Z_i - b_{i,0} equals sum_k r_ik/(6 N^3) + N0/2E, so the analytic SNR is
the literal inverse coefficient of variation of Z.

Chip duration Tc is normalized to 1 (all BER-relevant quantities are
ratios), and each trial decides exactly one symbol per user.

Determinism: trials are grouped into fixed-size chunks; chunk c draws from
its own PCG64 stream derived via SeedSequence(seed, spawn_key=(1, c)).
Chunks are independent, so results are bit-identical for a given config
and independent of execution order; WEYLCDMA_THREADS > 1 maps chunks onto
a thread pool with an associative integer reduction.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from weylcdma.correlation import aperiodic_c, aperiodic_table
from weylcdma.sequences import (
    AssignmentPolicy,
    OptimalWeylParams,
    FZCParams,
    fzc_family_sequence,
    gold_family,
    optimal_weyl_sequence,
    vdc_assignment,
)
from weylcdma.snr import LinkBudget

__all__ = [
    "TC",
    "Z95",
    "FamilySpec",
    "SimConfig",
    "TrialDraw",
    "TrialSet",
    "BERResult",
    "SweepRow",
    "wilson_interval",
    "build_pool",
    "family_capacity",
    "interference",
    "decision_statistic",
    "simulate_trials",
    "collect_decision_noise",
    "run_ber",
    "sweep",
]

TC = 1.0  # chip duration; the symbol duration is T = N * TC
Z95 = 1.959963984540054  # two-sided 95% normal quantile

_CHUNK_BUDGET = 1_000_000  # target elements per (T, K, K) work array
_THREADS_ENV = "WEYLCDMA_THREADS"


@dataclass(frozen=True)
class FamilySpec:
    """Which spreading family the simulator draws codes from.

    kinds: "weyl" (slot pool of size k_max, default N), "optimal" (alias
    for weyl with k_max = K), "fzc" (one code per index m coprime to N,
    with the exponent triple below), "gold" (all N+2 members; N must be
    2**m - 1).
    """

    kind: str = "weyl"
    fzc_triple: tuple[float, float, float | None] = (1.0, 1.0, 1.275)
    gold_taps: tuple[tuple[int, ...], tuple[int, ...]] | None = None


@dataclass(frozen=True)
class SimConfig:
    n_users: int
    n_chips: int
    ebn0_db: float
    trials: int
    seed: int
    family: FamilySpec = field(default_factory=FamilySpec)
    policy: str = "random"
    gamma: float = 0.0
    k_max: int | None = None
    redraw_sigma: bool = True  # random policy: fresh slots each trial


@dataclass(frozen=True)
class TrialDraw:
    """One trial's channel randomness, one entry per user."""

    tau: np.ndarray        # delays in [0, N*Tc)
    phi: np.ndarray        # carrier phases in [0, 2*pi)
    bits_prev: np.ndarray  # previous symbols, +-1
    bits_cur: np.ndarray   # current symbols, +-1
    sigma: np.ndarray      # distinct family-member indices


@dataclass(frozen=True)
class TrialSet:
    """Vectorized draws and decisions for a batch of trials (arrays are (T, K))."""

    sigma: np.ndarray
    tau: np.ndarray
    phi: np.ndarray
    bits_prev: np.ndarray
    bits_cur: np.ndarray
    noise: np.ndarray  # standard-normal samples before scaling
    z: np.ndarray      # decision statistics

    def trial(self, row: int) -> TrialDraw:
        return TrialDraw(
            tau=self.tau[row],
            phi=self.phi[row],
            bits_prev=self.bits_prev[row],
            bits_cur=self.bits_cur[row],
            sigma=self.sigma[row],
        )


@dataclass(frozen=True)
class BERResult:
    per_user_ber: np.ndarray
    mean_ber: float
    error_count: int
    bit_count: int
    wilson_lo: float
    wilson_hi: float

    @property
    def wilson_95_interval(self) -> tuple[float, float]:
        return (self.wilson_lo, self.wilson_hi)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    family: str
    policy: str
    gamma: float
    kmax: int
    mean_ber: float
    wilson_lo: float
    wilson_hi: float
    bits: int


def wilson_interval(errors: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = errors / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    hw = (z / denom) * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n))
    lo = 0.0 if errors == 0 else max(0.0, center - hw)  # exact at the boundaries
    hi = 1.0 if errors == n else min(1.0, center + hw)
    return (lo, hi)


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _coprime_indices(n: int) -> list[int]:
    return [m for m in range(1, n) if math.gcd(m, n) == 1]


def _resolved_k_max(config: SimConfig) -> int:
    if config.family.kind == "optimal":
        return config.k_max if config.k_max is not None else config.n_users
    return config.k_max if config.k_max is not None else config.n_chips


def family_capacity(config: SimConfig) -> int:
    """Largest user count the configured family pool can serve."""
    kind = config.family.kind
    if kind in ("weyl", "optimal"):
        return _resolved_k_max(config)
    if kind == "fzc":
        return len(_coprime_indices(config.n_chips))
    if kind == "gold":
        return config.n_chips + 2
    raise ValueError(f"unknown family kind {kind!r}")


def build_pool(config: SimConfig) -> np.ndarray:
    """Materialize the family's candidate codes as an (F, N) complex array."""
    _validate(config)
    kind = config.family.kind
    n = config.n_chips
    if kind in ("weyl", "optimal"):
        k_max = _resolved_k_max(config)
        pool = [
            optimal_weyl_sequence(
                OptimalWeylParams(gamma=config.gamma, sigma_k=s, k_max=k_max, n_chips=n)
            ).chips
            for s in range(k_max)
        ]
    elif kind == "fzc":
        p, q, r = config.family.fzc_triple
        pool = [
            fzc_family_sequence(FZCParams(m_k=float(m), p=p, q=q, r=r, n_chips=n)).chips
            for m in _coprime_indices(n)
        ]
    else:  # gold
        degree = round(math.log2(n + 1))
        pool = [s.chips for s in gold_family(degree, taps=config.family.gold_taps)]
    return np.vstack(pool)


def _validate(config: SimConfig) -> None:
    if config.n_users < 1:
        raise ValueError("n_users must be >= 1")
    if config.n_chips < 2:
        raise ValueError("n_chips must be >= 2")
    if config.trials < 1:
        raise ValueError("trials must be >= 1")
    if config.seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    policy = AssignmentPolicy(config.policy)
    kind = config.family.kind
    if kind not in ("weyl", "optimal", "fzc", "gold"):
        raise ValueError(f"unknown family kind {kind!r}")
    if kind in ("weyl", "optimal"):
        k_max = _resolved_k_max(config)
        if k_max < config.n_users:
            raise ValueError(f"k_max={k_max} cannot serve {config.n_users} users")
    if kind == "gold":
        degree = round(math.log2(config.n_chips + 1))
        if (1 << degree) - 1 != config.n_chips:
            raise ValueError("gold family requires n_chips = 2**m - 1")
        if degree != 5 and config.family.gold_taps is None:
            raise ValueError("gold family beyond degree 5 requires explicit taps")
    if policy is AssignmentPolicy.VAN_DER_CORPUT:
        if kind != "weyl":
            raise ValueError("vdc policy applies to the weyl family with k_max = n_chips")
        if _resolved_k_max(config) != config.n_chips:
            raise ValueError("vdc policy requires k_max = n_chips")
        if not (_is_power_of_two(config.n_chips) and config.n_chips >= 4):
            raise ValueError("vdc policy requires n_chips = 2**m with m > 1")
    capacity = family_capacity(config)
    if config.n_users > capacity:
        raise ValueError(
            f"n_users={config.n_users} exceeds the {kind} family capacity {capacity}"
        )


def _fixed_assignment(config: SimConfig, pool_size: int) -> np.ndarray | None:
    """Per-run slot assignment, or None when slots are redrawn each trial."""
    policy = AssignmentPolicy(config.policy)
    k = config.n_users
    if policy is AssignmentPolicy.SEQUENTIAL:
        return np.arange(k, dtype=np.int64)
    if policy is AssignmentPolicy.VAN_DER_CORPUT:
        return vdc_assignment(k, config.n_chips)
    if config.redraw_sigma:
        return None
    rng = np.random.default_rng(np.random.SeedSequence(entropy=config.seed, spawn_key=(0,)))
    return np.asarray(rng.permutation(pool_size)[:k], dtype=np.int64)


# ---------------------------------------------------------------------------
# Scalar reference path (oracle-grade, used by tests and small studies)
# ---------------------------------------------------------------------------


def interference(i: int, k: int, draw: TrialDraw, seqs) -> complex:
    """Two-lag interference of user k on receiver i for one trial.

    exp(j phi_k) * [(tau_k - l Tc)(b_prev C(l) + b_cur C(l-N))
                    + ((l+1) Tc - tau_k)(b_prev C(l+1) + b_cur C(l+1-N))]
    with l = floor(tau_k / Tc).
    """
    if i == k:
        raise ValueError("interference is defined for k != i")
    x = np.asarray(getattr(seqs[i], "chips", seqs[i]), dtype=np.complex128)
    y = np.asarray(getattr(seqs[k], "chips", seqs[k]), dtype=np.complex128)
    n = x.size
    tau_k = float(draw.tau[k])
    if not 0.0 <= tau_k < n * TC:
        raise ValueError(f"tau must lie in [0, {n * TC}), got {tau_k}")
    l = int(tau_k // TC)
    b_prev = float(draw.bits_prev[k])
    b_cur = float(draw.bits_cur[k])
    low = b_prev * aperiodic_c(x, y, l) + b_cur * aperiodic_c(x, y, l - n)
    high = b_prev * aperiodic_c(x, y, l + 1) + b_cur * aperiodic_c(x, y, l + 1 - n)
    weight_low = tau_k - l * TC
    weight_high = (l + 1) * TC - tau_k
    return complex(np.exp(1j * float(draw.phi[k])) * (weight_low * low + weight_high * high))


def decision_statistic(
    i: int, draw: TrialDraw, seqs, budget: LinkBudget, noise_sample: float
) -> float:
    """Decision statistic of receiver i; noise_sample is a standard normal.

    User i is the coherent reference (tau_i = 0, phi_i = 0 by convention);
    its own draw entries are ignored.
    """
    n = len(np.asarray(getattr(seqs[i], "chips", seqs[i])))
    mai = sum(
        interference(i, k, draw, seqs).real for k in range(len(seqs)) if k != i
    )
    return float(draw.bits_cur[i]) + mai / (n * TC) + noise_sample * math.sqrt(budget.noise_term)


# ---------------------------------------------------------------------------
# Vectorized engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Engine:
    config: SimConfig
    table: np.ndarray            # (F, F, 2N+1) pairwise correlations
    fixed_sigma: np.ndarray | None
    pool_size: int
    noise_std: float
    chunk_size: int
    n_chunks: int


def _prepare(config: SimConfig) -> _Engine:
    pool = build_pool(config)
    table = aperiodic_table(pool)
    fixed = _fixed_assignment(config, pool.shape[0])
    ebn0 = 10.0 ** (config.ebn0_db / 10.0)
    noise_std = math.sqrt(0.5 / ebn0) if math.isfinite(ebn0) else 0.0
    k = config.n_users
    chunk = int(np.clip(_CHUNK_BUDGET // (k * k), 256, 65536))
    n_chunks = -(-config.trials // chunk)
    return _Engine(
        config=config,
        table=table,
        fixed_sigma=fixed,
        pool_size=pool.shape[0],
        noise_std=noise_std,
        chunk_size=chunk,
        n_chunks=n_chunks,
    )


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1, chunk_index)))


def _simulate_chunk(engine: _Engine, chunk_index: int) -> dict[str, np.ndarray]:
    cfg = engine.config
    k = cfg.n_users
    n = cfg.n_chips
    start = chunk_index * engine.chunk_size
    t = min(engine.chunk_size, cfg.trials - start)
    rng = _chunk_rng(cfg.seed, chunk_index)

    if engine.fixed_sigma is None:
        keys = rng.random((t, engine.pool_size))
        sigma = np.argsort(keys, axis=1)[:, :k].astype(np.int64)
    else:
        sigma = np.broadcast_to(engine.fixed_sigma, (t, k)).copy()
    tau = rng.random((t, k)) * (n * TC)
    phi = rng.random((t, k)) * (2.0 * np.pi)
    bits_prev = rng.integers(0, 2, size=(t, k)).astype(np.float64) * 2.0 - 1.0
    bits_cur = rng.integers(0, 2, size=(t, k)).astype(np.float64) * 2.0 - 1.0
    noise = rng.standard_normal((t, k))

    if k == 1:
        z = bits_cur + engine.noise_std * noise
    else:
        l = np.floor(tau / TC).astype(np.int64)
        s = (tau - l * TC)[:, None, :]
        u = TC - s
        ii = sigma[:, :, None]
        kk = sigma[:, None, :]
        base = l[:, None, :] + n  # lag axis offset: index lag + N
        c_l = engine.table[ii, kk, base]
        c_ln = engine.table[ii, kk, base - n]
        c_l1 = engine.table[ii, kk, base + 1]
        c_l1n = engine.table[ii, kk, base + 1 - n]
        bp = bits_prev[:, None, :]
        bc = bits_cur[:, None, :]
        a = s * (bp * c_l + bc * c_ln) + u * (bp * c_l1 + bc * c_l1n)
        ph = phi[:, None, :]
        re_i = np.cos(ph) * a.real - np.sin(ph) * a.imag
        idx = np.arange(k)
        re_i[:, idx, idx] = 0.0
        z = bits_cur + re_i.sum(axis=2) / (n * TC) + engine.noise_std * noise

    return {
        "sigma": sigma,
        "tau": tau,
        "phi": phi,
        "bits_prev": bits_prev,
        "bits_cur": bits_cur,
        "noise": noise,
        "z": z,
    }


def _thread_count() -> int:
    raw = os.environ.get(_THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_chunks(engine: _Engine, consume) -> None:
    """Run consume(chunk_index, chunk_dict) for every chunk.

    consume must only write to per-chunk slots (or perform commutative
    integer accumulation), so results do not depend on completion order.
    """
    threads = _thread_count()
    if threads == 1 or engine.n_chunks == 1:
        for c in range(engine.n_chunks):
            consume(c, _simulate_chunk(engine, c))
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(_simulate_chunk, engine, c): c for c in range(engine.n_chunks)}
        for fut, c in futures.items():
            consume(c, fut.result())


def simulate_trials(config: SimConfig, n_trials: int | None = None) -> TrialSet:
    """Run the engine and keep every draw and decision (memory: O(T*K)).

    Intended for diagnostics and tests; use ``run_ber`` for large counts.
    """
    trials = config.trials if n_trials is None else int(n_trials)
    cfg = dataclasses.replace(config, trials=trials)
    engine = _prepare(cfg)
    k = cfg.n_users
    out = {
        "sigma": np.empty((trials, k), dtype=np.int64),
        "tau": np.empty((trials, k)),
        "phi": np.empty((trials, k)),
        "bits_prev": np.empty((trials, k)),
        "bits_cur": np.empty((trials, k)),
        "noise": np.empty((trials, k)),
        "z": np.empty((trials, k)),
    }

    def consume(c: int, chunk: dict[str, np.ndarray]) -> None:
        lo = c * engine.chunk_size
        hi = lo + chunk["z"].shape[0]
        for name, arr in chunk.items():
            out[name][lo:hi] = arr

    _map_chunks(engine, consume)
    return TrialSet(**out)


def collect_decision_noise(config: SimConfig) -> tuple[np.ndarray, np.ndarray]:
    """Slot indices and decision-noise samples Z - b for every (trial, user).

    Returns (sigma, z_err), both (trials, K); used to compare empirical
    per-slot variances against the analytic interference term.
    """
    engine = _prepare(config)
    k = config.n_users
    sigma = np.empty((config.trials, k), dtype=np.int64)
    z_err = np.empty((config.trials, k))

    def consume(c: int, chunk: dict[str, np.ndarray]) -> None:
        lo = c * engine.chunk_size
        hi = lo + chunk["z"].shape[0]
        sigma[lo:hi] = chunk["sigma"]
        z_err[lo:hi] = chunk["z"] - chunk["bits_cur"]

    _map_chunks(engine, consume)
    return sigma, z_err


def run_ber(config: SimConfig) -> BERResult:
    """Monte-Carlo BER: one decision per user per trial, Wilson 95% interval.

    Deterministic given the config (seed included); an error is counted
    when Z_k * b_{k,0} < 0.
    """
    engine = _prepare(config)
    k = config.n_users
    errors_per_user = np.zeros(k, dtype=np.int64)

    def consume(_c: int, chunk: dict[str, np.ndarray]) -> None:
        err = (chunk["z"] * chunk["bits_cur"]) < 0.0
        errors_per_user[:] += err.sum(axis=0)

    _map_chunks(engine, consume)
    bits = config.trials * k
    total = int(errors_per_user.sum())
    lo, hi = wilson_interval(total, bits)
    return BERResult(
        per_user_ber=errors_per_user / config.trials,
        mean_ber=total / bits,
        error_count=total,
        bit_count=bits,
        wilson_lo=lo,
        wilson_hi=hi,
    )


def sweep(template: SimConfig, axis: str, values) -> list[SweepRow]:
    """Run the template once per axis value; axis is "users" or "ebn0"."""
    if axis not in ("users", "ebn0"):
        raise ValueError('axis must be "users" or "ebn0"')
    rows = []
    for v in values:
        if axis == "users":
            cfg = dataclasses.replace(template, n_users=int(v))
        else:
            cfg = dataclasses.replace(template, ebn0_db=float(v))
        res = run_ber(cfg)
        rows.append(
            SweepRow(
                axis_value=float(v),
                family=cfg.family.kind,
                policy=cfg.policy,
                gamma=cfg.gamma,
                kmax=_resolved_k_max(cfg) if cfg.family.kind in ("weyl", "optimal") else 0,
                mean_ber=res.mean_ber,
                wilson_lo=res.wilson_lo,
                wilson_hi=res.wilson_hi,
                bits=res.bit_count,
            )
        )
    return rows
