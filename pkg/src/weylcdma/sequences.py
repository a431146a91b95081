"""Spreading-sequence generators.

Covers the Weyl phase-increment family, the extended Frank-Zadoff-Chu
(FZC) family with a real-valued index, the equispaced-slot "optimal Weyl"
construction, binary Gold codes built from a preferred pair of LFSRs, and
the base-2 radical-inverse (Van der Corput) slot assignment.

All generators return unit-modulus complex chips; chip index n runs from
1 to N.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "UNIT_MODULUS_TOL",
    "AssignmentPolicy",
    "ChipSequence",
    "WeylParams",
    "FZCParams",
    "OptimalWeylParams",
    "weyl_sequence",
    "fzc_family_sequence",
    "optimal_weyl_sequence",
    "van_der_corput",
    "vdc_assignment",
    "gold_code",
    "gold_family",
    "gold_family_size",
]

UNIT_MODULUS_TOL = 1e-12


class AssignmentPolicy(str, enum.Enum):
    """How slot values sigma_k are handed out to users."""

    RANDOM = "random"          # sampled without replacement, fresh per trial
    VAN_DER_CORPUT = "vdc"     # sigma_k = N * v_k, k-th radical-inverse value
    SEQUENTIAL = "sequential"  # sigma_k = k - 1


@dataclass(frozen=True)
class ChipSequence:
    """A length-N spreading code of unit-modulus complex chips."""

    chips: np.ndarray
    family_tag: str = ""

    def __post_init__(self) -> None:
        chips = np.asarray(self.chips, dtype=np.complex128)
        if chips.ndim != 1 or chips.size == 0:
            raise ValueError("chips must be a non-empty 1-D vector")
        if np.max(np.abs(np.abs(chips) - 1.0)) >= UNIT_MODULUS_TOL:
            raise ValueError("chips must have unit modulus")
        object.__setattr__(self, "chips", chips)

    def __len__(self) -> int:
        return int(self.chips.size)


@dataclass(frozen=True)
class WeylParams:
    """Phase increment rho, initial offset delta, and length for a Weyl code."""

    rho: float
    delta: float
    n_chips: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")
        if int(self.n_chips) < 1:
            raise ValueError("n_chips must be a positive integer")


@dataclass(frozen=True)
class FZCParams:
    """Extended-FZC parameters: real index m_k and exponent triple (p, q, r).

    ``r=None`` encodes an absent third term (the classic families written
    with r = -infinity); a float ``-inf`` passed for r is normalized to
    ``None`` so the generator never evaluates n**-inf.
    """

    m_k: float
    p: float
    q: float
    r: float | None
    n_chips: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.m_k):
            raise ValueError("m_k must be finite")
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise ValueError("p and q must be finite reals")
        if self.r is not None:
            r = float(self.r)
            if math.isinf(r) and r < 0:
                object.__setattr__(self, "r", None)
            elif not math.isfinite(r):
                raise ValueError("r must be finite, -inf, or None")
        if int(self.n_chips) < 1:
            raise ValueError("n_chips must be a positive integer")
        if self.m_k < 0 and self.p != int(self.p):
            raise ValueError("negative m_k requires an integer exponent p")


@dataclass(frozen=True)
class OptimalWeylParams:
    """Slot-based Weyl code: chip phase increment gamma + sigma_k / k_max."""

    gamma: float
    sigma_k: int
    k_max: int
    n_chips: int

    def __post_init__(self) -> None:
        if int(self.k_max) < 1:
            raise ValueError("k_max must be a positive integer")
        if not 0 <= int(self.sigma_k) < int(self.k_max):
            raise ValueError(
                f"sigma_k must lie in [0, k_max), got {self.sigma_k} with k_max={self.k_max}"
            )
        if int(self.n_chips) < 1:
            raise ValueError("n_chips must be a positive integer")


def weyl_sequence(params: WeylParams) -> ChipSequence:
    """Generate chips exp(2*pi*j*(n*rho + delta mod 1)) for n = 1..N."""
    n = np.arange(1, params.n_chips + 1, dtype=np.float64)
    phases = np.mod(n * params.rho + params.delta, 1.0)
    chips = np.exp(2j * np.pi * phases)
    return ChipSequence(chips, family_tag=f"weyl(rho={params.rho:g},delta={params.delta:g})")


def fzc_family_sequence(params: FZCParams) -> ChipSequence:
    """Generate a member of the extended FZC family.

    Chip n is (-1)**(n*m_k) * exp(j*pi*(m_k**p * n**q + n**r) / N).  The
    alternating-sign factor is taken on the principal branch,
    exp(j*pi*n*m_k), which reduces to the usual +-1 for integer m_k and is
    what embeds the Weyl family at triple (1, 1, None) with
    m_k = rho * 2N/(N+1).
    """
    n_chips = params.n_chips
    n = np.arange(1, n_chips + 1, dtype=np.float64)
    core = math.pow(params.m_k, params.p) * np.power(n, params.q)
    if params.r is not None:
        core = core + np.power(n, params.r)
    phase = np.pi * n * params.m_k + np.pi * core / n_chips
    chips = np.exp(1j * phase)
    r_txt = "-inf" if params.r is None else f"{params.r:g}"
    tag = f"fzc(m={params.m_k:g},p={params.p:g},q={params.q:g},r={r_txt})"
    return ChipSequence(chips, family_tag=tag)


def optimal_weyl_sequence(params: OptimalWeylParams) -> ChipSequence:
    """Generate the slot-sigma_k member: Weyl code with rho = gamma + sigma_k/k_max mod 1."""
    rho = (params.gamma + params.sigma_k / params.k_max) % 1.0
    seq = weyl_sequence(WeylParams(rho=rho, delta=0.0, n_chips=params.n_chips))
    tag = f"optimal-weyl(gamma={params.gamma:g},sigma={params.sigma_k},kmax={params.k_max})"
    return ChipSequence(seq.chips, family_tag=tag)


def van_der_corput(index: int) -> float:
    """k-th element of the base-2 Van der Corput sequence, 1-indexed with v_1 = 0.

    Returns the base-2 radical inverse of (index - 1); exact because all
    values are dyadic rationals.
    """
    if index < 1:
        raise ValueError("index must be >= 1")
    n = int(index) - 1
    value = 0.0
    scale = 0.5
    while n:
        if n & 1:
            value += scale
        n >>= 1
        scale *= 0.5
    return value


def vdc_assignment(n_users: int, n_chips: int) -> np.ndarray:
    """Slot values sigma_k = N * v_k for users k = 1..K.

    Requires N = 2**m with m > 1 so every N*v_k is an integer; the first N
    values enumerate {0, ..., N-1} without repeats, so any user prefix is
    near-equispaced.
    """
    n = int(n_chips)
    if n < 4 or n & (n - 1):
        raise ValueError(f"n_chips must be a power of two >= 4, got {n_chips}")
    if not 1 <= n_users <= n:
        raise ValueError(f"n_users must lie in [1, {n}], got {n_users}")
    sigma = np.array([int(n * van_der_corput(k)) for k in range(1, n_users + 1)], dtype=np.int64)
    return sigma


# Preferred pair of primitive polynomials for degree 5 (N=31):
# x^5 + x^2 + 1 and x^5 + x^4 + x^3 + x^2 + 1.
_PREFERRED_TAPS: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {
    5: ((5, 2), (5, 4, 3, 2)),
}


def gold_family_size(register_degree: int) -> int:
    """Number of Gold family members for degree m: N + 2 with N = 2**m - 1."""
    return (1 << register_degree) + 1


def _m_sequence(taps: tuple[int, ...], degree: int) -> np.ndarray:
    """Full-period m-sequence bits for the polynomial with the given exponents.

    ``taps`` lists the nonzero exponents of the feedback polynomial (the
    constant term is implied), e.g. (5, 2) for x^5 + x^2 + 1.  The bits
    follow the linear recurrence a_t = XOR of a_{t-(degree-e)} over the
    lower exponents e, plus a_{t-degree}, seeded with ones.
    """
    exps = sorted(set(int(t) for t in taps))
    if not exps or exps[-1] != degree or exps[0] < 1:
        raise ValueError(f"taps must be within 1..{degree} and include {degree}")
    offsets = [degree - e for e in exps[:-1]] + [degree]
    period = (1 << degree) - 1
    seq = [1] * degree
    for t in range(degree, period):
        bit = 0
        for off in offsets:
            bit ^= seq[t - off]
        seq.append(bit)
    return np.array(seq, dtype=np.int8)


def gold_code(
    register_degree: int,
    code_index: int,
    taps: tuple[tuple[int, ...], tuple[int, ...]] | None = None,
) -> ChipSequence:
    """Generate one Gold family member of length N = 2**m - 1 as +-1 chips.

    Index 0 and 1 are the two constituent m-sequences u and v; index 2+s is
    u XOR (v cyclically shifted by s), giving N + 2 members total.  The
    degree-5 preferred pair is built in; other degrees require the caller
    to supply both feedback tap sets.
    """
    if taps is None:
        taps = _PREFERRED_TAPS.get(int(register_degree))
        if taps is None:
            raise ValueError(
                f"no built-in preferred pair for degree {register_degree}; supply taps"
            )
    n = (1 << register_degree) - 1
    family = gold_family_size(register_degree)
    if not 0 <= code_index < family:
        raise ValueError(f"code_index must lie in [0, {family}), got {code_index}")
    u = _m_sequence(taps[0], register_degree)
    v = _m_sequence(taps[1], register_degree)
    if code_index == 0:
        bits = u
    elif code_index == 1:
        bits = v
    else:
        bits = u ^ np.roll(v, -(code_index - 2))
    chips = (1.0 - 2.0 * bits.astype(np.float64)).astype(np.complex128)
    return ChipSequence(chips, family_tag=f"gold(m={register_degree},index={code_index})")


def gold_family(
    register_degree: int,
    taps: tuple[tuple[int, ...], tuple[int, ...]] | None = None,
) -> list[ChipSequence]:
    """All N + 2 Gold members for the given degree."""
    return [
        gold_code(register_degree, idx, taps=taps)
        for idx in range(gold_family_size(register_degree))
    ]
