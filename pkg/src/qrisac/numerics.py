"""Statistical primitives: first-order Marcum Q, threshold inversion, seeded RNG streams.

The detection chain reduces to tail probabilities of a complex Gaussian power
statistic: exponential under the null, non-central chi-square (2 dof) under the
alternative. Everything here is pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ive

__all__ = [
    "MarcumArgs",
    "marcum_q1",
    "threshold_from_pfa",
    "marcum_b_from_pfa",
    "invert_marcum_b",
    "seeded_stream",
]

# Series truncation: terms are positive and decay at least like exp(-k^2/(2ab));
# 4000 covers a*b up to ~40*40 with headroom.
_MAX_TERMS = 4000
_TERM_EPS = 1e-17


@dataclass(frozen=True)
class MarcumArgs:
    """Arguments of Q1: a is the non-centrality amplitude, b the normalized threshold."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"Marcum arguments must be finite, got a={self.a}, b={self.b}")
        if self.a < 0 or self.b < 0:
            raise ValueError(f"Marcum arguments must be non-negative, got a={self.a}, b={self.b}")


def marcum_q1(args: MarcumArgs | None = None, *, a: float | None = None, b: float | None = None) -> float:
    """First-order Marcum Q function Q1(a, b).

    Equals the tail P(X > b^2) of a non-central chi-square variable with 2
    degrees of freedom and non-centrality a^2. Evaluated through the canonical
    Bessel series with exponentially scaled terms,

        Q1(a, b) = sum_k exp(-(a-b)^2 / 2) * (a/b)^k * ive(k, a*b),   a <= b,

    switching to the complementary series (summed from k=1 with a and b
    swapped in the ratio) when a > b so that the result near 1 keeps full
    absolute accuracy. Scaled Bessel values keep every intermediate bounded
    for a, b up to ~40.
    """
    if args is not None:
        a, b = args.a, args.b
    if a is None or b is None:
        raise ValueError("marcum_q1 requires either MarcumArgs or both a= and b=")
    MarcumArgs(a, b)  # validate domain

    if b == 0.0:
        return 1.0
    if a == 0.0:
        return math.exp(-0.5 * b * b)

    x = a * b
    pref = math.exp(-0.5 * (a - b) ** 2)
    direct = a <= b
    ratio = a / b if direct else b / a
    k0 = 0 if direct else 1

    # Terms decay at least like exp(-k^2/(2x)) times a geometric factor; this
    # block size covers the mass with headroom, then grows if the tail check fails.
    n_terms = min(_MAX_TERMS, int(10.0 * math.sqrt(x) + 60))
    while True:
        k = np.arange(k0, k0 + n_terms)
        terms = ratio**k * ive(k, x)
        total = float(np.sum(terms))
        if terms[-1] < _TERM_EPS * max(total, 1.0) or n_terms >= _MAX_TERMS:
            break
        n_terms = min(_MAX_TERMS, 2 * n_terms)
    if direct:
        return min(1.0, pref * total)
    return max(0.0, 1.0 - pref * total)


def threshold_from_pfa(sigma_sq: float, p_fa: float) -> float:
    """Detection threshold gamma with P(|z|^2 > gamma) = p_fa for z ~ CN(0, sigma_sq)."""
    if not (0.0 < p_fa < 1.0):
        raise ValueError(f"p_fa must lie in (0, 1), got {p_fa}")
    if not (sigma_sq > 0.0 and math.isfinite(sigma_sq)):
        raise ValueError(f"sigma_sq must be positive and finite, got {sigma_sq}")
    return -sigma_sq * math.log(p_fa)


def marcum_b_from_pfa(p_fa: float) -> float:
    """Normalized threshold sqrt(2*gamma/sigma^2) = sqrt(-2 ln p_fa) at the null."""
    if not (0.0 < p_fa < 1.0):
        raise ValueError(f"p_fa must lie in (0, 1), got {p_fa}")
    return math.sqrt(-2.0 * math.log(p_fa))


def invert_marcum_b(a: float, q_target: float, b_hi: float = 80.0) -> float:
    """Solve Q1(a, b) = q_target for b by bisection (Q1 decreases in b)."""
    if not (0.0 < q_target < 1.0):
        raise ValueError(f"q_target must lie in (0, 1), got {q_target}")
    lo, hi = 0.0, b_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if marcum_q1(a=a, b=mid) > q_target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def seeded_stream(master_seed: int, *stream_ids: int) -> np.random.Generator:
    """Independent, reproducible RNG substream keyed by (master_seed, *stream_ids).

    Counter-based (Philox), so per-trial substreams are order independent:
    the same key yields the same draws regardless of spawn order or worker
    count.
    """
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(s) for s in stream_ids))
    return np.random.Generator(np.random.Philox(seq))
