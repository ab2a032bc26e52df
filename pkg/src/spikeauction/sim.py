"""Monte Carlo runs of the two-stage spike auction.

Randomness comes from numpy's ``PCG64`` bit generator.  Trials are cut into
fixed-size chunks; chunk ``i`` draws from ``SeedSequence(seed,
spawn_key=(i,))``, so the outcome depends only on ``(seed, trials)`` and not
on how many workers process the chunks.  Each trial takes one uniform draw
and maps it to an outcome by inverse CDF over the cumulative spikes.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BidderProfile, SpikeVector
from .errors import InputError
from .spike_vcg import MechanismOutcome, run_vcg

CHUNK_SIZE = 1 << 18
#: below this many trials the scheme comparison makes no pass/fail claim
MIN_TRIALS_FOR_TEST = 100
SIGMA_LEVEL = 3.0


class Scheme(str, enum.Enum):
    BETTING = "betting"
    PAY_PER_ACQUISITION = "ppa"

    @classmethod
    def parse(cls, value: "Scheme | str") -> "Scheme":
        if isinstance(value, cls):
            return value
        aliases = {"pay_per_acquisition": "ppa", "pay-per-acquisition": "ppa"}
        return cls(aliases.get(value, value))


@dataclass(frozen=True)
class SimulationResult:
    trials: int
    empirical_payment_means: tuple[float, ...]
    empirical_payment_variances: tuple[float, ...]
    empirical_revenue_mean: float
    win_counts: tuple[int, ...]
    scheme: Scheme
    seed: int
    expected_payments: tuple[float, ...]
    spikes: tuple[float, ...]

    @property
    def win_frequencies(self) -> tuple[float, ...]:
        return tuple(c / self.trials for c in self.win_counts)

    @property
    def payment_standard_errors(self) -> tuple[float, ...]:
        """Analytic standard error of each rank's mean payment."""
        if self.scheme is Scheme.BETTING:
            return tuple(0.0 for _ in self.spikes)
        return tuple(
            _charge(h, p) * math.sqrt(p * (1.0 - p) / self.trials)
            for h, p in zip(self.expected_payments, self.spikes)
        )

    @property
    def frequency_standard_errors(self) -> tuple[float, ...]:
        return tuple(math.sqrt(p * (1.0 - p) / self.trials) for p in self.spikes)


@dataclass(frozen=True)
class SchemeComparison:
    trials: int
    seed: int
    betting_means: tuple[float, ...]
    ppa_means: tuple[float, ...]
    differences: tuple[float, ...]
    standard_errors: tuple[float, ...]
    low_power: bool
    passed: bool | None


def _charge(h: float, p: float) -> float:
    return h / p if p > 0.0 else 0.0


def _cdf(probs: Sequence[float]) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    cdf = np.cumsum(p)
    # pin the tail to exactly 1 from the last positive spike on, so rounding
    # in the cumulative sum can never send a draw to a zero-probability rank
    last = int(np.flatnonzero(p > 0.0)[-1])
    cdf[last:] = 1.0
    return cdf


def _chunk_counts(cdf: np.ndarray, seed: int, index: int, n: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    u = rng.random(n)
    outcome = np.searchsorted(cdf, u, side="right")
    return np.bincount(outcome, minlength=cdf.size)


def draw_outcomes(spikes: SpikeVector, trials: int, seed: int, workers: int = 1) -> np.ndarray:
    """Win counts per rank over ``trials`` independent runs of the experiment."""
    if trials < 1:
        raise InputError(f"trials must be at least 1 (got {trials})")
    if seed < 0 or seed >= 1 << 64:
        raise InputError(f"seed must be an unsigned 64-bit integer (got {seed})")
    cdf = _cdf(spikes.probs)
    sizes = [CHUNK_SIZE] * (trials // CHUNK_SIZE)
    if trials % CHUNK_SIZE:
        sizes.append(trials % CHUNK_SIZE)
    jobs = [(cdf, seed, i, n) for i, n in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _chunk_counts(*job), jobs))
    else:
        parts = [_chunk_counts(*job) for job in jobs]
    return np.sum(parts, axis=0, dtype=np.int64)


def _summarize(
    outcome: MechanismOutcome, counts: np.ndarray, scheme: Scheme, trials: int, seed: int
) -> SimulationResult:
    h = outcome.expected_payments
    p = outcome.spikes.probs
    if scheme is Scheme.BETTING:
        means = tuple(h)
        variances = tuple(0.0 for _ in h)
        revenue = outcome.revenue
    else:
        freq = counts / trials
        charges = [_charge(hj, pj) for hj, pj in zip(h, p)]
        means = tuple(float(c * f) for c, f in zip(charges, freq))
        variances = tuple(float(c * c * f * (1.0 - f)) for c, f in zip(charges, freq))
        revenue = math.fsum(means)
    return SimulationResult(
        trials=trials,
        empirical_payment_means=means,
        empirical_payment_variances=variances,
        empirical_revenue_mean=revenue,
        win_counts=tuple(int(c) for c in counts),
        scheme=scheme,
        seed=seed,
        expected_payments=tuple(h),
        spikes=tuple(p),
    )


def simulate(
    bidders: Sequence[BidderProfile],
    spikes: SpikeVector | Sequence[float],
    scheme: Scheme | str,
    trials: int,
    seed: int,
    workers: int = 1,
) -> SimulationResult:
    scheme = Scheme.parse(scheme)
    outcome = run_vcg(bidders, spikes)
    counts = draw_outcomes(outcome.spikes, trials, seed, workers)
    return _summarize(outcome, counts, scheme, trials, seed)


def compare_schemes(
    bidders: Sequence[BidderProfile],
    spikes: SpikeVector | Sequence[float],
    trials: int,
    seed: int,
    workers: int = 1,
) -> SchemeComparison:
    """Betting vs pay-per-acquisition on common random numbers.

    The schemes agree in expectation; each rank's difference is tested
    against three analytic standard errors of the per-acquisition mean.
    """
    outcome = run_vcg(bidders, spikes)
    counts = draw_outcomes(outcome.spikes, trials, seed, workers)
    bet = _summarize(outcome, counts, Scheme.BETTING, trials, seed)
    ppa = _summarize(outcome, counts, Scheme.PAY_PER_ACQUISITION, trials, seed)
    diffs = tuple(b - a for a, b in zip(bet.empirical_payment_means, ppa.empirical_payment_means))
    ses = ppa.payment_standard_errors
    low_power = trials < MIN_TRIALS_FOR_TEST
    passed = None if low_power else all(abs(x) <= SIGMA_LEVEL * se for x, se in zip(diffs, ses))
    return SchemeComparison(
        trials=trials,
        seed=seed,
        betting_means=bet.empirical_payment_means,
        ppa_means=ppa.empirical_payment_means,
        differences=diffs,
        standard_errors=ses,
        low_power=low_power,
        passed=passed,
    )
