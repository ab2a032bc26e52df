"""Sponsored-search auctions with the last slot sold through spikes.

Slots ``1..K-1`` go to the top ``K-1`` advertisers as in rank-by-revenue
GSP; slot ``K`` is shared among ranks ``K..K+M-1`` with probabilities
``p_1..p_M``.  This is the same as a ``K+M-1`` slot auction with position
CTRs ``(gamma_1, ..., gamma_{K-1}, gamma_K p_1, ..., gamma_K p_M)``, so all
revenue is computed through one symmetric-Nash-equilibrium sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BidderProfile, CapacityParams, CoefficientVector, SpikeVector
from .errors import ConfigError, DimensionError
from .optimizer import LpSolution, solve
from .spike_vcg import rank_bidders


@dataclass(frozen=True)
class KeywordAuctionConfig:
    slots: int
    position_ctrs: tuple[float, ...]
    spike_count: int = 1

    def __post_init__(self) -> None:
        ctrs = tuple(float(g) for g in self.position_ctrs)
        if self.slots < 1:
            raise ConfigError(f"need at least one slot (got {self.slots})")
        if self.spike_count < 1:
            raise ConfigError(f"need at least one spike (got {self.spike_count})")
        if len(ctrs) != self.slots:
            raise ConfigError(f"expected {self.slots} position CTRs, got {len(ctrs)}")
        if ctrs[-1] <= 0.0 or any(ctrs[j] <= ctrs[j + 1] for j in range(len(ctrs) - 1)):
            raise ConfigError(f"position CTRs must be positive and strictly decreasing: {ctrs}")
        object.__setattr__(self, "position_ctrs", ctrs)


@dataclass(frozen=True)
class SsaOutcome:
    ranking: tuple[int, ...]
    sne_revenue: float
    per_slot_prices: tuple[float, ...]
    effective_ctrs: tuple[float, ...]
    ranked_scores: tuple[float, ...]


def _ranked_scores(bidders: Sequence[BidderProfile], length: int) -> tuple[list[int], np.ndarray]:
    order = rank_bidders(bidders, key=lambda b: b.score)
    s = np.zeros(max(length, len(order)))
    s[: len(order)] = [bidders[i].score for i in order]
    return order, s


def sne_revenue(bidders: Sequence[BidderProfile], ctrs: Sequence[float]) -> SsaOutcome:
    """Revenue ``sum_j (gamma_j - gamma_{j+1}) j s_{sigma(j+1)}`` at the SNE.

    CTRs must be non-negative and non-increasing; equal neighbours are allowed
    because the effective CTRs of a spike-sold slot can tie.
    """
    gamma = np.asarray(ctrs, dtype=float)
    if gamma.size == 0:
        raise ConfigError("need at least one position CTR")
    if np.any(gamma < 0.0) or np.any(np.diff(gamma) > 0.0):
        raise ConfigError(f"position CTRs must be non-negative and non-increasing: {tuple(gamma)}")
    n_slots = gamma.size
    order, s = _ranked_scores(bidders, n_slots + 1)
    nxt = np.append(gamma[1:], 0.0)
    j = np.arange(1, n_slots + 1)
    revenue = math.fsum((gamma - nxt) * j * s[1 : n_slots + 1])

    prices = []
    for i in range(n_slots):
        if i < len(order) and bidders[order[i]].relevance > 0.0:
            prices.append(float(s[i + 1] / bidders[order[i]].relevance))
        else:
            prices.append(0.0)
    return SsaOutcome(
        ranking=tuple(order),
        sne_revenue=revenue,
        per_slot_prices=tuple(prices),
        effective_ctrs=tuple(float(g) for g in gamma),
        ranked_scores=tuple(float(x) for x in s[: len(order)]),
    )


def effective_ctrs(config: KeywordAuctionConfig, spikes: SpikeVector | Sequence[float]) -> tuple[float, ...]:
    if not isinstance(spikes, SpikeVector):
        spikes = SpikeVector(spikes)
    if len(spikes) != config.spike_count:
        raise DimensionError(f"config expects {config.spike_count} spikes, got {len(spikes)}")
    last = config.position_ctrs[-1]
    return config.position_ctrs[:-1] + tuple(last * p for p in spikes)


def combined_auction(
    bidders: Sequence[BidderProfile],
    config: KeywordAuctionConfig,
    spikes: SpikeVector | Sequence[float],
) -> SsaOutcome:
    return sne_revenue(bidders, effective_ctrs(config, spikes))


def fixed_revenue(bidders: Sequence[BidderProfile], config: KeywordAuctionConfig) -> float:
    """Part of the combined revenue that does not depend on the spikes."""
    k = config.slots
    gamma = config.position_ctrs
    _, s = _ranked_scores(bidders, k + 1)
    terms = [(gamma[j - 1] - gamma[j]) * j * s[j] for j in range(1, k - 1)]
    if k >= 2:
        terms.append(gamma[k - 2] * (k - 1) * s[k - 1])
    return math.fsum(terms)


def ssa_objective_coefficients(bidders: Sequence[BidderProfile], config: KeywordAuctionConfig) -> CoefficientVector:
    """``d_j = ((K+j-1) s_{sigma(K+j)} - (K-1) s_{sigma(K)}) / j``.

    The result need not be non-increasing, nor non-negative; check
    ``is_gapwise_monotone`` before relying on the closed form.
    """
    k, m = config.slots, config.spike_count
    _, s = _ranked_scores(bidders, k + m)
    # s is 0-based: s[r - 1] is the score at rank r
    return CoefficientVector(
        [((k + j - 1) * s[k + j - 1] - (k - 1) * s[k - 1]) / j for j in range(1, m + 1)]
    )


def optimize_ssa_spikes(
    bidders: Sequence[BidderProfile],
    config: KeywordAuctionConfig,
    eps: CapacityParams | Sequence[float],
) -> LpSolution:
    """Gaps maximizing combined-auction revenue subject to capacity lower bounds."""
    d = ssa_objective_coefficients(bidders, config)
    return solve(d, eps)
