"""VCG sale of probability spikes.

Bidders are ranked by value and the rank-``j`` bidder is assigned spike ``p_j``.
Each pays its opportunity cost

    h_j = sum_{i=j}^{M-1} (p_i - p_{i+1}) v_{sigma(i+1)} + p_M v_{sigma(M+1)},

where ranks beyond the number of real bidders are filled by phantom bidders
of value zero.  Under the betting scheme ``h_j`` is charged up front; under
pay-per-acquisition the winner alone pays ``h_j / p_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    FEAS_TOL,
    BidderProfile,
    CoefficientVector,
    SpikeVector,
    evaluate_objective,
    spikes_to_gaps,
)
from .errors import ConsistencyError, DimensionError, InputError


@dataclass(frozen=True)
class MechanismOutcome:
    """Allocation and expected payments of a spike auction.

    ``ranking[r]`` is the index (into the bidder list) of the bidder holding
    rank ``r + 1``; ranks ``1..M`` receive spikes.  ``ranked_values`` lists
    the ranking scores in the same order and is what the decompositions use.
    """

    ranking: tuple[int, ...]
    expected_payments: tuple[float, ...]
    revenue: float
    efficiency: float
    ranked_values: tuple[float, ...]
    spikes: SpikeVector

    @property
    def utilities(self) -> tuple[float, ...]:
        """Expected utility ``p_j v_{sigma(j)} - h_j`` of each spike holder (0 for phantoms)."""
        v = _padded(self.ranked_values, len(self.spikes))
        return tuple(float(p * v[j] - h) for j, (p, h) in enumerate(zip(self.spikes, self.expected_payments)))

    def per_win_charges(self) -> tuple[float, ...]:
        """Pay-per-acquisition charge ``h_j / p_j``; 0 where ``p_j = 0`` (that rank never wins)."""
        return tuple(h / p if p > 0.0 else 0.0 for h, p in zip(self.expected_payments, self.spikes))


@dataclass(frozen=True)
class GapwiseDecomposition:
    coeffs: CoefficientVector
    is_monotone: bool


def _padded(values: Sequence[float], length: int) -> np.ndarray:
    out = np.zeros(max(length, len(values)))
    out[: len(values)] = values
    return out


def rank_bidders(bidders: Sequence[BidderProfile], key=lambda b: b.value) -> list[int]:
    """Indices sorted by ``key`` descending, ties broken by ascending bidder id."""
    if not bidders:
        raise InputError("at least one bidder is required")
    return sorted(range(len(bidders)), key=lambda i: (-key(bidders[i]), bidders[i].id))


def opportunity_costs(ranked_values: Sequence[float], spikes: SpikeVector) -> np.ndarray:
    """Expected VCG payments ``h_j`` for values already in rank order."""
    m = len(spikes)
    gaps = np.array(spikes_to_gaps(spikes).gaps)
    # d_i = v_{sigma(i+1)}, the next-ranked value, zero past the last bidder
    d = _padded(ranked_values, m + 1)[1 : m + 1]
    terms = gaps * d
    return np.cumsum(terms[::-1])[::-1]


def run_vcg(bidders: Sequence[BidderProfile], spikes: SpikeVector | Sequence[float]) -> MechanismOutcome:
    if not isinstance(spikes, SpikeVector):
        spikes = SpikeVector(spikes)
    order = rank_bidders(bidders)
    values = tuple(bidders[i].value for i in order)
    h = opportunity_costs(values, spikes)
    top = _padded(values, len(spikes))[: len(spikes)]
    return MechanismOutcome(
        ranking=tuple(order),
        expected_payments=tuple(float(x) for x in h),
        revenue=math.fsum(h),
        efficiency=math.fsum(np.array(spikes.probs) * top),
        ranked_values=values,
        spikes=spikes,
    )


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= FEAS_TOL * max(1.0, abs(b))


def _check_consistent(outcome: MechanismOutcome, spikes: SpikeVector) -> None:
    if not isinstance(spikes, SpikeVector):
        spikes = SpikeVector(spikes)
    if outcome.spikes.probs != spikes.probs:
        raise ConsistencyError("outcome was produced for different spikes")
    if len(outcome.expected_payments) != len(spikes):
        raise ConsistencyError("payment vector length does not match the number of spikes")


def revenue_coefficients(ranked_values: Sequence[float], m: int) -> CoefficientVector:
    """``d_i = v_{sigma(i+1)}`` for ``i = 1..m``, zero past the last bidder."""
    return CoefficientVector(_padded(ranked_values, m + 1)[1 : m + 1])


def efficiency_coefficients(ranked_values: Sequence[float], m: int) -> CoefficientVector:
    """``d_i`` = mean of the top ``i`` values (phantoms count as zero)."""
    top = _padded(ranked_values, m)[:m]
    return CoefficientVector(np.cumsum(top) / np.arange(1, m + 1))


def values_in_rank_order(bidders: Sequence[BidderProfile]) -> tuple[float, ...]:
    return tuple(bidders[i].value for i in rank_bidders(bidders))


def revenue_decomposition(outcome: MechanismOutcome, spikes: SpikeVector) -> GapwiseDecomposition:
    """Write revenue as ``sum theta_i * i * d_i`` with ``d_i = v_{sigma(i+1)}``."""
    _check_consistent(outcome, spikes)
    d = revenue_coefficients(outcome.ranked_values, len(spikes))
    if not _close(evaluate_objective(spikes_to_gaps(outcome.spikes), d), outcome.revenue):
        raise ConsistencyError("revenue does not match the outcome's payments")
    return GapwiseDecomposition(d, d.is_gapwise_monotone)


def efficiency_decomposition(outcome: MechanismOutcome, spikes: SpikeVector) -> GapwiseDecomposition:
    """Write efficiency as ``sum theta_i * i * d_i`` with ``d_i`` the mean of the top ``i`` values."""
    _check_consistent(outcome, spikes)
    d = efficiency_coefficients(outcome.ranked_values, len(spikes))
    if not _close(evaluate_objective(spikes_to_gaps(outcome.spikes), d), outcome.efficiency):
        raise ConsistencyError("efficiency does not match the outcome's allocation")
    return GapwiseDecomposition(d, d.is_gapwise_monotone)


def check_walrasian(
    bidders: Sequence[BidderProfile],
    spikes: SpikeVector | Sequence[float],
    ranking: Sequence[int],
    payments: Sequence[float],
    tol: float = FEAS_TOL,
) -> bool:
    """True iff every bidder's utility under ``(ranking, payments)`` is its best response.

    A bidder's best response is ``max(max_j p_j v - h_j, 0)``; ranks past ``M``
    hold no spike and have utility zero.
    """
    if not isinstance(spikes, SpikeVector):
        spikes = SpikeVector(spikes)
    p = np.array(spikes.probs)
    h = np.asarray(payments, dtype=float)
    if h.shape != p.shape:
        raise DimensionError(f"expected {p.size} payments, got {h.size}")
    if sorted(ranking) != list(range(len(bidders))):
        raise InputError("ranking must be a permutation of all bidder indices")
    for rank, idx in enumerate(ranking):
        v = bidders[idx].value
        realized = p[rank] * v - h[rank] if rank < p.size else 0.0
        best = max(float(np.max(p * v - h)), 0.0)
        if abs(realized - best) > tol:
            return False
    return True
