"""Value types and spike/gap algebra shared by every other module.

A selling experiment is described either by its spikes ``p_1 >= ... >= p_M``
or, equivalently, by the gaps ``theta_j = p_j - p_{j+1}`` (``theta_M = p_M``).
The gap form turns the simplex constraint ``sum p = 1`` into the single
linear equality ``sum j * theta_j = 1``, which is what the optimizer works on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .errors import DimensionError, FeasibilityError, ValidationError

#: tolerance for normalization/feasibility checks
FEAS_TOL = 1e-9
#: tolerance for algebraic round trips
ROUNDTRIP_TOL = 1e-12


def _as_floats(values: Sequence[float], name: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if len(out) == 0:
        raise ValidationError(f"{name} must have at least one entry", invariant="non-empty")
    for v in out:
        if not math.isfinite(v):
            raise ValidationError(f"{name} contains a non-finite entry: {v!r}", invariant="finite")
    return out


def _check_nonnegative(values: tuple[float, ...], name: str) -> None:
    for j, v in enumerate(values, start=1):
        if v < 0.0:
            raise ValidationError(
                f"{name}[{j}] = {v!r} is negative", invariant="non-negativity"
            )


def weighted_mass(values: Sequence[float]) -> float:
    """Return ``sum_j j * values[j]`` with 1-based ``j``."""
    arr = np.asarray(values, dtype=float)
    return float(np.dot(np.arange(1, arr.size + 1), arr))


@dataclass(frozen=True)
class SpikeVector:
    """Probabilities ``(p_1, ..., p_M)`` of the experiment outcomes, non-increasing."""

    probs: tuple[float, ...]

    def __init__(self, probs: Sequence[float]) -> None:
        vals = _as_floats(probs, "spikes")
        _check_nonnegative(vals, "spikes")
        for j in range(len(vals) - 1):
            if vals[j] < vals[j + 1]:
                raise ValidationError(
                    f"spikes must be non-increasing: p[{j + 1}] = {vals[j]!r} < "
                    f"p[{j + 2}] = {vals[j + 1]!r}",
                    invariant="ordering",
                )
        total = math.fsum(vals)
        if abs(total - 1.0) > FEAS_TOL:
            raise ValidationError(
                f"spikes must sum to 1 (got {total!r})", invariant="normalization"
            )
        object.__setattr__(self, "probs", vals)

    def __len__(self) -> int:
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)

    def __getitem__(self, idx):
        return self.probs[idx]

    def as_array(self) -> np.ndarray:
        return np.array(self.probs)


@dataclass(frozen=True)
class GapVector:
    """Spike gaps ``theta_j``; non-negative with ``sum j * theta_j = 1``."""

    gaps: tuple[float, ...]

    def __init__(self, gaps: Sequence[float]) -> None:
        vals = _as_floats(gaps, "gaps")
        _check_nonnegative(vals, "gaps")
        mass = weighted_mass(vals)
        if abs(mass - 1.0) > FEAS_TOL:
            raise ValidationError(
                f"gaps must satisfy sum(j * theta_j) = 1 (got {mass!r})",
                invariant="normalization",
            )
        object.__setattr__(self, "gaps", vals)

    def __len__(self) -> int:
        return len(self.gaps)

    def __iter__(self):
        return iter(self.gaps)

    def __getitem__(self, idx):
        return self.gaps[idx]

    def as_array(self) -> np.ndarray:
        return np.array(self.gaps)


@dataclass(frozen=True)
class CapacityParams:
    """Lower bounds ``epsilon_j`` on the gaps; feasible iff ``sum j * eps_j <= 1``."""

    epsilons: tuple[float, ...]

    def __init__(self, epsilons: Sequence[float]) -> None:
        vals = _as_floats(epsilons, "epsilons")
        _check_nonnegative(vals, "epsilons")
        mass = weighted_mass(vals)
        if mass > 1.0 + FEAS_TOL:
            raise FeasibilityError(f"epsilons are infeasible: sum(j * eps_j) = {mass!r} > 1")
        object.__setattr__(self, "epsilons", vals)

    @classmethod
    def zeros(cls, m: int) -> "CapacityParams":
        return cls([0.0] * m)

    @property
    def residual(self) -> float:
        """Mass ``1 - sum j * eps_j`` left free after honoring every lower bound."""
        return max(0.0, 1.0 - weighted_mass(self.epsilons))

    def __len__(self) -> int:
        return len(self.epsilons)

    def __iter__(self):
        return iter(self.epsilons)

    def __getitem__(self, idx):
        return self.epsilons[idx]


@dataclass(frozen=True)
class CoefficientVector:
    """Coefficients ``d_j`` of an objective ``H = sum theta_j * j * d_j``."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Sequence[float]) -> None:
        object.__setattr__(self, "coeffs", _as_floats(coeffs, "coeffs"))

    @property
    def is_gapwise_monotone(self) -> bool:
        c = self.coeffs
        return all(c[j] >= c[j + 1] for j in range(len(c) - 1))

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, idx):
        return self.coeffs[idx]


@dataclass(frozen=True)
class BidderProfile:
    id: Hashable
    value: float
    relevance: float = field(default=1.0)

    def __post_init__(self) -> None:
        value = float(self.value)
        relevance = float(self.relevance)
        if not math.isfinite(value) or value < 0.0:
            raise ValidationError(
                f"bidder {self.id!r}: value must be finite and >= 0 (got {self.value!r})",
                invariant="value-non-negative",
            )
        if not (0.0 <= relevance <= 1.0):
            raise ValidationError(
                f"bidder {self.id!r}: relevance must lie in [0, 1] (got {self.relevance!r})",
                invariant="relevance-range",
            )
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "relevance", relevance)

    @property
    def score(self) -> float:
        """Ranking score ``e_i * v_i`` used by rank-by-revenue."""
        return self.relevance * self.value


def bidders_from_values(values: Sequence[float], relevances: Sequence[float] | None = None) -> list[BidderProfile]:
    """Convenience constructor; ids are the 0-based positions."""
    if relevances is None:
        return [BidderProfile(i, v) for i, v in enumerate(values)]
    if len(relevances) != len(values):
        raise DimensionError("values and relevances differ in length")
    return [BidderProfile(i, v, e) for i, (v, e) in enumerate(zip(values, relevances))]


def spikes_to_gaps(spikes: SpikeVector) -> GapVector:
    if not isinstance(spikes, SpikeVector):
        spikes = SpikeVector(spikes)
    p = spikes.probs
    gaps = [p[j] - p[j + 1] for j in range(len(p) - 1)]
    gaps.append(p[-1])
    return GapVector(gaps)


def gaps_to_spikes(gaps: GapVector) -> SpikeVector:
    if not isinstance(gaps, GapVector):
        gaps = GapVector(gaps)
    probs = [0.0] * len(gaps)
    acc = 0.0
    for j in range(len(gaps) - 1, -1, -1):
        acc = gaps[j] + acc
        probs[j] = acc
    return SpikeVector(probs)


def evaluate_objective(gaps: GapVector | Sequence[float], coeffs: CoefficientVector | Sequence[float]) -> float:
    """Return ``sum_j gaps[j] * j * coeffs[j]``."""
    g = np.asarray(tuple(gaps), dtype=float)
    d = np.asarray(tuple(coeffs), dtype=float)
    if g.shape != d.shape:
        raise DimensionError(f"gaps has length {g.size} but coeffs has length {d.size}")
    return math.fsum(g * np.arange(1, g.size + 1) * d)
