"""Capacity of a set of gap lower bounds and what raising it costs.

Capacity is the largest index with a strictly positive lower bound, i.e. the
number of ranks that are guaranteed a positive chance of winning.  For a
non-increasing objective the threshold ``a = min{j : d_1 > d_j}`` splits the
picture: capacity below ``a`` is free, the step from ``a - 1`` to ``a`` costs
value, and every further step can again be made without loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import FEAS_TOL, CapacityParams, CoefficientVector
from .errors import (
    CapacityExhaustedError,
    ConsistencyError,
    DimensionError,
    MonotonicityError,
    NoThresholdError,
    RegimeError,
    ValidationError,
)
from .optimizer import optimal_value


@dataclass(frozen=True)
class CapacityReport:
    """Price-of-capacity summary.

    ``nu`` is a supremum: for the general (non-uniform) bounds it is only
    approached as ``eps_a -> 1/a``, which ``attained`` records.
    """

    kappa: int
    a_index: int | None
    nu: float | None
    nu_upper_bound: float
    attained: bool

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "a_index": self.a_index,
            "nu": self.nu,
            "nu_upper_bound": self.nu_upper_bound,
            "attained": self.attained,
        }


def _monotone(coeffs) -> CoefficientVector:
    d = coeffs if isinstance(coeffs, CoefficientVector) else CoefficientVector(coeffs)
    if not d.is_gapwise_monotone:
        raise MonotonicityError("coefficients must be non-increasing")
    return d


def compute_kappa(eps: CapacityParams | Sequence[float]) -> int:
    e = eps if isinstance(eps, CapacityParams) else CapacityParams(eps)
    kappa = 0
    for j, v in enumerate(e, start=1):
        if v > 0.0:
            kappa = j
    return kappa


def threshold_index(coeffs: CoefficientVector | Sequence[float]) -> int | None:
    """Smallest 1-based ``j`` with ``d_1 > d_j`` (exact comparison), or None."""
    d = coeffs if isinstance(coeffs, CoefficientVector) else CoefficientVector(coeffs)
    for j, v in enumerate(d, start=1):
        if d[0] > v:
            return j
    return None


def increase_capacity(
    eps: CapacityParams | Sequence[float], coeffs: CoefficientVector | Sequence[float]
) -> CapacityParams:
    """Raise capacity by one without lowering the optimal value.

    Keeps ``eps_j`` for ``j < kappa``, halves ``eps_kappa`` and gives
    ``kappa + 1`` half of the largest bound that both preserves the optimum
    and keeps ``sum j eps_j`` from growing.
    """
    e = eps if isinstance(eps, CapacityParams) else CapacityParams(eps)
    d = _monotone(coeffs)
    m = len(e)
    if len(d) != m:
        raise DimensionError(f"coeffs has length {len(d)} but epsilons has length {m}")
    kappa = compute_kappa(e)
    if kappa == m:
        raise CapacityExhaustedError(f"capacity is already {m}, the number of spikes")
    a = threshold_index(d)
    if a is not None and kappa < a:
        raise RegimeError(
            f"capacity {kappa} is below the threshold a = {a}; raising it from a-1 to a loses value"
        )

    new = list(e.epsilons)
    if kappa == 0:
        # only reachable when all d_j are equal, so any feasible bound is free
        new[0] = 0.5
    else:
        d1 = d[0]
        new[kappa - 1] = e[kappa - 1] / 2.0
        released = math.fsum(
            j * (e[j - 1] - new[j - 1]) * (d1 - d[j - 1]) for j in range(2, kappa + 1)
        )
        loss_rate = (kappa + 1) * (d1 - d[kappa])
        value_bound = released / loss_rate if loss_rate > 0.0 else math.inf
        mass_bound = kappa * (e[kappa - 1] - new[kappa - 1]) / (kappa + 1)
        new[kappa] = min(value_bound, mass_bound) / 2.0

    out = CapacityParams(new)
    if optimal_value(d, out) < optimal_value(d, e) - FEAS_TOL:
        raise ConsistencyError("capacity increase lowered the optimal value")
    return out


def increase_capacity_uniform(
    eps_value: float, m: int, coeffs: CoefficientVector | Sequence[float]
) -> CapacityParams:
    """Uniform bounds on ``j <= m`` become uniform bounds on ``j <= m + 1``.

    Returns the largest common value that is feasible and keeps the optimum.
    """
    d = _monotone(coeffs)
    if not 1 <= m < len(d):
        raise CapacityExhaustedError(f"m must satisfy 1 <= m < {len(d)} (got {m})")
    if eps_value < 0.0:
        raise ValidationError("eps_value must be non-negative", invariant="non-negativity")
    d1 = d[0]
    mass_cap = 2.0 / ((m + 1) * (m + 2))
    before = math.fsum(j * (d1 - d[j - 1]) for j in range(2, m + 1))
    after = before + (m + 1) * (d1 - d[m])
    new_eps = min(mass_cap, before / after * eps_value) if after > 0.0 else mass_cap
    old = CapacityParams([eps_value] * m + [0.0] * (len(d) - m))
    out = CapacityParams([new_eps] * (m + 1) + [0.0] * (len(d) - m - 1))
    if optimal_value(d, out) < optimal_value(d, old) - FEAS_TOL:
        raise ConsistencyError("capacity increase lowered the optimal value")
    return out


def loss_ratio(coeffs: CoefficientVector | Sequence[float], eps: CapacityParams | Sequence[float]) -> float:
    """Unconstrained optimum over constrained optimum, ``d_1 / H_opt(eps)``."""
    d = _monotone(coeffs)
    h = optimal_value(d, eps)
    if h <= 0.0:
        return math.inf
    return d[0] / h


def price_of_capacity(
    coeffs: CoefficientVector | Sequence[float], eps: CapacityParams | Sequence[float] | None = None
) -> CapacityReport:
    d = _monotone(coeffs)
    if d[len(d) - 1] < 0.0:
        raise ValidationError("price of capacity needs non-negative coefficients", invariant="non-negativity")
    a = threshold_index(d)
    if eps is not None:
        e = eps if isinstance(eps, CapacityParams) else CapacityParams(eps)
        if len(e) != len(d):
            raise DimensionError(f"coeffs has length {len(d)} but epsilons has length {len(e)}")
        kappa = compute_kappa(e)
    else:
        kappa = a if a is not None else 0
    if a is None:
        return CapacityReport(kappa, None, 1.0, 1.0, True)
    da = d[a - 1]
    if da == 0.0:
        return CapacityReport(kappa, a, math.inf, math.inf, False)
    return CapacityReport(kappa, a, d[0] / da, d[a - 2] / da, False)


def price_of_capacity_uniform(coeffs: CoefficientVector | Sequence[float]) -> float:
    """Exact price of capacity when every non-zero bound shares one value.

    Equals ``(a + 1) / ((a - 1) + 2 d_a / d_1)``, which never exceeds
    ``1 + 2 / (a - 1) <= 3``.
    """
    d = _monotone(coeffs)
    a = threshold_index(d)
    if a is None:
        raise NoThresholdError("all coefficients are equal; capacity is never priced")
    return (a + 1) / ((a - 1) + 2.0 * (d[a - 1] / d[0]))
