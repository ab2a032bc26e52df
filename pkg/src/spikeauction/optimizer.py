"""Optimal spike gaps under capacity lower bounds.

The problem is the LP

    max  sum_j theta_j * j * d_j
    s.t. sum_j j * theta_j = 1,   theta_j >= eps_j,

with dual ``min x_0 - sum eps_j x_j`` subject to ``x_j >= 0`` and
``-j d_j + j x_0 - x_j = 0``.  For non-increasing ``d`` the optimum is
known in closed form (all slack mass on the first gap).  ``solve_simplex``
handles arbitrary ``d`` and serves as the independent check on the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    FEAS_TOL,
    CapacityParams,
    CoefficientVector,
    GapVector,
    SpikeVector,
    evaluate_objective,
    gaps_to_spikes,
)
from .errors import DimensionError, FeasibilityError, MonotonicityError


@dataclass(frozen=True)
class LpSolution:
    """Primal gaps, objective value and dual vector ``(x_0, x_1, ..., x_M)``.

    ``gaps`` is kept as a plain tuple so that hand-built (possibly infeasible)
    candidates can be passed to :func:`check_kkt`.
    """

    gaps: tuple[float, ...]
    objective_value: float
    dual: tuple[float, ...]
    kkt_certified: bool
    method: str = ""

    @property
    def gap_vector(self) -> GapVector:
        return GapVector(self.gaps)

    @property
    def spikes(self) -> SpikeVector:
        return gaps_to_spikes(self.gap_vector)


def _coerce(coeffs, eps) -> tuple[CoefficientVector, CapacityParams]:
    if not isinstance(coeffs, CoefficientVector):
        coeffs = CoefficientVector(coeffs)
    if not isinstance(eps, CapacityParams):
        eps = CapacityParams(eps)
    if len(coeffs) != len(eps):
        raise DimensionError(f"coeffs has length {len(coeffs)} but epsilons has length {len(eps)}")
    return coeffs, eps


def _dual_objective(dual: Sequence[float], eps: CapacityParams) -> float:
    return dual[0] - math.fsum(e * x for e, x in zip(eps, dual[1:]))


def dual_objective(solution: LpSolution, eps: CapacityParams | Sequence[float]) -> float:
    """Dual objective ``x_0 - sum eps_j x_j`` at the solution's dual vector."""
    return _dual_objective(solution.dual, eps)


def optimal_value(coeffs: CoefficientVector | Sequence[float], eps: CapacityParams | Sequence[float]) -> float:
    """``d_1 - sum_{j>=2} j eps_j (d_1 - d_j)``; valid for non-increasing ``d``."""
    d, e = _coerce(coeffs, eps)
    d1 = d[0]
    return d1 - math.fsum(j * e[j - 1] * (d1 - d[j - 1]) for j in range(2, len(d) + 1))


def solve_closed_form(coeffs: CoefficientVector | Sequence[float], eps: CapacityParams | Sequence[float]) -> LpSolution:
    d, e = _coerce(coeffs, eps)
    if not d.is_gapwise_monotone:
        raise MonotonicityError("closed form requires non-increasing coefficients; use solve_simplex")
    m = len(d)
    head = 1.0 - math.fsum(j * e[j - 1] for j in range(2, m + 1))
    if head < e[0] - FEAS_TOL:
        raise FeasibilityError(
            f"first gap 1 - sum_(j>=2) j eps_j = {head!r} falls below its bound eps_1 = {e[0]!r}"
        )
    gaps = (max(head, e[0]),) + e.epsilons[1:]
    d1 = d[0]
    dual = (d1,) + tuple(j * (d1 - d[j - 1]) for j in range(1, m + 1))
    sol = LpSolution(
        gaps=gaps,
        objective_value=optimal_value(d, e),
        dual=dual,
        kkt_certified=False,
        method="closed-form",
    )
    return _certify(sol, d, e)


def solve_simplex(coeffs: CoefficientVector | Sequence[float], eps: CapacityParams | Sequence[float]) -> LpSolution:
    """Exact optimum for arbitrary coefficients.

    With ``phi_j = theta_j - eps_j`` and ``psi_j = j * phi_j`` the LP reads
    ``max sum psi_j d_j`` over ``psi >= 0, sum psi_j = 1 - sum j eps_j``: a
    simplex whose best vertex puts the whole residual on the largest ``d_j``
    (lowest index on ties).
    """
    d, e = _coerce(coeffs, eps)
    arr = np.array(d.coeffs)
    best = int(np.argmax(arr))
    gaps = list(e.epsilons)
    gaps[best] += e.residual / (best + 1)
    top = float(arr[best])
    dual = (top,) + tuple(j * (top - d[j - 1]) for j in range(1, len(d) + 1))
    sol = LpSolution(
        gaps=tuple(gaps),
        objective_value=evaluate_objective(gaps, d),
        dual=dual,
        kkt_certified=False,
        method="simplex",
    )
    return _certify(sol, d, e)


def solve(coeffs: CoefficientVector | Sequence[float], eps: CapacityParams | Sequence[float]) -> LpSolution:
    """Closed form when the coefficients allow it, simplex otherwise."""
    d, e = _coerce(coeffs, eps)
    if d.is_gapwise_monotone:
        return solve_closed_form(d, e)
    return solve_simplex(d, e)


def _certify(sol: LpSolution, d: CoefficientVector, e: CapacityParams) -> LpSolution:
    return LpSolution(sol.gaps, sol.objective_value, sol.dual, check_kkt(d, e, sol), sol.method)


def kkt_residuals(
    coeffs: CoefficientVector | Sequence[float],
    eps: CapacityParams | Sequence[float],
    solution: LpSolution,
) -> dict[str, float]:
    """Worst violation of each KKT block (0 means satisfied exactly)."""
    d, e = _coerce(coeffs, eps)
    m = len(d)
    if len(solution.gaps) != m or len(solution.dual) != m + 1:
        raise DimensionError(
            f"solution has {len(solution.gaps)} gaps and {len(solution.dual)} duals; expected {m} and {m + 1}"
        )
    theta = np.array(solution.gaps, dtype=float)
    eps_arr = np.array(e.epsilons)
    dv = np.array(d.coeffs)
    x0 = float(solution.dual[0])
    x = np.array(solution.dual[1:], dtype=float)
    j = np.arange(1, m + 1)
    return {
        "normalization": abs(math.fsum(j * theta) - 1.0),
        "primal_bounds": float(max(0.0, np.max(eps_arr - theta))),
        "dual_feasibility": float(max(0.0, np.max(-x))),
        "stationarity": float(np.max(np.abs(-j * dv + j * x0 - x))),
        "complementary_slackness": float(np.max(np.abs(x * (eps_arr - theta)))),
    }


def check_kkt(
    coeffs: CoefficientVector | Sequence[float],
    eps: CapacityParams | Sequence[float],
    solution: LpSolution,
    tol: float = FEAS_TOL,
) -> bool:
    return all(r <= tol for r in kkt_residuals(coeffs, eps, solution).values())
