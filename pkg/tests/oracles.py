"""Independent reference computations used only by the tests.

None of these share code with the package: VCG payments come from the
Clarke pivot rule over brute-force assignments in exact rationals, LP optima
from generic vertex enumeration and scipy's HiGHS, SNE revenue from
per-slot payment sums.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog


def _best_welfare(values, spikes, exclude=None):
    """Max of sum p_j v_{assigned} over injective assignments of bidders to spikes."""
    bidders = [i for i in range(len(values)) if i != exclude]
    m = len(spikes)
    best = Fraction(0)
    best_assignment = None
    k = min(m, len(bidders))
    for chosen in itertools.permutations(bidders, k):
        w = sum((Fraction(spikes[j]) * Fraction(values[b]) for j, b in enumerate(chosen)), Fraction(0))
        if best_assignment is None or w > best:
            best, best_assignment = w, chosen
    return best, best_assignment


def clarke_payments(values, spikes):
    """Expected VCG payment per spike rank, via externalities, exact.

    Returns (payments by rank, efficient welfare).
    """
    welfare, assignment = _best_welfare(values, spikes)
    payments = []
    for j in range(len(spikes)):
        if j >= len(assignment):
            payments.append(Fraction(0))
            continue
        b = assignment[j]
        without, _ = _best_welfare(values, spikes, exclude=b)
        others_with = welfare - Fraction(spikes[j]) * Fraction(values[b])
        payments.append(without - others_with)
    return payments, welfare


def lp_vertices(d, eps):
    """All vertices of {theta : sum j theta_j = 1, theta >= eps} by basis enumeration."""
    m = len(d)
    a_eq = np.arange(1, m + 1, dtype=float)
    out = []
    for tight in itertools.combinations(range(m), m - 1):
        rows = [a_eq] + [np.eye(m)[i] for i in tight]
        rhs = [1.0] + [eps[i] for i in tight]
        try:
            theta = np.linalg.solve(np.array(rows), np.array(rhs))
        except np.linalg.LinAlgError:
            continue
        if np.all(theta >= np.asarray(eps) - 1e-12):
            out.append(theta)
    return out


def lp_vertex_optimum(d, eps):
    j = np.arange(1, len(d) + 1)
    return max(float(np.dot(theta * j, d)) for theta in lp_vertices(d, eps))


def lp_highs_optimum(d, eps):
    m = len(d)
    j = np.arange(1, m + 1, dtype=float)
    res = linprog(
        c=-(j * np.asarray(d, dtype=float)),
        A_eq=j[None, :],
        b_eq=[1.0],
        bounds=[(e, None) for e in eps],
        method="highs",
    )
    assert res.status == 0, res.message
    return -res.fun, res.x


def sne_revenue_by_slot(scores_desc, ctrs):
    """Sum of per-slot SNE (lower) payments ``sum_{k>=j} (g_k - g_{k+1}) s_{k+1}``."""
    n = len(ctrs)
    s = list(scores_desc) + [0.0] * (n + 1)
    g = list(ctrs) + [0.0]
    total = 0.0
    for j in range(n):
        if j >= len(scores_desc):
            break
        total += sum((g[k] - g[k + 1]) * s[k + 1] for k in range(j, n))
    return total


def uniform_nu_grid(d, a, points=200001):
    """Brute-force max of d1 / (d1 - a eps (d1 - d_a)) over a fine eps grid."""
    d1, da = d[0], d[a - 1]
    eps = np.linspace(0.0, 2.0 / (a * (a + 1)), points)[1:]
    return float(np.max(d1 / (d1 - a * eps * (d1 - da))))
