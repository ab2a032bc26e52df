import itertools
import math

import numpy as np
import pytest
from conftest import random_spikes
from oracles import clarke_payments

from spikeauction.core import BidderProfile, SpikeVector, bidders_from_values, evaluate_objective, spikes_to_gaps
from spikeauction.errors import ConsistencyError, DimensionError, InputError, ValidationError
from spikeauction.spike_vcg import (
    check_walrasian,
    efficiency_decomposition,
    revenue_decomposition,
    run_vcg,
)


@pytest.mark.parametrize(
    "values, spikes, payments, revenue, efficiency",
    [
        ((10, 6, 4), (0.7, 0.3), (3.6, 1.2), 4.8, 8.8),
        ((10, 6), (1.0,), (6.0,), 6.0, 10.0),
        ((10,), (0.7, 0.3), (0.0, 0.0), 0.0, 7.0),
    ],
)
def test_run_vcg_examples(values, spikes, payments, revenue, efficiency):
    out = run_vcg(bidders_from_values(values), spikes)
    assert out.expected_payments == pytest.approx(payments, abs=1e-12)
    assert out.revenue == pytest.approx(revenue, abs=1e-12)
    assert out.efficiency == pytest.approx(efficiency, abs=1e-12)


def test_payments_match_clarke_pivot_oracle(rng):
    for _ in range(200):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, 4))
        values = [int(v) for v in rng.integers(0, 20, size=n)]
        spikes = random_spikes(rng, m)
        out = run_vcg(bidders_from_values(values), spikes)
        expected, welfare = clarke_payments(values, list(out.spikes.probs))
        assert np.allclose(out.expected_payments, [float(x) for x in expected], atol=1e-9)
        assert out.efficiency == pytest.approx(float(welfare), abs=1e-9)


def test_ranking_ties_broken_by_id():
    bidders = [BidderProfile("c", 5), BidderProfile("a", 5), BidderProfile("b", 9)]
    out = run_vcg(bidders, (0.5, 0.3, 0.2))
    assert [bidders[i].id for i in out.ranking] == ["b", "a", "c"]


def test_pay_per_acquisition_charges():
    out = run_vcg(bidders_from_values((10, 6, 4)), (0.7, 0.3))
    charges = out.per_win_charges()
    assert charges == pytest.approx((3.6 / 0.7, 4.0))
    # expected per-acquisition payment equals the betting charge
    assert [c * p for c, p in zip(charges, out.spikes)] == pytest.approx(out.expected_payments)
    zero = run_vcg(bidders_from_values((10, 6, 4)), (1.0, 0.0))
    assert zero.per_win_charges()[1] == 0.0


def test_errors():
    with pytest.raises(InputError):
        run_vcg([], (1.0,))
    with pytest.raises(ValidationError):
        run_vcg(bidders_from_values((1, 2)), (0.6, 0.6))


@pytest.mark.parametrize(
    "values, spikes, coeffs, total",
    [
        ((10, 6, 4), (0.7, 0.3), (6, 4), 4.8),
        ((10, 6), (1.0,), (6,), 6.0),
        ((5, 5, 5), (0.5, 0.3, 0.2), (5, 5, 0), None),
    ],
)
def test_revenue_decomposition(values, spikes, coeffs, total):
    out = run_vcg(bidders_from_values(values), spikes)
    dec = revenue_decomposition(out, out.spikes)
    assert dec.coeffs.coeffs == pytest.approx(coeffs)
    assert dec.is_monotone
    h = evaluate_objective(spikes_to_gaps(out.spikes), dec.coeffs)
    assert h == pytest.approx(out.revenue, abs=1e-9)
    if total is not None:
        assert h == pytest.approx(total, abs=1e-12)


@pytest.mark.parametrize(
    "values, spikes, coeffs, total",
    [
        ((10, 6, 4), (0.7, 0.3), (10, 8), 8.8),
        ((3, 3, 3, 3), (0.4, 0.3, 0.2, 0.1), (3, 3, 3, 3), 3.0),
        ((10,), (0.7, 0.3), (10, 5), 7.0),
    ],
)
def test_efficiency_decomposition(values, spikes, coeffs, total):
    out = run_vcg(bidders_from_values(values), spikes)
    dec = efficiency_decomposition(out, out.spikes)
    assert dec.coeffs.coeffs == pytest.approx(coeffs)
    assert dec.is_monotone
    assert evaluate_objective(spikes_to_gaps(out.spikes), dec.coeffs) == pytest.approx(total, abs=1e-12)


def test_decomposition_rejects_other_spikes():
    out = run_vcg(bidders_from_values((10, 6, 4)), (0.7, 0.3))
    with pytest.raises(ConsistencyError):
        revenue_decomposition(out, SpikeVector((0.6, 0.4)))


def test_revenue_coefficients_are_shifted_sorted_values(rng):
    for _ in range(300):
        n, m = int(rng.integers(1, 12)), int(rng.integers(1, 8))
        values = rng.random(n) * 50
        out = run_vcg(bidders_from_values(values), random_spikes(rng, m))
        padded = np.concatenate([np.sort(values)[::-1], np.zeros(m + 1)])
        dec = revenue_decomposition(out, out.spikes)
        assert np.array_equal(np.array(dec.coeffs.coeffs), padded[1 : m + 1])
        assert math.isclose(out.revenue, math.fsum(out.expected_payments), abs_tol=1e-9)
        # higher spikes cost weakly more
        assert np.all(np.diff(out.expected_payments) <= 1e-12)


@pytest.mark.parametrize(
    "values, spikes, ranking, payments, expected",
    [
        ((10, 6), (1.0,), (0, 1), (6.0,), True),
        ((10, 6), (1.0,), (1, 0), (6.0,), False),
    ],
)
def test_check_walrasian_examples(values, spikes, ranking, payments, expected):
    assert check_walrasian(bidders_from_values(values), spikes, ranking, payments) is expected


def test_vcg_outcome_is_walrasian():
    bidders = bidders_from_values((10, 6, 4))
    out = run_vcg(bidders, (0.7, 0.3))
    assert check_walrasian(bidders, out.spikes, out.ranking, out.expected_payments)


def test_check_walrasian_input_errors():
    bidders = bidders_from_values((10, 6))
    with pytest.raises(DimensionError):
        check_walrasian(bidders, (0.7, 0.3), (0, 1), (1.0,))
    with pytest.raises(InputError):
        check_walrasian(bidders, (1.0,), (0, 0), (1.0,))


def _welfare(values, spikes, ranking):
    return sum(p * values[ranking[j]] for j, p in enumerate(spikes) if j < len(ranking))


def test_walrasian_iff_efficient_exhaustive(rng):
    for _ in range(60):
        n, m = int(rng.integers(1, 6)), int(rng.integers(1, 4))
        values = [float(v) for v in rng.integers(0, 8, size=n)]
        bidders = bidders_from_values(values)
        out = run_vcg(bidders, random_spikes(rng, m))
        best = _welfare(values, out.spikes, out.ranking)
        for perm in itertools.permutations(range(n)):
            efficient = _welfare(values, out.spikes, perm) >= best - 1e-9
            assert check_walrasian(bidders, out.spikes, perm, out.expected_payments) == efficient
