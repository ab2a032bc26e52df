"""Capacity-constrained auctions of a single item sold through probability spikes."""

from .capacity import (
    CapacityReport,
    compute_kappa,
    increase_capacity,
    increase_capacity_uniform,
    price_of_capacity,
    price_of_capacity_uniform,
    threshold_index,
)
from .core import (
    BidderProfile,
    CapacityParams,
    CoefficientVector,
    GapVector,
    SpikeVector,
    bidders_from_values,
    evaluate_objective,
    gaps_to_spikes,
    spikes_to_gaps,
)
from .optimizer import LpSolution, check_kkt, solve, solve_closed_form, solve_simplex
from .sim import Scheme, SimulationResult, compare_schemes, simulate
from .spike_vcg import (
    GapwiseDecomposition,
    MechanismOutcome,
    check_walrasian,
    efficiency_decomposition,
    revenue_decomposition,
    run_vcg,
)
from .ssa import (
    KeywordAuctionConfig,
    SsaOutcome,
    combined_auction,
    optimize_ssa_spikes,
    sne_revenue,
    ssa_objective_coefficients,
)

__version__ = "0.1.0"
