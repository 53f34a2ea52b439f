"""Transmit design and Monte-Carlo rate evaluation for the statistical-CSI
fading MIMO broadcast channel."""

from .channels import (
    FiniteSupport,
    Kronecker,
    Rician,
    SampleSet,
    Scenario,
    draw_scenario_samples,
    sample_channel,
    second_order_stat,
)
from .rates import (
    Design,
    RateReport,
    SumRateReport,
    iid_sum_rate_bound,
    laar,
    lawsr,
    no_interference_bound,
    simplified_upper_bound,
    upper_bound_laar,
)
from .gradients import finite_diff_gradient, grad_F, grad_F_upper_bound, grad_P, t_matrix
from .optimize import (
    Alg1Params,
    algorithm1,
    algorithm2,
    best_of_starts,
    multi_start,
    power_projection,
    select_sample_count,
)
from .baselines import deterministic_dpc_rate, opportunistic_schedule, tdma_rate
from .fixtures import FIXTURE_NAMES, load_fixture

__all__ = [
    "Alg1Params",
    "Design",
    "FIXTURE_NAMES",
    "FiniteSupport",
    "Kronecker",
    "RateReport",
    "Rician",
    "SampleSet",
    "Scenario",
    "SumRateReport",
    "algorithm1",
    "algorithm2",
    "best_of_starts",
    "deterministic_dpc_rate",
    "draw_scenario_samples",
    "finite_diff_gradient",
    "grad_F",
    "grad_F_upper_bound",
    "grad_P",
    "iid_sum_rate_bound",
    "laar",
    "lawsr",
    "load_fixture",
    "multi_start",
    "no_interference_bound",
    "opportunistic_schedule",
    "power_projection",
    "sample_channel",
    "second_order_stat",
    "select_sample_count",
    "simplified_upper_bound",
    "t_matrix",
    "tdma_rate",
    "upper_bound_laar",
]

__version__ = "0.1.0"
