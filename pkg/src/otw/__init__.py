"""Optimal Transport Warping: linear-time time-series distances.

Submodules
----------
series      prefix sums, windowed sums, sign splitting, normalisation
distance    the OTW distance family, gradients and pairwise matrices
oracle      exact small-scale (unbalanced) transport solvers
baselines   DTW with a Sakoe-Chiba band and Minkowski distances
evaluation  1-NN classification, parameter selection, clustering
net         feature-extraction layers, MLP head and training loop
synthetic   the 4-class pulse dataset generator
io          UCR-format reading and writing
bench       timing harness
cli         command-line entry point
"""

from .series import (
    TimeSeries,
    as_series,
    prefix_sums,
    split_signs,
    windowed_prefix_sums,
    z_normalize,
)
from .distance import (
    DIRECT,
    SPLIT,
    DistanceMatrix,
    Metric,
    OtwParams,
    otw,
    otw_grad,
    pairwise_matrix,
    smooth_l1,
    smooth_l1_deriv,
)
from .baselines import DtwParams, dtw, dtw_brute_force, minkowski
from .oracle import (
    TransportPlan,
    build_sink_cost_matrix,
    check_shift_sensitivity,
    check_theorem1,
    extend_with_sink,
    solve_transport_lp,
    unbalanced_ot,
    wasserstein_1d_closed_form,
)

__version__ = "0.1.0"

__all__ = [
    "TimeSeries", "as_series", "prefix_sums", "split_signs", "windowed_prefix_sums", "z_normalize",
    "DIRECT", "SPLIT", "DistanceMatrix", "Metric", "OtwParams", "otw", "otw_grad", "pairwise_matrix",
    "smooth_l1", "smooth_l1_deriv",
    "DtwParams", "dtw", "dtw_brute_force", "minkowski",
    "TransportPlan", "build_sink_cost_matrix", "check_shift_sensitivity", "check_theorem1",
    "extend_with_sink", "solve_transport_lp", "unbalanced_ot", "wasserstein_1d_closed_form",
]
