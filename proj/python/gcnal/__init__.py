"""Pool-based active learning with sequential GCN samplers."""

from ._core import (
    GcnalError,
    GcnModel,
    GcnTrainConfig,
    build_adjacency,
    cli_main,
    entropy,
    gcn_backward,
    gcn_forward,
    gcn_loss,
    generate_blobs,
    kcenter_greedy,
    l2_normalize_rows,
    pairwise_sqdist,
    run_comparison,
    run_experiment,
    select_random,
    select_uncertain_gcn,
    train_gcn,
)

__all__ = [
    "GcnalError",
    "GcnModel",
    "GcnTrainConfig",
    "build_adjacency",
    "cli_main",
    "entropy",
    "gcn_backward",
    "gcn_forward",
    "gcn_loss",
    "generate_blobs",
    "kcenter_greedy",
    "l2_normalize_rows",
    "pairwise_sqdist",
    "run_comparison",
    "run_experiment",
    "select_random",
    "select_uncertain_gcn",
    "train_gcn",
]
