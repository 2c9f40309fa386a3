"""Generalized storage control: models, parameter tuning, online policies, simulation."""

import json as _json

from ._core import (  # noqa: F401
    CostSpec,
    Decision,
    EpochStats,
    InflowSet,
    KappaInterval,
    MarkovChain,
    OmgParams,
    StorageError,
    StorageParams,
    StorageState,
    SubgradientBounds,
    SupportBounds,
    VosEstimate,
    clairvoyant_plan,
    convert,
    evaluate,
    global_subgradient_bounds,
    greedy_step,
    kappa_interval,
    markov_bound,
    markov_epoch_stats,
    no_storage_step,
    omg_step,
    reproduce_json,
    residual_imbalance,
    run_simulation_json,
    step,
    subgradient_interval,
    subopt_bound,
    tune_max_weight,
    tune_min_bound,
    validate_storage,
    vos_interval,
    w_max,
)


def run_simulation(config):
    """Run the simulation described by a config dict; returns the result as a dict."""
    return _json.loads(run_simulation_json(_json.dumps(config)))


def reproduce(name):
    """Run a built-in benchmark experiment ("exp1", "exp2", "exp3-synthetic")."""
    return _json.loads(reproduce_json(name))
