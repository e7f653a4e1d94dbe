"""Weak-form sparse regression for discovering PDEs from noisy gridded data."""

from ._core import (
    GridField,
    KSParams,
    KolmogorovParams,
    LambdaOmegaParams,
    TemporalFactor,
    WeakPDEError,
    WeightKind,
    WeightSpec,
    add_noise,
    build_system,
    discover,
    eval_weight,
    kolmogorov_reference,
    ks_reference,
    lambda_omega_reference,
    least_squares,
    library_labels,
    load_field,
    save_field,
    solve_kolmogorov,
    solve_ks,
    solve_lambda_omega,
    sparsify,
    subsample,
    validate,
    verify_weight,
)

__all__ = [name for name in dir() if not name.startswith("_")]
