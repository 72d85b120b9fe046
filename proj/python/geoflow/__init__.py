"""Geodesic flows, Jacobi fields and smoothing on embedded graph surfaces."""

from ._core import (
    ConfigError,
    DomainTooSmall,
    GeoflowError,
    OutOfChart,
    OutOfDomain,
    Surface,
    UnknownSurface,
    catalog_names,
    criterion_ids,
    curvature_operator,
    curve_length,
    exp_map,
    fd_flow_differential,
    flow_differential,
    geodesic_flow,
    integrate_geodesic,
    make_surface,
    minimality_margin,
    mixed_partials_residual,
    mollify,
    propagate_jacobi,
    run_criterion,
    second_fundamental_form,
    sectional_curvature,
    shortest_path_length,
)

__all__ = [
    "ConfigError",
    "DomainTooSmall",
    "GeoflowError",
    "OutOfChart",
    "OutOfDomain",
    "Surface",
    "UnknownSurface",
    "catalog_names",
    "criterion_ids",
    "curvature_operator",
    "curve_length",
    "exp_map",
    "fd_flow_differential",
    "flow_differential",
    "geodesic_flow",
    "integrate_geodesic",
    "make_surface",
    "minimality_margin",
    "mixed_partials_residual",
    "mollify",
    "propagate_jacobi",
    "run_criterion",
    "second_fundamental_form",
    "sectional_curvature",
    "shortest_path_length",
]
