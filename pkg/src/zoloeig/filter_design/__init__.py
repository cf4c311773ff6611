"""Composed Zolotarev rectangular filters and contour-quadrature baselines."""
from .contour import CONTOUR_KINDS, PoleSet, baseline_contour_poles
from .design import (
    MAX_DESIGN_ORDER,
    MAX_FILTER_ORDER,
    ErrorEstimate,
    FilterDesign,
    build_filter_design,
    choose_order,
    error_estimate,
    eval_filter_scalar,
    eval_inner_pole_form,
    omega_samples,
)
from .export import design_to_dict, error_curve, write_design_json, write_error_curve_csv
from .mobius import InfeasibleWindowError, MobiusFit, cross_ratio_ell, fit_mobius
from .window import SpectralWindow, WindowError
from .zolotarev import (
    MAX_ORDER,
    ZolotarevCoeffs,
    gontchar_bracket,
    gontchar_rho,
    partial_fraction_eval,
    partial_fraction_weights,
    rescaled_eval,
    zolotarev_coeffs,
    zolotarev_eval,
)

__all__ = [
    "CONTOUR_KINDS",
    "PoleSet",
    "baseline_contour_poles",
    "MAX_DESIGN_ORDER",
    "MAX_FILTER_ORDER",
    "ErrorEstimate",
    "FilterDesign",
    "build_filter_design",
    "choose_order",
    "error_estimate",
    "eval_filter_scalar",
    "eval_inner_pole_form",
    "omega_samples",
    "design_to_dict",
    "error_curve",
    "write_design_json",
    "write_error_curve_csv",
    "InfeasibleWindowError",
    "MobiusFit",
    "cross_ratio_ell",
    "fit_mobius",
    "SpectralWindow",
    "WindowError",
    "MAX_ORDER",
    "ZolotarevCoeffs",
    "gontchar_bracket",
    "gontchar_rho",
    "partial_fraction_eval",
    "partial_fraction_weights",
    "rescaled_eval",
    "zolotarev_coeffs",
    "zolotarev_eval",
]
