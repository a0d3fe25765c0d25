"""Curvature, shift, and localization invariants of kernel Hilbert modules."""

from ._core import (  # noqa: F401
    KernelSpec,
    WeightedShift,
    bundle_curvature,
    char_function,
    eigenvector_residual,
    hilbert_samuel,
    kernel_eval,
    line_curvature,
    localize_multiplier,
    metric_h,
    moment,
    quasi_similarity_ratio,
    quotient_dim,
    reducing_curvatures,
    restriction_weights,
    shift_kernel_metric,
    similarity_intertwiner,
    unitarily_equivalent,
)

__all__ = [
    "KernelSpec",
    "WeightedShift",
    "bundle_curvature",
    "char_function",
    "eigenvector_residual",
    "hilbert_samuel",
    "kernel_eval",
    "line_curvature",
    "localize_multiplier",
    "metric_h",
    "moment",
    "quasi_similarity_ratio",
    "quotient_dim",
    "reducing_curvatures",
    "restriction_weights",
    "shift_kernel_metric",
    "similarity_intertwiner",
    "unitarily_equivalent",
]
