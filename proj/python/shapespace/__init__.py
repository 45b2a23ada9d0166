"""Landmark shape space geometry and Hunter-Saxton geodesics on the line.

Arrays of landmarks, momenta and tangent vectors are (N, n) float arrays.
"""

from ._core import (
    BoundaryHit,
    Collision,
    DegenerateDirection,
    DegeneratePlane,
    EnergyDrift,
    Error,
    InvalidArgument,
    InvalidDiffeo,
    InvalidLandmarks,
    LineSearchFailed,
    NearSingular,
    NumericalError,
    ShapeMismatch,
    cometric,
    curvature_fd_oracle,
    diff_a_hit_times,
    energy,
    exp_map,
    flat,
    gram,
    hs_distance,
    hs_residual,
    kernel_eval,
    kernel_grad,
    match,
    metric,
    mon_exit_time,
    r_inverse,
    r_map,
    run_cli,
    sectional_curvature,
    sectional_numerator,
    sharp,
    shoot,
    smooth_bump,
)

__version__ = "0.1.0"
