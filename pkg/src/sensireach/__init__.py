"""Interval reachability of nonlinear ODEs from second-order sensitivity bounds."""

from ._jit import BACKEND
from .affine import choose_order, operator_D, operator_E, operator_F, reach_set_affine, reach_tube_affine, remainder_C
from .errors import BlowUpError, DimensionError, OrderingError, SensireachError, StepError, TaylorOrderError
from .integrators import IntegratorConfig, integrate
from .interval import (
    Interval,
    IntervalMatrix,
    iv_abs_sup,
    iv_add,
    iv_contains,
    iv_hull,
    iv_kron,
    iv_matmul,
    iv_norm_inf,
    iv_scalar_mul,
    outward_rounding,
)
from .mixed_monotone import build_decomposition, decomposition_eval, is_sign_stable, reach_oa_mm
from .models import MODELS, make_linear, make_model, make_riccati, make_unicycle
from .pipeline import (
    ReachProblem,
    ReachResult,
    SensitivityBundle,
    monte_carlo_check,
    run_algorithm1,
    run_ia_only,
    run_sampling_falsification,
    step1_sx_tube,
    step2_sxx_set,
    step3_sx_set,
)
from .sampling import SampleGrid, dispersion_check, sensitivity_bounds_from_samples, uniform_grid
from .sensitivity import (
    FlowResult,
    SystemModel,
    finite_diff_sensitivity,
    flow,
    flow_with_second_sensitivity,
    flow_with_sensitivity,
)

__version__ = "0.1.0"
