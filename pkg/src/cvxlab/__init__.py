"""Numerical laboratory for circle means, convexity moduli, and
plurisubharmonicity checks on complex normed spaces."""

__version__ = "0.1.0"

from .backend import BACKEND, thread_count
from .circle import (CircleMeanResult, QuadratureControls, mean_on_circle,
                     power_mean_on_circle)
from .domains import (DomainSpec, ball_of, boundary_sample, disc_radius,
                      exhaustion_check, interior_sample, levi_report,
                      parse_domain, strict_levi_scan, unit_ball_uniform_check)
from .errors import (ContractViolation, CvxlabError, DegenerateDefiningFunction,
                     EvaluationError, InfeasibleError, NoDataError,
                     NonSmoothPoint, NotUniformlyConvex, NumericFailure,
                     ResolutionError, SamplingError, SchemaError)
from .moduli import (ModulusCurve, ModulusEstimate, PLConstant, estimate_I,
                     fit_power_constant, modulus_curve, modulus_delta,
                     modulus_delta_q, modulus_Delta_q, modulus_H_p)
from .pshlab import (FieldOracle, GridFunction, box_region, bump_kernel,
                     dprime, field_by_name, field_norm, gradient_dprime,
                     levi_matrix, levi_quadratic, load_grid, mollify,
                     psh_scan, sample_grid, strict_avg_phi, uniform_lambda)
from .reports import VerdictReport, report_from_json_dict
from .spaces import (SpaceSpec, custom, hilbert, lp, norm, norms, parse_space,
                     random_unit, schatten, space_from_json_dict, weighted_lp)
from .verify import SUITE_NAMES, replay, run_suite

__all__ = [
    "BACKEND", "thread_count",
    "CircleMeanResult", "QuadratureControls", "mean_on_circle",
    "power_mean_on_circle",
    "DomainSpec", "ball_of", "boundary_sample", "disc_radius",
    "exhaustion_check", "interior_sample", "levi_report", "parse_domain",
    "strict_levi_scan", "unit_ball_uniform_check",
    "ContractViolation", "CvxlabError", "DegenerateDefiningFunction",
    "EvaluationError", "InfeasibleError", "NoDataError", "NonSmoothPoint",
    "NotUniformlyConvex", "NumericFailure", "ResolutionError",
    "SamplingError", "SchemaError",
    "ModulusCurve", "ModulusEstimate", "PLConstant", "estimate_I",
    "fit_power_constant", "modulus_curve", "modulus_delta",
    "modulus_delta_q", "modulus_Delta_q", "modulus_H_p",
    "FieldOracle", "GridFunction", "box_region", "bump_kernel", "dprime",
    "field_by_name", "field_norm", "gradient_dprime", "levi_matrix",
    "levi_quadratic", "load_grid", "mollify", "psh_scan", "sample_grid",
    "strict_avg_phi", "uniform_lambda",
    "VerdictReport", "report_from_json_dict",
    "SpaceSpec", "custom", "hilbert", "lp", "norm", "norms", "parse_space",
    "random_unit", "schatten", "space_from_json_dict", "weighted_lp",
    "SUITE_NAMES", "replay", "run_suite",
]
