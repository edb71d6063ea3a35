"""Numerical toolkit for reflection-symmetric weighted harmonic analysis.

The package evaluates, on the line and in products of lines, the weighted
measure |x|^(2 kappa) dx and its normalization constants, the deformed
exponential kernel, the associated integral transform, the signed-measure
translation, the heat semigroup, and centered maximal operators built from
translated ball indicators.
"""

from .core import (
    DunklContext,
    MultiplicityVector,
    SampledFunction,
    ball_measure,
    line_rule,
    make_context,
    weight,
)
from .errors import CapacityError, DegenerateWeightError, DomainError
from .heat import HeatConfig, gaussian_qt, heat_apply, heat_kernel, make_heat_config
from .kernel import KernelEvaluator, dunkl_kernel_1d, dunkl_kernel_im, dunkl_kernel_nd
from .maximal import (
    ExperimentRecord,
    FunctionSequence,
    RadiusGrid,
    ball_average,
    fs_apply,
    scalar_maximal,
)
from .transform import TransformPlan, forward, inverse, make_plan
from .translation import ball_translate, translate_1d, translation_measure

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DegenerateWeightError",
    "DomainError",
    "DunklContext",
    "ExperimentRecord",
    "FunctionSequence",
    "HeatConfig",
    "KernelEvaluator",
    "MultiplicityVector",
    "RadiusGrid",
    "SampledFunction",
    "TransformPlan",
    "ball_average",
    "ball_measure",
    "ball_translate",
    "dunkl_kernel_1d",
    "dunkl_kernel_im",
    "dunkl_kernel_nd",
    "forward",
    "fs_apply",
    "gaussian_qt",
    "heat_apply",
    "heat_kernel",
    "inverse",
    "line_rule",
    "make_context",
    "make_heat_config",
    "make_plan",
    "scalar_maximal",
    "translate_1d",
    "translation_measure",
    "weight",
]
