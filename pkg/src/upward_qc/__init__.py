"""Statistically p-upward quasi-Cauchy diagnostics and one-sided error control."""

from . import witnesses  # noqa: F401  registers the builtin catalog
from .errors import SpecError
from .seqcore import (
    Builtin,
    Combinator,
    DensityCurve,
    Mode,
    Op,
    Order,
    Sampled,
    SequenceSpec,
    StepParams,
    ViolationSet,
    density_curve,
    eval_sequence,
    exact_period_density,
    p_step_differences,
    prefix_density,
    violation_set,
)
from .witnesses import (
    combine,
    interleave_with_constant,
    make_builtin,
    repeat_blocks,
    shifted_interleave,
)

__version__ = "0.1.0"

__all__ = [
    "SpecError",
    "Builtin",
    "Combinator",
    "DensityCurve",
    "Mode",
    "Op",
    "Order",
    "Sampled",
    "SequenceSpec",
    "StepParams",
    "ViolationSet",
    "density_curve",
    "eval_sequence",
    "exact_period_density",
    "p_step_differences",
    "prefix_density",
    "violation_set",
    "combine",
    "interleave_with_constant",
    "make_builtin",
    "repeat_blocks",
    "shifted_interleave",
]
