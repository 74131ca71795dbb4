"""Exact Lebesgue integration built up from step functions on a semiring."""
from .fubini import counting_counterexample, fubini_r1, fubini_r2, fubini_step
from .gallery import GALLERY, run_gallery
from .measurable import (
    MeasurableFunction,
    MeasurableSet,
    difference,
    intersection,
    measure_of,
    null_iff_measure_zero,
    union,
)
from .monotone import R1Function, integral_r1
from .numeric import INF, NEG_INF, ExtendedRational, ext
from .signed import (
    BeppoLeviRejected,
    DefinednessError,
    R2Function,
    dominated_check,
    fatou_check,
    generalized_beppo_levi,
    l1_check,
    norm_l1,
)
from .spaces import (
    CountingSpace,
    FiniteSet,
    Interval,
    IntervalLine,
    NullCover,
    ProductSpace,
    Rectangle,
    ZeroSpace,
)
from .step import StepFunction, markov_level_bound, vanishing_check

__version__ = "0.1.0"

__all__ = [
    "BeppoLeviRejected",
    "counting_counterexample",
    "CountingSpace",
    "DefinednessError",
    "difference",
    "dominated_check",
    "ext",
    "ExtendedRational",
    "fatou_check",
    "FiniteSet",
    "fubini_r1",
    "fubini_r2",
    "fubini_step",
    "GALLERY",
    "generalized_beppo_levi",
    "INF",
    "integral_r1",
    "intersection",
    "Interval",
    "IntervalLine",
    "l1_check",
    "vanishing_check",
    "markov_level_bound",
    "MeasurableFunction",
    "MeasurableSet",
    "measure_of",
    "NEG_INF",
    "norm_l1",
    "null_iff_measure_zero",
    "NullCover",
    "ProductSpace",
    "R1Function",
    "R2Function",
    "Rectangle",
    "run_gallery",
    "StepFunction",
    "union",
    "ZeroSpace",
]
