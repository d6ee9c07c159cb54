"""
Value types with array payloads: interval sets and sampled paths.
"""
from regen_stable.core.intervals import (
    Interval,
    IntervalSet,
    canonicalize,
    complement_within,
    dilate,
    from_arrays,
    intersect_many,
    measure_upto,
    measure_upto_many,
    restrict,
    shift,
    union_many,
)
from regen_stable.core.paths import LocalTimePath, ZPathSample

__all__ = [
    "Interval",
    "IntervalSet",
    "LocalTimePath",
    "ZPathSample",
    "canonicalize",
    "complement_within",
    "dilate",
    "from_arrays",
    "intersect_many",
    "measure_upto",
    "measure_upto_many",
    "restrict",
    "shift",
    "union_many",
]
