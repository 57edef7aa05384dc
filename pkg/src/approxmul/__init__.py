"""Gate-level laboratory for multicolumn inexact compressors and the
approximate 8x8 multipliers built from them."""

from .builders import (
    build_dadda,
    build_design1,
    build_design2,
    build_initial_design,
    build_precise_chain_design,
    build_truncated_design,
    design_from_selector,
)
from .compressors import (
    CompressorKind,
    CompressorSpec,
    SPECS,
    compressor_error_stats,
    error_distance,
    evaluate,
    figures_of_merit,
    input_value,
)
from .netlist import Netlist, elaborate
from .plan import PlanError, ReductionPlan, deserialize_plan, serialize_plan, validate_plan
from .simulator import exhaustive_error_stats, heatmap, signed_error_distribution

__all__ = [
    "CompressorKind", "CompressorSpec", "SPECS", "Netlist", "PlanError", "ReductionPlan",
    "build_dadda", "build_design1", "build_design2", "build_initial_design",
    "build_precise_chain_design", "build_truncated_design", "compressor_error_stats",
    "deserialize_plan", "design_from_selector", "elaborate", "error_distance", "evaluate",
    "exhaustive_error_stats", "figures_of_merit", "heatmap", "input_value",
    "serialize_plan", "signed_error_distribution", "validate_plan",
]
