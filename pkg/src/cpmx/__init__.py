"""Evolution patterns and configuration for configurable process models."""

from .catalog import (
    ApplicabilityVerdict, PatternDescriptor, PatternGraph, applicable_patterns, list_patterns,
    pattern_relations,
)
from .configuration import (
    Configuration, check_selection, derive_variant, enumerate_configurations, is_variability_free,
)
from .constraints import check_evolution_constraints, check_vcc_consistency, variant_dependents
from .edits import apply_edits, invert_all, model_diff
from .errors import CpmError
from .evolution import ApplyResult, apply_pattern
from .io import canonical_hash, export_dot, load_model, save_model
from .model import (
    VCC, Activity, ConfigurableProcessModel, DataObject, Plain, Resource, SequenceFlow, Variant,
    VariationPoint, VPType, transform_to_variation_point,
)
from .trace import Trace, TraceEntry, record, replay, undo
from .validate import ValidationReport, Violation, validate_model

__version__ = "0.1.0"

__all__ = [
    "Activity", "ApplicabilityVerdict", "ApplyResult", "Configuration", "ConfigurableProcessModel",
    "CpmError", "DataObject", "PatternDescriptor", "PatternGraph", "Plain", "Resource",
    "SequenceFlow", "Trace", "TraceEntry", "VCC", "VPType", "ValidationReport", "Variant",
    "VariationPoint", "Violation", "applicable_patterns", "apply_edits", "apply_pattern",
    "canonical_hash", "check_evolution_constraints", "check_selection", "check_vcc_consistency",
    "derive_variant", "enumerate_configurations", "export_dot", "invert_all", "is_variability_free",
    "list_patterns",
    "load_model", "model_diff", "pattern_relations", "record", "replay", "save_model",
    "transform_to_variation_point", "undo", "validate_model", "variant_dependents",
]
