"""Vocabulary catalogue, shape validation and graph statistics for the
object and process modules of the application profile."""
from .catalogue import (MODEL_PREFIXES, CatalogueError, VocabularyCatalogue, VocabularyTerm,
                        builtin_catalogue, load_catalogue, model_of)
from .shapes import (ShapeError, ShapeRule, ValidationReport, Violation, builtin_shapes,
                     load_shapes, parse_shapes, validate)
from .stats import StatsReport, compute_stats, model_usage

__all__ = [
    "MODEL_PREFIXES", "CatalogueError", "ShapeError", "ShapeRule", "StatsReport",
    "ValidationReport", "Violation", "VocabularyCatalogue", "VocabularyTerm",
    "builtin_catalogue", "builtin_shapes", "compute_stats", "load_catalogue",
    "load_shapes", "model_of", "model_usage", "parse_shapes", "validate",
]
