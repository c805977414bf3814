"""Tabular cultural-heritage metadata to RDF: materialise, validate, query, publish."""

__version__ = "0.1.0"
