"""One-way bridge from scikit-learn forests to the ensemble interchange
JSON consumed by the distillation toolkit."""

from .export import ExportError, export_forest, forest_to_document

__version__ = "0.1.0"
