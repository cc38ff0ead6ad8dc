"""tracetopics: locate features in execution traces with topic models."""

__version__ = "0.1.0"
