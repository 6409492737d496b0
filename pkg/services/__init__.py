"""Service layer: graph model, quality functions, annealing, benchmarks and I/O."""

from . import pipelines, presets, settings, storage

__all__ = ["pipelines", "presets", "settings", "storage"]
