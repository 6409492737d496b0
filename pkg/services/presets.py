from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import orjson

from services.optimizer import AnnealConfig
from services.settings import get_settings

_PROJECT_ROOT = Path(__file__).resolve().parents[1]
_DEFAULT_PRESETS_PATH = _PROJECT_ROOT / "presets.json"

_LOGGER = logging.getLogger(__name__)

_SCHEDULE_FIELDS = frozenset(AnnealConfig.model_fields) - {
    "rng_seed",
    "objective",
    "check_invariants",
}
_PRESET_FIELDS = _SCHEDULE_FIELDS | {"restarts"}


def _presets_path(path: str | Path | None) -> Path:
    if path is not None:
        return Path(path)
    configured = get_settings().presets_file
    return Path(configured) if configured is not None else _DEFAULT_PRESETS_PATH


def load_presets(path: str | Path | None = None) -> Dict[str, Dict[str, Any]]:
    presets_path = _presets_path(path)
    if not presets_path.exists():
        _LOGGER.warning("Preset file not found: %s", presets_path)
        return {}
    payload = orjson.loads(presets_path.read_bytes())
    if not isinstance(payload, dict):
        raise ValueError("Preset file must contain a JSON object.")
    return payload


def resolve_preset(
    preset_name: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    presets_path: str | Path | None = None,
) -> Tuple[AnnealConfig, int]:
    """Build the annealing config and restart count for a named preset.

    ``overrides`` entries that are ``None`` are ignored, so CLI flags left at
    their defaults do not mask the preset.
    """
    name = preset_name or get_settings().default_preset
    presets = load_presets(presets_path)
    if name not in presets:
        raise ValueError(f"Unknown preset: {name}")
    preset = presets[name]
    if not isinstance(preset, dict):
        raise ValueError(f"Preset '{name}' must be a JSON object.")
    unknown = set(preset) - _PRESET_FIELDS
    if unknown:
        raise ValueError(f"Preset '{name}' has unknown keys: {sorted(unknown)}")

    merged: Dict[str, Any] = dict(preset)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    restarts = merged.pop("restarts", 1)
    if not isinstance(restarts, int) or isinstance(restarts, bool) or restarts < 1:
        raise ValueError("Preset restarts must be a positive integer.")
    config = AnnealConfig.model_validate(merged)
    _LOGGER.debug("Resolved preset '%s' (%d restarts): %s", name, restarts, config)
    return config, restarts
