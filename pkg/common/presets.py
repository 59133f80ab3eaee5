import copy
import json
import logging
import os
from typing import Any, Dict, List

from common.errors import UnknownPresetError

_logger = logging.getLogger(__name__)

_PRESETS_CACHE: Dict[str, Any] | None = None

PRESET_KINDS = ("experiment", "phase", "timing", "noise_sweep", "epsilon_sweep")

PRESETS_PATH = os.path.join(
    os.path.dirname(os.path.dirname(__file__)), "fallback_config", "presets.json"
)

# The two headline regimes stay available even without the repo-local table.
_DEFAULTS: Dict[str, Any] = {
    "table1": {
        "kind": "experiment",
        "description": "Quadratic equations, n=20, N=25, three nonzeros",
        "spec": {
            "n": 20,
            "d": 2,
            "N": 25,
            "k": 3,
            "trials": 100,
            "methods": ["rl1", "l1l2", "irl1l2", "sl1l2", "aga", "ega"],
        },
    },
    "table2": {
        "kind": "experiment",
        "description": "Quartic equations, n=5, N=50, two nonzeros",
        "spec": {
            "n": 5,
            "d": 4,
            "N": 50,
            "k": 2,
            "trials": 100,
            "methods": ["rl1", "l1l2", "irl1l2", "sl1l2", "aga", "ega"],
        },
    },
}


def get_presets() -> Dict[str, Any]:
    """Load experiment presets from the repo-local file merged over in-code defaults.

    Source of truth:
    - Local file at fallback_config/presets.json (repo-local)

    A preset in the file replaces the default of the same name; its "spec" block is merged
    key by key. Result is cached in-process.
    """
    global _PRESETS_CACHE
    if _PRESETS_CACHE is not None:
        return _PRESETS_CACHE

    data: Dict[str, Any] = {}
    path = PRESETS_PATH
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        _logger.info("📦 Loaded experiment presets from local file: %s", path)
    except FileNotFoundError:
        _logger.info("Presets file not found at %s; using defaults", path)
    except Exception as e:
        _logger.warning("⚠️ Presets file load error (%s); using defaults", e)
        data = {}

    merged = copy.deepcopy(_DEFAULTS)
    for name, preset in (data or {}).items():
        if not isinstance(preset, dict) or preset.get("kind") not in PRESET_KINDS:
            _logger.warning("⚠️ Ignoring malformed preset %r", name)
            continue
        base = merged.get(name, {})
        spec = {**base.get("spec", {}), **preset.get("spec", {})}
        merged[name] = {**base, **preset, "spec": spec}
    _PRESETS_CACHE = merged
    return merged


def preset_names() -> List[str]:
    return sorted(get_presets())


def get_preset(name: str) -> Dict[str, Any]:
    """Return a deep copy of one preset, so callers may override fields freely."""
    presets = get_presets()
    if name not in presets:
        raise UnknownPresetError(
            f"unknown preset '{name}'; available: {', '.join(sorted(presets))}"
        )
    preset = copy.deepcopy(presets[name])
    preset["spec"].setdefault("experiment_id", name)
    return preset
