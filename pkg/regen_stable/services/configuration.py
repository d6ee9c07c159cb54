"""
TOML experiment configuration: loading, `key=value` overrides and validation into
ExperimentConfig.

Precedence: overrides > CLI flags > TOML values > environment settings > embedded defaults.
"""
import copy
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from regen_stable.config import settings
from regen_stable.errors import ConfigError
from regen_stable.models import (
    PARAMS_MODELS,
    ExperimentConfig,
    ExperimentKind,
    ModelInfo,
)

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {"master_seed", "output_dir", "threads", "model"}
KIND_NAMES = {kind.value for kind in ExperimentKind}


def _field_errors(error: ValidationError, prefix: str) -> List[str]:
    fields = []
    for err in error.errors():
        location = ".".join(str(part) for part in err["loc"])
        fields.append(f"{prefix}{'.' if prefix and location else ''}{location}: {err['msg']}")
    return fields


def load_config_file(path: Optional[str]) -> Dict[str, Any]:
    """Parse a TOML config file; no path means an empty document (embedded defaults).

    Raises:
        ConfigError: if the file is missing, unreadable, or not valid TOML
    """
    if path is None:
        return {}
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with file.open("rb") as handle:
            document = tomllib.load(handle)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"cannot parse config file {path}: {e}") from e
    unknown = sorted(
        key for key in document if key not in TOP_LEVEL_KEYS and key not in KIND_NAMES
    )
    if unknown:
        raise ConfigError(f"unknown keys in {path}", [f"{key}: not a recognised table or key" for key in unknown])
    logger.debug("loaded config %s with tables %s", path, sorted(document))
    return document


def parse_override(item: str) -> Tuple[List[str], Any]:
    """Split `a.b=value`; the value is read as a TOML literal, falling back to a bare string.

    Raises:
        ConfigError: when the item has no `=` or an empty key
    """
    key, sep, raw = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override must look like key=value, got {item!r}")
    try:
        value = tomllib.loads(f"value = {raw.strip()}")["value"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return key.split("."), value


def _assign(table: Dict[str, Any], path: Sequence[str], value: Any) -> None:
    for part in path[:-1]:
        nested = table.setdefault(part, {})
        if not isinstance(nested, dict):
            raise ConfigError(f"override path {'.'.join(path)} crosses the scalar key {part!r}")
        table = nested
    table[path[-1]] = value


def apply_overrides(document: Dict[str, Any], kind: Optional[ExperimentKind], overrides: Sequence[str]) -> Dict[str, Any]:
    """Apply overrides: top-level keys as written, all others inside the kind's table."""
    document = copy.deepcopy(document)
    for item in overrides:
        path, value = parse_override(item)
        if path[0] in TOP_LEVEL_KEYS or path[0] in KIND_NAMES:
            _assign(document, path, value)
        elif kind is None:
            _assign(document, ["model"] + path, value)
        else:
            _assign(document, [kind.value] + path, value)
    return document


def apply_flags(
    document: Dict[str, Any],
    seed: Optional[int] = None,
    out: Optional[str] = None,
    threads: Optional[int] = None,
) -> Dict[str, Any]:
    """Write CLI flags over the TOML top-level keys; overrides are applied afterwards."""
    flags = {"master_seed": seed, "output_dir": out, "threads": threads}
    return {**document, **{key: value for key, value in flags.items() if value is not None}}


def resolve_experiment(document: Dict[str, Any], kind: ExperimentKind) -> ExperimentConfig:
    """Validate the kind's table and the top-level run keys into an ExperimentConfig.

    Missing run keys fall back to the environment settings.

    Raises:
        ConfigError: listing every invalid field
    """
    if not isinstance(document.get(kind.value, {}), dict):
        raise ConfigError(f"[{kind.value}] must be a table")
    table = dict(document.get(kind.value, {}))
    replications = table.pop("replications", None)
    try:
        params = PARAMS_MODELS[kind].model_validate(table)
    except ValidationError as e:
        raise ConfigError(f"invalid [{kind.value}] configuration", _field_errors(e, kind.value)) from e

    master_seed = document.get("master_seed", settings.DEFAULT_SEED)
    output = document.get("output_dir", settings.OUTPUT_DIR)
    try:
        return ExperimentConfig(
            kind=kind,
            params=params,
            replications=replications,
            master_seed=master_seed,
            output_path=str(output),
            threads=document.get("threads", settings.THREADS),
        )
    except ValidationError as e:
        raise ConfigError(f"invalid {kind.value} run settings", _field_errors(e, "")) from e


def resolve_model_info(document: Dict[str, Any]) -> ModelInfo:
    try:
        return ModelInfo.model_validate(document.get("model", {}))
    except ValidationError as e:
        raise ConfigError("invalid [model] table", _field_errors(e, "model")) from e


def embedded_defaults() -> Dict[str, Dict[str, Any]]:
    """Default parameter tables of every experiment kind."""
    return {kind.value: model().model_dump(mode="json") for kind, model in PARAMS_MODELS.items()}
