import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, ValidationError, ValidationInfo, field_validator, model_validator

from dataset.loader import ALL_PAIRS, BIPARTITE
from services.selection import COLOR_SUM_RULES, HIGHEST_S4, START_RULES, VECTOR_NORM

logger = logging.getLogger("scatterpick.cli")

# --- Defaults ---
DEFAULT_D_THRES = 0.995
DEFAULT_K = 16
DEFAULT_GRID = 5
STANDARD_THRESHOLDS = (0.9995, 0.9975, 0.995, 0.9925, 0.99)

DELIMITERS = {",": ",", "comma": ",", "\t": "\t", "\\t": "\t", "tab": "\t"}


class ConfigError(ValueError):
    """Raised when a run configuration has one or more violated constraints."""

    def __init__(self, diagnostics: List[str]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(diagnostics))


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class RunConfig(BaseModel):
    """Every setting of one pipeline run, validated before anything executes."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    input: Path
    label: str = "label"
    mode: str = ALL_PAIRS
    x_dims: List[str] = []
    y_dims: List[str] = []
    d_thres: float = DEFAULT_D_THRES
    k: int = DEFAULT_K
    grid: int = DEFAULT_GRID
    omega: Optional[float] = None
    color_sum: str = VECTOR_NORM
    start_rule: str = HIGHEST_S4
    out_dir: Path = Path("out")
    sweep: Optional[List[float]] = None
    delimiter: str = ","
    columns: int = 4
    workers: int = 1
    dump_meshes: bool = False

    @field_validator("x_dims", "y_dims", mode="before")
    @classmethod
    def split_names(cls, value):
        return _split_list(value)

    @field_validator("sweep", mode="before")
    @classmethod
    def split_thresholds(cls, value):
        if value == "":
            return None
        return _split_list(value)

    @field_validator("mode")
    @classmethod
    def check_mode(cls, value: str) -> str:
        if value not in (ALL_PAIRS, BIPARTITE):
            raise ValueError(f"mode must be '{ALL_PAIRS}' or '{BIPARTITE}'")
        return value

    @field_validator("y_dims")
    @classmethod
    def check_disjoint(cls, value: List[str], info: ValidationInfo) -> List[str]:
        overlap = sorted(set(value) & set(info.data.get("x_dims") or []))
        if overlap:
            raise ValueError(f"x_dims and y_dims overlap: {', '.join(overlap)}")
        return value

    @field_validator("d_thres")
    @classmethod
    def check_d_thres(cls, value: float) -> float:
        if not -1.0 <= value <= 1.0:
            raise ValueError("d_thres out of [-1, 1]")
        return value

    @field_validator("sweep")
    @classmethod
    def check_sweep(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is None:
            return value
        if not value:
            raise ValueError("sweep needs at least one threshold")
        outside = [t for t in value if not -1.0 <= t <= 1.0]
        if outside:
            raise ValueError(f"sweep thresholds out of [-1, 1]: {outside}")
        return value

    @field_validator("k")
    @classmethod
    def check_k(cls, value: int) -> int:
        if value < 1:
            raise ValueError("k must be >= 1")
        return value

    @field_validator("grid", "columns", "workers")
    @classmethod
    def check_positive(cls, value: int, info: ValidationInfo) -> int:
        if value < 1:
            raise ValueError(f"{info.field_name} must be >= 1")
        return value

    @field_validator("omega")
    @classmethod
    def check_omega(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not value > 0:
            raise ValueError("omega must be > 0")
        return value

    @field_validator("color_sum")
    @classmethod
    def check_color_sum(cls, value: str) -> str:
        if value not in COLOR_SUM_RULES:
            raise ValueError(f"color_sum must be one of {', '.join(COLOR_SUM_RULES)}")
        return value

    @field_validator("start_rule")
    @classmethod
    def check_start_rule(cls, value: str) -> str:
        if value not in START_RULES:
            raise ValueError(f"start_rule must be one of {', '.join(START_RULES)}")
        return value

    @field_validator("delimiter", mode="before")
    @classmethod
    def check_delimiter(cls, value: str) -> str:
        if value not in DELIMITERS:
            raise ValueError("delimiter must be ',' or 'tab'")
        return DELIMITERS[value]

    @model_validator(mode="after")
    def check_bipartite(self) -> "RunConfig":
        if self.mode == BIPARTITE and (not self.x_dims or not self.y_dims):
            raise ValueError("bipartite mode needs non-empty x_dims and y_dims")
        return self


def _format_error(error: Dict[str, Any]) -> str:
    message = error["msg"].removeprefix("Value error, ")
    location = ".".join(str(part) for part in error["loc"])
    if error["type"] == "extra_forbidden":
        message = "unknown setting"
    if error["type"] == "missing":
        message = "required setting is missing"
    return f"{location}: {message}" if location else message


def validate(raw: Mapping[str, Any]) -> List[str]:
    """Every violated constraint as 'field: message'; empty when the config is valid."""
    try:
        RunConfig(**normalize_keys(raw))
    except ValidationError as e:
        return [_format_error(error) for error in e.errors()]
    return []


def build_config(raw: Mapping[str, Any]) -> RunConfig:
    diagnostics = validate(raw)
    if diagnostics:
        raise ConfigError(diagnostics)
    return RunConfig(**normalize_keys(raw))


def normalize_keys(raw: Mapping[str, Any]) -> Dict[str, Any]:
    return {str(key).strip().lower().replace("-", "_"): value for key, value in raw.items() if value is not None}


def load_config_file(path: Path) -> Dict[str, Any]:
    """Reads a flat KEY=value file; empty values are treated as unset."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError([f"config: file not found: {path}"])
    values = dotenv_values(path)
    logger.info(f"⚙️ Loaded {len(values)} setting(s) from {path}")
    return {key: value for key, value in normalize_keys(values).items() if value != ""}


def merge_settings(file_settings: Mapping[str, Any], flag_settings: Mapping[str, Any]) -> Dict[str, Any]:
    """Flags win over the config file; unset flags (None) fall through."""
    merged = dict(normalize_keys(file_settings))
    merged.update(normalize_keys(flag_settings))
    return merged
