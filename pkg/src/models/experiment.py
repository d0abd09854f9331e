# src/models/experiment.py
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Optional

import numpy as np
import pandas as pd
from loguru import logger

from src.config import BP_TOLERANCE, DEFAULT_FAMILY, DEFAULT_LENGTH, DEFAULT_P_MAX, DEFAULT_SEED, FLOAT_FORMAT
from src.exceptions import ConfigError

NOISE_KINDS = ("none", "bounded", "gaussian")

TABLE_COLUMNS = [
    "point_k",
    "point_s_or_gamma_or_alpha",
    "method",
    "success_rate",
    "rmse",
    "lhs",
    "holds",
    "valid",
    "trials",
    "seed",
]

# Fields that change where or how fast a run happens, never its results
_RUNTIME_FIELDS = ("out", "jobs", "db")


def parse_int_range(value) -> list[int]:
    """'a:b' (inclusive), 'a,b,c', a single int or a list -> list of ints."""
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    if isinstance(value, (int, np.integer)):
        return [int(value)]
    text = str(value).strip()
    if ":" in text:
        start, stop = (int(part) for part in text.split(":", 1))
        return list(range(start, stop + 1))
    return [int(part) for part in text.split(",") if part.strip()]


def parse_float_range(value) -> list[float]:
    """'start:stop:step' (inclusive), 'a,b,c', a number or a list -> list of floats."""
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    if isinstance(value, (int, float, np.number)):
        return [float(value)]
    text = str(value).strip()
    if ":" in text:
        start, stop, step = (float(part) for part in text.split(":"))
        if step <= 0:
            raise ValueError(f"Range step must be positive, got {step}")
        count = int(round((stop - start) / step)) + 1
        return [round(start + step * i, 10) for i in range(count)]
    return [float(part) for part in text.split(",") if part.strip()]


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = "none"
    level: float = 0.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigError(f"Noise kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if self.level < 0:
            raise ConfigError(f"Noise level must be nonnegative, got {self.level}")

    @classmethod
    def parse(cls, value) -> "NoiseSpec":
        if isinstance(value, NoiseSpec):
            return value
        if value is None or value == "none":
            return cls()
        if isinstance(value, dict):
            return cls(kind=value.get("kind", "none"), level=float(value.get("level", 0.0)))
        raise ConfigError(f"Cannot read noise spec from {value!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines an experiment's output, plus where to put it."""

    family: str = DEFAULT_FAMILY
    p_max: int = DEFAULT_P_MAX
    length: int = DEFAULT_LENGTH
    m: int = 2
    k_range: tuple[int, ...] = tuple(range(1, 21))
    s_range: Optional[tuple[int, ...]] = None
    trials: int = 100
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    gamma_range: tuple[float, ...] = ()
    alpha_range: tuple[float, ...] = ()
    periods: tuple[int, ...] = (4,)
    seed: int = DEFAULT_SEED
    empirical: bool = False
    bp_tol: float = BP_TOLERANCE
    out: Optional[str] = None
    jobs: Optional[int] = None
    db: Optional[str] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.p_max < 1 or self.length < 1 or self.m < 1:
            raise ConfigError("p_max, length and m must all be positive")
        if not self.k_range:
            raise ConfigError("k_range must not be empty")
        if self.s_range is not None and not self.s_range:
            raise ConfigError("s_range must not be empty when given")
        if self.jobs is not None and self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown config keys: {sorted(unknown)}")

        values = dict(data)
        try:
            if "k_range" in values:
                values["k_range"] = tuple(parse_int_range(values["k_range"]))
            if values.get("s_range") is not None:
                values["s_range"] = tuple(parse_int_range(values["s_range"]))
            if "periods" in values:
                values["periods"] = tuple(parse_int_range(values["periods"]))
            for key in ("gamma_range", "alpha_range"):
                if key in values:
                    values[key] = tuple(parse_float_range(values[key]))
            if "noise" in values:
                values["noise"] = NoiseSpec.parse(values["noise"])
            return cls(**values)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid experiment config: {e}") from e

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as config_file:
                data = json.load(config_file)
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Could not read config file {path}: {e}")
            raise ConfigError(f"Could not read config file {path}: {e}") from e
        return cls.from_dict(data)

    def merged(self, overrides: dict[str, Any]) -> "ExperimentConfig":
        """A copy with every non-None override applied (flags beat the config file)."""
        present = {key: value for key, value in overrides.items() if value is not None}
        if not present:
            return self
        return ExperimentConfig.from_dict({**self.to_dict(), **present})

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        for key in ("k_range", "s_range", "gamma_range", "alpha_range", "periods"):
            if data[key] is not None:
                data[key] = list(data[key])
        return data

    def result_dict(self) -> dict[str, Any]:
        """The fields that determine results (runtime-only fields dropped)."""
        return {k: v for k, v in self.to_dict().items() if k not in _RUNTIME_FIELDS}

    def digest(self) -> str:
        """sha256 (first 12 hex chars) of the canonical JSON of result-relevant fields."""
        canonical = json.dumps(self.result_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def with_runtime(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **kwargs)


class ExperimentTable:
    """Rows of (parameter point -> success rate, RMSE, bound verdict) for one run."""

    def __init__(self, name: str, config: ExperimentConfig, rows: list[dict[str, Any]]):
        self.name: str = name
        self.config: ExperimentConfig = config
        self.seed: int = config.seed
        self.digest: str = config.digest()
        df = pd.DataFrame(rows, columns=TABLE_COLUMNS)
        df["seed"] = self.seed
        for col in ["point_k", "trials"]:
            df[col] = df[col].astype("Int64")
        self.rows: pd.DataFrame = df

    def __repr__(self):
        return f"ExperimentTable({self.name}, rows={len(self.rows)}, seed={self.seed}, digest={self.digest})"

    def header_lines(self) -> list[str]:
        return [
            f"# experiment={self.name}",
            f"# seed={self.seed}",
            f"# config_digest={self.digest}",
            f"# config={json.dumps(self.config.result_dict(), sort_keys=True)}",
        ]

    def to_csv_text(self) -> str:
        body = self.rows.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
        return "\n".join(self.header_lines()) + "\n" + body

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as csv_file:
            csv_file.write(self.to_csv_text())
