"""
Run configuration for the gslab command line
Defaults, JSON config files, inline flags and environment overrides, validated with pydantic
"""

import json
import logging
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from regularity.errors import ConfigInvalid
from regularity.profiles import Family, RadialProfile
from solvers.oracle import BoundaryData

logger = logging.getLogger(__name__)

OUT_ENV = "GSLAB_OUT"


class Command(str, Enum):
    CLASSIFY = "classify"
    SOLVE_Z = "solve-z"
    OSCILLATION = "oscillation"
    STABILITY = "stability"
    ORACLE = "oracle"
    EXAMPLE = "example"

    def __str__(self) -> str:
        return self.value


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"

    def __str__(self) -> str:
        return self.value


class ProfileSpec(BaseModel):
    """JSON description of a coefficient profile"""
    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    family: Family
    n: Optional[Literal[2, 3]] = None
    t_max: Optional[float] = Field(default=None, ge=10.0, le=60.0)
    gamma: Optional[float] = Field(default=None, gt=0)
    beta: Optional[float] = Field(default=None, gt=0)
    A: Optional[float] = None
    c: Optional[float] = None
    scale: float = Field(default=1.0, gt=0)
    t_min: Optional[float] = Field(default=None, gt=0)
    eps_ell: Optional[float] = Field(default=None, gt=0)
    path: Optional[str] = None
    t: Optional[List[float]] = None
    g: Optional[List[float]] = None

    @field_validator("family", mode="before")
    @classmethod
    def _lower_family(cls, value: Any) -> Any:
        return value.lower() if isinstance(value, str) else value

    @model_validator(mode="after")
    def _check_parameters(self) -> "ProfileSpec":
        required = {
            Family.CONST: "c",
            Family.EX1_POS: "gamma",
            Family.EX1_NEG: "gamma",
            Family.EX2: "beta",
            Family.EX3: "A",
        }.get(self.family)
        if required and getattr(self, required) is None:
            raise ValueError(f"profile family {self.family} needs '{required}'")
        if self.family is Family.TABLE and self.path is None and (self.t is None or self.g is None):
            raise ValueError("table profile needs 'path' or both 't' and 'g'")
        return self

    def build(self, n: int, t_max: float) -> RadialProfile:
        data = self.model_dump(exclude_none=True, exclude={"n", "t_max"})
        data["family"] = str(self.family)
        data["n"] = n
        if self.family is not Family.TABLE:
            data["t_max"] = t_max
        return RadialProfile.from_dict(data)


class RunConfig(BaseModel):
    """Validated settings for one gslab invocation"""
    model_config = ConfigDict(extra="forbid")

    command: Command
    profile: Optional[ProfileSpec] = None
    n: Literal[2, 3] = 2
    t_max: float = Field(default=40.0, ge=10.0, le=60.0)
    step: float = Field(default=1e-3, gt=0.0, le=1e-2)
    tol: float = Field(default=1e-6, gt=0.0)
    out_dir: Path = Path("out")
    formats: List[OutputFormat] = Field(default_factory=lambda: [OutputFormat.JSON, OutputFormat.CSV])
    seed: int = 42
    # example command
    which: Optional[Literal[1, 2, 3]] = None
    negative: bool = False
    gamma: Optional[float] = Field(default=None, gt=0)
    beta: Optional[float] = Field(default=None, gt=0)
    A: Optional[float] = None
    # oracle command
    boundary: Optional[Dict[str, Any]] = None
    random_modes: int = Field(default=5, ge=1, le=10)

    @field_validator("formats")
    @classmethod
    def _unique_formats(cls, value: List[OutputFormat]) -> List[OutputFormat]:
        if not value:
            raise ValueError("at least one output format is required")
        return sorted(set(value), key=lambda f: f.value, reverse=True)

    @model_validator(mode="after")
    def _check_command(self) -> "RunConfig":
        if self.command is Command.EXAMPLE:
            if self.which is None:
                raise ValueError("example command needs 'which' (1, 2 or 3)")
            needed = {1: "gamma", 2: "beta", 3: "A"}[self.which]
            if getattr(self, needed) is None:
                raise ValueError(f"example {self.which} needs '{needed}'")
        elif self.profile is None:
            raise ValueError(f"command {self.command} needs a profile")
        if self.profile is not None:
            for key in ("n", "t_max"):
                value = getattr(self.profile, key)
                if value is None:
                    continue
                if key in self.model_fields_set and getattr(self, key) != value:
                    raise ValueError(f"profile {key}={value} disagrees with run {key}={getattr(self, key)}")
                setattr(self, key, value)
        return self

    def example_spec(self) -> ProfileSpec:
        if self.which == 1:
            family = Family.EX1_NEG if self.negative else Family.EX1_POS
            return ProfileSpec(family=family, gamma=self.gamma)
        if self.which == 2:
            return ProfileSpec(family=Family.EX2, beta=self.beta)
        return ProfileSpec(family=Family.EX3, A=self.A)

    def build_profile(self) -> RadialProfile:
        spec = self.example_spec() if self.command is Command.EXAMPLE else self.profile
        return spec.build(self.n, self.t_max)

    def boundary_data(self) -> Optional[BoundaryData]:
        if self.boundary is None:
            return None
        data = dict(self.boundary)
        data.setdefault("n", self.n)
        return BoundaryData.from_dict(data)

    def wants(self, fmt: OutputFormat) -> bool:
        return fmt in self.formats

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None,
             overrides: Optional[Mapping[str, Any]] = None) -> "RunConfig":
        """Merge defaults, a JSON file, inline overrides and GSLAB_OUT

        Raises:
            ConfigInvalid: when the file cannot be read or the merged values fail validation
        """
        data: Dict[str, Any] = {}
        if path is not None:
            try:
                data.update(json.loads(Path(path).read_text(encoding="utf-8")))
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigInvalid(f"cannot read config {path}: {e}") from e
            logger.info(f"📋 Loaded config from {path}")

        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if key == "profile" and isinstance(data.get("profile"), dict):
                data["profile"] = {**data["profile"], **value}
            else:
                data[key] = value

        env_out = os.getenv(OUT_ENV)
        if env_out:
            data["out_dir"] = env_out

        try:
            config = cls.model_validate(data)
        except ValidationError as e:
            raise ConfigInvalid(str(e)) from e
        logger.debug(f"🔧 Run config: {config.model_dump(mode='json', exclude_none=True)}")
        return config
