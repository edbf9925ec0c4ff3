"""Pipeline configuration: one JSON file, `.env` overrides, then command-line overrides."""
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from scenegen.attention.quantization import FloatFormat, IntFormat, QuantScheme
from scenegen.attention.types import BlockKind
from scenegen.caching import BranchMode, CachePolicy, load_policy
from scenegen.diffusion import BoxSpec, DiTConfig, GridSpec
from scenegen.errors import ConfigurationError
from scenegen.numerics import Polynomial
from scenegen.reconstruction import ReconConfig, SceneSpec, TrajectorySpec, canonical_scene
from scenegen.storage.files import PathLike, read_json

logger = logging.getLogger(__name__)

CONFIG_SCHEMA_VERSION = 1

ENV_OVERRIDES = {
    "SCENEGEN_OUTPUT_DIR": "output_dir",
    "SCENEGEN_SEED": "seed",
    "SCENEGEN_LOG_LEVEL": "log_level",
    "SCENEGEN_SHOW_PROGRESS": "show_progress",
}


class CacheSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    branch_mode: BranchMode = BranchMode.CONDITION_ONLY
    threshold: float = Field(0.08, ge=0.0)
    degree: int = Field(4, ge=0)
    rescale: List[float] = Field(default_factory=lambda: [0.0, 1.0], min_length=1)
    force_compute_steps: List[int] = Field(default_factory=list)
    policy_file: Optional[str] = None
    # thresholds tried by calibration; empty keeps `threshold`
    sweep: List[float] = Field(default_factory=list)
    max_drift: float = Field(0.05, gt=0.0)
    min_reuse: float = Field(0.0, ge=0.0, le=1.0)

    def to_policy(self, total_steps: int) -> CachePolicy:
        """Policy for a run of `total_steps`.

        With `policy_file` set, branch mode, rescale, threshold and forced steps
        come from the file; threshold and forced steps set explicitly in this
        section still win.
        """
        bad = [s for s in self.force_compute_steps if not 0 <= s < max(total_steps, 1)]
        if bad:
            raise ConfigurationError(f"forced steps {bad} outside [0, {total_steps})", key="cache.force_compute_steps")
        if self.policy_file:
            base = load_policy(self.policy_file).for_steps(total_steps)
            explicit = self.model_fields_set
            threshold = self.threshold if "threshold" in explicit else base.threshold
            forced = self.force_compute_steps if "force_compute_steps" in explicit else base.force_compute_steps
            return CachePolicy(base.branch_mode, threshold, base.rescale, total_steps, frozenset(forced))
        return CachePolicy(
            branch_mode=self.branch_mode,
            threshold=self.threshold,
            rescale=Polynomial(tuple(self.rescale)),
            total_steps=total_steps,
            force_compute_steps=frozenset(self.force_compute_steps),
        )


class QuantSchemeConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    q_format: IntFormat = IntFormat.INT8
    k_format: IntFormat = IntFormat.INT8
    p_format: Literal["fp8_e4m3", "fp8_e5m2", "full"] = "fp8_e4m3"
    v_format: FloatFormat = FloatFormat.FP8_E4M3
    k_smoothing: bool = True
    block_size: int = Field(32, ge=1)

    def to_scheme(self) -> QuantScheme:
        return QuantScheme(self.q_format, self.k_format, FloatFormat(self.p_format), self.v_format,
                           self.k_smoothing, self.block_size)


class QuantSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schemes: Dict[BlockKind, QuantSchemeConfig] = Field(default_factory=dict)
    profile_repetitions: int = Field(5, ge=3)

    def scheme_map(self) -> Dict[BlockKind, QuantScheme]:
        return {kind: cfg.to_scheme() for kind, cfg in self.schemes.items()}


class PipelineConfig(BaseModel):
    """Every stage's settings; `seed` replaces dit.seed for the whole run."""

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = CONFIG_SCHEMA_VERSION
    prompt: str = ""
    boxes: List[BoxSpec] = Field(default_factory=list)
    grid: GridSpec = Field(default_factory=GridSpec)
    dit: DiTConfig = Field(default_factory=DiTConfig)
    cache: CacheSection = Field(default_factory=CacheSection)
    quant: QuantSection = Field(default_factory=QuantSection)
    recon: ReconConfig = Field(default_factory=ReconConfig)
    scene: SceneSpec = Field(default_factory=canonical_scene)
    trajectory: TrajectorySpec = Field(default_factory=TrajectorySpec)
    frames_source: Literal["generated", "synthetic"] = "generated"
    output_dir: str = "runs/default"
    seed: int = 0
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    show_progress: bool = False

    @model_validator(mode="after")
    def _consistent(self):
        # ConfigurationError passes through pydantic unwrapped, keeping its key
        if self.trajectory.frames != self.dit.frames:
            raise ConfigurationError(f"{self.trajectory.frames} != dit.frames {self.dit.frames}", key="trajectory.frames")
        if self.trajectory.views != self.dit.num_views:
            raise ConfigurationError(f"{self.trajectory.views} views != dit.num_views {self.dit.num_views}", key="trajectory.view_yaws_deg")
        for box in self.boxes:
            if box.class_id >= self.grid.classes:
                raise ConfigurationError(f"{box.class_id} >= grid.classes {self.grid.classes}", key="boxes.class_id")
        return self

    @property
    def dit_config(self) -> DiTConfig:
        return self.dit.model_copy(update={"seed": self.seed})

    def cache_policy(self) -> CachePolicy:
        return self.cache.to_policy(self.dit.steps)

    @property
    def frame_trajectory(self) -> TrajectorySpec:
        """Trajectory at the resolution of the frames the reconstruction will read."""
        if self.frames_source == "generated":
            height, width = self.dit.frame_size
            return self.trajectory.at_resolution(width, height)
        return self.trajectory

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir)

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _set_dotted(tree: Dict[str, Any], dotted: str, value: Any) -> None:
    node = tree
    *parents, leaf = dotted.split(".")
    for part in parents:
        node = node.setdefault(part, {})
    node[leaf] = value


def format_validation_error(exc: ValidationError) -> ConfigurationError:
    errors = exc.errors()
    first = errors[0]
    key = ".".join(str(p) for p in first["loc"]) or "config"
    more = f" (+{len(errors) - 1} more)" if len(errors) > 1 else ""
    return ConfigurationError(f"{first['msg']}{more}", key=key)


def build_config(raw: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> PipelineConfig:
    tree = dict(raw)
    for dotted, value in (overrides or {}).items():
        if value is not None:
            _set_dotted(tree, dotted, value)
    try:
        return PipelineConfig.model_validate(tree)
    except ValidationError as exc:
        raise format_validation_error(exc) from exc


def load_config(path: Optional[PathLike] = None, overrides: Optional[Dict[str, Any]] = None,
                env_file: Optional[PathLike] = None) -> PipelineConfig:
    """File values, then SCENEGEN_* environment values, then `overrides` (dotted keys)."""
    load_dotenv(env_file or Path.cwd() / ".env", override=False)
    raw: Dict[str, Any] = {}
    if path is not None:
        raw = read_json(path)
        if not isinstance(raw, dict):
            raise ConfigurationError("config file must hold a JSON object", key="config")
        if "schema_version" not in raw:
            raise ConfigurationError("missing schema_version", key="schema_version")

    merged: Dict[str, Any] = {}
    for env_name, key in ENV_OVERRIDES.items():
        value = os.getenv(env_name)
        if value:
            merged[key] = value
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    config = build_config(raw, merged)
    logger.debug("loaded config from %s", path or "defaults")
    return config
