from typing import List

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from scenegen.attention.types import BlockKind

DEFAULT_PATTERN = [BlockKind.SPATIAL, BlockKind.TEMPORAL, BlockKind.CROSS_VIEW, BlockKind.CROSS]


class DiTConfig(BaseModel):
    """Shape and sampling settings of the toy multiview video transformer."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    num_views: int = Field(2, ge=1)
    frames: int = Field(8, ge=1)
    latent_height: int = Field(16, ge=1)
    latent_width: int = Field(32, ge=1)
    channels: int = Field(64, ge=1)
    heads: int = Field(4, ge=1)
    depth: int = Field(8, ge=1)
    block_pattern: List[BlockKind] = Field(default_factory=lambda: list(DEFAULT_PATTERN))
    steps: int = Field(20, ge=0)
    guidance_weight: float = Field(2.0, ge=0.0)
    seed: int = 0
    embed_dim: int = Field(64, ge=2)
    cond_dim: int = Field(64, ge=1)
    mlp_ratio: int = Field(2, ge=1)
    # nearest-neighbour upsampling of decoded frames
    decode_upsample: int = Field(2, ge=1)

    @field_validator("block_pattern")
    @classmethod
    def _pattern_not_empty(cls, value):
        if not value:
            raise ValueError("block_pattern must not be empty")
        return value

    @field_validator("embed_dim")
    @classmethod
    def _even_embedding(cls, value):
        if value % 2:
            raise ValueError("embed_dim must be even")
        return value

    @model_validator(mode="after")
    def _heads_divide_channels(self):
        if self.channels % self.heads:
            raise ValueError(f"channels ({self.channels}) must be divisible by heads ({self.heads})")
        return self

    @property
    def head_dim(self) -> int:
        return self.channels // self.heads

    @property
    def block_kinds(self) -> List[BlockKind]:
        """Kind of every block: the pattern repeated cyclically up to `depth`."""
        return [self.block_pattern[i % len(self.block_pattern)] for i in range(self.depth)]

    @property
    def latent_shape(self):
        return (self.frames, self.num_views, self.channels, self.latent_height, self.latent_width)

    @property
    def frame_size(self):
        """(height, width) of decoded frames."""
        return self.latent_height * self.decode_upsample, self.latent_width * self.decode_upsample
