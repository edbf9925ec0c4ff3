from dataclasses import dataclass

import numpy as np

from scenegen.errors import DimensionError
from scenegen.numerics import Tensor


@dataclass(frozen=True)
class Modulation:
    """Bias-free timestep modulation: scale and shift are linear in the embedding."""

    w_scale: Tensor  # [embed_dim, channels]
    w_shift: Tensor

    @classmethod
    def zeros(cls, embed_dim: int, channels: int) -> "Modulation":
        return cls(np.zeros((embed_dim, channels)), np.zeros((embed_dim, channels)))

    @property
    def channels(self) -> int:
        return self.w_scale.shape[1]

    def scale_shift(self, embedding: Tensor):
        if embedding.ndim != 1 or embedding.shape[0] != self.w_scale.shape[0]:
            raise DimensionError(
                f"timestep embedding shape {embedding.shape} does not match modulation input {self.w_scale.shape[0]}"
            )
        return embedding @ self.w_scale, embedding @ self.w_shift


def modulated_input(x: Tensor, timestep_embedding: Tensor, modulation: Modulation) -> Tensor:
    """x * (1 + scale(emb)) + shift(emb), broadcast over the channel (last) axis."""
    if x.shape[-1] != modulation.channels:
        raise DimensionError(f"input channels {x.shape[-1]} != modulation channels {modulation.channels}")
    scale, shift = modulation.scale_shift(timestep_embedding)
    return x * (1.0 + scale) + shift
