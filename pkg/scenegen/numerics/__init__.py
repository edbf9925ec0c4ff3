from .polynomial import Polynomial, polyfit
from .rng import derive_seed, generator, seeded_normal
from .tensor_ops import (
    Tensor,
    as_tensor,
    layer_norm,
    matmul,
    rel_l1,
    sigmoid,
    silu,
    softmax,
    softmax_rows,
)

__all__ = [
    "Polynomial",
    "Tensor",
    "as_tensor",
    "derive_seed",
    "generator",
    "layer_norm",
    "matmul",
    "polyfit",
    "rel_l1",
    "seeded_normal",
    "sigmoid",
    "silu",
    "softmax",
    "softmax_rows",
]
