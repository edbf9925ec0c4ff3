"""Dense tensor arithmetic shared by every other subpackage.

Tensors are float64 numpy arrays in C (row-major) order. The helpers here
add the shape checks and error types the rest of the package relies on.
"""

import numpy as np

from scenegen.errors import DegenerateReferenceError, DimensionError

Tensor = np.ndarray


def as_tensor(x, dtype=np.float64) -> Tensor:
    return np.ascontiguousarray(x, dtype=dtype)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Rank-2 matrix product."""
    a = as_tensor(a)
    b = as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(f"matmul expects rank-2 operands, got ranks {a.ndim} and {b.ndim}")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul inner dimensions differ: {a.shape} x {b.shape}")
    return np.matmul(a, b)


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    """Softmax along `axis`, stabilized by subtracting the max."""
    e = x - np.max(x, axis=axis, keepdims=True)
    np.exp(e, out=e)
    e /= np.sum(e, axis=axis, keepdims=True)
    return e


def softmax_rows(x: Tensor) -> Tensor:
    x = as_tensor(x)
    if x.ndim != 2:
        raise DimensionError(f"softmax_rows expects a rank-2 tensor, got rank {x.ndim}")
    return softmax(x, axis=1)


def rel_l1(a: Tensor, b: Tensor) -> float:
    """mean(|a - b|) / mean(|a|); `a` is the reference."""
    a = as_tensor(a)
    b = as_tensor(b)
    if a.shape != b.shape:
        raise DimensionError(f"rel_l1 shape mismatch: {a.shape} vs {b.shape}")
    denom = float(np.mean(np.abs(a)))
    if denom == 0.0:
        raise DegenerateReferenceError("rel_l1 reference tensor is all zeros")
    return float(np.mean(np.abs(a - b))) / denom


def layer_norm(x: Tensor, eps: float = 1e-6) -> Tensor:
    """Parameter-free layer norm over the last axis."""
    mean = np.mean(x, axis=-1, keepdims=True)
    var = np.var(x, axis=-1, keepdims=True)
    return (x - mean) / np.sqrt(var + eps)


def silu(x: Tensor) -> Tensor:
    return x / (1.0 + np.exp(-x))


def sigmoid(x: Tensor) -> Tensor:
    return 0.5 * (1.0 + np.tanh(0.5 * x))
