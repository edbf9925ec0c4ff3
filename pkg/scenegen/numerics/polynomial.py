from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from scenegen.errors import DimensionError, SingularFitError


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, coefficients lowest degree first."""

    coefficients: Tuple[float, ...]

    def __post_init__(self):
        if len(self.coefficients) == 0:
            raise DimensionError("a polynomial needs at least one coefficient")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def identity(cls) -> "Polynomial":
        return cls((0.0, 1.0))

    def __call__(self, x):
        return P.polyval(x, np.asarray(self.coefficients))

    def residual(self, xs: Sequence[float], ys: Sequence[float]) -> float:
        """Sum of squared residuals on the given samples."""
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        return float(np.sum((self(xs) - ys) ** 2))

    def to_list(self) -> List[float]:
        return list(self.coefficients)


def polyfit(xs: Sequence[float], ys: Sequence[float], degree: int) -> Polynomial:
    """Least-squares polynomial fit through an SVD solve of the Vandermonde system."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if degree < 0:
        raise DimensionError(f"degree must be non-negative, got {degree}")
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise DimensionError(f"xs and ys must be equal-length vectors, got {xs.shape} and {ys.shape}")
    if xs.size < degree + 1:
        raise SingularFitError(f"{xs.size} samples cannot determine a degree-{degree} polynomial")
    if degree > 0 and np.all(xs == xs[0]):
        raise SingularFitError("all xs identical")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise SingularFitError("non-finite samples")

    vander = np.vander(xs, degree + 1, increasing=True)
    coeffs, _, rank, _ = np.linalg.lstsq(vander, ys, rcond=None)
    if rank < degree + 1:
        raise SingularFitError(f"rank-deficient fit: rank {rank} < {degree + 1}")
    return Polynomial(tuple(coeffs))
