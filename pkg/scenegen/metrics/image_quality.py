import math
from dataclasses import dataclass

import numpy as np
from skimage.metrics import structural_similarity

from scenegen.errors import DimensionError
from scenegen.numerics import Tensor

PSNR_CAP = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5


@dataclass(frozen=True, eq=False)
class ImagePair:
    reference: Tensor
    candidate: Tensor

    def __post_init__(self):
        ref = np.asarray(self.reference, dtype=np.float64)
        cand = np.asarray(self.candidate, dtype=np.float64)
        if ref.shape != cand.shape:
            raise DimensionError(f"image shapes differ: {ref.shape} vs {cand.shape}")
        if ref.ndim != 3 or ref.shape[2] != 3:
            raise DimensionError(f"expected [H, W, 3] images, got {ref.shape}")
        object.__setattr__(self, "reference", ref)
        object.__setattr__(self, "candidate", cand)


def psnr(pair: ImagePair) -> float:
    """Peak signal-to-noise ratio in dB for unit peak; identical images report PSNR_CAP."""
    mse = float(np.mean((pair.reference - pair.candidate) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(1.0 / mse))


def ssim(pair: ImagePair) -> float:
    """Mean SSIM, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, per channel then averaged."""
    h, w = pair.reference.shape[:2]
    if h < SSIM_WINDOW or w < SSIM_WINDOW:
        raise DimensionError(f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {h}x{w}")
    return float(
        structural_similarity(
            pair.reference,
            pair.candidate,
            data_range=1.0,
            channel_axis=-1,
            gaussian_weights=True,
            sigma=SSIM_SIGMA,
            use_sample_covariance=False,
            K1=0.01,
            K2=0.03,
        )
    )
