from .image_quality import PSNR_CAP, ImagePair, psnr, ssim
from .report import SCHEMA_VERSION, RunReport, emit_report, parse_report

__all__ = [
    "ImagePair",
    "PSNR_CAP",
    "RunReport",
    "SCHEMA_VERSION",
    "emit_report",
    "parse_report",
    "psnr",
    "ssim",
]
