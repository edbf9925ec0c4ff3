from .codecs import (
    E4M3,
    E5M2,
    FloatFormat,
    IntFormat,
    QuantizedBlock,
    dequantize_blocks,
    fp8_code_points,
    fp8_decode,
    fp8_round,
    quantize_blocks,
    quantize_symmetric,
    round_to_format,
)
from .recommend import recommend_scheme, v_ranges
from .sage import (
    AccuracyReport,
    QuantScheme,
    quantized_attention,
    quantized_logits,
    sage_attention,
    smooth_k,
)

__all__ = [
    "AccuracyReport",
    "E4M3",
    "E5M2",
    "FloatFormat",
    "IntFormat",
    "QuantScheme",
    "QuantizedBlock",
    "dequantize_blocks",
    "fp8_code_points",
    "fp8_decode",
    "fp8_round",
    "quantize_blocks",
    "quantize_symmetric",
    "quantized_attention",
    "quantized_logits",
    "recommend_scheme",
    "round_to_format",
    "sage_attention",
    "smooth_k",
    "v_ranges",
]
