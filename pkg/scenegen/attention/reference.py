import numpy as np

from scenegen.numerics import Tensor, softmax

from .types import AttentionInputs

# logits materialised per slice of the flattened batch axes
CHUNK_ELEMENTS = 1 << 21


def attention_logits(q: Tensor, k: Tensor, scale: float) -> Tensor:
    return np.matmul(q, np.swapaxes(k, -1, -2)) * scale


def attention_reference(inp: AttentionInputs) -> Tensor:
    """Exact softmax(Q K^T * scale) V in float64.

    Long sequences are evaluated a few batch slices at a time; every row goes
    through the same operations as the unchunked product.
    """
    q, k, v = inp.q, inp.k, inp.v
    lead = q.shape[:-2]
    seq_q, seq_kv = q.shape[-2], k.shape[-2]
    q = q.reshape((-1, seq_q, q.shape[-1]))
    k = k.reshape((-1, seq_kv, k.shape[-1]))
    v = v.reshape((-1, seq_kv, v.shape[-1]))
    step = max(1, CHUNK_ELEMENTS // max(1, seq_q * seq_kv))
    out = np.empty(q.shape[:-1] + (v.shape[-1],))
    for start in range(0, q.shape[0], step):
        part = slice(start, start + step)
        p = softmax(attention_logits(q[part], k[part], inp.scale), axis=-1)
        out[part] = np.matmul(p, v[part])
    return out.reshape(lead + out.shape[-2:])
