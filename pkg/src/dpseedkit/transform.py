"""Uniform doubles, unbiased bounded integers and the Laplace inverse CDF.

The functions take any object with a ``next_u64()`` method: a bare bit
generator, a :class:`~dpseedkit.dispatch.GeneratorHandle` or a substream
view.

The inverse-CDF sampler works on floating-point uniforms and inherits their
known weaknesses against adversaries who can inspect low-order bits of the
output.  Hardening the transformation step is out of scope here.
"""

from __future__ import annotations

import math
from typing import Protocol

from .seedseq import MASK64

_TWO_NEG_53 = 2.0**-53


class WordSource(Protocol):
    def next_u64(self) -> int: ...


def next_double(gen: WordSource) -> float:
    """Uniform double in [0, 1) from the top 53 bits of one 64-bit draw."""
    return (gen.next_u64() >> 11) * _TWO_NEG_53


def bounded_int(gen: WordSource, low: int, high: int) -> int:
    """Uniform integer in the closed interval ``[low, high]``.

    Ranges up to 2**64 use Lemire's multiply-and-reject method: the low half
    of the 128-bit product is compared against ``2**64 mod range`` and draws
    under the threshold are rejected, so no value is favoured.  Wider ranges
    concatenate words and reject by bit mask.
    """
    if low > high:
        raise ValueError(f"low must not exceed high, got [{low}, {high}]")
    span = high - low + 1
    if span == 1:
        return low
    if span == 1 << 64:
        return low + gen.next_u64()
    if span < 1 << 64:
        m = gen.next_u64() * span
        if (m & MASK64) < span:
            threshold = (1 << 64) % span
            while (m & MASK64) < threshold:
                m = gen.next_u64() * span
        return low + (m >> 64)
    n_bits = (span - 1).bit_length()
    n_words = -(-n_bits // 64)
    mask = (1 << n_bits) - 1
    while True:
        value = 0
        for _ in range(n_words):
            value = (value << 64) | gen.next_u64()
        value &= mask
        if value < span:
            return low + value


def laplace_inverse_cdf(u: float, scale: float) -> float:
    """Quantile function of the zero-centred Laplace distribution.

    ``-scale * sign(u - 1/2) * ln(1 - 2|u - 1/2|)``; antisymmetric about
    ``u = 1/2`` wherever ``1 - u`` is exactly representable.
    """
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must lie in the open interval (0, 1), got {u}")
    if not scale > 0.0 or math.isinf(scale):
        raise ValueError(f"scale must be positive and finite, got {scale}")
    d = u - 0.5
    if d == 0.0:
        return 0.0
    return -scale * math.copysign(1.0, d) * math.log1p(-2.0 * abs(d))
