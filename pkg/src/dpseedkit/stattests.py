"""A small randomness audit battery.

Frequency (monobit) and runs tests as defined in NIST SP 800-22, Pearson's
chi-square equidistribution test, and a scanner for outputs that MT19937
can never produce as its first word under single-word seeding.

Every test is a pure function of its input and returns a :class:`TestReport`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

_EPS = 1e-15
_MAX_ITER = 100_000


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # not a pytest class

    name: str
    n: int
    statistic: float
    p_value: float
    alpha: float
    applicable: bool = True

    @property
    def passed(self) -> bool:
        return self.applicable and self.p_value >= self.alpha

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


# --------------------------------------------------------------------------
# special functions


def gammaincc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma function Q(a, x).

    Power series for P(a, x) when ``x < a + 1``, otherwise Legendre's
    continued fraction for Q evaluated with the modified Lentz method
    (Numerical Recipes, 3rd ed., 6.2).  Relative accuracy is near 1e-14.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 1.0
    log_prefactor = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1.0:
        term = total = 1.0 / a
        ap = a
        for _ in range(_MAX_ITER):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                break
        return max(0.0, 1.0 - total * math.exp(log_prefactor))
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return min(1.0, math.exp(log_prefactor) * h)


def chi2_sf(statistic: float, dof: int) -> float:
    return gammaincc(dof / 2.0, statistic / 2.0)


# --------------------------------------------------------------------------
# input handling


def as_bits(bits: str | Sequence[int] | np.ndarray) -> np.ndarray:
    """Normalize ``"0101"``, a 0/1 sequence or an array into a uint8 array."""
    if isinstance(bits, str):
        arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ValueError("bits must be one-dimensional")
    arr = arr.astype(np.uint8, copy=False)
    if arr.size and arr.max() > 1:
        raise ValueError("bits must contain only 0 and 1")
    return arr


def words_to_bits(words: np.ndarray, word_size: int) -> np.ndarray:
    """Unpack words into bits, most significant bit of each word first."""
    dtype = {32: ">u4", 64: ">u8"}[word_size]
    raw = np.asarray(words).astype(dtype).tobytes()
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))


# --------------------------------------------------------------------------
# tests

MIN_BITS = 10


def monobit(bits, alpha: float = 0.01) -> TestReport:
    """Frequency test: are ones and zeros equally common?"""
    b = as_bits(bits)
    n = b.size
    if n < MIN_BITS:
        raise ValueError(f"monobit needs at least {MIN_BITS} bits, got {n}")
    ones = int(np.count_nonzero(b))
    s_n = 2 * ones - n
    s_obs = abs(s_n) / math.sqrt(n)
    return TestReport("monobit", n, s_obs, math.erfc(s_obs / math.sqrt(2.0)), alpha)


def runs_test(bits, alpha: float = 0.01) -> TestReport:
    """Runs test: is the number of uninterrupted runs as expected?

    Not applicable (reported as failed, ``p = 0``) when the frequency
    prerequisite ``|pi - 1/2| < 2/sqrt(n)`` does not hold.
    """
    b = as_bits(bits)
    n = b.size
    if n < MIN_BITS:
        raise ValueError(f"runs test needs at least {MIN_BITS} bits, got {n}")
    pi = np.count_nonzero(b) / n
    # the second clause matters for short inputs, where 2/sqrt(n) > 0.5
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n) or pi in (0.0, 1.0):
        return TestReport("runs", n, 0.0, 0.0, alpha, applicable=False)
    v_obs = 1 + int(np.count_nonzero(b[1:] != b[:-1]))
    spread = pi * (1.0 - pi)
    p = math.erfc(abs(v_obs - 2.0 * n * spread) / (2.0 * math.sqrt(2.0 * n) * spread))
    return TestReport("runs", n, float(v_obs), p, alpha)


def chi_square_uniform(samples, k: int, alpha: float = 0.01) -> TestReport:
    """Pearson chi-square test that ``samples`` are uniform over ``range(k)``."""
    if k < 2:
        raise ValueError("need at least two bins")
    s = np.asarray(samples)
    n = s.size
    if n and (s.min() < 0 or s.max() >= k):
        raise ValueError(f"samples must lie in [0, {k})")
    expected = n / k
    if expected < 5:
        raise ValueError(f"expected count per bin is {expected:.3g}; need at least 5")
    counts = np.bincount(s.astype(np.int64), minlength=k)
    stat = float(((counts - expected) ** 2).sum() / expected)
    return TestReport(f"chi_square_{k}", n, stat, chi2_sf(stat, k - 1), alpha)


def run_battery(words: np.ndarray, word_size: int, alpha: float = 0.01) -> list[TestReport]:
    """Monobit and runs over all bits, chi-square over each word's top byte.

    The chi-square test falls back to 16 or 2 bins (top 4 bits, top bit) when
    there are too few words for 256 bins, and is skipped below 10 words.
    """
    words = np.asarray(words)
    bits = words_to_bits(words, word_size)
    reports = [monobit(bits, alpha), runs_test(bits, alpha)]
    for top_bits in (8, 4, 1):
        k = 1 << top_bits
        if words.size >= 5 * k:
            top = (words >> np.array(word_size - top_bits, dtype=words.dtype)).astype(np.int64)
            reports.append(chi_square_uniform(top, k, alpha))
            break
    return reports


# --------------------------------------------------------------------------
# MT19937 first-output scan


def mt19937_first_outputs(seeds: np.ndarray) -> np.ndarray:
    """First 32-bit output of MT19937 after ``init_genrand(seed)``, vectorized.

    The first twisted word only reads words 0, 1 and 397 of the initial
    state, so the init recurrence runs 397 steps instead of 623.
    """
    prev = np.array(seeds, dtype=np.uint32)
    word0 = prev.copy()
    word1 = None
    tmp = np.empty_like(prev)
    mult = np.uint32(1812433253)
    with np.errstate(over="ignore"):
        for i in range(1, 398):
            np.right_shift(prev, np.uint32(30), out=tmp)
            np.bitwise_xor(prev, tmp, out=prev)
            np.multiply(prev, mult, out=prev)
            np.add(prev, np.uint32(i), out=prev)
            if i == 1:
                word1 = prev.copy()
    y = (word0 & np.uint32(0x80000000)) | (word1 & np.uint32(0x7FFFFFFF))
    v = prev ^ (y >> np.uint32(1))
    v ^= np.where(y & np.uint32(1), np.uint32(0x9908B0DF), np.uint32(0))
    v ^= v >> np.uint32(11)
    v ^= (v << np.uint32(7)) & np.uint32(0x9D2C5680)
    v ^= (v << np.uint32(15)) & np.uint32(0xEFC60000)
    return v ^ (v >> np.uint32(18))


@dataclass
class BiasScanReport:
    n_seeds: int
    targets: tuple[int, ...]
    hits: dict[int, int]
    hit_seeds: dict[int, list[int]]
    n_distinct_outputs: int | None = None
    small_limit: int | None = None
    unreachable_small: list[int] = field(default_factory=list)

    @property
    def total_hits(self) -> int:
        return sum(self.hits.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hits"] = {str(k): v for k, v in self.hits.items()}
        d["hit_seeds"] = {str(k): v for k, v in self.hit_seeds.items()}
        return d


_MAX_RECORDED_SEEDS = 16


def first_output_bias_scan(
    seeds: Iterable[int] | np.ndarray, targets: Iterable[int] = (3, 7)
) -> BiasScanReport:
    """Count how often MT19937 single-word seeds produce ``targets`` first.

    Seeding follows the canonical ``init_genrand`` routine, which is what
    the "never 7 nor 3" observation is about; other single-word seeding
    schemes would give different holes.
    """
    if isinstance(seeds, range):
        seeds = np.arange(seeds.start, seeds.stop, seeds.step, dtype=np.int64)
    else:
        seeds = np.asarray(seeds if isinstance(seeds, np.ndarray) else list(seeds), dtype=np.int64)
    if seeds.size == 0:
        raise ValueError("seed set must not be empty")
    if seeds.min() < 0 or seeds.max() > 0xFFFFFFFF:
        raise ValueError("seeds must be 32-bit words")
    targets = tuple(sorted(set(int(t) for t in targets)))
    outputs = mt19937_first_outputs(seeds.astype(np.uint32))
    hits, hit_seeds = {}, {}
    for t in targets:
        idx = np.flatnonzero(outputs == t)
        hits[t] = int(idx.size)
        hit_seeds[t] = [int(s) for s in seeds[idx[:_MAX_RECORDED_SEEDS]]]
    return BiasScanReport(
        n_seeds=int(seeds.size),
        targets=targets,
        hits=hits,
        hit_seeds=hit_seeds,
        n_distinct_outputs=int(np.unique(outputs).size),
    )


def _scan_range(args: tuple[int, int, tuple[int, ...], int]):
    start, stop, targets, small_limit = args
    seeds = np.arange(start, stop, dtype=np.uint64).astype(np.uint32)
    out = mt19937_first_outputs(seeds)
    small = np.zeros(small_limit, dtype=bool)
    small[out[out < small_limit]] = True
    hits = {}
    for t in targets:
        idx = np.flatnonzero(out == t)
        hits[t] = (int(idx.size), [start + int(i) for i in idx[:_MAX_RECORDED_SEEDS]])
    return small, hits


def exhaustive_bias_scan(
    targets: Iterable[int] = (3, 7),
    *,
    start: int = 0,
    stop: int = 1 << 32,
    small_limit: int = 1 << 16,
    chunk_size: int = 1 << 16,
    workers: int | None = None,
    progress=None,
) -> BiasScanReport:
    """Scan every seed in ``[start, stop)`` and merge per-chunk results.

    Besides the target hit counts, records which values below
    ``small_limit`` never occur as a first output.  The full 2**32 range
    takes hours of CPU; chunks are spread over ``workers`` processes.
    """
    targets = tuple(sorted(set(int(t) for t in targets)))
    if not 0 <= start < stop <= 1 << 32:
        raise ValueError("need 0 <= start < stop <= 2**32")
    jobs = [
        (lo, min(lo + chunk_size, stop), targets, small_limit)
        for lo in range(start, stop, chunk_size)
    ]
    seen = np.zeros(small_limit, dtype=bool)
    hits = {t: 0 for t in targets}
    hit_seeds: dict[int, list[int]] = {t: [] for t in targets}

    def merge(result):
        small, chunk_hits = result
        seen[small] = True
        for t, (count, seeds) in chunk_hits.items():
            hits[t] += count
            hit_seeds[t].extend(seeds[: _MAX_RECORDED_SEEDS - len(hit_seeds[t])])

    workers = workers or os.cpu_count() or 1
    if workers == 1:
        for i, job in enumerate(jobs):
            merge(_scan_range(job))
            if progress:
                progress(i + 1, len(jobs))
    else:
        with ProcessPoolExecutor(workers) as pool:
            for i, result in enumerate(pool.map(_scan_range, jobs)):
                merge(result)
                if progress:
                    progress(i + 1, len(jobs))
    return BiasScanReport(
        n_seeds=stop - start,
        targets=targets,
        hits=hits,
        hit_seeds=hit_seeds,
        small_limit=small_limit,
        unreachable_small=[int(v) for v in np.flatnonzero(~seen)],
    )
