"""Parallel streams: spawn trees, jump-ahead blocks, leap-frogging.

Three ways to hand independent randomness to ``T`` tasks:

* :func:`spawn_generators` - one child seed sequence per task (preferred);
* :func:`leapfrog` - task ``t`` takes outputs ``t, t + T, t + 2T, ...`` of a
  shared mother stream;
* :func:`assign_block` - task ``t`` takes outputs ``[tN, (t + 1)N)``, reached
  with PCG64 jump-ahead.  A :class:`BlockLedger` records every block handed
  out and refuses overlapping assignments.

:func:`collision_probability` bounds the risk of two randomly seeded streams
sharing a key (the birthday problem).
"""

from __future__ import annotations

import math
import os
import zlib
from dataclasses import dataclass
from pathlib import Path

import mpmath

from .bitgen import PCG64, UnsupportedOperation
from .dispatch import GeneratorHandle
from .seedseq import SeedSequence

MASK128 = (1 << 128) - 1


def _golden_jump() -> int:
    # floor((phi - 1) * 2**128) = floor((sqrt(5 * 2**256) - 2**128) / 2), exactly
    return (math.isqrt(5 << 256) - (1 << 128)) >> 1


# Recomputed from _golden_jump() in the test suite.
PCG64_JUMP = 0x9E3779B97F4A7C15F39CC0605CEDC834


def spawn_generators(
    seq: SeedSequence, n: int, generator: str = "pcg64"
) -> list[GeneratorHandle]:
    """Seeded handles over ``n`` freshly spawned children of ``seq``.

    Each child can be rebuilt from ``child.seed_seq.to_descriptor()`` alone.
    """
    return [GeneratorHandle.from_seed_sequence(child, generator) for child in seq.spawn(n)]


def jumped(handle: GeneratorHandle, k: int = 1) -> GeneratorHandle:
    """A new handle advanced by ``k * PCG64_JUMP`` draws; ``handle`` is untouched."""
    if not isinstance(handle.bitgen, PCG64):
        raise UnsupportedOperation(
            f"jump-ahead is only available for pcg64, not {handle.bitgen.name}"
        )
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    bitgen = handle.bitgen.copy().advance((k * PCG64_JUMP) & MASK128)
    return GeneratorHandle(bitgen, handle.provenance, handle.seed_seq)


def _private_copy(handle: GeneratorHandle):
    if handle.is_secure:
        # Duplicating a secret keystream would hand identical noise to two consumers.
        raise UnsupportedOperation("the CSPRNG stream cannot be duplicated")
    return handle.bitgen.copy()


class LeapfrogStream:
    """Every ``T``-th 64-bit output of a mother stream, starting at index ``t``.

    The view owns a copy of the mother generator taken at construction, so
    several views over the same handle do not interfere.  Each draw discards
    ``T - 1`` mother outputs.
    """

    def __init__(self, handle: GeneratorHandle, n_tasks: int, task: int):
        if n_tasks < 1:
            raise ValueError(f"n_tasks must be positive, got {n_tasks}")
        if not 0 <= task < n_tasks:
            raise ValueError(f"task must lie in [0, {n_tasks}), got {task}")
        self.n_tasks = n_tasks
        self.task = task
        self._gen = _private_copy(handle)
        self._skip = task

    def next_u64(self) -> int:
        gen = self._gen
        for _ in range(self._skip):
            gen.next_u64()
        self._skip = self.n_tasks - 1
        return gen.next_u64()


def leapfrog(handle: GeneratorHandle, n_tasks: int, task: int) -> LeapfrogStream:
    return LeapfrogStream(handle, n_tasks, task)


@dataclass(frozen=True)
class BlockDescriptor:
    stream_id: str
    task: int
    offset: int
    length: int

    def open(self, handle: GeneratorHandle) -> GeneratorHandle:
        """A copy of ``handle`` advanced to the start of this block."""
        if not isinstance(handle.bitgen, PCG64):
            raise UnsupportedOperation(
                f"blocking needs jump-ahead, which {handle.bitgen.name} lacks"
            )
        bitgen = handle.bitgen.copy().advance(self.offset)
        return GeneratorHandle(bitgen, handle.provenance, handle.seed_seq)


class BlockOverlapError(ValueError):
    """The requested block intersects one that was already assigned."""


class LedgerCorruptError(ValueError):
    """A persisted ledger line failed its checksum or could not be parsed."""


def _checksum(stream_id: str, task: int, length: int) -> str:
    record = "\t".join((stream_id, str(task), str(length)))
    return f"{zlib.crc32(record.encode()):08x}"


class BlockLedger:
    """Record of assigned ``(stream_id, task)`` blocks.

    With a ``path`` every assignment is appended as
    ``stream-id<TAB>task<TAB>length<TAB>crc32`` and the file is replayed on
    construction.  A block is refused when its index range intersects any
    block already assigned on the same stream, which covers both a repeated
    task index and blocks of different lengths that overlap.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else None
        self._ranges: dict[str, list[tuple[int, int]]] = {}
        self._assigned: set[tuple[str, int]] = set()
        if self.path is not None and self.path.exists():
            self._load()

    @property
    def assigned(self) -> frozenset[tuple[str, int]]:
        return frozenset(self._assigned)

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                try:
                    stream_id, task_s, length_s, crc = parts
                    task, length = int(task_s), int(length_s)
                except ValueError:
                    raise LedgerCorruptError(f"{self.path}:{lineno}: malformed record") from None
                if _checksum(stream_id, task, length) != crc:
                    raise LedgerCorruptError(f"{self.path}:{lineno}: checksum mismatch")
                self._record(stream_id, task, length)

    def _conflict(self, stream_id: str, start: int, stop: int) -> bool:
        return any(s < stop and start < e for s, e in self._ranges.get(stream_id, ()))

    def _record(self, stream_id: str, task: int, length: int) -> None:
        start = task * length
        if (stream_id, task) in self._assigned or self._conflict(stream_id, start, start + length):
            raise BlockOverlapError(
                f"block {task} (offset {start}, length {length}) of stream "
                f"{stream_id!r} overlaps an assigned block"
            )
        self._ranges.setdefault(stream_id, []).append((start, start + length))
        self._assigned.add((stream_id, task))

    def assign(self, stream_id: str, task: int, length: int) -> BlockDescriptor:
        if length < 1:
            raise ValueError(f"block length must be positive, got {length}")
        if task < 0:
            raise ValueError(f"task must be non-negative, got {task}")
        if not stream_id or any(c in stream_id for c in "\t\r\n"):
            raise ValueError("stream_id must be non-empty and free of tabs and newlines")
        self._record(stream_id, task, length)
        if self.path is not None:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(f"{stream_id}\t{task}\t{length}\t{_checksum(stream_id, task, length)}\n")
        return BlockDescriptor(stream_id, task, task * length, length)


def assign_block(ledger: BlockLedger, stream_id: str, task: int, length: int) -> BlockDescriptor:
    return ledger.assign(stream_id, task, length)


def collision_probability(n: int, key_bits: int) -> float:
    """Probability that ``n`` uniformly random ``key_bits``-bit keys are not all distinct.

    Evaluates ``1 - prod_{i<n} (1 - i / 2**key_bits)`` through log-gamma at a
    working precision wide enough to survive the cancellation.
    """
    if n < 0 or key_bits < 1:
        raise ValueError("need n >= 0 and key_bits >= 1")
    cells = 1 << key_bits
    if n <= 1:
        return 0.0
    if n > cells:
        return 1.0
    digits = int((2 * key_bits + n.bit_length()) * 0.30103) + 40
    with mpmath.workdps(digits):
        m = mpmath.mpf(cells)
        log_none = mpmath.loggamma(m + 1) - mpmath.loggamma(m - n + 1) - n * mpmath.log(m)
        return float(-mpmath.expm1(log_none))


def collision_probability_approx(n: int, key_bits: int) -> float:
    """``1 - exp(-n (n - 1) / 2**(key_bits + 1))``."""
    if n < 0 or key_bits < 1:
        raise ValueError("need n >= 0 and key_bits >= 1")
    return -math.expm1(-math.ldexp(float(n * (n - 1)), -(key_bits + 1)))
