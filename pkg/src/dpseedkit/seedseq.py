"""Seed sequences: entropy conditioning and spawn trees.

A :class:`SeedSequence` hashes an arbitrarily large user seed (or 128 bits of
fresh OS entropy) together with its spawn key into a small pool of 32-bit
words.  Generators draw their initial state from the pool with
:meth:`SeedSequence.generate_state`.

The hashing constants follow O'Neill's ``seed_seq`` replacement design as
adopted by NumPy, so streams are bit-compatible with
``numpy.random.SeedSequence``.
"""

from __future__ import annotations

import json
import secrets
from typing import Iterable, Sequence

MASK32 = 0xFFFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF

DEFAULT_POOL_SIZE = 4
DEFAULT_ENTROPY_BITS = 128

INIT_A = 0x43B0D7E5
MULT_A = 0x931E8875
INIT_B = 0x8B51F9DD
MULT_B = 0x58F38DED
MIX_MULT_L = 0xCA01F9DD
MIX_MULT_R = 0x4973F715
XSHIFT = 16


def int_to_word_array(n: int) -> list[int]:
    """Split a non-negative integer into 32-bit words, lowest bits first.

    ``0`` maps to ``[0]``; otherwise ``n == sum(w << 32 * i)``.
    """
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"expected a non-negative integer, got {type(n).__name__}")
    if n < 0:
        raise ValueError(f"expected a non-negative integer, got {n}")
    if n == 0:
        return [0]
    words = []
    while n:
        words.append(n & MASK32)
        n >>= 32
    return words


def _coerce_to_words(value: int | Iterable[int] | None) -> list[int]:
    if value is None:
        return []
    if isinstance(value, int) and not isinstance(value, bool):
        return int_to_word_array(value)
    words: list[int] = []
    for item in value:
        words.extend(int_to_word_array(item))
    return words


def _hashmix(value: int, hash_const: list[int]) -> int:
    # hash_const is a one-element list so the multiplier state threads through calls
    value ^= hash_const[0]
    hash_const[0] = (hash_const[0] * MULT_A) & MASK32
    value = (value * hash_const[0]) & MASK32
    return value ^ (value >> XSHIFT)


def _mix(x: int, y: int) -> int:
    result = (MIX_MULT_L * x - MIX_MULT_R * y) & MASK32
    return result ^ (result >> XSHIFT)


def mix_entropy(entropy: Sequence[int], pool_size: int = DEFAULT_POOL_SIZE) -> tuple[int, ...]:
    """Condense a word array into a ``pool_size``-word pool."""
    hash_const = [INIT_A]
    pool = [
        _hashmix(entropy[i] if i < len(entropy) else 0, hash_const)
        for i in range(pool_size)
    ]
    for i_src in range(pool_size):
        for i_dst in range(pool_size):
            if i_src != i_dst:
                pool[i_dst] = _mix(pool[i_dst], _hashmix(pool[i_src], hash_const))
    for i_src in range(pool_size, len(entropy)):
        for i_dst in range(pool_size):
            pool[i_dst] = _mix(pool[i_dst], _hashmix(entropy[i_src], hash_const))
    return tuple(pool)


class SeedSequence:
    """Immutable entropy pool plus a position in a spawn tree.

    Parameters
    ----------
    entropy : int, sequence of int, or None
        User seed of any size.  When omitted, 128 bits are drawn from the
        operating system and kept, so the sequence can be reported through
        :attr:`entropy` and re-created later.
    spawn_key : sequence of int
        Path from the root of the spawn tree; empty for a root sequence.
    n_children_spawned : int
        Number of children already handed out.  Used when re-creating a
        sequence that has spawned before.

    Only :meth:`spawn` mutates the object (the child counter).  Spawn from a
    single thread and hand the children out.
    """

    __slots__ = ("_entropy", "_entropy_words", "_spawn_key", "_pool", "_n_children_spawned")

    def __init__(
        self,
        entropy: int | Sequence[int] | None = None,
        *,
        spawn_key: Sequence[int] = (),
        n_children_spawned: int = 0,
    ) -> None:
        if entropy is None:
            entropy = secrets.randbits(DEFAULT_ENTROPY_BITS)
        elif not (isinstance(entropy, int) and not isinstance(entropy, bool)):
            entropy = tuple(entropy)
        entropy_words = _coerce_to_words(entropy)
        if not entropy_words:
            raise ValueError("entropy must contain at least one integer")
        key = tuple(spawn_key)
        key_words = _coerce_to_words(key)
        if n_children_spawned < 0:
            raise ValueError("n_children_spawned must be non-negative")

        self._entropy = entropy
        self._entropy_words = tuple(entropy_words)
        self._spawn_key = key
        self._n_children_spawned = int(n_children_spawned)
        self._pool = mix_entropy(self._assemble(entropy_words, key_words))

    @staticmethod
    def _assemble(entropy_words: list[int], key_words: list[int]) -> list[int]:
        # Zero-pad short entropy so a spawn key never aliases a longer root seed.
        if key_words and len(entropy_words) < DEFAULT_POOL_SIZE:
            entropy_words = entropy_words + [0] * (DEFAULT_POOL_SIZE - len(entropy_words))
        return entropy_words + key_words

    @property
    def entropy(self) -> int | tuple[int, ...]:
        """The seed as given (or as drawn from the OS)."""
        return self._entropy

    @property
    def entropy_words(self) -> tuple[int, ...]:
        return self._entropy_words

    @property
    def spawn_key(self) -> tuple[int, ...]:
        return self._spawn_key

    @property
    def pool(self) -> tuple[int, ...]:
        return self._pool

    @property
    def pool_size(self) -> int:
        return len(self._pool)

    @property
    def n_children_spawned(self) -> int:
        return self._n_children_spawned

    def generate_state(self, n_words: int, word_size: int = 32) -> list[int]:
        """Return ``n_words`` words of seeding material.

        The output depends only on the pool, so repeated calls agree and a
        shorter request is a prefix of a longer one.  64-bit words are
        assembled from two consecutive 32-bit outputs, low word first.
        """
        if word_size not in (32, 64):
            raise ValueError(f"word_size must be 32 or 64, got {word_size}")
        if n_words < 1:
            raise ValueError(f"n_words must be positive, got {n_words}")
        n32 = n_words * (word_size // 32)
        out = []
        hash_const = INIT_B
        pool = self._pool
        size = len(pool)
        for i in range(n32):
            value = pool[i % size] ^ hash_const
            hash_const = (hash_const * MULT_B) & MASK32
            value = (value * hash_const) & MASK32
            out.append(value ^ (value >> XSHIFT))
        if word_size == 32:
            return out
        return [out[i] | (out[i + 1] << 32) for i in range(0, n32, 2)]

    def spawn(self, n_children: int) -> list[SeedSequence]:
        """Create ``n_children`` child sequences with fresh, never reused keys."""
        if n_children < 1:
            raise ValueError(f"n_children must be positive, got {n_children}")
        start = self._n_children_spawned
        children = [
            SeedSequence(self._entropy, spawn_key=self._spawn_key + (i,))
            for i in range(start, start + n_children)
        ]
        self._n_children_spawned += n_children
        return children

    def to_descriptor(self) -> dict:
        """JSON-ready ``{"entropy": "<decimal>", "spawn_key": [...]}``."""
        if isinstance(self._entropy, int):
            entropy: str | list[str] = format_seed(self._entropy)
        else:
            entropy = [format_seed(e) for e in self._entropy]
        return {"entropy": entropy, "spawn_key": list(self._spawn_key)}

    @classmethod
    def from_descriptor(cls, descriptor: dict | str) -> SeedSequence:
        """Inverse of :meth:`to_descriptor`; also accepts the JSON text."""
        if isinstance(descriptor, str):
            descriptor = json.loads(descriptor)
        try:
            raw = descriptor["entropy"]
        except (KeyError, TypeError):
            raise ValueError("descriptor must be an object with an 'entropy' field") from None
        entropy = parse_seed(raw) if isinstance(raw, str) else [parse_seed(str(r)) for r in raw]
        key = descriptor.get("spawn_key", [])
        if not all(isinstance(k, int) and not isinstance(k, bool) for k in key):
            raise ValueError("spawn_key entries must be integers")
        return cls(entropy, spawn_key=key)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SeedSequence):
            return NotImplemented
        return (self._entropy_words, self._spawn_key) == (other._entropy_words, other._spawn_key)

    def __hash__(self) -> int:
        return hash((self._entropy_words, self._spawn_key))

    def __repr__(self) -> str:
        return (
            f"SeedSequence(entropy={self._entropy!r}, spawn_key={self._spawn_key!r}, "
            f"n_children_spawned={self._n_children_spawned})"
        )


def new_seed_sequence(
    seed: int | Sequence[int] | None = None, spawn_key: Sequence[int] = ()
) -> SeedSequence:
    return SeedSequence(seed, spawn_key=spawn_key)


# Stay under the interpreter's int/str conversion limit (4300 digits by default).
_DIGIT_CHUNK = 4000


def parse_seed(text: str) -> int:
    """Parse a decimal seed string of any length."""
    text = text.strip()
    if not text.isascii() or not text.isdigit():
        raise ValueError(f"seed must be a non-negative decimal integer, got {text!r}")
    head = len(text) % _DIGIT_CHUNK or _DIGIT_CHUNK
    value = int(text[:head])
    for i in range(head, len(text), _DIGIT_CHUNK):
        value = value * 10**_DIGIT_CHUNK + int(text[i : i + _DIGIT_CHUNK])
    return value


def format_seed(value: int) -> str:
    """Decimal string of a non-negative integer of any size."""
    if value < 0:
        raise ValueError("seed must be non-negative")
    base = 10**_DIGIT_CHUNK
    chunks = []
    while value >= base:
        value, low = divmod(value, base)
        chunks.append(str(low).zfill(_DIGIT_CHUNK))
    chunks.append(str(value))
    return "".join(reversed(chunks))
