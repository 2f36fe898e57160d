"""Bit generators: MT19937, PCG64, a ChaCha20 CSPRNG and the OS entropy source.

Every generator exposes ``next_u64()``; MT19937 additionally exposes its
native ``next_u32()``.  ``random_raw(n)`` returns ``n`` native words as a
numpy array for bulk work (dumps, statistical tests, benchmarks).

State updates use explicit masking, so all arithmetic wraps exactly as in
the reference algorithms regardless of platform.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .seedseq import MASK32, MASK64, SeedSequence

MASK128 = (1 << 128) - 1


class UnsupportedOperation(NotImplementedError):
    """The generator does not provide the requested capability."""


def os_entropy(n_bytes: int) -> bytes:
    """Return ``n_bytes`` from the operating system CSPRNG.

    Errors raised by the OS propagate unchanged; there is no fallback.
    """
    if n_bytes < 0:
        raise ValueError(f"n_bytes must be non-negative, got {n_bytes}")
    return os.urandom(n_bytes)


# --------------------------------------------------------------------------
# MT19937

_MT_N = 624
_MT_M = 397
_MT_MATRIX_A = 0x9908B0DF
_MT_UPPER = 0x80000000
_MT_LOWER = 0x7FFFFFFF


@dataclass(frozen=True)
class Mt19937State:
    words: tuple[int, ...]
    index: int

    def __post_init__(self) -> None:
        if len(self.words) != _MT_N:
            raise ValueError(f"MT19937 state needs {_MT_N} words, got {len(self.words)}")
        if not 0 <= self.index <= _MT_N:
            raise ValueError(f"index must lie in [0, {_MT_N}], got {self.index}")


def _twist_rows(mt: np.ndarray, lo: int, hi: int) -> None:
    i = np.arange(lo, hi)
    y = (mt[i] & np.uint32(_MT_UPPER)) | (mt[(i + 1) % _MT_N] & np.uint32(_MT_LOWER))
    v = mt[(i + _MT_M) % _MT_N] ^ (y >> np.uint32(1))
    v ^= np.where(y & np.uint32(1), np.uint32(_MT_MATRIX_A), np.uint32(0))
    mt[lo:hi] = v


def _twist_array(mt: np.ndarray) -> None:
    # Row i reads rows i+1 and i+397 (mod 624); rows that read already-twisted
    # values are processed after their sources, in chunks of at most 227.
    _twist_rows(mt, 0, _MT_N - _MT_M)
    _twist_rows(mt, _MT_N - _MT_M, 2 * (_MT_N - _MT_M))
    _twist_rows(mt, 2 * (_MT_N - _MT_M), _MT_N - 1)
    _twist_rows(mt, _MT_N - 1, _MT_N)


def _temper_array(y: np.ndarray) -> np.ndarray:
    y = y ^ (y >> np.uint32(11))
    y ^= (y << np.uint32(7)) & np.uint32(0x9D2C5680)
    y ^= (y << np.uint32(15)) & np.uint32(0xEFC60000)
    return y ^ (y >> np.uint32(18))


class MT19937:
    """The 32-bit Mersenne Twister (Matsumoto & Nishimura, 1998)."""

    name = "mt19937"
    word_size = 32

    def __init__(self, state: Mt19937State) -> None:
        self._mt = list(state.words)
        self._index = state.index
        if not any(self._mt):
            raise ValueError("MT19937 state must not be all zero")

    @classmethod
    def from_seed_sequence(cls, seq: SeedSequence) -> MT19937:
        words = seq.generate_state(_MT_N, 32)
        if not any(words):  # probability 2**-19968; keep the generator usable anyway
            words[0] = _MT_UPPER
        return cls(Mt19937State(tuple(words), _MT_N))

    @classmethod
    def from_u32(cls, seed: int) -> MT19937:
        """Classic ``init_genrand`` single-word initialization."""
        if not 0 <= seed <= MASK32:
            raise ValueError(f"seed must be a 32-bit word, got {seed}")
        mt = [seed]
        prev = seed
        for i in range(1, _MT_N):
            prev = (1812433253 * (prev ^ (prev >> 30)) + i) & MASK32
            mt.append(prev)
        return cls(Mt19937State(tuple(mt), _MT_N))

    @property
    def state(self) -> Mt19937State:
        return Mt19937State(tuple(self._mt), self._index)

    def _twist(self) -> None:
        arr = np.array(self._mt, dtype=np.uint32)
        _twist_array(arr)
        self._mt = arr.tolist()
        self._index = 0

    def next_u32(self) -> int:
        if self._index >= _MT_N:
            self._twist()
        y = self._mt[self._index]
        self._index += 1
        y ^= y >> 11
        y ^= (y << 7) & 0x9D2C5680
        y ^= (y << 15) & 0xEFC60000
        return y ^ (y >> 18)

    def next_u64(self) -> int:
        """Two 32-bit outputs, the first one forming the high half."""
        hi = self.next_u32()
        return (hi << 32) | self.next_u32()

    def random_raw(self, n: int) -> np.ndarray:
        parts = []
        need = n
        while need:
            if self._index >= _MT_N:
                self._twist()
            take = min(need, _MT_N - self._index)
            block = np.array(self._mt[self._index : self._index + take], dtype=np.uint32)
            parts.append(_temper_array(block))
            self._index += take
            need -= take
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.uint32)

    def copy(self) -> MT19937:
        return MT19937(self.state)

    def __repr__(self) -> str:
        return f"MT19937(index={self._index})"


# --------------------------------------------------------------------------
# PCG64 (XSL-RR 128/64, "setseq" variant)

PCG64_MULTIPLIER = 0x2360ED051FC65DA44385DF649FCCF645


@dataclass(frozen=True)
class Pcg64State:
    state: int
    increment: int

    def __post_init__(self) -> None:
        if not 0 <= self.state <= MASK128 or not 0 <= self.increment <= MASK128:
            raise ValueError("PCG64 state and increment must be 128-bit unsigned")
        if not self.increment & 1:
            raise ValueError("PCG64 increment must be odd")


def _lcg_advance(state: int, delta: int, mult: int, inc: int) -> int:
    """Jump an LCG ahead by ``delta`` steps in O(log delta) (Brown, 1994)."""
    delta &= MASK128
    acc_mult, acc_plus = 1, 0
    while delta:
        if delta & 1:
            acc_mult = (acc_mult * mult) & MASK128
            acc_plus = (acc_plus * mult + inc) & MASK128
        inc = ((mult + 1) * inc) & MASK128
        mult = (mult * mult) & MASK128
        delta >>= 1
    return (acc_mult * state + acc_plus) & MASK128


class PCG64:
    """O'Neill's PCG XSL-RR 128/64 generator with a selectable stream."""

    name = "pcg64"
    word_size = 64

    def __init__(self, state: Pcg64State) -> None:
        self._state = state.state
        self._inc = state.increment

    @classmethod
    def from_seed(cls, initstate: int, initseq: int) -> PCG64:
        """``pcg_setseq_128_srandom_r``: derive the increment from ``initseq``."""
        inc = ((initseq << 1) | 1) & MASK128
        state = inc  # one LCG step from a zero state
        state = (state + initstate) & MASK128
        state = (state * PCG64_MULTIPLIER + inc) & MASK128
        return cls(Pcg64State(state, inc))

    @classmethod
    def from_seed_sequence(cls, seq: SeedSequence) -> PCG64:
        # 4 x 64-bit words: (state_hi, state_lo, seq_hi, seq_lo)
        w = seq.generate_state(4, 64)
        return cls.from_seed((w[0] << 64) | w[1], (w[2] << 64) | w[3])

    @property
    def state(self) -> Pcg64State:
        return Pcg64State(self._state, self._inc)

    def next_u64(self) -> int:
        s = (self._state * PCG64_MULTIPLIER + self._inc) & MASK128
        self._state = s
        rot = s >> 122
        x = ((s >> 64) ^ s) & MASK64
        return ((x >> rot) | (x << (64 - rot))) & MASK64

    def advance(self, delta: int) -> PCG64:
        """Advance in place as if ``delta`` (mod 2**128) words had been drawn."""
        self._state = _lcg_advance(self._state, delta, PCG64_MULTIPLIER, self._inc)
        return self

    def random_raw(self, n: int) -> np.ndarray:
        # Local-variable loop: this is the hot path for dumps and the test battery.
        out = np.empty(n, dtype=np.uint64)
        s, inc, mult = self._state, self._inc, PCG64_MULTIPLIER
        for i in range(n):
            s = (s * mult + inc) & MASK128
            rot = s >> 122
            x = ((s >> 64) ^ s) & MASK64
            out[i] = ((x >> rot) | (x << (64 - rot))) & MASK64
        self._state = s
        return out

    def copy(self) -> PCG64:
        return PCG64(self.state)

    def __repr__(self) -> str:
        return f"PCG64(state=0x{self._state:032x}, increment=0x{self._inc:032x})"


# --------------------------------------------------------------------------
# ChaCha20 in counter mode

_CHACHA_CONSTANTS = np.array([0x61707865, 0x3320646E, 0x79622D32, 0x6B206574], dtype=np.uint32)
_CHACHA_BATCH = 64  # blocks per refill -> 512 words


def _rotl(v: np.ndarray, n: int) -> np.ndarray:
    return (v << np.uint32(n)) | (v >> np.uint32(32 - n))


def chacha20_blocks(key_words: np.ndarray, counter: int, nonce: int, n_blocks: int) -> np.ndarray:
    """Keystream for ``n_blocks`` consecutive 64-byte blocks.

    Uses the original 64-bit block counter + 64-bit nonce layout.  Returns a
    ``(n_blocks, 16)`` array of little-endian 32-bit keystream words.
    """
    counters = (counter + np.arange(n_blocks, dtype=np.uint64)).astype(np.uint64)
    x = np.empty((16, n_blocks), dtype=np.uint32)
    x[0:4] = _CHACHA_CONSTANTS[:, None]
    x[4:12] = key_words[:, None]
    x[12] = (counters & np.uint64(MASK32)).astype(np.uint32)
    x[13] = (counters >> np.uint64(32)).astype(np.uint32)
    x[14] = nonce & MASK32
    x[15] = (nonce >> 32) & MASK32
    init = x.copy()
    with np.errstate(over="ignore"):
        for _ in range(10):
            for a, b, c, d in (
                (0, 4, 8, 12), (1, 5, 9, 13), (2, 6, 10, 14), (3, 7, 11, 15),
                (0, 5, 10, 15), (1, 6, 11, 12), (2, 7, 8, 13), (3, 4, 9, 14),
            ):
                x[a] += x[b]; x[d] = _rotl(x[d] ^ x[a], 16)  # noqa: E702
                x[c] += x[d]; x[b] = _rotl(x[b] ^ x[c], 12)  # noqa: E702
                x[a] += x[b]; x[d] = _rotl(x[d] ^ x[a], 8)  # noqa: E702
                x[c] += x[d]; x[b] = _rotl(x[b] ^ x[c], 7)  # noqa: E702
        x += init
    return x.T


class ChaCha20:
    """Cryptographically secure generator: ChaCha20 keystream as 64-bit words.

    The key comes from :func:`os_entropy` unless given explicitly (the
    explicit form exists for known-answer tests).  The key and counter are
    private: there is no ``state`` property and instances refuse to be
    pickled or copied.
    """

    name = "csprng"
    word_size = 64

    __slots__ = ("__key", "__nonce", "__counter", "__buffer", "__pos")

    def __init__(self, key: bytes | None = None, nonce: int = 0) -> None:
        if key is None:
            key = os_entropy(32)
        if len(key) != 32:
            raise ValueError("ChaCha20 key must be 32 bytes")
        if not 0 <= nonce <= MASK64:
            raise ValueError("nonce must be a 64-bit word")
        self.__key = np.frombuffer(key, dtype="<u4").astype(np.uint32)
        self.__nonce = nonce
        self.__counter = 0
        self.__buffer = np.empty(0, dtype=np.uint64)
        self.__pos = 0

    def _refill(self, n_blocks: int = _CHACHA_BATCH) -> None:
        if self.__counter + n_blocks > MASK64:
            raise OverflowError("ChaCha20 block counter exhausted")
        blocks = chacha20_blocks(self.__key, self.__counter, self.__nonce, n_blocks)
        self.__counter += n_blocks
        self.__buffer = np.ascontiguousarray(blocks).astype("<u4").view("<u8").ravel()
        self.__pos = 0

    def next_u64(self) -> int:
        if self.__pos >= self.__buffer.size:
            self._refill()
        value = int(self.__buffer[self.__pos])
        self.__pos += 1
        return value

    def random_raw(self, n: int) -> np.ndarray:
        take = min(n, self.__buffer.size - self.__pos)
        head = self.__buffer[self.__pos : self.__pos + take]
        self.__pos += take
        need = n - take
        if not need:
            return head.astype(np.uint64)
        # Fresh blocks for the remainder in one batch; leftovers stay buffered.
        self._refill(max(_CHACHA_BATCH, -(-need // 8)))
        tail = self.__buffer[:need]
        self.__pos = need
        return np.concatenate([head, tail]).astype(np.uint64)

    @property
    def blocks_consumed(self) -> int:
        """Number of keystream blocks generated so far (monotone)."""
        return self.__counter

    def __reduce__(self):
        raise TypeError("ChaCha20 state cannot be serialized")

    def __copy__(self):
        raise TypeError("ChaCha20 state cannot be copied")

    def __deepcopy__(self, memo):
        raise TypeError("ChaCha20 state cannot be copied")

    def __repr__(self) -> str:
        return "ChaCha20(<secret>)"


# Procedural aliases for the generator operations.

def mt19937_from_seedseq(seq: SeedSequence) -> MT19937:
    return MT19937.from_seed_sequence(seq)


def mt19937_from_u32(seed: int) -> MT19937:
    return MT19937.from_u32(seed)


def mt19937_next_u32(gen: MT19937) -> int:
    return gen.next_u32()


def pcg64_from_seedseq(seq: SeedSequence) -> PCG64:
    return PCG64.from_seed_sequence(seq)


def pcg64_next_u64(gen: PCG64) -> int:
    return gen.next_u64()


def pcg64_advance(gen: PCG64, delta: int) -> PCG64:
    return gen.advance(delta)


def csprng_next_u64(gen: ChaCha20) -> int:
    return gen.next_u64()


GENERATORS = ("mt19937", "pcg64", "csprng")
