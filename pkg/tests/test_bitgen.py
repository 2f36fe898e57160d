import copy
import pickle
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpseedkit.bitgen import (
    MASK128,
    MT19937,
    PCG64,
    ChaCha20,
    Mt19937State,
    Pcg64State,
    chacha20_blocks,
    csprng_next_u64,
    mt19937_from_seedseq,
    mt19937_from_u32,
    mt19937_next_u32,
    os_entropy,
    pcg64_advance,
    pcg64_from_seedseq,
    pcg64_next_u64,
)
from dpseedkit.seedseq import SeedSequence
from dpseedkit.stattests import monobit, words_to_bits

from conftest import REFERENCE_ENTROPY

# RFC 8439 section 2.3.2 block function test vector
RFC_KEY = bytes(range(32))
RFC_BLOCK = bytes.fromhex(
    "10f1e7e4d13b5915500fdd1fa32071c4c7d1f4c733c068030422aa9ac3d46c4e"
    "d2826446079faa0914c2d705d98b02a2b5129cd1de164eb9cbd083e8a2503c4e"
)


# -- MT19937 ---------------------------------------------------------------


def test_mt_canonical_seed_5489(golden):
    gen = mt19937_from_u32(5489)
    assert [mt19937_next_u32(gen) for _ in range(8)] == golden["mt19937_u32_5489_first_words"]
    assert golden["mt19937_u32_5489_first_words"][0] == 3499211612


def test_mt_matches_python_random_core():
    # CPython's random module is MT19937; seed its state with init_genrand output directly
    gen = MT19937.from_u32(12345)
    ref = random.Random()
    ref.setstate((3, tuple(gen.state.words) + (624,), None))
    assert [gen.next_u32() for _ in range(2000)] == [ref.getrandbits(32) for _ in range(2000)]


def test_mt_seedseq_state_is_generate_state(golden):
    gen = mt19937_from_seedseq(SeedSequence(REFERENCE_ENTROPY))
    assert list(gen.state.words) == golden["mt19937_state_words"]
    assert gen.state.index == 624


def test_mt_seedseq_child_differs():
    seq = SeedSequence(11)
    child = SeedSequence(11).spawn(1)[0]
    assert MT19937.from_seed_sequence(seq).state != MT19937.from_seed_sequence(child).state
    assert MT19937.from_seed_sequence(seq).state == MT19937.from_seed_sequence(SeedSequence(11)).state


def test_mt_distinct_seeds_distinct_first_outputs():
    # vectorized first-output kernel is checked against the scalar path in test_stattests
    from dpseedkit.stattests import mt19937_first_outputs

    rng = np.random.default_rng(2024)
    a = rng.integers(0, 2**32, 100_000, dtype=np.uint64)
    b = rng.integers(0, 2**32, 100_000, dtype=np.uint64)
    keep = a != b
    fa = mt19937_first_outputs(a[keep].astype(np.uint32))
    fb = mt19937_first_outputs(b[keep].astype(np.uint32))
    assert np.mean(fa != fb) >= 0.999
    assert MT19937.from_u32(0).state != MT19937.from_u32(1).state


def test_mt_bulk_equals_scalar():
    a, b = MT19937.from_u32(7), MT19937.from_u32(7)
    a.next_u32()
    b.next_u32()
    bulk = a.random_raw(1500).tolist()
    assert bulk == [b.next_u32() for _ in range(1500)]


def test_mt_u64_high_word_first():
    a, b = MT19937.from_u32(1), MT19937.from_u32(1)
    hi, lo = b.next_u32(), b.next_u32()
    assert a.next_u64() == hi << 32 | lo


def test_mt_state_validation():
    with pytest.raises(ValueError):
        Mt19937State((0,) * 10, 0)
    with pytest.raises(ValueError):
        MT19937(Mt19937State((0,) * 624, 624))
    with pytest.raises(ValueError):
        MT19937.from_u32(2**32)


def test_mt_monobit():
    words = MT19937.from_seed_sequence(SeedSequence(5)).random_raw(1_000_000)
    assert monobit(words_to_bits(words, 32), alpha=0.001).passed


# -- PCG64 -----------------------------------------------------------------


def test_pcg_reference_state_and_words(golden):
    gen = pcg64_from_seedseq(SeedSequence(REFERENCE_ENTROPY))
    assert gen.state == Pcg64State(int(golden["pcg64_state"]), int(golden["pcg64_increment"]))
    assert [pcg64_next_u64(gen) for _ in range(8)] == [int(w) for w in golden["pcg64_first_words"]]


def test_pcg_reference_first_double():
    gen = PCG64.from_seed_sequence(SeedSequence(REFERENCE_ENTROPY))
    assert (gen.next_u64() >> 11) * 2.0**-53 == 0.07296271584154868


def test_pcg_increment_is_odd_and_children_differ():
    seq = SeedSequence(1)
    parent = PCG64.from_seed_sequence(seq)
    kids = [PCG64.from_seed_sequence(c) for c in seq.spawn(5)]
    states = {parent.state} | {k.state for k in kids}
    assert len(states) == 6
    assert all(s.increment & 1 for s in states)
    with pytest.raises(ValueError):
        Pcg64State(1, 2)


def _step_n(gen, n):
    for _ in range(n):
        gen.next_u64()
    return gen


@pytest.mark.parametrize("delta", [0, 1, 2, 7, 1000])
def test_pcg_advance_equals_stepping(delta):
    seq = SeedSequence(31337)
    jumped = pcg64_advance(PCG64.from_seed_sequence(seq), delta)
    assert jumped.state == _step_n(PCG64.from_seed_sequence(seq), delta).state


@settings(max_examples=50)
@given(st.integers(0, MASK128), st.integers(0, MASK128))
def test_pcg_advance_is_additive(a, b):
    base = PCG64.from_seed_sequence(SeedSequence(8))
    one = base.copy().advance((a + b) & MASK128)
    two = base.copy().advance(a).advance(b)
    assert one.state == two.state


def test_pcg_full_period_advance_is_identity():
    gen = PCG64.from_seed_sequence(SeedSequence(4))
    assert gen.copy().advance(2**128).state == gen.state


def test_pcg_bulk_equals_scalar():
    a = PCG64.from_seed_sequence(SeedSequence(2))
    b = a.copy()
    assert a.random_raw(500).tolist() == [b.next_u64() for _ in range(500)]
    assert a.state == b.state


# -- ChaCha20 --------------------------------------------------------------


def test_chacha_rfc8439_block():
    # 64-bit counter layout: RFC counter word 1 and nonce word 0x09000000 share words 12-13
    key = np.frombuffer(RFC_KEY, dtype="<u4").astype(np.uint32)
    counter = 1 | (0x09000000 << 32)
    nonce = 0x4A000000
    block = chacha20_blocks(key, counter, nonce, 1)[0]
    assert block.astype("<u4").tobytes() == RFC_BLOCK


def test_chacha_matches_cryptography_keystream():
    algorithms = pytest.importorskip("cryptography.hazmat.primitives.ciphers.algorithms")
    from cryptography.hazmat.primitives.ciphers import Cipher

    key = bytes(range(100, 132))
    nonce = 0x0102030405060708
    # cryptography's 16-byte nonce: 64-bit LE counter then our 64-bit nonce
    iv = (0).to_bytes(8, "little") + nonce.to_bytes(8, "little")
    stream = Cipher(algorithms.ChaCha20(key, iv), None).encryptor().update(bytes(8 * 3000))
    gen = ChaCha20(key, nonce)
    words = [csprng_next_u64(gen) for _ in range(5)] + gen.random_raw(2990).tolist()
    words += [gen.next_u64() for _ in range(5)]
    assert np.array(words, dtype="<u8").tobytes() == stream


def test_chacha_counter_crosses_32_bits():
    key = np.frombuffer(RFC_KEY, dtype="<u4").astype(np.uint32)
    pair = chacha20_blocks(key, 2**32 - 1, 0, 2)
    assert (pair[1] == chacha20_blocks(key, 2**32, 0, 1)[0]).all()
    assert (pair[0] != pair[1]).any()


def test_chacha_fresh_instances_disagree():
    assert ChaCha20().next_u64() != ChaCha20().next_u64()


def test_chacha_state_is_not_exposed():
    gen = ChaCha20()
    assert not hasattr(gen, "state")
    public = {name for name in dir(gen) if not name.startswith("_")}
    assert public == {"name", "word_size", "next_u64", "random_raw", "blocks_consumed"}
    assert repr(gen) == "ChaCha20(<secret>)"
    with pytest.raises(TypeError):
        pickle.dumps(gen)
    with pytest.raises(TypeError):
        copy.copy(gen)
    with pytest.raises(TypeError):
        copy.deepcopy(gen)


def test_chacha_counter_increases():
    gen = ChaCha20()
    seen = [gen.blocks_consumed]
    for n in (1, 600, 1, 5000):
        gen.random_raw(n)
        seen.append(gen.blocks_consumed)
    assert seen == sorted(seen) and seen[-1] > seen[0]


def test_chacha_bad_key():
    with pytest.raises(ValueError):
        ChaCha20(b"short")


# -- OS entropy ------------------------------------------------------------


def test_os_entropy():
    assert os_entropy(0) == b""
    assert len(os_entropy(16)) == 16
    assert os_entropy(16) != os_entropy(16)
    with pytest.raises(ValueError):
        os_entropy(-1)


def test_os_entropy_propagates_failure(monkeypatch):
    def broken(n):
        raise OSError("no entropy")

    monkeypatch.setattr("dpseedkit.bitgen.os.urandom", broken)
    with pytest.raises(OSError):
        os_entropy(8)
    with pytest.raises(OSError):
        ChaCha20()


# -- cross-generator -------------------------------------------------------


@pytest.mark.parametrize("factory", [PCG64.from_seed_sequence, MT19937.from_seed_sequence])
def test_stream_determinism(factory):
    a = factory(SeedSequence(REFERENCE_ENTROPY))
    b = factory(SeedSequence(REFERENCE_ENTROPY))
    assert a.random_raw(3000).tolist() == b.random_raw(3000).tolist()
