"""Regenerate golden.json from NumPy's reference implementations.

    python tests/data/make_golden.py

NumPy is only the oracle here; the package never imports its RNG code.
"""

import json
from pathlib import Path

import numpy as np
from numpy.random import MT19937, PCG64, SeedSequence

REFERENCE_ENTROPY = 287955962967732827663192315245491885249

CASES = [
    (REFERENCE_ENTROPY, [], 4, 64),
    (REFERENCE_ENTROPY, [], 8, 32),
    (REFERENCE_ENTROPY, [0], 4, 64),
    (REFERENCE_ENTROPY, [0, 0], 4, 64),
    (REFERENCE_ENTROPY, [3, 1, 4], 6, 32),
    (0, [], 4, 64),
    (0, [], 5, 32),
    (1, [0], 4, 64),
    (42, [], 3, 64),
    (1234, [7], 9, 32),
    (2**32, [], 4, 32),
    (2**200 + 12345, [1, 2], 4, 64),
    ([1, 2, 3, 4, 5, 6], [], 4, 64),
    ([2**40, 0, 9], [11], 5, 32),
]


def main() -> None:
    seedseq = []
    for entropy, key, n_words, word_size in CASES:
        ss = SeedSequence(entropy, spawn_key=key)
        dtype = np.uint64 if word_size == 64 else np.uint32
        seedseq.append({
            "entropy": [str(e) for e in entropy] if isinstance(entropy, list) else str(entropy),
            "spawn_key": key,
            "n_words": n_words,
            "word_size": word_size,
            "pool": [int(w) for w in ss.pool],
            "state": [str(int(w)) for w in ss.generate_state(n_words, dtype)],
        })

    reference = SeedSequence(REFERENCE_ENTROPY)
    pcg = PCG64(reference)
    pcg_state = pcg.state["state"]
    pcg_first = [str(int(w)) for w in PCG64(reference).random_raw(8)]

    legacy = MT19937()
    legacy._legacy_seeding(5489)
    mt5489 = [int(w) for w in legacy.random_raw(8)]

    golden = {
        "seedseq": seedseq,
        "reference_entropy": str(REFERENCE_ENTROPY),
        "mt19937_state_words": [int(w) for w in reference.generate_state(624, np.uint32)],
        "pcg64_state": str(pcg_state["state"]),
        "pcg64_increment": str(pcg_state["inc"]),
        "pcg64_first_words": pcg_first,
        "pcg64_first_double": float(np.random.Generator(PCG64(REFERENCE_ENTROPY)).random()),
        "mt19937_u32_5489_first_words": mt5489,
        "numpy_version": np.__version__,
    }
    out = Path(__file__).with_name("golden.json")
    out.write_text(json.dumps(golden, indent=1) + "\n")


if __name__ == "__main__":
    main()
