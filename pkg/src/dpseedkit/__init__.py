"""Reproducible and secure random number generation for differential privacy."""

__version__ = "0.1.0"

from .bitgen import MT19937, PCG64, ChaCha20, UnsupportedOperation, os_entropy
from .dispatch import GeneratorHandle, Provenance, check_random_state, resolve_dp_noise_source
from .dpmech import LaplaceMechanism
from .parallel import (
    BlockLedger,
    BlockOverlapError,
    assign_block,
    collision_probability,
    collision_probability_approx,
    jumped,
    leapfrog,
    spawn_generators,
)
from .seedseq import SeedSequence
from .transform import bounded_int, laplace_inverse_cdf, next_double

__all__ = [
    "MT19937",
    "PCG64",
    "ChaCha20",
    "UnsupportedOperation",
    "os_entropy",
    "GeneratorHandle",
    "Provenance",
    "check_random_state",
    "resolve_dp_noise_source",
    "LaplaceMechanism",
    "BlockLedger",
    "BlockOverlapError",
    "assign_block",
    "collision_probability",
    "collision_probability_approx",
    "jumped",
    "leapfrog",
    "spawn_generators",
    "SeedSequence",
    "bounded_int",
    "laplace_inverse_cdf",
    "next_double",
]
