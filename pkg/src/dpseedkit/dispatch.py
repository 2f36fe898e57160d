"""Resolution of ``random_state`` arguments into generator handles.

``check_random_state`` accepts ``None``, a non-negative integer of any size,
or an existing :class:`GeneratorHandle`:

* ``None`` gives a handle over a fresh ChaCha20 generator keyed from the OS,
  tagged :attr:`Provenance.DEFAULT_SECURE`;
* an integer seeds a new PCG64 through a :class:`SeedSequence`, tagged
  :attr:`Provenance.SEEDED`;
* a handle is returned as is, so its state carries over between calls.

Mechanisms call :func:`resolve_dp_noise_source` to pick their noise source.
It hands back a fresh CSPRNG for unseeded handles and the handle itself
otherwise, so an unseeded mechanism never draws from a deterministic stream.
"""

from __future__ import annotations

import enum
from typing import Union

from .bitgen import MT19937, PCG64, ChaCha20
from .seedseq import SeedSequence
from .transform import bounded_int, next_double

BitGenerator = Union[MT19937, PCG64, ChaCha20]


class Provenance(enum.Enum):
    SEEDED = "seeded"
    USER_PROVIDED = "user_provided"
    DEFAULT_SECURE = "default_secure"


_FACTORIES = {
    "pcg64": PCG64.from_seed_sequence,
    "mt19937": MT19937.from_seed_sequence,
}


class GeneratorHandle:
    """A bit generator together with where its seed came from.

    All draws go through ``next_u64``, which is the one interface both the
    deterministic and the secure backends implement.
    """

    def __init__(
        self,
        bitgen: BitGenerator,
        provenance: Provenance = Provenance.USER_PROVIDED,
        seed_seq: SeedSequence | None = None,
    ) -> None:
        if provenance is Provenance.DEFAULT_SECURE and not isinstance(bitgen, ChaCha20):
            raise ValueError("default-secure handles must wrap the CSPRNG")
        if provenance is Provenance.DEFAULT_SECURE and seed_seq is not None:
            raise ValueError("default-secure handles carry no seed")
        self.bitgen = bitgen
        self.provenance = provenance
        self.seed_seq = seed_seq

    @classmethod
    def from_seed_sequence(cls, seq: SeedSequence, generator: str = "pcg64") -> GeneratorHandle:
        try:
            factory = _FACTORIES[generator]
        except KeyError:
            raise ValueError(
                f"cannot seed {generator!r}; choose one of {sorted(_FACTORIES)}"
            ) from None
        return cls(factory(seq), Provenance.SEEDED, seq)

    @classmethod
    def secure(cls) -> GeneratorHandle:
        return cls(ChaCha20(), Provenance.DEFAULT_SECURE)

    @property
    def is_secure(self) -> bool:
        return isinstance(self.bitgen, ChaCha20)

    def next_u64(self) -> int:
        return self.bitgen.next_u64()

    def random(self) -> float:
        return next_double(self)

    def integers(self, low: int, high: int) -> int:
        """Uniform integer in ``[low, high]`` (both ends inclusive)."""
        return bounded_int(self, low, high)

    def random_raw(self, n: int):
        return self.bitgen.random_raw(n)

    def spawn(self, n: int) -> list[GeneratorHandle]:
        """Child handles from the underlying seed sequence."""
        if self.seed_seq is None:
            raise ValueError("this generator was not built from a seed sequence")
        kind = self.bitgen.name
        return [GeneratorHandle.from_seed_sequence(s, kind) for s in self.seed_seq.spawn(n)]

    def __repr__(self) -> str:
        return f"GeneratorHandle({self.bitgen!r}, {self.provenance.name})"


RandomStateSpec = Union[None, int, GeneratorHandle]


def check_random_state(spec: RandomStateSpec = None) -> GeneratorHandle:
    if spec is None:
        return GeneratorHandle.secure()
    if isinstance(spec, GeneratorHandle):
        return spec
    if isinstance(spec, bool) or not isinstance(spec, int):
        raise TypeError(
            f"random_state must be None, a non-negative int or a GeneratorHandle, "
            f"got {type(spec).__name__}"
        )
    if spec < 0:
        raise ValueError(f"seed must be non-negative, got {spec}")
    return GeneratorHandle.from_seed_sequence(SeedSequence(spec), "pcg64")


def resolve_dp_noise_source(handle: GeneratorHandle) -> GeneratorHandle:
    if handle.provenance is Provenance.DEFAULT_SECURE:
        return GeneratorHandle.secure()
    return handle

