"""The Laplace mechanism."""

from __future__ import annotations

import math

from .dispatch import GeneratorHandle, RandomStateSpec, check_random_state, resolve_dp_noise_source
from .transform import laplace_inverse_cdf, next_double


class LaplaceMechanism:
    """Adds Laplace(sensitivity / epsilon) noise to a real value.

    ``random_state`` follows :func:`~dpseedkit.dispatch.check_random_state`.
    An integer seed makes every new mechanism produce the same output for the
    same input; passing one handle to several mechanisms gives different
    outputs per call that still reproduce when the whole script is re-run;
    ``None`` draws noise from a fresh CSPRNG.

    A mechanism owns its noise source and is not meant to be shared between
    threads.
    """

    def __init__(self, epsilon: float, sensitivity: float, random_state: RandomStateSpec = None):
        epsilon = float(epsilon)
        sensitivity = float(sensitivity)
        if not (epsilon > 0.0 and math.isfinite(epsilon)):
            raise ValueError(f"epsilon must be positive and finite, got {epsilon}")
        if not (sensitivity >= 0.0 and math.isfinite(sensitivity)):
            raise ValueError(f"sensitivity must be non-negative and finite, got {sensitivity}")
        self.epsilon = epsilon
        self.sensitivity = sensitivity
        self.noise_source: GeneratorHandle = resolve_dp_noise_source(
            check_random_state(random_state)
        )

    @property
    def scale(self) -> float:
        return self.sensitivity / self.epsilon

    def _uniform(self) -> float:
        # next_double lies in [0, 1); redraw the single value outside (0, 1).
        u = next_double(self.noise_source)
        while u == 0.0:
            u = next_double(self.noise_source)
        return u

    def randomise(self, value: float) -> float:
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"value must be finite, got {value}")
        if self.scale == 0.0:
            return value
        return value + laplace_inverse_cdf(self._uniform(), self.scale)

    def __repr__(self) -> str:
        return (
            f"LaplaceMechanism(epsilon={self.epsilon}, sensitivity={self.sensitivity}, "
            f"provenance={self.noise_source.provenance.name})"
        )


def laplace_new(epsilon: float, sensitivity: float, random_state: RandomStateSpec = None):
    return LaplaceMechanism(epsilon, sensitivity, random_state)
