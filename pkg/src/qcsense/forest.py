"""A six-pixel toy model of forest foliage profiles.

Pixel 1 is the ground and pixel 6 the top of the canopy. Signals are drawn
by picking a class at random and adding clamped Gaussian noise to its
prototype. The prototype values are illustrative defaults, not measured data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qcsense.encoding import as_signal, best_binary_image
from qcsense.errors import InvalidArgumentError
from qcsense.training import TrainingSet

YOUNG = (0.1, 0.2, 0.6, 0.5, 0.2, 0.1)
MATURE = (0.4, 0.15, 0.1, 0.2, 0.7, 0.8)


@dataclass(frozen=True)
class ForestModel:
    young_prototype: tuple = YOUNG
    mature_prototype: tuple = MATURE
    noise_std: float = 0.1
    class_prior: float = 0.5

    def __post_init__(self):
        young = tuple(float(v) for v in as_signal(self.young_prototype))
        mature = tuple(float(v) for v in as_signal(self.mature_prototype))
        if len(young) != len(mature):
            raise InvalidArgumentError("prototypes differ in length")
        if self.noise_std < 0:
            raise InvalidArgumentError("noise_std must be non-negative")
        if self.class_prior != 0.5:
            raise InvalidArgumentError("the class prior is fixed at 0.5")
        if best_binary_image(young) == best_binary_image(mature):
            raise InvalidArgumentError("prototypes are indistinguishable at p = 0.5")
        object.__setattr__(self, "young_prototype", young)
        object.__setattr__(self, "mature_prototype", mature)

    @property
    def num_pixels(self) -> int:
        return len(self.young_prototype)

    @property
    def prototypes(self):
        return (np.array(self.young_prototype), np.array(self.mature_prototype))


def sample_signal(model: ForestModel, rng, with_class=False):
    """Draw one signal; with ``with_class`` also return 0 (young) or 1 (mature)."""
    klass = int(rng.integers(0, 2))
    proto = model.prototypes[klass]
    y = np.clip(proto + rng.normal(0.0, model.noise_std, size=proto.size), 0.0, 1.0)
    return (y, klass) if with_class else y


def build_training_sets(model: ForestModel, count: int, size: int, rng, midpoint=0.5):
    if count < 1 or size < 1:
        raise InvalidArgumentError("count and size must be at least 1")
    return [
        TrainingSet(tuple(sample_signal(model, rng) for _ in range(size)), midpoint)
        for _ in range(count)
    ]


def ideal_training_set(model: ForestModel, midpoint=0.5) -> TrainingSet:
    """The two prototypes alone, one copy each."""
    return TrainingSet(model.prototypes, midpoint)
