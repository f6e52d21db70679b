"""Synthetic multi-view datasets with per-view, per-class distribution shift.

Every class has a ground-truth prototype drawn from ``5 * N(0, I)``. Each
view sees every sample as

    x = prototype + noise + shift

The noise (scale ``noise_sigma``) belongs to the sample and is shared by all
views. The shift (scale ``shift_sigma``) is view specific and drawn
independently per sample; classes listed in a view's ``informative_classes`` get a tenfold
smaller shift in that view. A view is therefore reliable on its informative
classes and blurred on the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .features import MultiViewDataset, make_dataset

PROTOTYPE_SCALE = 5.0


@dataclass(frozen=True)
class SynthSpec:
    class_count: int = 20
    samples_per_class: int = 120
    dim: int = 64
    view_count: int = 2
    noise_sigma: float = 1.0
    shift_sigma: float = 0.0
    informative_classes: tuple[tuple[int, ...], ...] | None = None
    seed: int = 0

    def validate(self) -> None:
        counts = (self.class_count, self.samples_per_class, self.dim, self.view_count)
        if min(counts) < 1:
            raise InvalidSpec("all counts must be >= 1")
        if self.noise_sigma < 0 or self.shift_sigma < 0:
            raise InvalidSpec("sigmas must be non-negative")
        if self.informative_classes is not None:
            if len(self.informative_classes) != self.view_count:
                raise InvalidSpec("informative_classes needs one entry per view")
            for subset in self.informative_classes:
                if any(not 0 <= c < self.class_count for c in subset):
                    raise InvalidSpec(f"informative class out of range in {subset}")


def partition_classes(class_count: int, view_count: int) -> tuple[tuple[int, ...], ...]:
    """Split ``range(class_count)`` into ``view_count`` contiguous, disjoint blocks."""
    blocks = np.array_split(np.arange(class_count), view_count)
    return tuple(tuple(int(c) for c in b) for b in blocks)


def generate(spec: SynthSpec, name: str = "synthetic") -> MultiViewDataset:
    spec.validate()
    rng = np.random.Generator(np.random.PCG64(spec.seed & ((1 << 64) - 1)))
    c, n, dim = spec.class_count, spec.samples_per_class, spec.dim
    prototypes = PROTOTYPE_SCALE * rng.standard_normal((dim, c))
    labels = np.repeat(np.arange(c), n)
    # sample-intrinsic deviation, identical in every view (same image)
    base = prototypes[:, labels] + spec.noise_sigma * rng.standard_normal((dim, c * n))
    views = {}
    for v in range(spec.view_count):
        scale = np.full(c, float(spec.shift_sigma))
        if spec.informative_classes is not None:
            scale[list(spec.informative_classes[v])] /= 10.0
        shift = scale[labels] * rng.standard_normal((dim, c * n))
        x = base + shift
        # float32-exact values so the on-disk format round-trips bit for bit
        views[f"view{v}"] = x.astype(np.float32).astype(np.float64)
    return make_dataset(name, views, labels)


def benchmark_spec(view_count: int = 4, informative_classes=None, seed: int = 42) -> SynthSpec:
    """The desk-scale benchmark: 20 classes x 120 samples, dim 64, noise 7, shift 8.

    Single views land near 65% on 5-way 1-shot. By default each view is
    informative on its own contiguous block of classes.
    """
    if informative_classes is None:
        informative_classes = partition_classes(20, view_count)
    return SynthSpec(class_count=20, samples_per_class=120, dim=64, view_count=view_count,
                     noise_sigma=7.0, shift_sigma=8.0,
                     informative_classes=tuple(tuple(s) for s in informative_classes), seed=seed)
