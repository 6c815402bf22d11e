"""Four-class pulse dataset: {square, triangle} x {left, right} on a zero baseline."""

from dataclasses import dataclass

import numpy as np

from .errors import OtwError
from .evaluation import LabeledDataset

CLASS_NAMES = ("square-left", "square-right", "triangle-left", "triangle-right")


@dataclass(frozen=True)
class SyntheticSpec:
    """Geometry and noise of the synthetic pulses.

    ``left`` and ``right`` are the start indices of the pulse; the pulse
    occupies ``width`` samples from there.
    """

    length: int = 128
    per_class: int = 100
    width: int = 16
    left: int = 16
    right: int = 96
    noise: float = 0.0
    height: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if min(self.length, self.per_class, self.width) < 1:
            raise OtwError("length, per_class and width must be positive")
        if self.noise < 0 or self.height <= 0:
            raise OtwError("noise must be >= 0 and height > 0")
        for start in (self.left, self.right):
            if start < 0 or start + self.width > self.length:
                raise OtwError(
                    f"pulse at {start} with width {self.width} does not fit in length {self.length}"
                )


def pulse(kind, width, height=1.0):
    """A ``"square"`` plateau or a symmetric ``"triangle"`` ramp of the given width."""
    if kind == "square":
        return np.full(width, float(height))
    k = np.arange(width)
    return height * np.minimum(k + 1, width - k) / np.ceil(width / 2)


def prototypes(spec):
    """Noise-free series for the four classes, in label order."""
    out = np.zeros((4, spec.length))
    for label, (shape, start) in enumerate(
        [("square", spec.left), ("square", spec.right), ("triangle", spec.left), ("triangle", spec.right)]
    ):
        out[label, start : start + spec.width] = pulse(shape, spec.width, spec.height)
    return out


def make_synthetic(spec=None):
    """Generate ``4 * per_class`` series, grouped by class, with Gaussian noise.

    Deterministic for a fixed ``spec.seed`` (numpy PCG64 generator).
    """
    spec = SyntheticSpec() if spec is None else spec
    protos = prototypes(spec)
    labels = np.repeat(np.arange(4), spec.per_class)
    X = protos[labels].copy()
    if spec.noise > 0:
        rng = np.random.default_rng(spec.seed)
        X += rng.normal(0.0, spec.noise, size=X.shape)
    return LabeledDataset(X, labels, name=f"synthetic-noise{spec.noise:g}")


def stratified_split(data, train_frac=0.75, seed=0):
    """Per-class seeded split into ``(train, test)`` datasets."""
    rng = np.random.default_rng(seed)
    tr, te = [], []
    for c in data.classes:
        idx = np.flatnonzero(data.labels == c)
        idx = idx[rng.permutation(idx.size)]
        cut = int(round(train_frac * idx.size))
        tr.extend(idx[:cut])
        te.extend(idx[cut:])
    return data.subset(np.sort(tr), data.name + "-train"), data.subset(np.sort(te), data.name + "-test")
