"""
A distance layer inside a small network
=======================================

The first layer of the network outputs the distance from its input to one
learnable reference series. Gradients flow into both the input and the
reference. We compare an OTW layer with a DTW layer on the synthetic task.
"""

import numpy as np

from otw import OtwParams
from otw.baselines import DtwParams
from otw.net import MlpModel, make_feature_layer, time_to_error, train
from otw.synthetic import SyntheticSpec, make_synthetic, stratified_split

train_set, test_set = stratified_split(make_synthetic(SyntheticSpec(noise=0.0)), 0.75, seed=0)
n = train_set.length

for kind, params in (("otw", OtwParams(beta=0.1)), ("dtw", DtwParams())):
    rng = np.random.default_rng(0)
    layer = make_feature_layer(kind, 1, n, rng, params)
    model = MlpModel(layer, [128, 128], 4, rng, feature_scale=1.0 / n)
    history = train(model, train_set, test_set, epochs=200, seed=0, target_error=0.0)
    last = history[-1]
    print(f"{kind}-net: test error {last.test_error:.3f} after {last.epoch} epochs, "
          f"time to zero error {time_to_error(history):.2f} s")
