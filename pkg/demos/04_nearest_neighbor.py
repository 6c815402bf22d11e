"""
1-NN classification with validated hyperparameters
==================================================

Parameters are chosen on an 80/20 split of the training set, then the
winning metric classifies the test set by its nearest training series.
"""

from otw.evaluation import HyperGrid, one_nn_classify, select_params
from otw.synthetic import SyntheticSpec, make_synthetic, stratified_split

data = make_synthetic(SyntheticSpec(per_class=25, noise=0.1, seed=1))
train, test = stratified_split(data, 0.75, seed=1)
n = train.length

for name, grid in (("otw", HyperGrid.otw(n)), ("dtw", HyperGrid.dtw(n))):
    best, scores = select_params(train, grid, seed=0, return_scores=True)
    _, err = one_nn_classify(train, test, best)
    print(f"{name}: {len(grid)} candidates, picked {best.tag}, "
          f"validation accuracy {max(scores):.2f}, test error {err:.3f}")
