"""Linear and kernel fastSDA on a synthetic multimodal problem.

Each class is a union of two Gaussian blobs, so a single class mean per
class says little about the data. Subclasses are found by k-means inside
every class, and the projection is fitted by ridge regression onto random
block-structured targets.

    python demos/quickstart.py
"""
import numpy as np

from fastsda import KernelConfig, cluster_within_classes, fit_fastsda, mean_distance_sigma
from fastsda.evaluation import accuracy, gaussian_mixture, knn_predict

rng = np.random.default_rng(0)
x, cls, _ = gaussian_mixture(600, 200, n_classes=3, n_sub=2, rng=rng, spread=0.3)
perm = rng.permutation(x.shape[1])
train, test = perm[:400], perm[400:]

sub = cluster_within_classes(x[:, train], cls[train], 2, rng)


def score(model):
    pred = knn_predict(model.transform(x[:, train]), cls[train], model.transform(x[:, test]))
    return 100 * accuracy(pred, cls[test])


# raw 5-NN as a reference point
pred = knn_predict(x[:, train], cls[train], x[:, test])
print(f"5-NN on raw features     {100 * accuracy(pred, cls[test]):5.1f}%")

linear = fit_fastsda(x[:, train], cls[train], sub, alpha=1.0, rng=rng)
print(f"linear fastSDA (d={linear.d})  {score(linear):5.1f}%")

cfg = KernelConfig(mean_distance_sigma(x[:, train]))
kernel = fit_fastsda(x[:, train], cls[train], sub, alpha=0.1, rng=rng, kind="kernel",
                     kernel=cfg)
print(f"kernel fastSDA (d={kernel.d})  {score(kernel):5.1f}%")
