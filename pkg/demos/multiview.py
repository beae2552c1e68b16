"""Multi-view SDA on two complementary views.

A latent 8-dimensional multimodal signal is split in half; each view is a
random linear map of one half plus noise, so neither view alone carries
all of the class structure. Every view is clustered separately and the
per-view projections are fitted jointly into one shared space.

    python demos/multiview.py
"""
import numpy as np

from fastsda import cluster_within_classes, fit_fastsda, fit_mvsda
from fastsda.evaluation import accuracy, gaussian_mixture, knn_predict

rng = np.random.default_rng(2)
latent, cls, _ = gaussian_mixture(500, 8, n_classes=4, n_sub=2, rng=rng, spread=1.0)
views = [rng.normal(size=(dim, 4)) @ latent[rows] + rng.normal(size=(dim, 500))
         for dim, rows in ((20, slice(0, 4)), (35, slice(4, 8)))]
perm = rng.permutation(500)
train, test = perm[:350], perm[350:]

subs = [cluster_within_classes(v[:, train], cls[train], 2, rng) for v in views]
model = fit_mvsda([v[:, train] for v in views], cls[train], subs, alpha=1.0, rng=rng)

emb_train = model.transform([v[:, train] for v in views])
emb_test = model.transform([v[:, test] for v in views])
pred = knn_predict(emb_train, cls[train], emb_test)
print(f"MvSDA, {model.n_views} views, d={model.d}: {100 * accuracy(pred, cls[test]):.1f}%")

for i, v in enumerate(views):
    single = fit_fastsda(v[:, train], cls[train], subs[i], alpha=1.0, rng=rng)
    pred = knn_predict(single.transform(v[:, train]), cls[train], single.transform(v[:, test]))
    print(f"fastSDA on view {i} alone: {100 * accuracy(pred, cls[test]):.1f}%")
