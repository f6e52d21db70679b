"""
PCA and Laplacian Eigenmaps on episode pools
============================================

Transforms are fit per view on the pooled support, unlabeled and query
samples of each episode.
"""

import numpy as np

from mdfm.episodes import EpisodeConfig, evaluate
from mdfm.errors import DisconnectedGraph
from mdfm.synth import benchmark_spec, generate
from mdfm.transforms import LeConfig, TransformSpec, fit_pca, laplacian_eigenmap

# PCA on points along a diagonal line recovers the line.
t = np.linspace(-1, 1, 9)
model = fit_pca(np.vstack([t, t]), 1)
print("direction", model.components[:, 0], "variance", model.explained_variance)

# A 1-D eigenmap splits two loosely joined clusters by sign.
rng = np.random.default_rng(0)
blobs = np.hstack([rng.normal(0, 0.6, (2, 20)), rng.normal(2, 0.6, (2, 20))])
emb = laplacian_eigenmap(blobs, LeConfig(target_dim=1, neighbors=8))[0]
print("left signs", np.sign(emb[:20]).astype(int))
print("right signs", np.sign(emb[20:]).astype(int))

# Clusters too far apart for the kNN graph to join them are refused.
try:
    laplacian_eigenmap(blobs * 10, LeConfig(target_dim=1, neighbors=3))
except DisconnectedGraph as exc:
    print("refused:", exc)

# On the benchmark, compare transforms end to end.
data = generate(benchmark_spec(view_count=4))
for text in ("none", "pca", "pca:16", "le:16,10"):
    cfg = EpisodeConfig(episodes=100, base_seed=3, transform=TransformSpec.parse(text))
    print(f"{text:<9}", evaluate(data, cfg).summary_line())
