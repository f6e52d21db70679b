"""
Growing the support set with pseudo-labels
==========================================

With unlabeled samples available, every view repeatedly labels its most
confident unlabeled sample and refits. Views pick independently, so they can
disagree about the same sample.
"""

from mdfm.episodes import EpisodeConfig, evaluate
from mdfm.synth import benchmark_spec, generate
from mdfm.transforms import TransformSpec

data = generate(benchmark_spec(view_count=4))

# Self-training works best on centred, length-normalized features.
t = TransformSpec("pca", l2_normalize=True)
base = dict(ways=5, shots=1, episodes=100, base_seed=1, transform=t)

print("u=0  ", evaluate(data, EpisodeConfig(**base)).summary_line())
for u in (5, 20, 50):
    cfg = EpisodeConfig(**base, unlabeled=u, mode="semi", st_iterations=min(5 * u, 100))
    print(f"u={u:<3}", evaluate(data, cfg).summary_line())

# The older rule takes the single highest score in the pool. Least-squares
# scores favour whichever class already has most samples, so it drifts.
cfg = EpisodeConfig(**base, unlabeled=20, mode="semi", st_iterations=100, selection="global")
print("global selection, u=20:", evaluate(data, cfg).summary_line())
