"""
Choosing view weights from training losses
==========================================

Each view's classifier reports how badly it fits its own support set. The
fusion weights trade that loss against an L2 penalty, so ``eta`` controls how
far the weights may move away from uniform.
"""

import numpy as np

from mdfm.fusion import fusion_objective, solve_weights

# Two views, the second fits its support set worse.
losses = [0.0, 0.5]
print("eta=0.5 ->", solve_weights(losses, eta=0.5).omega)

# Small eta lets the better view take everything; large eta flattens the weights.
for eta in (0.05, 0.5, 5.0, 500.0):
    omega = solve_weights(losses, eta).omega
    print(f"eta={eta:<6} omega={np.round(omega, 4)}")

# Adding the same constant to every loss changes nothing.
print(solve_weights([10.0, 10.5], 0.5).omega)

# The solution beats any other point of the simplex on the weighted objective.
rng = np.random.default_rng(0)
f = rng.uniform(0, 2, 4)
best = solve_weights(f, 0.3).omega
others = rng.dirichlet(np.ones(4), 1000)
print("optimal:", fusion_objective(best, f, 0.3))
print("best random:", min(fusion_objective(p, f, 0.3) for p in others))
