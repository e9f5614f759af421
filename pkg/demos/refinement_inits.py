"""Alternating minimization, started four different ways.

The refinement stage alternates between the best phase assignment for the
current iterate and an exact least-squares step.  Its endpoint and speed
depend on where it starts, so this script runs it from a random unit vector
and from the three spectral initializers, on the same Gaussian measurement
pairs, and prints the median error trajectory.

Run:  python3 demos/refinement_inits.py
"""

from onebitphase import bench

cfg = bench.ExperimentConfig(
    kind="altmin-convergence",
    n=128,
    ratio=8,
    trials=5,
    max_iters=60,
    seed=3,
)

header, rows, summary = bench.run(cfg)

curves = {}
for init, iteration, median in rows:
    curves.setdefault(init, []).append(median)

print("median squared error by refinement iteration")
print(f"(n={cfg.n}, {cfg.ratio}n measurement pairs, {cfg.trials} trials)")
marks = [0, 5, 10, 20, 40, 60]
print(f"{'iteration':>10}" + "".join(f"{k:>11}" for k in marks))
for init, values in curves.items():
    cells = "".join(f"{values[min(k, len(values) - 1)]:11.2e}" for k in marks)
    print(f"{init:>10}" + cells)

print()
print("Iteration 0 is the initialization error itself.  All starts converge")
print("on this benign landscape, but the spectral ones begin two orders of")
print("magnitude closer and hit the floor in a fraction of the iterations;")
print("the random start pays for the warm-up with many extra rounds.")
