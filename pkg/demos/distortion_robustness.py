"""Sign comparisons shrug off saturating detectors; intensities do not.

A detector that compresses large intensities (modeled here as tanh(alpha b))
destroys the information the intensity-weighted estimator relies on, but a
comparison between two intensities survives any strictly increasing
distortion untouched.  This script sweeps the compression strength and
recovers the same signal with both spectral estimators.

Run:  python3 demos/distortion_robustness.py
"""

from onebitphase import bench

cfg = bench.ExperimentConfig(
    kind="distortion-sweep",
    n=32,
    ratio=32,
    trials=5,
    alphas=(0.125, 1.0, 8.0),
    seed=11,
)

header, rows, summary = bench.run(cfg)

print("median squared recovery error vs tanh compression strength")
print(f"(n={cfg.n}, {cfg.ratio}n measurement pairs, {cfg.trials} trials)")
print(f"{'alpha':>6} {'method':>12} {'median':>9} {'iqr':>9}")
for alpha, method, median, iqr, _ in rows:
    print(f"{alpha:6.3f} {method:>12} {median:9.4f} {iqr:9.4f}")

print()
print("The sign-based column is bit-identical across alpha: a monotone")
print("distortion cannot change which intensity of a pair is larger, so the")
print("one-bit data, and everything computed from it, never changes.  The")
print("intensity-weighted estimator degrades steadily as saturation flattens")
print("the large intensities it needs to weight by.")
