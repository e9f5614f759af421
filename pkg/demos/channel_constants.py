"""How measurement corruption rescales the sign surrogate.

The expected sign-weighted pair surrogate is a rank-one multiple of the
signal's outer product.  The multiplier depends only on the scalar channel
the intensities pass through, so it can be estimated by Monte Carlo on pairs
of Exp(1) draws, with no sensing vectors involved.  This script sweeps the
built-in channels and compares the estimates against the closed forms where
one is known.

Run:  python3 demos/channel_constants.py
"""

from onebitphase import bench

cfg = bench.ExperimentConfig(
    kind="lambda-sweep",
    samples=200_000,
    sigmas=(0.25, 1.0, 4.0),
    alphas=(0.5, 2.0, 8.0),
    etas=(0.5, 2.0),
    seed=7,
)

header, rows, summary = bench.run(cfg)

print("channel constant sweep (200k Monte Carlo pairs per row)")
print(f"{'family':>10} {'param':>6} {'estimate':>9} {'std err':>8} {'closed':>7}")
for family, param, est, se, closed in rows:
    closed_s = f"{closed:.4f}" if closed is not None else "-"
    param_s = f"{param:.3g}" if param is not None else "-"
    print(f"{family:>10} {param_s:>6} {est:9.4f} {se:8.1e} {closed_s:>7}")

print()
print("Reading the table:")
print(" * identity sits at 1, the baseline scaling.")
print(" * exponential readout noise shrinks the constant toward zero as")
print("   sigma grows: comparisons between nearly equal intensities start")
print("   to flip, which dilutes the rank-one component.")
print(" * tanh compression is a monotone distortion of each intensity, so")
print("   it can never flip a comparison; in exact arithmetic the constant")
print("   is 1 for every strength.  The small dip at alpha=8 is the")
print("   simulated detector itself: float64 tanh saturates to exactly 1.0")
print("   for large inputs, and saturated pairs tie instead of voting.")
print(" * photon-count quantization loses little until the per-photon")
print("   scale eta approaches the signal scale.")
