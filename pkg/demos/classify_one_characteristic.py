"""Classify a single characteristic two ways and watch q along it.

The closed-form minimum of q and a direct integration of the linearised
system should agree on the verdict; for a blow-up datum the integration
also gives the time at which q first reaches zero.
"""
import numpy as np

from ep_blowup import InitialDatum, classify, criterion_constants, integrate_characteristic
from ep_blowup.dynamics import oracle_classify

data = {
    "near equilibrium": InitialDatum(0.5, 0.0, 0.3, 0.1),
    "strong compression": InitialDatum(0.5, 0.0, 1.5, 0.3),
    "cold start, F0 = G0 = 0": InitialDatum(0.0, 0.0, 0.0, 0.6),
}

for name, d in data.items():
    closed = classify(d)
    oracle = oracle_classify(d)
    print(f"{name:26s} closed: {closed.kind:7s} q*={closed.q_star:+.6f}   "
          f"oracle: {oracle.kind:7s} q_min={oracle.q_star:+.6f}")
    if closed.t_star is not None:
        print(f"{'':26s} first zero of q at t = {closed.t_star:.6f}")

# the constants behind the formula for one datum
c = criterion_constants(data["near equilibrium"])
print("\nM0 = %.6f  C4 = %.6f  envelope = [%.6f, %.6f]" % (c.M0, c.C4, c.M_minus, c.M_plus))

# trajectory of the blow-up datum, stopped at q = 0
series = integrate_characteristic(data["strong compression"])
print("\nstrong compression: %d samples, q falls from %.3f to %.2e at t = %.6f"
      % (len(series.q), series.q[0], series.q[-1], series.t[-1]))
print("gradients |(u, v)| reach %.1e while r stays at most %.4f"
      % (np.hypot(series.u[-1], series.v[-1]), np.max(series.r)))
print("density at the last sample: %.3e" % series.n[-1])
