"""Minimal-mixing-time calculators and decay envelopes.

Lower bounds on ||u(t)||_{H^-alpha} under a W^{1,q} stirring budget come
in four regimes depending on the sign of q(1 - alpha) - d.  The algebraic
regimes admit finite-time mixing; the q = inf, alpha = 1 corner only
allows exponential decay.
"""

import math

import numpy as np

from vectormix import BoundInput, regime_select, tmin

print("regime classification (d = 2):")
for q, alpha in [(2.0, 1.0), (math.inf, 0.5), (4.0, 0.5), (math.inf, 1.0), (8.0, 0.75)]:
    regime = regime_select(q, alpha, 2)
    print(f"  q = {q:>4}, alpha = {alpha:4.2f}  ->  {regime.value}")

print("\nunity-parameter minimal mixing times:")
sub = tmin(BoundInput(q=2.0, alpha=1.0, d=2, h_norm0=1, l2_norm0=1, budget=1))
sup = tmin(BoundInput(q=math.inf, alpha=0.5, d=2, h_norm0=1, l2_norm0=1, budget=1))
crit = tmin(BoundInput(q=4.0, alpha=0.5, d=2, h_norm0=1, l2_norm0=1, budget=1, r=8.0))
print(f"  subcritical (q=2, alpha=1)      : t_min = {sub.t_min:.6f}")
print(f"  supercritical (q=inf, alpha=1/2): t_min = {sup.t_min:.6f}")
print(f"  critical (q=4, alpha=1/2, r=8)  : t_min = {crit.t_min:.6f}")

print("\nenvelope for a dipole-scale example (subcritical):")
inp = BoundInput(q=2.0, alpha=1.0, d=2, h_norm0=2.458, l2_norm0=3.352, budget=1.0)
res = tmin(inp)
print(f"  t_min = {res.t_min:.4f}")
for t in np.linspace(0.0, 1.25 * res.t_min, 6):
    print(f"  envelope({t:6.3f}) = {res.envelope(t):.6f}")

print("\nexponential regime (q = inf, alpha = 1) with a constant budget g = 0.4:")
exp_res = tmin(BoundInput(q=math.inf, alpha=1.0, d=2, h_norm0=2.458, l2_norm0=3.352, budget=0.4))
print(f"  t_min = {exp_res.t_min} (never mixes completely)")
for t in (0.0, 1.0, 5.0):
    print(f"  envelope({t}) = {exp_res.envelope(t):.6f} "
          f"= h0 * exp(-0.4 * {t})")
