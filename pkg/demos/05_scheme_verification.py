"""Scheme verification at a small desk scale.

The same checks back the `vectormix verify` subcommand: energy
conservation, derivative-growth bounds, the stability identity, the
pathwise decay envelope and scheme self-convergence, each reported as a
machine-readable record.
"""

import numpy as np

from vectormix import (
    SimConfig,
    check_convergence,
    check_energy,
    check_groenwall_envelope,
    check_sobolev_growth,
    check_stability,
    check_translation_flow,
    evolve,
)
from vectormix.harness import run_with_recorder, _random_divfree
from vectormix.spectral import GridSpec

CELLULAR = "fixed_stream:1,1,-0.25,0;1,-1,0.25,0"

# energy identity + pathwise envelope on a short optimal-mixing run
cfg = SimConfig(alpha=1.0, n_cutoff=32, t_end=1.0, init="dipole",
                rtol=1e-8, atol=1e-10, output_interval=0.05)
series = evolve(cfg, cfg.build_provider())
print(check_energy(series, cfg.rtol).to_json())
print(check_groenwall_envelope(series).to_json())

# derivative growth under a steady cellular stirring field
growth_cfg = SimConfig(alpha=1.0, n_cutoff=32, t_end=1.0, init="dipole",
                       rtol=1e-8, atol=1e-10, output_interval=0.1,
                       u_provider=CELLULAR)
pre = run_with_recorder(growth_cfg, growth_cfg.build_provider())
for order in (1, 2):
    print(check_sobolev_growth(growth_cfg, growth_cfg.build_provider(),
                               order, precomputed=pre).to_json())

# stability: two random initial fields keep their separation norm
rng = np.random.default_rng(5)
grid = GridSpec(24)
stab_cfg = SimConfig(alpha=1.0, n_cutoff=24, t_end=1.0, init="dipole",
                     rtol=1e-8, atol=1e-10, output_interval=0.2,
                     u_provider=CELLULAR)
print(check_stability(stab_cfg, _random_divfree(grid, rng),
                      _random_divfree(grid, rng),
                      stab_cfg.build_provider()).to_json())

# self-convergence against a finer reference plus the closed-form anchor
conv_cfg = SimConfig(alpha=1.0, n_cutoff=8, t_end=0.5, init="dipole",
                     rtol=1e-8, atol=1e-10, output_interval=0.5,
                     u_provider=CELLULAR)
print(check_convergence(conv_cfg, conv_cfg.build_provider(),
                        levels=(8, 16, 32), n_ref=64).to_json())
print(check_translation_flow().to_json())
