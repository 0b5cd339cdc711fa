"""Traveling fronts of a public-goods-game reaction-diffusion system.

Library surface, one module per concern:

- ``model``     rescaled constants, reaction terms, Jacobian, coordinate maps
- ``grid``      uniform truncated grid, difference operators, profile I/O
- ``kpp``       scalar front solves seeding the bounds
- ``bounds``    vector upper/lower solutions, inequality margins, ordering
- ``wave``      monotone iteration, phase normalization, decay fits, verdicts
- ``spectrum``  essential-spectrum geometry, weighted operator, eigensolves
- ``dynamics``  IMEX time stepping and the stability/instability/spreading runs
- ``cli``       reproducible command-line experiments
"""

from .bounds import (BoundPair, build_lower, build_upper, default_l,
                     make_bounds, order_shift, verify_bound)
from .dynamics import (SimConfig, Trace, fit_decay_constant,
                       instability_experiment, perturb, run_simulation,
                       spreading_experiment, spreading_speed,
                       stability_experiment, weighted_norm)
from .grid import (Grid, Profile, apply_advection_diffusion, load_profile,
                   make_grid, residual, save_profile)
from .kpp import (KppNonlinearity, ScalarProfile, lower_nonlinearity,
                  plateau_of, solve_kpp, upper_nonlinearity)
from .model import (ModelParams, StateVec, derive_params, jacobian, reaction,
                    to_original, to_transformed)
from .spectrum import (OperatorMatrix, SpectrumReport, WeightPair,
                       WeightWindow, assemble_weighted_operator,
                       essential_spectrum_max, rightmost_eigenvalues,
                       spectrum_curves, translation_mode_check, weight_window)
from .wave import (DecayFit, IterationReport, SpeedVerdict, check_monotone,
                   derivative_profile, fit_decay, normalize_phase, solve_wave,
                   subcritical_verdict)

__version__ = "0.1.0"
