"""Skorohod reflection of walks and Brownian paths, and the Bessel-3 gap."""
from .paths import SampledPath, push_amount, push_down, push_up
from .lattice import (LatticeWalk, discrete_push_amount, discrete_push_down,
                      discrete_push_up, online_push_down_step, online_push_up_step)
from .walks import (KDPState, TripleTrajectory, extract_kdp, kdp_update,
                    reflect_triple, scale_to_path, simulate_endpoints,
                    simulate_kdp_batch, simulate_triple, trial_rng)
from .exact import (Rat, bessel_kernel, chain_marginal, kdp_step_distribution,
                    verify_lemma_identities)
from .statverify import (BES3, HALF_NORMAL, KSReport, MarginalOracle,
                         bes3_unit_cdf, half_normal_unit_cdf, ks_test,
                         mc_bessel_experiment, mc_reflected_bm_experiment)

__version__ = "0.1.0"
