"""Multi-peak ring constructions for a three-component nonlinear Hartree system.

Library layout:

* ``radial``          ground state w of -Δw + w = φ_w w and its identities
* ``potential``       Newtonian potentials (radial, FFT grid) and two-center integrals
* ``profiles``        model parameters, synchronized pair (αw, γw), rescaled bump W
* ``configurations``  interleaved peak rings, sign variants, symmetry checks
* ``ring_kernel``     the inter-ring distance sum g(x, y, k) and its bounds
* ``energy``          ansatz assembly, full grid energy, pairwise expansion, residuals
* ``reduced``         reduced-energy constants and landscape functions f, F̂
* ``landscape``       theorem-case verdicts, interior maximizer, peak radii
* ``cli``             the ``hartree-rings`` command line front end
"""

from .configurations import PeakConfig, build_config, s_k_window, symmetry_deviation
from .energy import (AnsatzFields, EnergyBreakdown, assemble_ansatz, full_energy,
                     pairwise_energy, pairwise_energy_parts, pde_residual,
                     residual_scaling_study)
from .landscape import (CaseVerdict, MaximizerResult, landscape_scan, maximize_f,
                        peak_radii, theorem_conditions)
from .potential import (Field3D, grid_potential, load_field, radial_potential,
                        save_field, two_center_integral)
from .profiles import (DomainVerdict, PotentialSpec, SyncCoefficients, SystemParams,
                       domain_membership, radial_pde_residual, scaled_bump,
                       sync_coefficients)
from .radial import (DecayReport, GroundStateStats, RadialGrid, RadialProfile,
                     SolverOptions, decay_report, ground_state_stats, load_profile,
                     save_profile, solve_ground_state)
from .reduced import (ReducedConstants, F_hat, asymptotic_energy, compute_constants,
                      f_xy)
from .ring_kernel import RingSumReport, g_sum, mixed_distance_sum, ring_bounds

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
