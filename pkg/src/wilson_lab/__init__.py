"""Monte Carlo Wilson loops for Gaussian two-form fields on a truncated Fock space."""
from .bargmann import FockWorkspace, chi_coeffs, choose_degree, fock_inner, xi_coeffs, zeta_coeffs
from .errors import BasisError, ConditioningError, ConfigError, TailBoundError, WilsonLabError
from .estimator import (EstimateResult, PotentialTable, area_law_limit, exact_su2_free_field,
                        free_field_closed_form, positivity_probe, potential, wilson_mc)
from .functionals import WGrid, YValues, density_moment, make_wgrid, y_terms
from .kernels import BACKEND
from .lie import (LieBasis, Representation, build_basis, casimir, standard_rep, structure_constants,
                  trivial_rep)
from .sampler import FieldSample, WienerConfig, pair_nu, pair_pi, pair_xi, sample_field
from .surface import RectSurface, area, jacobians, nu_coeffs, nu_norm_closed_form, nu_norm_kernel, rho_ab

__version__ = "0.1.0"
