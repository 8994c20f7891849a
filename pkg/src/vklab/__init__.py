"""vklab: numerical verification lab for Hessian-constrained bending energies.

Radially symmetric profiles on the unit disk are stationary points of the
bending energy restricted to the Monge-Ampere-type constraint surface
det Hess V = k.  This package builds such profiles, generates admissible
variations, measures admissibility and stationarity defects, verifies the
rotation-averaging identities behind the symmetrization argument, and
reproduces a family of distinct constraint-sharing stationary profiles.
"""

from .errors import (ConfigError, GridMismatch, IndexOutOfRange, InvalidProfile,
                     NoPlateau, NonFiniteValue, NotAdmissible, PreconditionNotVerified,
                     ResolutionTooCoarse, SpecInvalid, VkLabError)
from .radial import (RadialField, RadialProfile, cof_pairing_radial,
                     cof_pairing_product_form, constant, det_hessian_at,
                     det_hessian_radial, det_hessian_slope_form, disk_integral,
                     energy, energy_density_radial, frobenius_pairing_radial,
                     hessian_l2_norm, paraboloid, profile_from_csv, profile_to_csv,
                     quadrature_grid, quartic)
from .field2d import (Integral2D, RotationAngle, ScalarField2D, SymMatrixField2D,
                      angular_average_matrix, angular_average_scalar, cof_2d, det_2d,
                      field_from_binary, field_from_function, field_to_binary,
                      field_to_csv, hessian_fd, integral_2d, lift_radial,
                      lift_radial_hessian, pairing_2d, rotate_pullback_matrix,
                      rotate_pullback_scalar)
from .stationarity import (StationarityReport, Variation, VerifyConfig,
                           checked_stationarity_defect, detect_plateaus,
                           gen_harmonic_variations, gen_plateau_variations,
                           gen_zero_hessian_variations, is_admissible,
                           stationarity_defect, symmetrize_variation,
                           verify_proposition)
from .multiplicity import (FamilyMember, FamilySpec, build_base_profile,
                           check_energy_equality, check_same_det, flip, flip_pattern,
                           load_family_config, pairwise_distinct,
                           run_multiplicity_experiment)
from .averaging import run_averaging_suite
from .convergence import run_convergence_study

__version__ = "0.1.0"
