"""Mixed polynomial-rational approximation of psi_1(z) = z / (e^z - 1) and its matrix function."""

from .errors import (BandViolation, DegreeTooLarge, DimensionMismatch, MaxSweepsExceeded,
                     NoConvergence, NotPositiveDefinite, NotSymmetric, PhimfError,
                     PoleProximity, Singular)
from .scalar import phi1, psi1, psi_ns, rational_part, taylor_part, truncation_bound
from .matrix import (CirculantSpec, SymBandMatrix, build_circulant, build_kms,
                     build_quasiseparable_example, build_test_matrix, build_tridiag_toeplitz,
                     jacobi_eig)
from .matfun import (ErrorReport, error_report, phi_exact_circulant, phi_exact_sym,
                     psi_exact_circulant, psi_exact_sym, psi_poly_matrix, psi_rational_apply,
                     psi_rational_matrix)
from .bvp import BvpProblem, BvpSolution, solve_bvp, verify_bvp
from .decay import decay_bound_entry, decay_params, verify_decay
from .roots import zeros_psi_ns

__version__ = "0.1.0"
