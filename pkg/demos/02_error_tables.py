"""
Matrix errors for the symmetric test matrices
=============================================

err_p is the relative 2-norm error of the Maclaurin polynomial with N = 50
terms, err_r that of the rational approximant psi_{3,47}.  The reference
psi_1(A) comes from a Jacobi eigendecomposition.
"""

from phimf.matfun import error_report
from phimf.matrix import build_test_matrix, spectral_radius

for label in ("tridiag", "qs", "kms"):
    A = build_test_matrix(label, 128)
    rho = spectral_radius(A)
    rep = error_report(label, 128)
    print(f"{label:8s} d=128 rho={rho:6.3f} err_p={rep.err_p:.3e} err_r={rep.err_r:.3e}")

# The tridiagonal example has spectrum in (2, 6), close to the radius 2 pi of
# the Maclaurin series, so the polynomial barely converges.  The KMS matrix
# with rho = 0.8 has its largest eigenvalue near 9 > 2 pi: the polynomial
# diverges there while the rational approximant is unaffected.
