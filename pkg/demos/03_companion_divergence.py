"""
Scaled companion matrices: where the Maclaurin series breaks down
==================================================================

gamma F, with F the companion matrix of z^d - 1, has its eigenvalues on the
circle of radius gamma.  The reference values come from the discrete
Fourier diagonalization, so large d is cheap.
"""

from phimf.matfun import error_report

d = 256
print("gamma      err_p       err_r(N=50)")
for gamma in (2, 4, 8, 16, 32, 64):
    rep = error_report("companion", d, 50, 3, gamma=gamma)
    err_p = "divergent" if rep.divergent else f"{rep.err_p:.2e}"
    print(f"{gamma:5d}  {err_p:>10s}  {rep.err_r:.2e}")

# Past gamma = 2 pi the polynomial error explodes.  More poles repair the
# rational approximant even at gamma = 64.
print("\ngamma = 64, rational error against N:")
for N in (50, 100, 200, 400):
    print(f"  N={N:3d}  err_r={error_report('companion', d, N, 3, gamma=64).err_r:.2e}")
