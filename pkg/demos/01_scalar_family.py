"""
Polynomial and rational approximants of psi_1 on the real axis
===============================================================

psi_1(z) = z / (e^z - 1) has poles at 2 pi i k, so its Maclaurin series
converges only for |z| < 2 pi.  Adding s pole pairs to the degree-2n
Taylor part pushes the usable range out and the error down.
"""

import numpy as np

from phimf.scalar import psi1, psi_ns, truncation_bound

x = np.linspace(-3 * np.pi, 3 * np.pi, 1000)
exact = psi1(x)

# Pure Taylor part, n = 20: excellent near 0, useless beyond 2 pi
err_poly = np.abs(psi_ns(x, 20, 0) - exact)
print("psi_{20,0}: max error for |x| < pi  :", err_poly[np.abs(x) < np.pi].max())
print("psi_{20,0}: max error on [-3pi, 3pi]:", err_poly.max())

# Mixed approximant, n = 4 and s = 16, with its a-priori bound
err_mixed = np.abs(psi_ns(x, 4, 16) - exact)
bound = truncation_bound(4, 16, np.abs(x))
print("psi_{4,16}: max error on [-3pi, 3pi]:", err_mixed.max())
print("psi_{4,16}: bound at |x| = 3pi      :", truncation_bound(4, 16, 3 * np.pi))

# The bound is nearly attained wherever the error is above rounding
mask = np.abs(x) > 2 * np.pi
print("error / bound for |x| > 2pi, range  :",
      (err_mixed[mask] / bound[mask]).min(), (err_mixed[mask] / bound[mask]).max())

# Error against s at the end of the interval, for a few n
print("\n  s    n=1        n=2        n=4")
for s in (1, 4, 16, 64):
    e = [abs(psi_ns(3 * np.pi, n, s) - psi1(3 * np.pi)) for n in (1, 2, 4)]
    print(f"{s:3d}  " + "  ".join(f"{v:.2e}" for v in e))
