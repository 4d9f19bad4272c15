"""
Where the approximants vanish
=============================

psi_{n,s} = N / D with D = prod_k ((z/2pi)^2 + k^2).  The zeros of N fill
a curve in the right half-plane that follows the poles of psi_1 upward.
"""

import numpy as np

from phimf.roots import zeros_psi_ns
from phimf.scalar import psi_ns

for n in (0, 1):
    rs = zeros_psi_ns(n, 80)
    z = rs.roots
    print(f"psi_{{{n},80}}: {len(z)} zeros, max |psi| at zeros {np.abs(psi_ns(z, n, 80)).max():.1e}")
    print(f"  real parts in [{z.real.min():.2f}, {z.real.max():.2f}],"
          f" |Im| up to {np.abs(z.imag).max():.1f}")
    print(f"  in the closed right half-plane: {np.mean(z.real >= -1e-6):.0%}")
    # a few zeros ordered by height
    upper = z[z.imag > 0][:5]
    print("  lowest in the upper half-plane:", np.round(upper, 3))
