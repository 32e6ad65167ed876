"""From an anisotropic Young function to its optimal Sobolev target.

Two growth examples are compared: exponents (2,2,7) in three dimensions and
(2,2,2,7) in four.  The rearranged function grows like the harmonic-mean
exponent p_bar, and the Sobolev conjugate like p_bar* = n p_bar / (n - p_bar).
"""

import numpy as np

from anisorlicz import (
    GFunction,
    check_integrability,
    check_phi2,
    compute_phi_circ,
    compute_phi_n,
    log_slope,
    power_sum_conjugate_exponent,
)

for exps in [(2, 2, 7), (2, 2, 2, 7)]:
    n = len(exps)
    phi = GFunction.power_sum(exps)
    exact = power_sum_conjugate_exponent(exps, n)
    phi_circ = compute_phi_circ(phi)
    integ = check_integrability(phi_circ, n)
    phi_n = compute_phi_n(phi_circ, n)
    r = np.geomspace(1e-1, 1e2, 61)
    print(f"exponents {exps}, n = {n}")
    print(f"  p_bar = {exact.p_bar}, fitted slope of phi_circ {log_slope(phi_circ.t, phi_circ.y):.5f}")
    print(f"  integrability at 0: {integ.phi0.value}, divergence at infinity: {integ.phi1.value}")
    print(f"  p_bar* = {exact.p_star} = {float(exact.p_star):.5f}, "
          f"fitted slope of Phi_n {log_slope(r, phi_n.value(r)):.5f}")

    # Phi must grow strictly slower than Phi_n in every direction.  In four
    # dimensions the x4 direction grows like |v|^7 while Phi_n grows like
    # |v|^{56/9}, so the comparison fails.
    verdict, dom = check_phi2(phi, phi_n)
    print(f"  Phi << Phi_n: {verdict.value} (tail slopes {dom.slope_a:.3f} vs {dom.slope_b:.3f})")
