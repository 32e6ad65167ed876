"""Anisotropic Young functions: growth indices, doubling and the scalar conjugate.

Run with ``python demos/young_functions.py``.
"""

import numpy as np

from anisorlicz import GFunction, ScalarFunction, check_delta2_nabla2, conjugate_scalar, growth_indices

phi = GFunction.power_sum([2, 2, 7])
print("Phi(v) = |v1|^2 + |v2|^2 + |v3|^7")

# Different coordinate directions grow at different rates, so the Euler
# ratio v.grad Phi / Phi ranges between the smallest and largest exponent.
idx = growth_indices(phi)
print(f"growth indices i = {idx.i:.3f}, s = {idx.s:.3f}")

rep = check_delta2_nabla2(phi)
print(f"doubling constants K1 = {rep.K1:.3f}, K2 = {rep.K2:.3f} -> {rep.verdict.value}")



def exp_profile(v):
    r = np.linalg.norm(v, axis=-1)
    return np.expm1(r) - r


# An exponential profile doubles faster and faster at infinity.
expo = GFunction.from_callable(2, exp_profile, name="exp")
with np.errstate(over="ignore"):
    print(f"e^|v| - 1 - |v|: Delta2 {check_delta2_nabla2(expo).delta2.value}, "
          f"s = {growth_indices(expo).s}")

# Legendre conjugate of t^p/p is t^q/q with 1/p + 1/q = 1.
p = 3.0
M = ScalarFunction.power(p, 1.0 / p)
Mc = conjugate_scalar(M)
t = np.array([0.1, 1.0, 10.0])
print("conjugate of t^3/3 at", t, "->", Mc.value(t), "expected", t ** 1.5 / 1.5)
