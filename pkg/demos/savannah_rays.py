"""Anisotropic spread in a savannah: c*(theta) against the ray speed C(theta)."""

import math

from impulse_front import analytic

r, s, a11, a22 = 1.0, 0.1, 2.0, 1.0
rep = analytic.savannah_bounds(r, s, a11, a22, step_deg=15.0)
print(f"equilibrium density N* = {rep.N_star:.6f}")
print(" theta   c*(theta)   C(theta)   closed form")
for th, c, C, Cc in zip(rep.theta, rep.c_star, rep.C, rep.C_closed):
    print(f"{math.degrees(th):6.1f}   {c:9.5f}   {C:8.5f}   {Cc:9.5f}")
