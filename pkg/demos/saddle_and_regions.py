"""Saddle geometry: solving Phi(s) = log z and mapping the growth strip.

Phi = (log gamma)' is increasing on the positive ray and univalent in a
sector, so each z in the image has one saddle s_z = rho_z e^{i theta_z}.
The saddle angle controls everything: |theta_z| < pi/2 puts z in the
region where the series E grows like its asymptotic form, larger angles
put it where the series collapses to o(1).

For the log-scale weight exp(s loglog(s+e)) the strip around the
positive axis is extremely thin (half-width ~ (pi/2)/r) and the script
traces it both from the solver and from the two-term expansion.
"""
import math

import numpy as np

from mellin_saddle import (LogSurfacePoint, boundary_psi, classify,
                           gamma_shift, iterated_log, solve)

g = gamma_shift(0.0)
print("saddles of the factorial weight along the ray (Phi = digamma):")
print(f"{'r':>8} {'rho_z':>12} {'residual':>10}")
for r in (5.0, 20.0, 100.0, 1000.0):
    sol, tag = solve(g, LogSurfacePoint(math.log(r), 0.0))
    print(f"{r:8.0f} {sol.rho_z:12.5f} {sol.residual:10.1e}")

print("\ncontinuation in the argument at fixed r = 20:")
print(f"{'psi':>8} {'theta_z':>10} {'rho_z':>10} {'region vs pi/2':>15}")
for psi in np.linspace(0.0, 2.8, 8):
    z = LogSurfacePoint(math.log(20.0), float(psi))
    sol, _ = solve(g, z)
    tag = classify(g, z, math.pi / 2)
    print(f"{psi:8.2f} {sol.theta_z:10.4f} {sol.rho_z:10.3f} {tag.kind:>15}")

il = iterated_log(1.0, 1.0, 1, math.e)
print(f"\ngrowth strip half-width for {il.label}:")
print(f"{'r':>10} {'solver psi*':>14} {'(pi/2)(1/r + (pi^2/8-1/2)/r^3)':>32} "
      f"{'rel diff':>10}")
for log_r in (3.0, 5.0, 8.0):
    r = math.exp(log_r)
    psi = boundary_psi(il, log_r, math.pi / 2)
    model = (math.pi / 2) * (1.0 / r + (math.pi**2 / 8 - 0.5) / r**3)
    print(f"{r:10.1f} {psi:14.6e} {model:32.6e} {abs(psi/model-1):10.2e}")

print("\nfixed argument, growing modulus: the point leaves the strip")
print("(theta_z ~ psi/eps(rho_z) grows since eps -> 0):")
for r in (3.0, 6.0, 12.0):
    z = LogSurfacePoint(math.log(r), 0.05)
    sol, _ = solve(il, z)
    if sol is None:
        print(f"  r={r:5.1f}: saddle escaped the sector (outside every strip)")
    else:
        print(f"  r={r:5.1f}: theta_z = {sol.theta_z:.4f}, "
              f"rho_z = {sol.rho_z:.3e}")
