"""Closed-form leading asymptotics of K and E at the saddle.

With s = s_z the root of Phi(s) = log z and eps = eps(s_z):

    K(z)            ~ sqrt(s / (2 pi eps)) * exp(-s eps)
    z E(z) + 1/g(0) ~ sqrt(2 pi s / eps)   * exp(+s eps)     inside the
                      growth region, and o(1) outside it.

Both use L/L' = s/eps and s^2 L'/L = s eps.  The square root is positive
on the positive ray and continued along the solver's path: its argument
is assembled from the continuously tracked theta_z, never snapped to a
principal branch.  Magnitudes ride on log_scale so nothing overflows.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .catalog import AdmissibleFunction
from .errors import QuadratureError, RegionError
from .quadrature import adaptive_integrate
from .saddle import RegionTag, SaddleSolution, solve
from .surface import LogSurfacePoint, Tolerances

_SCALE_LIMIT = 300.0


@dataclass(frozen=True)
class AsymptoticValue:
    """value * exp(log_scale) is the asserted quantity."""

    value: complex
    log_scale: float
    region: RegionTag
    warnings: List[str] = field(default_factory=list)

    @property
    def magnitude_log(self) -> float:
        a = abs(self.value)
        return (math.log(a) if a > 0 else -math.inf) + self.log_scale


def _split_scale(logval: complex, region: RegionTag, warnings) -> AsymptoticValue:
    re, im = logval.real, logval.imag
    if abs(re) <= _SCALE_LIMIT:
        return AsymptoticValue(cmath.exp(logval), 0.0, region, list(warnings))
    return AsymptoticValue(cmath.exp(1j * im), re, region, list(warnings))


def _log_sqrt_ratio(f: AdmissibleFunction, sol: SaddleSolution) -> complex:
    """log sqrt(s_z / eps(s_z)) with the branch carried from the ray: the
    argument of s_z is the solver's theta_z, the argument of eps stays
    principal (eps hugs the positive axis throughout the sector)."""
    eps = complex(f.epsilon(np.complex128(sol.s_z)))
    arg_q = sol.theta_z - cmath.phase(eps)
    log_abs_q = math.log(abs(sol.s_z)) - math.log(abs(eps))
    return 0.5 * complex(log_abs_q, arg_q)


def _s_eps(f: AdmissibleFunction, sol: SaddleSolution) -> complex:
    return sol.s_z * complex(f.epsilon(np.complex128(sol.s_z)))


def K_asymptotic(f: AdmissibleFunction, z: LogSurfacePoint, *,
                 delta: float = 0.1) -> AsymptoticValue:
    """Leading decay form sqrt(s/(2 pi eps)) exp(-s eps) at s = s_z.

    Valid inside the sector image Omega(alpha0 - delta); raises
    RegionError elsewhere.
    """
    sol, tag = solve(f, z)
    alpha = f.alpha0 - delta
    if sol is None or abs(sol.theta_z) >= alpha or sol.rho_z <= tag.rho0_used:
        raise RegionError(
            f"decay asymptotics not applicable at {z}: saddle "
            f"{'missing' if sol is None else f'at theta={sol.theta_z:.4g}, rho={sol.rho_z:.4g}'}"
            f" is outside Omega({alpha:.4g}, {tag.rho0_used:.4g})")
    logval = _log_sqrt_ratio(f, sol) - 0.5 * math.log(2.0 * math.pi) \
        - _s_eps(f, sol)
    region = RegionTag("inside", abs(sol.theta_z), tag.rho0_used)
    return _split_scale(logval, region, [])


def E_asymptotic(f: AdmissibleFunction, z: LogSurfacePoint, *,
                 delta: float = 0.05) -> AsymptoticValue:
    """Asserted value of z E(z) + 1/gamma(0).

    Inside Omega(pi/2 + delta): the saddle growth form; outside: 0 (the
    sum is o(1) there).  In the transition annulus both candidate terms
    are reported through warnings.  The additive o(1) term is always
    reported as a warning band, not folded into the value.
    """
    warnings = []
    eps_bar = f.epsilon_limsup_estimate()
    if eps_bar >= 2.0:
        warnings.append(
            f"eps limsup estimate {eps_bar:.3g} >= 2: growth-side asymptotics "
            "may need the generalized form; treat the value as indicative")
    band = max(1.0, abs(f.one_over_gamma0))
    warnings.append(f"additive o(1) band of width {band:.3g} not folded in")

    sol, tag = solve(f, z)
    half_pi = 0.5 * math.pi
    if sol is None or abs(sol.theta_z) > half_pi + delta:
        kind = "no_saddle" if sol is None else "outside"
        alpha = None if sol is None else abs(sol.theta_z)
        return AsymptoticValue(0.0, 0.0, RegionTag(kind, alpha, tag.rho0_used),
                               warnings)
    logval = _log_sqrt_ratio(f, sol) + 0.5 * math.log(2.0 * math.pi) \
        + _s_eps(f, sol)
    if abs(sol.theta_z) >= half_pi - delta:
        warnings.append(
            "transition annulus (|theta_z| within delta of pi/2): the saddle "
            f"term exp({logval.real:.4g}) and the o(1) band may be comparable; "
            "both are reported, neither dominates provably")
    region = RegionTag("inside", abs(sol.theta_z), tag.rho0_used)
    return _split_scale(logval, region, warnings)


def local_gaussian_reference(f: AdmissibleFunction,
                             sol: SaddleSolution) -> AsymptoticValue:
    """i sqrt(2 pi s/eps) exp(-s eps) at s_z: the model value the local
    saddle integral converges to."""
    logval = _log_sqrt_ratio(f, sol) + 0.5 * math.log(2.0 * math.pi) \
        + 0.5j * math.pi - _s_eps(f, sol)
    return _split_scale(logval, RegionTag("inside", abs(sol.theta_z), 0.0), [])


def local_gaussian_saddle(f: AdmissibleFunction, z: LogSurfacePoint, *,
                          delta: float = 0.1, delta1: float = 0.125,
                          tol: Optional[Tolerances] = None) -> complex:
    """Integral of e^{G(z, s)} over the steepest-descent chord through the
    saddle: s = s_z + i t e^{i theta_z / 2}, |t| <= rho_z^{1 - delta1}.

    Rescaled internally by e^{G(z, s_z)}; compare against
    local_gaussian_reference.
    """
    tols = tol or Tolerances.for_quadrature()
    sol, tag = solve(f, z)
    if sol is None or abs(sol.theta_z) >= f.alpha0 - delta:
        raise RegionError(f"local saddle integral needs an interior saddle at {z}")
    half_len = sol.rho_z ** (1.0 - delta1)
    direction = 1j * cmath.exp(0.5j * sol.theta_z)
    g_saddle = complex(f.log_gamma(np.complex128(sol.s_z))) - sol.s_z * z.log_z

    def integrand(t):
        s = sol.s_z + np.asarray(t, dtype=float) * direction
        g = f.log_gamma(s) - s * z.log_z
        return np.exp(g - g_saddle)

    seeds = np.linspace(-half_len, half_len, 17)[1:-1]
    res = adaptive_integrate(integrand, -half_len, half_len,
                             rel_tol=tols.rel_tol, abs_tol=tols.abs_tol,
                             max_nodes=tols.max_nodes, breakpoints=seeds)
    total = complex(res.value) * direction
    if abs(g_saddle.real) > 600.0:
        raise QuadratureError(
            f"local saddle integral magnitude e^{g_saddle.real:.3g} leaves the "
            "double range; compare scaled quantities instead")
    return total * cmath.exp(g_saddle)


def duality_product(f: AdmissibleFunction, z: LogSurfacePoint) -> complex:
    """Formula-level product of the two asymptotic forms; the exponential
    factors cancel exactly, leaving (L/L')(s_z) = s_z / eps(s_z)."""
    k = K_asymptotic(f, z)
    e = E_asymptotic(f, z)
    if e.region.kind != "inside":
        raise RegionError("duality product needs the growth form's saddle")
    return k.value * e.value * cmath.exp(k.log_scale + e.log_scale)
