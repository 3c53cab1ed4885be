"""Solving the saddle equation Phi(s) = log z and classifying regions.

Phi = (log gamma)' is strictly increasing on the positive ray and
univalent in the sector S(alpha, rho0) for rho0 large enough, so the
strategy is: solve on the ray by safeguarded Newton, then continue the
root in the argument psi at fixed log r, Newton-correcting each step.
If the continuation drives the root's argument to the sector edge before
the target sheet is reached, the point has no saddle there and is tagged
accordingly.

Weights exposing a log-domain Phi (phi_log) can be solved for saddles far
beyond the double range; the solution then carries log_rho_z while rho_z
itself may be inf.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .catalog import AdmissibleFunction
from .errors import ContinuationError, NoSaddleError, SingularJacobianError
from .surface import LogSurfacePoint, Tolerances

_EDGE_DELTA = 0.02          # sector-edge margin alpha0 - delta for continuation
_MAX_RHO_DOUBLE = 1e290


@dataclass(frozen=True)
class SaddleSolution:
    s_z: complex
    rho_z: float
    theta_z: float
    residual: float
    iterations: int
    log_rho_z: float = math.nan

    def __post_init__(self):
        if math.isnan(self.log_rho_z):
            object.__setattr__(self, "log_rho_z",
                               math.log(self.rho_z) if self.rho_z > 0 else -math.inf)


@dataclass(frozen=True)
class RegionTag:
    kind: str                  # 'inside' | 'outside' | 'no_saddle'
    alpha: Optional[float]
    rho0_used: float

    @property
    def inside(self) -> bool:
        return self.kind == "inside"

    def __str__(self):
        a = f"{self.alpha:.6g}" if self.alpha is not None else "-"
        return f"{self.kind}(alpha={a}, rho0={self.rho0_used:.6g})"


def _phi_ray(f: AdmissibleFunction, rho: float) -> Tuple[float, float]:
    j = f.jet(np.complex128(rho))
    return float(np.real(j.d1)), float(np.real(j.d2))


def solve_real(f: AdmissibleFunction, log_r: float, *,
               tol: Optional[Tolerances] = None) -> float:
    """Root of Phi(rho) = log_r on the positive ray (bracket + Newton).

    Raises NoSaddleError when log_r is below Phi's range on the ray, or
    when the root lies beyond the double range (use the log-domain solver
    for such weights).
    """
    tol = tol or Tolerances.for_root_finding()
    target = float(log_r)
    rho_lo = rho_hi = max(1.0, 1.5 * f.c_gamma + 0.5)
    g_mid, _ = _phi_ray(f, rho_lo)

    # bracket the root: Phi is increasing on the ray
    if g_mid < target:
        for _ in range(300):
            rho_hi *= 3.0
            if rho_hi > _MAX_RHO_DOUBLE:
                raise NoSaddleError(
                    f"{f.label}: saddle radius for log_r={target:.6g} exceeds "
                    "the double range; use solve_real_log")
            if _phi_ray(f, rho_hi)[0] >= target:
                break
        else:  # pragma: no cover
            raise NoSaddleError("bracket expansion failed upward")
    else:
        floor = 1e-280
        prev = g_mid
        stalls = 0
        for _ in range(300):
            rho_lo *= 0.25
            if rho_lo < floor:
                raise NoSaddleError(
                    f"{f.label}: log_r={target:.6g} below the range of Phi "
                    f"on the ray (no saddle)")
            g_lo = _phi_ray(f, rho_lo)[0]
            if g_lo <= target:
                break
            # Phi bounded below on the ray (weights regular at the origin):
            # bail out early instead of walking to the underflow floor
            stalls = stalls + 1 if prev - g_lo < 1e-3 * (1.0 + abs(g_lo)) else 0
            prev = g_lo
            if stalls >= 3:
                raise NoSaddleError(
                    f"{f.label}: Phi on the ray is bounded below by about "
                    f"{g_lo:.6g} > log_r = {target:.6g} (no saddle)")
        else:  # pragma: no cover
            raise NoSaddleError("bracket expansion failed downward")

    # safeguarded Newton in log rho (Phi varies on logarithmic scale)
    lo, hi = math.log(rho_lo), math.log(rho_hi)
    x = 0.5 * (lo + hi)
    for _ in range(200):
        rho = math.exp(x)
        g, gp = _phi_ray(f, rho)
        resid = g - target
        if abs(resid) <= tol.rel_tol * (1.0 + abs(target)):
            return rho
        if resid > 0:
            hi = x
        else:
            lo = x
        slope = gp * rho            # dPhi/d(log rho)
        step = -resid / slope if slope > 0 else math.nan
        x_new = x + step
        if not (lo < x_new < hi):   # Newton left the bracket: bisect
            x_new = 0.5 * (lo + hi)
        x = x_new
    raise NoSaddleError(f"{f.label}: ray solve stalled, bracket "
                        f"[{math.exp(lo):.6g}, {math.exp(hi):.6g}]")


def solve_real_log(f: AdmissibleFunction, log_r: float) -> float:
    """log rho of the ray solution, for weights with a log-domain Phi."""
    target = float(log_r)

    def g(lam):
        p, _ = f.phi_log(np.array([complex(lam)]))
        return float(p[0].real)

    lam_lo = lam_hi = max(1.0, math.log(max(1.0, 1.5 * f.c_gamma + 0.5)))
    if g(lam_lo) < target:
        step = 1.0
        for _ in range(300):
            lam_hi += step
            step *= 1.7
            if g(lam_hi) >= target:
                break
        else:
            raise NoSaddleError(f"{f.label}: log-domain bracket failed upward")
    else:
        step = 1.0
        for _ in range(300):
            lam_lo -= step
            step *= 1.7
            if lam_lo < -640.0:
                raise NoSaddleError(f"{f.label}: log_r={target:.6g} below range")
            if g(lam_lo) <= target:
                break
    lam = 0.5 * (lam_lo + lam_hi)
    for _ in range(200):
        p, dp = f.phi_log(np.array([complex(lam)]))
        resid = float(p[0].real) - target
        if abs(resid) <= 1e-12 * (1.0 + abs(target)):
            return lam
        if resid > 0:
            lam_hi = lam
        else:
            lam_lo = lam
        slope = float(dp[0].real)
        cand = lam - resid / slope if slope > 0 else math.nan
        lam = cand if lam_lo < cand < lam_hi else 0.5 * (lam_lo + lam_hi)
    return lam


def _newton_complex(f, s0, target, *, max_iter=12, tol_resid):
    """Complex Newton for Phi(s) = target from s0; returns (s, resid, iters)."""
    s = complex(s0)
    for it in range(1, max_iter + 1):
        j = f.jet(np.complex128(s))
        phi = complex(j.d1)
        resid = phi - target
        if abs(resid) <= tol_resid:
            return s, abs(resid), it
        dphi = complex(j.d2)
        eps_scale = abs(complex(j.d1) - complex(j.val) / s) / max(abs(s), 1e-300)
        if abs(dphi) < 1e-14 * max(eps_scale, 1e-300):
            raise SingularJacobianError(
                f"Phi' ~ 0 at s = {s:.6g} (|Phi'| = {abs(dphi):.3g})")
        s = s - resid / dphi
    j = f.jet(np.complex128(s))
    return s, abs(complex(j.d1) - target), max_iter


def solve(f: AdmissibleFunction, z: LogSurfacePoint, *,
          tol: Optional[Tolerances] = None,
          rho0: Optional[float] = None) -> Tuple[Optional[SaddleSolution], RegionTag]:
    """Saddle for a surface point: ray solution, then continuation in psi.

    Returns (solution, tag).  When the continuation path hits the sector
    edge |theta| = alpha0 - delta before reaching psi, the solution is
    None and the tag reads no_saddle (the point lies outside every
    Omega(alpha) with alpha below the edge).
    """
    tol = tol or Tolerances.for_root_finding()
    rho0_used = rho0 if rho0 is not None else f.default_rho0()
    rho_start = solve_real(f, z.log_r, tol=tol)
    psi = z.psi
    if psi == 0.0:
        j = f.jet(np.complex128(rho_start))
        resid = abs(complex(j.d1) - z.log_z)
        sol = SaddleSolution(complex(rho_start), rho_start, 0.0, resid, 1)
        return sol, _tag_for(sol, rho0_used, f)

    edge = f.alpha0 - _EDGE_DELTA
    eps_here = max(abs(complex(f.epsilon(np.complex128(rho_start)))), 1e-12)
    n_steps = max(1, int(math.ceil(abs(psi) / (0.25 * eps_here))))
    tol_resid = tol.rel_tol * (1.0 + abs(z.log_z))

    s = complex(rho_start)
    theta = 0.0
    t = 0.0
    dt = 1.0 / n_steps
    total_iters = 1
    halvings = 0
    while t < 1.0 - 1e-15:
        t_next = min(1.0, t + dt)
        target = complex(z.log_r, t_next * psi)
        try:
            s_new, resid, iters = _newton_complex(f, s, target, tol_resid=tol_resid)
        except SingularJacobianError:
            raise
        theta_new = theta + cmath.phase(s_new / s)
        ok = resid <= tol_resid and abs(theta_new) < math.pi + 1.0
        if ok and iters <= 5:
            s, theta, t = s_new, theta_new, t_next
            total_iters += iters
            if abs(theta) >= edge:
                return None, RegionTag("no_saddle", None, rho0_used)
            continue
        if ok:                       # converged but slowly: accept, then refine
            s, theta, t = s_new, theta_new, t_next
            total_iters += iters
            dt *= 0.5
            halvings += 1
            if abs(theta) >= edge:
                return None, RegionTag("no_saddle", None, rho0_used)
        else:
            dt *= 0.5
            halvings += 1
        if halvings > 60:
            raise ContinuationError(
                f"{f.label}: continuation breakdown toward psi={psi:.6g}",
                last_t=t, last_s=s)

    resid = abs(complex(f.dlog_gamma(np.complex128(s))) - z.log_z)
    sol = SaddleSolution(s, abs(s), theta, resid, total_iters)
    return sol, _tag_for(sol, rho0_used, f)


def _tag_for(sol: SaddleSolution, rho0_used: float, f: AdmissibleFunction) -> RegionTag:
    if abs(sol.theta_z) < f.alpha0 - _EDGE_DELTA and sol.rho_z > rho0_used:
        return RegionTag("inside", abs(sol.theta_z), rho0_used)
    return RegionTag("outside", abs(sol.theta_z), rho0_used)


def solve_log_domain(f: AdmissibleFunction, z: LogSurfacePoint,
                     *, rho0: Optional[float] = None
                     ) -> Tuple[Optional[SaddleSolution], RegionTag]:
    """Like solve(), but Newton runs in w = log s via phi_log; for saddle
    radii beyond the double range."""
    rho0_used = rho0 if rho0 is not None else 1.0
    lam = solve_real_log(f, z.log_r)
    psi = z.psi
    edge = f.alpha0 - _EDGE_DELTA
    w = complex(lam, 0.0)
    if psi != 0.0:
        p, _ = f.phi_log(np.array([w]))
        # theta responds at rate 1/(dIm Phi/d theta) ~ 1/eps; step conservatively
        n_steps = max(4, int(math.ceil(abs(psi) * 40)))
        dt = 1.0 / n_steps
        t = 0.0
        halvings = 0
        while t < 1.0 - 1e-15:
            t_next = min(1.0, t + dt)
            target = complex(z.log_r, t_next * psi)
            wn = w
            converged = False
            for it in range(12):
                p, dp = f.phi_log(np.array([wn]))
                resid = complex(p[0]) - target
                if abs(resid) <= 1e-12 * (1.0 + abs(target)):
                    converged = True
                    break
                wn = wn - resid / complex(dp[0])
            if converged and abs(wn.imag) < edge:
                w, t = wn, t_next
            elif converged:
                return None, RegionTag("no_saddle", None, rho0_used)
            else:
                dt *= 0.5
                halvings += 1
                if halvings > 60:
                    raise ContinuationError(
                        f"{f.label}: log-domain continuation breakdown",
                        last_t=t, last_s=w)
    p, _ = f.phi_log(np.array([w]))
    resid = abs(complex(p[0]) - z.log_z)
    rho = math.exp(w.real) if w.real < 700 else math.inf
    s_z = cmath.exp(w) if w.real < 700 else complex(math.inf, math.inf)
    sol = SaddleSolution(s_z, rho, w.imag, resid, 0, log_rho_z=w.real)
    kind = "inside" if abs(w.imag) < edge else "outside"
    return sol, RegionTag(kind, abs(w.imag), rho0_used)


def classify(f: AdmissibleFunction, z: LogSurfacePoint, alpha: float,
             rho0: Optional[float] = None) -> RegionTag:
    """Membership tag for Omega(alpha, rho0): inside iff the saddle exists
    with |theta_z| < alpha and rho_z > rho0."""
    if not alpha < f.alpha0:
        raise ValueError(f"alpha must be below alpha0 = {f.alpha0:.6g}")
    rho0_used = rho0 if rho0 is not None else f.default_rho0()
    try:
        sol, tag = solve(f, z, rho0=rho0_used)
    except NoSaddleError:
        return RegionTag("no_saddle", alpha, rho0_used)
    if sol is None:
        return RegionTag("no_saddle", alpha, rho0_used)
    if abs(sol.theta_z) < alpha and sol.rho_z > rho0_used:
        return RegionTag("inside", alpha, rho0_used)
    return RegionTag("outside", alpha, rho0_used)


def boundary_psi(f: AdmissibleFunction, log_r: float, alpha: float, *,
                 theta_tol: float = 1e-8) -> float:
    """The positive sheet argument psi at which the saddle of r e^{i psi}
    sits at angle alpha (the boundary curve of Omega(alpha) at radius r).
    """
    if alpha == 0.0:
        return 0.0
    if alpha < 0.0:
        return -boundary_psi(f, log_r, -alpha, theta_tol=theta_tol)
    if not alpha < f.alpha0 - _EDGE_DELTA:
        raise ValueError(f"alpha too close to the sector edge {f.alpha0:.6g}")

    use_log = False
    try:
        rho_ray = solve_real(f, log_r)
        eps_ray = abs(complex(f.epsilon(np.complex128(rho_ray))))
    except NoSaddleError:
        if not f.has_log_domain:
            raise
        use_log = True
        lam = solve_real_log(f, log_r)
        _, dp = f.phi_log(np.array([complex(lam)]))
        # Im Phi ~ theta * eps; dPhi/dw supplies the eps scale at log radius
        eps_ray = abs(complex(dp[0]))

    def theta_at(psi: float) -> float:
        z = LogSurfacePoint(log_r, psi)
        sol, _ = (solve_log_domain(f, z) if use_log else solve(f, z))
        if sol is None:
            return math.inf
        return sol.theta_z

    psi_hi = 0.9 * alpha * eps_ray
    psi_lo = 0.0
    cap = math.pi * max(f.epsilon_sup(), 1.0) + 1.0
    for _ in range(80):
        th = theta_at(psi_hi)
        if th > alpha:
            break
        psi_lo = psi_hi
        psi_hi *= 1.5
        if psi_hi > cap:
            raise NoSaddleError(
                f"{f.label}: boundary angle {alpha:.6g} not bracketed below "
                f"psi = {cap:.6g}")
    # bisection + secant polish on theta(psi) - alpha (monotone)
    for _ in range(200):
        psi_mid = 0.5 * (psi_lo + psi_hi)
        th = theta_at(psi_mid)
        if abs(th - alpha) <= theta_tol:
            return psi_mid
        if th < alpha:
            psi_lo = psi_mid
        else:
            psi_hi = psi_mid
        if psi_hi - psi_lo < 1e-17 * max(1.0, psi_hi):
            break
    return 0.5 * (psi_lo + psi_hi)


def point_with_saddle_radius(f: AdmissibleFunction, rho_star: float,
                             psi_sign_ray: float = 0.0
                             ) -> Tuple[LogSurfacePoint, complex]:
    """Surface point whose saddle has |s_z| = rho_star, on the ray where
    the point's argument equals psi_sign_ray.

    For psi = 0 this is just z = exp(Phi(rho_star)); otherwise the saddle
    angle theta is solved so that Im Phi(rho* e^{i theta}) = psi.
    """
    if psi_sign_ray == 0.0:
        phi = complex(f.dlog_gamma(np.complex128(rho_star)))
        return LogSurfacePoint(phi.real, 0.0), complex(rho_star)

    lo, hi = 0.0, f.alpha0 - _EDGE_DELTA
    if psi_sign_ray < 0:
        lo, hi = -hi, 0.0

    def im_phi(theta):
        return complex(f.dlog_gamma(rho_star * cmath.exp(1j * theta))).imag

    if psi_sign_ray > 0 and im_phi(hi) < psi_sign_ray:
        raise NoSaddleError(
            f"rho* = {rho_star:.6g}: no saddle angle in the sector reaches "
            f"psi = {psi_sign_ray:.6g}")
    if psi_sign_ray < 0 and im_phi(lo) > psi_sign_ray:
        raise NoSaddleError(
            f"rho* = {rho_star:.6g}: no saddle angle in the sector reaches "
            f"psi = {psi_sign_ray:.6g}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if im_phi(mid) < psi_sign_ray:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    theta = 0.5 * (lo + hi)
    s = rho_star * cmath.exp(1j * theta)
    phi = complex(f.dlog_gamma(np.complex128(s)))
    return LogSurfacePoint(phi.real, phi.imag), s
