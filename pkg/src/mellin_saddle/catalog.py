"""Construction and evaluation of admissible moment weights gamma.

A weight is carried as the jet of log gamma (value, first and second
derivative), so the saddle machinery gets Phi = (log gamma)' and
Phi' = (log gamma)'' from exact chain-rule composition.  Derived scales:

    log L(s)   = log gamma(s) / s
    eps(s)     = Phi(s) - log L(s)        (= s L'/L)
    eps'(s)    = Phi'(s) - eps(s)/s

Builders cover: shifted factorial weights Gamma(s+c), exponential
rescaling, shift-normalization, iterated-log weights exp(a*s*log_k^b(s+c)),
powers/products/quotients, the (log L(s+1))^s closure, slowly-varying
integral constructors, and Stieltjes-positive integral representations.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BuildError, SpecError
from .jet import Jet2
from .special import digamma, loggamma, trigamma

_EULER_GAMMA = 0.5772156649015328606

# iterated-log zero ladder: log_k(x) = 0 at x = _LOGK_UNIT[k]
# (1, e, e^e, ...); used to place the domain edge of iterated-log weights.
def _logk_unit(k: int) -> float:
    x = 1.0
    for _ in range(k - 1):
        x = math.exp(x)
    return x


def _iterated_log_jet(j: Jet2, k: int) -> Jet2:
    for _ in range(k):
        j = j.log()
    return j


class AdmissibleFunction:
    """Evaluatable weight bundle: log gamma jet plus domain metadata.

    Immutable after construction (caches fill lazily but deterministically),
    so instances can be shared freely across threads.
    """

    def __init__(self, label: str, jet_fn: Callable[[np.ndarray], Jet2],
                 c_gamma: float, alpha0: float, *,
                 positive_type: bool = False, degenerate: bool = False,
                 phi_log_fn: Optional[Callable] = None,
                 spec: Optional["FunctionSpec"] = None):
        if not (math.pi / 2 < alpha0 <= math.pi + 1e-12):
            raise BuildError(f"alpha0 must lie in (pi/2, pi], got {alpha0}")
        if c_gamma < 0:
            raise BuildError(f"c_gamma must be >= 0, got {c_gamma}")
        self.label = label
        self.c_gamma = float(c_gamma)
        self.alpha0 = float(alpha0)
        self.positive_type = bool(positive_type)
        self.degenerate = bool(degenerate)
        self.spec = spec
        self._jet_fn = jet_fn
        self._phi_log_fn = phi_log_fn
        self._one_over_gamma0 = None
        self._rho0 = None
        self._eps_sup = None

    # -- evaluation ---------------------------------------------------------

    def jet(self, s) -> Jet2:
        s = np.asarray(s, dtype=complex)
        return self._jet_fn(s)

    def _scalar_ok(self, s, arr):
        return complex(arr) if np.ndim(s) == 0 else arr

    def log_gamma(self, s):
        return self._scalar_ok(s, self.jet(s).val)

    def dlog_gamma(self, s):
        return self._scalar_ok(s, self.jet(s).d1)

    def d2log_gamma(self, s):
        return self._scalar_ok(s, self.jet(s).d2)

    # Phi is the left-hand side of the saddle equation: Phi(s) = log L + eps.
    phi = dlog_gamma
    phi_prime = d2log_gamma

    def log_L(self, s):
        sa = np.asarray(s, dtype=complex)
        return self._scalar_ok(s, self.jet(sa).val / sa)

    def epsilon(self, s):
        sa = np.asarray(s, dtype=complex)
        j = self.jet(sa)
        return self._scalar_ok(s, j.d1 - j.val / sa)

    def epsilon_prime(self, s):
        sa = np.asarray(s, dtype=complex)
        j = self.jet(sa)
        eps = j.d1 - j.val / sa
        return self._scalar_ok(s, j.d2 - eps / sa)

    # -- log-domain access for saddles beyond double range -------------------

    @property
    def has_log_domain(self) -> bool:
        return self._phi_log_fn is not None

    def phi_log(self, w):
        """(Phi(e^w), dPhi/dw) for weights that support huge |s| = e^{Re w}."""
        if self._phi_log_fn is None:
            raise BuildError(f"{self.label}: no log-domain evaluation available")
        return self._phi_log_fn(np.asarray(w, dtype=complex))

    # -- cached metadata ------------------------------------------------------

    @property
    def one_over_gamma0(self) -> float:
        """1/gamma(0+), with 0 for weights blowing up at the origin."""
        if self._one_over_gamma0 is None:
            lg6 = complex(self.log_gamma(1e-6 + 0j))
            lg8 = complex(self.log_gamma(1e-8 + 0j))
            if lg8.real - lg6.real > 2.0:
                self._one_over_gamma0 = 0.0
            else:
                self._one_over_gamma0 = float(np.exp(-lg6).real)
        return self._one_over_gamma0

    def probe_grid(self, lo: float = 1.0, hi: float = 1e6, n: int = 61):
        return np.geomspace(lo, hi, n)

    def epsilon_sup(self) -> float:
        """sup of eps over the probe grid; proxy for limsup estimates."""
        if self._eps_sup is None:
            rho = self.probe_grid()
            self._eps_sup = float(np.max(np.real(self.epsilon(rho + 0j))))
        return self._eps_sup

    def epsilon_limsup_estimate(self) -> float:
        rho = self.probe_grid(1e4, 1e6, 21)
        return float(np.max(np.real(self.epsilon(rho + 0j))))

    def default_rho0(self) -> float:
        """Smallest probe radius past which the slow-variation ratios
        (B) rho|eps'|/eps and (C) angular spread stay below 0.2.

        The (C) fan here covers |theta| <= min(pi/2, alpha0 - 0.1): the
        radius gates the growth/decay region split, which happens at
        angles near pi/2; the full-sector fan belongs to the audit.
        """
        if self._rho0 is None:
            rho = self.probe_grid(1.0, 1e6, 31)
            b = np.abs(rho * np.real(self.epsilon_prime(rho + 0j))
                       / np.real(self.epsilon(rho + 0j)))
            fan = min(0.5 * math.pi, self.alpha0 - 0.1)
            thetas = np.linspace(-fan, fan, 5)
            c = np.empty_like(rho)
            for i, r in enumerate(rho):
                e0 = complex(self.epsilon(r + 0j))
                ef = self.epsilon(r * np.exp(1j * thetas))
                c[i] = float(np.max(np.abs(ef / e0 - 1.0)))
            ok = (b < 0.2) & (c < 0.2)
            # first index from which every later grid point stays ok
            idx = len(rho)
            for i in range(len(rho) - 1, -1, -1):
                if ok[i]:
                    idx = i
                else:
                    break
            if idx >= len(rho):
                self._rho0 = float(rho[-1])
            elif idx == 0:
                self._rho0 = float(rho[0])
            else:
                # strictly below the first certified point, so that point
                # itself already counts as interior
                self._rho0 = float(math.sqrt(rho[idx - 1] * rho[idx]))
        return self._rho0

    def __repr__(self):
        return (f"AdmissibleFunction({self.label!r}, c_gamma={self.c_gamma:.4g}, "
                f"alpha0={self.alpha0:.4g})")


# ---------------------------------------------------------------------------
# Primitive builders
# ---------------------------------------------------------------------------

def gamma_shift(c: float = 0.0, label: Optional[str] = None) -> AdmissibleFunction:
    """gamma(s) = Gamma(s + c); c = 0 gives the factorial prototype."""
    if c < 0:
        raise BuildError(f"gamma_shift needs c >= 0, got {c}")

    def jet_fn(s):
        w = s + c
        return Jet2(loggamma(w), digamma(w), trigamma(w))

    def phi_log_fn(w):
        # digamma(s) ~ log s once |s| is huge; ds/dw * psi'(s) = s psi'(s) -> 1
        out_phi = np.array(w, dtype=complex, copy=True)
        out_dphi = np.ones_like(out_phi)
        small = w.real < 300.0
        if np.any(small):
            s = np.exp(w[small]) + c
            out_phi[small] = digamma(s)
            out_dphi[small] = s * trigamma(s)
        return out_phi, out_dphi

    return AdmissibleFunction(label or (f"gamma(s+{c:g})" if c else "gamma(s)"),
                              jet_fn, c, math.pi, phi_log_fn=phi_log_fn)


def iterated_log(a: float = 1.0, b: float = 1.0, k: int = 1,
                 c: float = math.e, label: Optional[str] = None) -> AdmissibleFunction:
    """Weight with scale L(s) = log_k(s+c)^b, i.e.

        gamma(s) = L(s)^{a s} = exp(a*b*s*log_{k+1}(s+c)),

    log_k the k-th iterated log.  Needs a, b > 0 and c large enough that
    log_k(c) >= 1, which keeps log L >= 0 on the whole ray.
    """
    if a <= 0 or b <= 0 or k < 1:
        raise BuildError(f"iterated_log needs a, b > 0 and k >= 1 (a={a}, b={b}, k={k})")
    ladder = c
    for _ in range(k):
        if ladder <= 0:
            raise BuildError(f"iterated_log: log_{k}({c:g}) undefined, c too small")
        ladder = math.log(ladder)
    if ladder < 1.0 - 1e-9:
        raise BuildError(
            f"iterated_log: need log_{k}(c) >= 1 so the scale stays >= 1; "
            f"got log_{k}({c:g}) = {ladder:.6g}")
    ab = a * b

    def jet_fn(s):
        base = Jet2.variable(s) + c
        m = _iterated_log_jet(base, k + 1)       # log_{k+1}(s+c)
        return Jet2.variable(s) * m * ab

    def phi_log_fn(w):
        # For Re w >> 1 treat s + c as s exactly (relative error e^{-Re w}).
        out_phi = np.empty_like(w)
        out_dphi = np.empty_like(w)
        big = w.real >= 300.0
        if np.any(big):
            jw = Jet2.variable(w[big])            # jet in w = log s
            mk = _iterated_log_jet(jw, k)         # log_{k+1}(s) as a jet in w
            # Phi(s) = a b (M + s M') with M = log_{k+1}; s M' = dM/dw.
            phi_jet = (mk + Jet2(mk.d1, mk.d2, 0.0 * mk.d2)) * ab
            out_phi[big] = phi_jet.val
            out_dphi[big] = phi_jet.d1
        if np.any(~big):
            s = np.exp(w[~big])
            j = jet_fn(s)
            out_phi[~big] = j.d1
            out_dphi[~big] = s * j.d2
        return out_phi, out_dphi

    c_gamma = c - _logk_unit(k)
    lbl = label or f"(log_{k}(s+{c:g})^{b:g})^({a:g}s)"
    return AdmissibleFunction(lbl, jet_fn, max(c_gamma, 0.0), math.pi,
                              phi_log_fn=phi_log_fn)


def exp_scale(child: AdmissibleFunction, tau: float,
              label: Optional[str] = None) -> AdmissibleFunction:
    """gamma(s) * e^{tau s}."""

    def jet_fn(s):
        j = child.jet(s)
        return Jet2(j.val + tau * s, j.d1 + tau, j.d2)

    return AdmissibleFunction(label or f"{child.label}*exp({tau:g}s)", jet_fn,
                              child.c_gamma, child.alpha0,
                              spec=None)


def shift_normalize(child: AdmissibleFunction, c: float,
                    label: Optional[str] = None) -> AdmissibleFunction:
    """gamma(s + c) / gamma(c), c > 0."""
    if c <= 0:
        raise BuildError(f"shift_normalize needs c > 0, got {c}")
    lg_c = complex(child.log_gamma(complex(c)))

    def jet_fn(s):
        j = child.jet(s + c)
        return Jet2(j.val - lg_c, j.d1, j.d2)

    phi_log_fn = None
    if child.has_log_domain:
        phi_log_fn = child._phi_log_fn  # s + c is s at log-domain scales
    return AdmissibleFunction(label or f"{child.label}(s+{c:g})/..({c:g})",
                              jet_fn, child.c_gamma + c, child.alpha0,
                              phi_log_fn=phi_log_fn)


def power(child: AdmissibleFunction, a: float,
          label: Optional[str] = None) -> AdmissibleFunction:
    """gamma(s)^a, a > 0."""
    if a <= 0:
        raise BuildError(f"power needs a > 0, got {a}")

    def jet_fn(s):
        j = child.jet(s)
        return Jet2(a * j.val, a * j.d1, a * j.d2)

    phi_log_fn = None
    if child.has_log_domain:
        def phi_log_fn(w):
            p, dp = child.phi_log(w)
            return a * p, a * dp
    return AdmissibleFunction(label or f"({child.label})^{a:g}", jet_fn,
                              child.c_gamma, child.alpha0, phi_log_fn=phi_log_fn)


def product(c1: AdmissibleFunction, c2: AdmissibleFunction,
            label: Optional[str] = None) -> AdmissibleFunction:
    def jet_fn(s):
        return c1.jet(s) + c2.jet(s)

    phi_log_fn = None
    if c1.has_log_domain and c2.has_log_domain:
        def phi_log_fn(w):
            p1, d1 = c1.phi_log(w)
            p2, d2 = c2.phi_log(w)
            return p1 + p2, d1 + d2
    return AdmissibleFunction(label or f"({c1.label})*({c2.label})", jet_fn,
                              min(c1.c_gamma, c2.c_gamma),
                              min(c1.alpha0, c2.alpha0), phi_log_fn=phi_log_fn)


def quotient(c1: AdmissibleFunction, c2: AdmissibleFunction,
             label: Optional[str] = None) -> AdmissibleFunction:
    """gamma1 / gamma2; requires gamma1 >= gamma2 on (0, inf) and the ratio
    rho -> (gamma1/gamma2)^{1/rho} non-decreasing and unbounded.

    Both hypotheses are audited on a log-spaced probe grid, not proven.
    """
    rho = np.geomspace(1.0, 1e6, 121)
    d = np.real(c1.log_gamma(rho + 0j) - c2.log_gamma(rho + 0j))
    if np.any(d < -1e-10):
        bad = rho[np.argmin(d)]
        raise BuildError(f"quotient: gamma1 < gamma2 near rho = {bad:.6g}")
    ratio_scale = d / rho          # log of (gamma1/gamma2)^{1/rho}
    inc = np.diff(ratio_scale)
    if np.any(inc < -1e-12 * np.maximum(1.0, np.abs(ratio_scale[1:]))):
        bad = rho[1:][np.argmin(inc)]
        raise BuildError(
            f"quotient: (gamma1/gamma2)^(1/rho) decreased near rho = {bad:.6g}")
    if ratio_scale[-1] < ratio_scale[0] + 0.05:
        raise BuildError("quotient: (gamma1/gamma2)^(1/rho) shows no growth "
                         "on [1, 1e6]; unboundedness audit failed")

    def jet_fn(s):
        j1, j2 = c1.jet(s), c2.jet(s)
        return Jet2(j1.val - j2.val, j1.d1 - j2.d1, j1.d2 - j2.d2)

    phi_log_fn = None
    if c1.has_log_domain and c2.has_log_domain:
        def phi_log_fn(w):
            p1, d1_ = c1.phi_log(w)
            p2, d2_ = c2.phi_log(w)
            return p1 - p2, d1_ - d2_
    return AdmissibleFunction(label or f"({c1.label})/({c2.label})", jet_fn,
                              min(c1.c_gamma, c2.c_gamma),
                              min(c1.alpha0, c2.alpha0), phi_log_fn=phi_log_fn)


def log_of_scale(child: AdmissibleFunction,
                 label: Optional[str] = None) -> AdmissibleFunction:
    """From gamma = L(s)^s build (log L(s+1))^s.

    Needs log L(s+1) > 0 along the real domain; probed and rejected
    otherwise (weights with L near 1, like the bare factorial, fail).
    """
    c_new = child.c_gamma + 1.0

    def _logL1(sig):
        return np.real(child.log_gamma(sig + 1.0 + 0j)) / (sig + 1.0)

    probe = np.concatenate([
        np.linspace(-min(c_new, 0.999) + 1e-3, 1.0, 41), np.geomspace(1.0, 1e6, 41)])
    vals = _logL1(probe)
    if np.any(vals <= 0):
        bad = probe[int(np.argmin(vals))]
        raise BuildError(
            f"log_of_scale: log L(s+1) <= 0 at s = {bad:.6g}; the scale of "
            f"{child.label} is too small near the origin for this closure")

    def jet_fn(s):
        w = child.jet(s + 1.0)
        logL = w / Jet2(s + 1.0, np.ones_like(s), np.zeros_like(s))
        return Jet2.variable(s) * logL.log()

    return AdmissibleFunction(label or f"(log L_{{{child.label}}}(s+1))^s",
                              jet_fn, c_new, child.alpha0)


def from_log_gamma_jet(label: str, jet_fn: Callable[[np.ndarray], Jet2],
                       c_gamma: float, alpha0: float = math.pi,
                       **flags) -> AdmissibleFunction:
    """Low-level constructor for weights given directly as a log-gamma jet.

    Handy for controls that are deliberately outside the admissible class
    (audits and divergence checks still run on them).
    """
    return AdmissibleFunction(label, jet_fn, c_gamma, alpha0, **flags)


def monomial_exponent(p: float, coeff: float = 1.0) -> AdmissibleFunction:
    """gamma(s) = exp(coeff * s^p); p > 1 controls for audits/Carleman."""

    def jet_fn(s):
        return Jet2(coeff * s ** p, coeff * p * s ** (p - 1.0),
                    coeff * p * (p - 1.0) * s ** (p - 2.0))

    return from_log_gamma_jet(f"exp({coeff:g}*s^{p:g})", jet_fn, 1.0, math.pi)


# ---------------------------------------------------------------------------
# Slowly-varying integral constructor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlowlyVaryingEll:
    """An unboundedly increasing C^1 scale ell given through log ell and
    (log ell)'; c is the lower limit of the construction integral."""

    log_ell: Callable[[np.ndarray], np.ndarray]
    dlog_ell: Callable[[np.ndarray], np.ndarray]
    c: float
    label: str = "ell"

    def __post_init__(self):
        if self.c <= 0:
            raise BuildError(f"SlowlyVaryingEll needs c > 0, got {self.c}")
        u = np.geomspace(max(self.c, 1e-9), 1e8, 50)
        g = np.asarray(self.dlog_ell(u), dtype=float)
        if np.any(~np.isfinite(g)) or np.any(g <= 0):
            bad = u[int(np.argmin(g))]
            raise BuildError(
                f"{self.label}: (log ell)' must be finite and > 0; fails near "
                f"u = {bad:.6g} (constant or decreasing scales are rejected)")
        if np.max(u * g) > 1e3:
            raise BuildError(f"{self.label}: u * (log ell)'(u) looks unbounded "
                             f"(max {np.max(u * g):.3g} on probe grid)")


def ell_power(a: float = 1.0, c: float = 1.0) -> SlowlyVaryingEll:
    """ell(rho) = (1 + rho)^a."""
    if a <= 0:
        raise BuildError(f"ell_power needs a > 0, got {a}")
    return SlowlyVaryingEll(
        log_ell=lambda u: a * np.log1p(u),
        dlog_ell=lambda u: a / (1.0 + u),
        c=c, label=f"(1+rho)^{a:g}")


def ell_exp_sqrt_log(c: float = 1.0) -> SlowlyVaryingEll:
    """ell(rho) = exp(sqrt(log(1 + rho)))."""
    return SlowlyVaryingEll(
        log_ell=lambda u: np.sqrt(np.log1p(u)),
        dlog_ell=lambda u: 0.5 / (np.sqrt(np.log1p(u)) * (1.0 + u)),
        c=c, label="exp(sqrt(log(1+rho)))")


_ELL_PRESETS = {
    "power": lambda params: ell_power(a=float(params.get("a", 1.0)),
                                      c=float(params.get("c", 1.0))),
    "exp_sqrt_log": lambda params: ell_exp_sqrt_log(c=float(params.get("c", 1.0))),
}


class _CauchyKernelGrid:
    """Fixed quadrature grid for integrals int f(u) (u+s)^{-m} du, m = 1..3.

    Nodes come with the density already folded into the weights, so the
    three integrals are plain broadcast sums; the grid lazily extends when
    asked about |s| beyond its current coverage.
    """

    def __init__(self, weight_at, c, s_cover=1e8, panel_len=0.5, margin=45.0):
        self._weight_at = weight_at   # u-array -> f(u) * du/dv jacobian folded
        self.c = float(c)
        self.panel_len = float(panel_len)
        self.margin = float(margin)
        self._build(s_cover)

    def _build(self, s_cover):
        self.s_cover = float(s_cover)
        v_max = math.log(max(self.s_cover, 10.0) / self.c) + self.margin
        n_panels = max(8, int(math.ceil(v_max / self.panel_len)))
        x, w = np.polynomial.legendre.leggauss(15)
        edges = np.linspace(0.0, v_max, n_panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        v = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wv = (half[:, None] * w[None, :]).ravel()
        self.u = self.c * np.exp(v)
        self.w = wv * self._weight_at(self.u)

    def integrals(self, s):
        """I1, I2, I3 at the (flat complex array) points s."""
        s = np.atleast_1d(np.asarray(s, dtype=complex)).ravel()
        amax = float(np.max(np.abs(s))) if s.size else 1.0
        if amax > self.s_cover:
            self._build(10.0 * amax)
        i1 = np.empty_like(s)
        i2 = np.empty_like(s)
        i3 = np.empty_like(s)
        chunk = max(1, int(4e6 // max(self.u.size, 1)))
        for k in range(0, s.size, chunk):
            d = s[k:k + chunk, None] + self.u[None, :]
            r = self.w[None, :] / d
            i1[k:k + chunk] = r.sum(axis=1)
            r /= d
            i2[k:k + chunk] = r.sum(axis=1)
            r /= d
            i3[k:k + chunk] = r.sum(axis=1)
        return i1, i2, i3


def build_theorem3(ell: SlowlyVaryingEll,
                   label: Optional[str] = None) -> AdmissibleFunction:
    """Weight with prescribed scale: log gamma(s) = s^2 int_c^inf
    (log ell)'(u) / (s+u) du, derivatives taken under the integral."""
    grid = _CauchyKernelGrid(lambda u: np.asarray(ell.dlog_ell(u), dtype=float) * u,
                             ell.c)

    def jet_fn(s):
        shape = s.shape
        flat = s.ravel()
        i1, i2, i3 = grid.integrals(flat)
        i1, i2, i3 = (a.reshape(shape) for a in (i1, i2, i3))
        val = s * s * i1
        d1 = 2.0 * s * i1 - s * s * i2
        d2 = 2.0 * i1 - 4.0 * s * i2 + 2.0 * s * s * i3
        return Jet2(val, d1, d2)

    lbl = label or f"scale[{ell.label}, c={ell.c:g}]"
    f = AdmissibleFunction(lbl, jet_fn, ell.c, math.pi)
    f.ell = ell
    return f


# ---------------------------------------------------------------------------
# Positive-type representations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PositiveTypeSpec:
    """log gamma(s) = A + B s + (s-a)^2 int_0^inf m(u) du / (u+s).

    measure_density m must be >= 0 with int m(u)/(u+1) du finite.  The
    numerical measure is truncated at support_cut; for densities with a
    slowly decaying tail the completions tail_kappa1/u + tail_kappa2/u^2
    and a sawtooth term tail_sawtooth*(frac(u)-1/2)/u^2 are integrated in
    closed form past the cut (support_cut should be an integer when the
    sawtooth term is used).  breakpoints lists known kinks/jumps of m.
    """

    A: float
    B: float
    a: float
    measure_density: Callable[[np.ndarray], np.ndarray]
    support_cut: float
    tail_kappa1: float = 0.0
    tail_kappa2: float = 0.0
    tail_sawtooth: float = 0.0
    breakpoints: tuple = ()
    label: str = "positive-type"

    def __post_init__(self):
        if self.support_cut <= 0:
            raise BuildError("support_cut must be positive")


def _positive_type_edges(spec: PositiveTypeSpec):
    cut = spec.support_cut
    pts = {0.0, cut}
    pts.update(b for b in spec.breakpoints if 0.0 < b < cut)
    if spec.tail_sawtooth != 0.0:
        pts.update(float(k) for k in range(1, int(min(cut, 1e6)) + 1))
    else:
        # resolve the u ~ |s| transition with geometric panels
        lo = min((b for b in spec.breakpoints if b > 0), default=1.0)
        pts.update(np.linspace(0.0, min(lo, cut), 5))
        g = min(lo, 1.0)
        while g < cut:
            pts.add(g)
            g *= 1.35
    return np.array(sorted(pts))


def _tail_closed_forms(s, cut, k1, k2, saw):
    """Closed-form tails of I1, I2, I3 for m ~ k1/u + k2/u^2 + saw*(frac-1/2)/u^2."""
    lc = np.log1p(s / cut)
    d = 1.0 / (s + cut)
    g = lc / s
    h = 1.0 / (s * cut) - lc / s ** 2
    gp = d / s - lc / s ** 2
    hp = -1.0 / (s ** 2 * cut) - d / s ** 2 + 2.0 * lc / s ** 3
    gpp = -d * d / s - 2.0 * d / s ** 2 + 2.0 * lc / s ** 3
    hpp = 2.0 / (s ** 3 * cut) + d * d / s ** 2 + 4.0 * d / s ** 3 - 6.0 * lc / s ** 4
    t1 = k1 * g + k2 * h
    t2 = -(k1 * gp + k2 * hp)
    t3 = 0.5 * (k1 * gpp + k2 * hpp)
    if saw != 0.0:
        # Euler-Maclaurin leading term -(1/12) u^{-2} (u+s)^{-m} at u = cut,
        # one copy per kernel power m = 1, 2, 3
        phi1 = cut ** -2.0 * d
        t1 = t1 - saw / 12.0 * phi1
        t2 = t2 - saw / 12.0 * (phi1 * d)
        t3 = t3 - saw / 12.0 * (phi1 * d * d)
    return t1, t2, t3


def build_positive_type(spec: PositiveTypeSpec) -> AdmissibleFunction:
    edges = _positive_type_edges(spec)
    x, w = np.polynomial.legendre.leggauss(15)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    m = np.asarray(spec.measure_density(u), dtype=float)
    if np.any(m < -1e-12):
        bad = u[int(np.argmin(m))]
        raise BuildError(f"{spec.label}: measure density negative near u = {bad:.6g}")
    m = np.maximum(m, 0.0)
    wts = (half[:, None] * w[None, :]).ravel() * m
    mass_check = float(np.sum(wts / (u + 1.0)))
    if not math.isfinite(mass_check):
        raise BuildError(f"{spec.label}: int m/(u+1) du is not finite")
    degenerate = mass_check < 1e-14 and spec.tail_kappa1 == spec.tail_kappa2 == 0.0

    cut, k1, k2, saw = spec.support_cut, spec.tail_kappa1, spec.tail_kappa2, spec.tail_sawtooth
    a0, A, B = spec.a, spec.A, spec.B

    def jet_fn(s):
        shape = s.shape
        flat = s.ravel()
        i1 = np.empty_like(flat)
        i2 = np.empty_like(flat)
        i3 = np.empty_like(flat)
        chunk = max(1, int(4e6 // max(u.size, 1)))
        for kk in range(0, flat.size, chunk):
            d = flat[kk:kk + chunk, None] + u[None, :]
            r = wts[None, :] / d
            i1[kk:kk + chunk] = r.sum(axis=1)
            r /= d
            i2[kk:kk + chunk] = r.sum(axis=1)
            r /= d
            i3[kk:kk + chunk] = r.sum(axis=1)
        if k1 != 0.0 or k2 != 0.0 or saw != 0.0:
            t1, t2, t3 = _tail_closed_forms(flat, cut, k1, k2, saw)
            i1, i2, i3 = i1 + t1, i2 + t2, i3 + t3
        i1, i2, i3 = (arr.reshape(shape) for arr in (i1, i2, i3))
        q = s - a0
        val = A + B * s + q * q * i1
        d1 = B + 2.0 * q * i1 - q * q * i2
        d2 = 2.0 * i1 - 4.0 * q * i2 + 2.0 * q * q * i3
        return Jet2(val, d1, d2)

    support_inf = 0.0
    pos = np.nonzero(m > 0)[0]
    if pos.size:
        support_inf = float(u[pos[0]])
    c_gamma = max(support_inf, 0.0)
    f = AdmissibleFunction(spec.label, jet_fn, c_gamma, math.pi,
                           positive_type=True, degenerate=degenerate)
    f.positive_spec = spec
    return f


def positive_type_factorial(cut: int = 400) -> PositiveTypeSpec:
    """Classical integral representation with density floor(u)/u^2.

    Reproduces the shifted factorial weight Gamma(s+1) = exp(-euler_gamma*s
    + s^2 int floor(u)/u^2/(u+s) du); floor(u)/u^2 = 1/u - 1/(2u^2)
    - (frac(u)-1/2)/u^2 fixes the tail completions.
    """

    def density(u):
        return np.floor(u) / np.maximum(u, 1e-300) ** 2

    return PositiveTypeSpec(A=0.0, B=-_EULER_GAMMA, a=0.0,
                            measure_density=density, support_cut=float(cut),
                            tail_kappa1=1.0, tail_kappa2=-0.5,
                            tail_sawtooth=-1.0, label="factorial(+1) via measure")


def positive_type_iterated_log(beta: float = 1.0, k: int = 1, c: float = 10.0,
                               cut: float = 1e5) -> PositiveTypeSpec:
    """Jump representation of exp(beta * s * log_{k+1}(s + c)).

    The density is beta * lambda(u)/u with lambda the boundary jump of
    log_{k+1} across the negative ray; positive for c large enough that
    log_{k+1}(c) > 0.
    """
    ladder = c
    for _ in range(k + 1):
        if ladder <= 0:
            raise BuildError(f"positive_type_iterated_log: log_{k+1}({c:g}) undefined")
        ladder = math.log(ladder)
    if ladder <= 0:
        raise BuildError(f"positive_type_iterated_log: need log_{k+1}(c) > 0, "
                         f"got {ladder:.4g}")

    def density(u):
        # lambda(u) = Im log_{k+1}(c - u + i0) / pi; real (hence zero) while
        # log_k(c - u) stays positive, i.e. for u <= c - unit_k.
        w = np.asarray(c - u, dtype=complex)
        out = w + 0j
        for _ in range(k + 1):
            out = np.log(out)
        lam = np.imag(out) / math.pi
        lam = np.where(u <= c - _logk_unit(k), 0.0, lam)
        return beta * np.maximum(lam, 0.0) / np.maximum(u, 1e-300)

    # estimated 1/u tail coefficient at the cut
    kappa1 = float(density(np.array([cut]))[0] * cut)
    bks = [c - _logk_unit(j) for j in range(1, k + 1)] + [c]
    return PositiveTypeSpec(A=0.0, B=beta * ladder, a=0.0,
                            measure_density=density, support_cut=cut,
                            tail_kappa1=kappa1,
                            breakpoints=tuple(b for b in bks if b > 0),
                            label=f"jump rep of exp({beta:g}s*log_{k+1}(s+{c:g}))")


def positive_type_degenerate(tau: float) -> PositiveTypeSpec:
    """Zero measure, gamma(s) = e^{tau s}: a pure scale atom."""
    return PositiveTypeSpec(A=0.0, B=tau, a=0.0,
                            measure_density=lambda u: np.zeros_like(u),
                            support_cut=1.0, label=f"degenerate exp({tau:g}s)")


_POSITIVE_PRESETS = {
    "factorial": lambda p: positive_type_factorial(int(p.get("cut", 400))),
    "iterated_log_jump": lambda p: positive_type_iterated_log(
        beta=float(p.get("beta", 1.0)), k=int(p.get("k", 1)),
        c=float(p.get("c", 10.0)), cut=float(p.get("cut", 1e5))),
    "degenerate": lambda p: positive_type_degenerate(float(p.get("tau", 0.0))),
}


# ---------------------------------------------------------------------------
# FunctionSpec: serializable description of a weight
# ---------------------------------------------------------------------------

_KIND_ARITY = {
    "gamma_shift": 0,
    "exp_tau_scale": 1,
    "shift_normalize": 1,
    "iterated_log": 0,
    "power": 1,
    "product": 2,
    "quotient": 2,
    "log_of_L": 1,
    "theorem3": 0,
    "positive_type": 0,
}


@dataclass
class FunctionSpec:
    kind: str
    params: dict = field(default_factory=dict)
    children: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in _KIND_ARITY:
            raise SpecError(f"unknown spec kind {self.kind!r}; "
                            f"expected one of {sorted(_KIND_ARITY)}")
        want = _KIND_ARITY[self.kind]
        if len(self.children) != want:
            raise SpecError(f"kind {self.kind!r} takes {want} children, "
                            f"got {len(self.children)}")

    @classmethod
    def from_dict(cls, d: dict) -> "FunctionSpec":
        if not isinstance(d, dict) or "kind" not in d:
            raise SpecError(f"spec must be an object with a 'kind' field, got {d!r}")
        kids = [cls.from_dict(k) for k in d.get("children", [])]
        return cls(kind=d["kind"], params=dict(d.get("params", {})), children=kids)

    @classmethod
    def from_json(cls, text: str) -> "FunctionSpec":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise SpecError(f"spec is not valid JSON: {e}") from e

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params),
                "children": [c.to_dict() for c in self.children]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def build(spec: FunctionSpec) -> AdmissibleFunction:
    """Construct the weight described by a FunctionSpec tree."""
    p = spec.params
    try:
        if spec.kind == "gamma_shift":
            f = gamma_shift(float(p.get("c", 0.0)))
        elif spec.kind == "iterated_log":
            f = iterated_log(a=float(p.get("a", 1.0)), b=float(p.get("b", 1.0)),
                             k=int(p.get("k", 1)), c=float(p.get("c", math.e)))
        elif spec.kind == "exp_tau_scale":
            f = exp_scale(build(spec.children[0]), float(p["tau"]))
        elif spec.kind == "shift_normalize":
            f = shift_normalize(build(spec.children[0]), float(p["c"]))
        elif spec.kind == "power":
            f = power(build(spec.children[0]), float(p["a"]))
        elif spec.kind == "product":
            f = product(build(spec.children[0]), build(spec.children[1]))
        elif spec.kind == "quotient":
            f = quotient(build(spec.children[0]), build(spec.children[1]))
        elif spec.kind == "log_of_L":
            f = log_of_scale(build(spec.children[0]))
        elif spec.kind == "theorem3":
            name = p.get("ell", "power")
            if name not in _ELL_PRESETS:
                raise SpecError(f"unknown ell preset {name!r}; "
                                f"expected one of {sorted(_ELL_PRESETS)}")
            f = build_theorem3(_ELL_PRESETS[name](p))
        elif spec.kind == "positive_type":
            name = p.get("preset", "factorial")
            if name not in _POSITIVE_PRESETS:
                raise SpecError(f"unknown positive-type preset {name!r}; "
                                f"expected one of {sorted(_POSITIVE_PRESETS)}")
            f = build_positive_type(_POSITIVE_PRESETS[name](p))
        else:  # pragma: no cover - guarded by __post_init__
            raise SpecError(f"unhandled kind {spec.kind!r}")
    except KeyError as e:
        raise SpecError(f"kind {spec.kind!r} is missing parameter {e}") from e
    f.spec = spec
    return f


# ---------------------------------------------------------------------------
# Admissibility audit
# ---------------------------------------------------------------------------

@dataclass
class AuditCondition:
    name: str
    metric: float
    threshold: float
    passed: bool
    detail: str = ""


@dataclass
class AuditReport:
    label: str
    conditions: list
    epsilon_min: float
    epsilon_sup: float
    grid_max: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "passed": self.passed,
            "epsilon_min": self.epsilon_min,
            "epsilon_sup": self.epsilon_sup,
            "grid_max": self.grid_max,
            "conditions": [vars(c) for c in self.conditions],
        }


def audit_admissibility(f: AdmissibleFunction, grid=None, *,
                        growth_floor: float = 0.01,
                        slow_variation_max: float = 0.2,
                        angular_spread_max: float = 0.2,
                        theta_count: int = 9) -> AuditReport:
    """Numerical audit of the three defining conditions of the class:

    (A) the cumulative integral of eps(rho)/rho keeps growing (no plateau),
    (B) rho |eps'(rho)| / eps(rho) is small on the tail of the grid,
    (C) eps(rho e^{i theta}) stays within a band of eps(rho) across the fan.

    The default grid reaches 1e7: for weights whose eps decays like an
    iterated log, the angular spread (C) only settles below the default
    threshold around that radius.
    """
    if grid is None:
        grid = f.probe_grid(1.0, 1e7, 61)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 8 or np.any(np.diff(grid) <= 0) or grid[0] <= 0:
        raise ValueError("grid must be increasing, positive, with >= 8 points")

    eps = np.real(f.epsilon(grid + 0j))
    epsp = np.real(f.epsilon_prime(grid + 0j))
    eps_min = float(np.min(eps))
    eps_sup = float(np.max(eps))

    # (A): trapezoid of eps dlog(rho); increment over the last decade
    logg = np.log(grid)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (eps[1:] + eps[:-1]) * np.diff(logg))])
    last_decade = logg >= logg[-1] - math.log(10.0)
    idx0 = int(np.argmax(last_decade))
    growth = float(cum[-1] - cum[idx0])
    increasing = bool(np.all(np.diff(cum) > -1e-14))
    cond_a = AuditCondition(
        "A: divergent integral of eps/rho", growth, growth_floor,
        increasing and growth >= growth_floor,
        f"last-decade increment of cumulative integral (increasing={increasing})")

    # (B): slow variation on the tail (last quarter of the grid)
    tail = slice(3 * grid.size // 4, None)
    ratio_b = np.abs(grid[tail] * epsp[tail]) / np.maximum(np.abs(eps[tail]), 1e-300)
    cond_b = AuditCondition(
        "B: rho|eps'|/eps small on tail", float(np.max(ratio_b)),
        slow_variation_max, float(np.max(ratio_b)) < slow_variation_max,
        f"max over rho >= {grid[tail][0]:.3g}")

    # (C): angular stability of eps at the far end of the grid
    rho_max = grid[-1]
    thetas = np.linspace(-(f.alpha0 - 0.1), f.alpha0 - 0.1, theta_count)
    e0 = complex(f.epsilon(rho_max + 0j))
    fan = f.epsilon(rho_max * np.exp(1j * thetas))
    spread = float(np.max(np.abs(fan / e0 - 1.0)))
    cond_c = AuditCondition(
        "C: eps stable across the angle fan", spread,
        angular_spread_max, spread < angular_spread_max,
        f"|theta| <= alpha0 - 0.1 at rho = {rho_max:.3g}")

    pos = AuditCondition("eps positive and bounded on the ray", eps_min, 0.0,
                         eps_min > 0.0 and math.isfinite(eps_sup),
                         f"min eps on grid (sup = {eps_sup:.4g})")

    return AuditReport(f.label, [cond_a, cond_b, cond_c, pos],
                       eps_min, eps_sup, float(rho_max))
