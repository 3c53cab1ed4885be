"""Complex log-gamma, digamma and trigamma.

scipy provides loggamma and digamma for complex arguments; trigamma
(psi') is only wrapped for real input, so it is built here from the
standard recurrence plus the asymptotic series, with a reflection step
for points far out near the negative real axis.
"""
from __future__ import annotations

import numpy as np
import scipy.special as _sp

loggamma = _sp.loggamma
digamma = _sp.digamma

# B_{2k} / coefficients of psi'(z) ~ 1/z + 1/(2z^2) + sum b_k z^{-2k-1}
_TRIGAMMA_COEF = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)

_ASYMPT_RE = 10.0  # asymptotic series kicks in once Re z >= this (or |Im| large)


def _trigamma_asymptotic(z):
    w = 1.0 / z
    w2 = w * w
    acc = np.zeros_like(z)
    for c in reversed(_TRIGAMMA_COEF):
        acc = (acc + c) * w2
    return w + 0.5 * w2 + acc * w


def trigamma(z):
    """psi'(z) for real or complex z (vectorized).

    Accurate to ~1e-14 relative away from the poles at 0, -1, -2, ...
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z).copy()
    out = np.zeros_like(z)

    # Far-left strip near the cut: reflect to Re >= 1.  The sin term is
    # computable as long as |Im| stays moderate.
    refl = (z.real < -_ASYMPT_RE) & (np.abs(z.imag) < 50.0)
    if np.any(refl):
        zr = z[refl]
        s = np.sin(np.pi * zr)
        out[refl] = (np.pi / s) ** 2 - trigamma(1.0 - zr)
    work = ~refl

    # Recurrence psi'(z) = psi'(z+1) + 1/z^2 until the series applies.
    zz = z[work]
    acc = np.zeros_like(zz)
    need = (zz.real < _ASYMPT_RE) & (np.abs(zz.imag) < 50.0)
    while np.any(need):
        acc[need] += 1.0 / zz[need] ** 2
        zz[need] += 1.0
        need = (zz.real < _ASYMPT_RE) & (np.abs(zz.imag) < 50.0)
    out[work] = acc + _trigamma_asymptotic(zz)
    return out[0] if scalar else out
