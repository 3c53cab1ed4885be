"""Constructing admissible weights and checking what they promise.

Three routes to a weight:
  * catalog primitives and closure rules (shifts, powers, products,
    iterated-log scales);
  * the slowly-varying construction log gamma(s) = s^2 int (log ell)'(u)
    /(s+u) du, which prescribes the growth scale ell;
  * positive integral representations exp(A + Bs + (s-a)^2 int dmu/(u+s)),
    whose decay density K stays nonnegative on the ray (so the weight's
    moment problem has an explicit nonnegative solution).

Every build is auditable: the admissibility audit probes positivity,
slow variation and angular stability of eps, and the Carleman ladder
collects determinacy evidence for the moment problem.
"""
import math

import numpy as np

from mellin_saddle import (audit_admissibility, build_positive_type,
                           build_theorem3, ell_exp_sqrt_log, ell_power,
                           eval_K, gamma_shift, iterated_log, LogSurfacePoint,
                           monomial_exponent, positive_type_factorial,
                           positive_type_iterated_log, product, verify_carleman,
                           verify_positivity, verify_theorem3_limits)

print("== audits ==")
for f in (gamma_shift(1.0), iterated_log(1.0, 1.0, 1, math.e),
          product(gamma_shift(1.0), iterated_log(1.0, 1.0, 1, math.e)),
          monomial_exponent(2.0)):
    rep = audit_admissibility(f)
    verdict = "admissible-looking" if rep.passed else "REJECTED by audit"
    print(f"  {f.label:48s} {verdict}  (eps range "
          f"[{rep.epsilon_min:.3g}, {rep.epsilon_sup:.3g}])")

print("\n== prescribed growth scales ==")
for ell in (ell_power(2.0, 1e-6), ell_exp_sqrt_log(1e-6)):
    f = build_theorem3(ell)
    rep = verify_theorem3_limits(ell)
    rho = 1e6
    lg = float(np.real(f.log_gamma(complex(rho))))
    le = float(ell.log_ell(np.array([rho]))[0])
    print(f"  ell = {ell.label}: log gamma(1e6)/(1e6 log ell(1e6)) = "
          f"{lg/(rho*le):.4f} -> 1   [suite {'ok' if rep.passed else 'FAIL'}]")

print("\n== positive representations ==")
fm = build_positive_type(positive_type_factorial())
print(f"  {fm.label}: log gamma(5) = "
      f"{complex(fm.log_gamma(5.0+0j)).real:.10f} "
      f"(log 5! = {math.log(120):.10f})")
rep = verify_positivity(fm, np.geomspace(0.3, 10.0, 7))
print(f"  decay density sign check on [0.3, 10]: "
      f"{'nonnegative' if rep.passed else 'FAIL'}")

jump = build_positive_type(positive_type_iterated_log(1.0, 1, 10.0))
direct = iterated_log(1.0, 1.0, 1, 10.0)
s = 20.0 + 0j
print(f"  {jump.label}:")
print(f"    vs direct build at s=20: {complex(jump.log_gamma(s)).real:.8f} "
      f"~ {complex(direct.log_gamma(s)).real:.8f}")
t = 4.0
k = eval_K(jump, LogSurfacePoint(math.log(t), 0.0))
print(f"    K({t}) = {k.value.real * math.exp(k.log_scale):.6e}  (> 0)")

print("\n== determinacy evidence (Carleman ladder) ==")
for f in (gamma_shift(0.0), iterated_log(1.0, 1.0, 1, math.e),
          monomial_exponent(3.0)):
    rep = verify_carleman(f, 50_000)
    print(f"  {f.label:40s} "
          f"{'diverging sums: determinate-looking' if rep.passed else 'sums converge: indeterminate-looking'}"
          f"  [{rep.notes[-1]}]")
