"""
Certifying a recovery run
=========================

``erc_evaluate`` computes delta_s, delta_{s+1} and theta_{1,s} exactly and
evaluates every recovery criterion. ``verify_trace_bounds`` then checks
that each SOMP iteration respected the guaranteed correct/incorrect
metric ratio.
"""

import numpy as np

from sompcert import erc_evaluate, somp, verify_trace_bounds

rng = np.random.default_rng(3)
m, n, K, s = 64, 24, 3, 2
phi = rng.standard_normal((m, n))
phi /= np.linalg.norm(phi, axis=0)

report = erc_evaluate(phi, s)
print(f"delta_s={report.delta_s:.3f} delta_s+1={report.delta_s_plus_1:.3f} "
      f"theta_1,s={report.theta_1_s:.3f}")
print("ERC1", report.erc1, "ERC2", report.erc2, "ERC3", report.erc3)
print("bounds", report.lemma1_bound, report.lemma2_bound_a, report.lemma2_bound_b)

support = np.sort(rng.choice(n, s, replace=False))
x = np.zeros((n, K))
x[support] = rng.standard_normal((s, K))
trace = somp(phi, phi @ x, s, truth=support)
check = verify_trace_bounds(trace, report)
print("exact recovery", trace.exact_recovery)
print("verified iterations", check.verified_iterations, "min margin", check.min_margin)
