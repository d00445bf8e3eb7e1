"""
Exact restricted isometry and orthogonality constants
=====================================================

For small dictionaries the constants can be computed by visiting every
support. Each certificate names the support that attains the maximum.
"""

import numpy as np

from sompcert import ric_exact, roc_exact, roc_one_exact

rng = np.random.default_rng(1)
phi = rng.standard_normal((20, 12))
phi /= np.linalg.norm(phi, axis=0)

## delta_s grows with s
for s in range(1, 6):
    cert = ric_exact(phi, s)
    print(f"delta_{s} = {cert.delta:.4f}  witness {list(cert.witness)}")

## theta_{a,a'} never exceeds delta_{a+a'}
for a, b in [(1, 1), (1, 2), (2, 2), (1, 4)]:
    theta = roc_exact(phi, a, b).theta
    print(f"theta_{a},{b} = {theta:.4f} <= delta_{a + b} = {ric_exact(phi, a + b).delta:.4f}")

## The (1, s) constant has a closed form that agrees with full enumeration
print(roc_one_exact(phi, 3).theta, roc_exact(phi, 1, 3).theta)
