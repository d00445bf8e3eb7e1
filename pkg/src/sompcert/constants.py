"""Numerical tolerances shared by the library and its tests."""

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    qr_orthonormality: float = 1e-10
    qr_reconstruction: float = 1e-10
    qr_rank_relative: float = 1e-12
    lstsq_orthogonality: float = 1e-9
    projection_idempotence: float = 1e-10
    symmetry_relative: float = 1e-12
    jacobi_offdiag_relative: float = 1e-12
    jacobi_max_sweeps: int = 100
    argmax_tie_relative: float = 1e-12
    residual_orthogonality: float = 1e-9
    bound_slack: float = 1e-9
    constant_accuracy: float = 1e-12
    erc_borderline: float = 1e-9
    constant_equality: float = 1e-10
    inequality_slack: float = 1e-12


TOL = Tolerances()

DEFAULT_BUDGET = 2_000_000
BUDGET_ENV_VAR = "SOMP_CERT_BUDGET"


def enumeration_budget(override=None):
    """Return the support-enumeration budget.

    An explicit ``override`` wins, then the ``SOMP_CERT_BUDGET`` environment
    variable, then the default of two million supports.
    """
    if override is not None:
        return int(override)
    env = os.environ.get(BUDGET_ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_BUDGET
