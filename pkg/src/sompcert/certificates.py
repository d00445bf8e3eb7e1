"""Exact restricted isometry / orthogonality constants and recovery certificates.

Constants are computed by exhaustive support enumeration, which is only
feasible for small dictionaries. Every enumeration is checked against a
budget (default two million supports) before any work is done.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .constants import TOL, enumeration_budget
from .errors import BudgetExceededError, DimensionError
from .greedy import RecoveryTrace, SupportSet
from .linalg import as_matrix, spectral_norm, symmetric_eigen_extremes

_CHUNK = 50_000


@dataclass(frozen=True)
class IsometryCertificate:
    order: int
    delta: float
    witness: SupportSet
    witness_extreme: float

    def to_dict(self):
        return {
            "order": self.order,
            "delta": self.delta,
            "witness": list(self.witness),
            "witness_extreme": self.witness_extreme,
        }


@dataclass(frozen=True)
class OrthogonalityCertificate:
    alpha: int
    alpha_prime: int
    theta: float
    witness_a: SupportSet
    witness_b: SupportSet

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "alpha_prime": self.alpha_prime,
            "theta": self.theta,
            "witness_a": list(self.witness_a),
            "witness_b": list(self.witness_b),
        }


@lru_cache(maxsize=32)
def _combinations(n, k):
    idx = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(n), k)),
                      dtype=np.intp, count=math.comb(n, k) * k)
    idx = idx.reshape(-1, k)
    idx.setflags(write=False)
    return idx


def _support_chunks(n, k):
    """Lexicographically ordered blocks of size-``k`` supports."""
    if math.comb(n, k) <= 200_000:
        idx = _combinations(n, k)
        for start in range(0, len(idx), _CHUNK):
            yield idx[start:start + _CHUNK]
        return
    it = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def _check_budget(required, budget, what="supports"):
    budget = enumeration_budget(budget)
    if required > budget:
        raise BudgetExceededError(required, budget, what)


def ric_exact(phi, s, budget=None):
    """Restricted isometry constant of order ``s`` by exhaustive enumeration.

    Only supports of size exactly ``s`` are visited: eigenvalue interlacing
    makes the deviation of a principal submatrix no larger than that of any
    Gram matrix containing it.

    Raises
    ------
    BudgetExceededError
        When ``C(n, s)`` exceeds the enumeration budget.
    """
    phi = as_matrix(phi, "phi")
    n = phi.shape[1]
    if not 1 <= s <= n:
        raise ValueError(f"order must lie in [1, {n}], got {s}")
    _check_budget(math.comb(n, s), budget)

    gram = phi.T @ phi
    best = -np.inf
    best_support = None
    for block in _support_chunks(n, s):
        sub = gram[block[:, :, None], block[:, None, :]]
        eig = np.linalg.eigvalsh(sub)
        dev = np.maximum(1.0 - eig[:, 0], eig[:, -1] - 1.0)
        i = int(np.argmax(dev))
        # strict comparison keeps the lexicographically first witness
        if dev[i] > best:
            best = float(dev[i])
            best_support = block[i]

    witness = SupportSet(best_support.tolist(), n=n)
    lo, hi = symmetric_eigen_extremes(gram[np.ix_(witness, witness)])
    delta = max(1.0 - lo, hi - 1.0)
    extreme = lo if 1.0 - lo >= hi - 1.0 else hi
    return IsometryCertificate(order=s, delta=max(delta, 0.0), witness=witness,
                               witness_extreme=extreme)


def roc_exact(phi, alpha, alpha_prime, budget=None):
    """Restricted orthogonality constant by enumerating disjoint support pairs.

    The constant is the largest spectral norm of ``phi_A.T @ phi_B`` over
    disjoint supports with ``|A| = alpha`` and ``|B| = alpha_prime``.
    """
    phi = as_matrix(phi, "phi")
    n = phi.shape[1]
    if alpha < 1 or alpha_prime < 1 or alpha + alpha_prime > n:
        raise ValueError(
            f"need alpha, alpha_prime >= 1 and alpha + alpha_prime <= {n}, got ({alpha}, {alpha_prime})"
        )
    required = math.comb(n, alpha) * math.comb(n - alpha, alpha_prime)
    _check_budget(required, budget, "support pairs")

    gram = phi.T @ phi
    best = -np.inf
    best_pair = None
    for a in itertools.combinations(range(n), alpha):
        rest = np.array([j for j in range(n) if j not in a], dtype=np.intp)
        a_idx = np.array(a, dtype=np.intp)
        for block in _support_chunks(len(rest), alpha_prime):
            b_idx = rest[block]
            cross = gram[a_idx[None, :, None], b_idx[:, None, :]]
            norms = np.linalg.svd(cross, compute_uv=False)[:, 0]
            i = int(np.argmax(norms))
            if norms[i] > best:
                best = float(norms[i])
                best_pair = (a, b_idx[i].tolist())

    wa = SupportSet(best_pair[0], n=n)
    wb = SupportSet(best_pair[1], n=n)
    theta = spectral_norm(gram[np.ix_(wa, wb)])
    return OrthogonalityCertificate(alpha=alpha, alpha_prime=alpha_prime, theta=theta,
                                    witness_a=wa, witness_b=wb)


def roc_one_exact(phi, s):
    """The ``(1, s)`` orthogonality constant in closed form.

    For a single atom ``j`` the best partner support collects the ``s``
    largest squared inner products ``<phi_i, phi_j>**2`` with ``i != j``.
    """
    phi = as_matrix(phi, "phi")
    n = phi.shape[1]
    if s < 1 or s + 1 > n:
        raise ValueError(f"need 1 <= s <= {n - 1}, got {s}")
    sq = (phi.T @ phi) ** 2
    np.fill_diagonal(sq, -np.inf)
    # stable sort: ties favour the smaller partner index
    order = np.argsort(-sq, axis=1, kind="stable")[:, :s]
    totals = np.take_along_axis(sq, order, axis=1).sum(axis=1)
    j = int(np.argmax(totals))
    return OrthogonalityCertificate(
        alpha=1, alpha_prime=s, theta=float(np.sqrt(max(totals[j], 0.0))),
        witness_a=SupportSet([j], n=n), witness_b=SupportSet(order[j].tolist(), n=n),
    )


def lemma1_bound(delta_s, theta_1_s, s):
    """Guaranteed lower bound on the correct/incorrect metric ratio.

    ``(1 - delta_s) / (theta_1_s * sqrt(s))``. A zero ``theta_1_s`` gives
    ``inf`` (incorrect atoms never correlate with the residual). When
    ``delta_s >= 1`` the bound carries no information and ``0.0`` is
    returned for the zero-``theta`` case.
    """
    if delta_s < 0 or theta_1_s < 0 or s < 1:
        raise ValueError(f"invalid arguments delta={delta_s}, theta={theta_1_s}, s={s}")
    if theta_1_s == 0.0:
        return math.inf if delta_s < 1 else 0.0
    return (1.0 - delta_s) / (theta_1_s * math.sqrt(s))


def lemma2_bounds(delta_s, delta_s_plus_1, s):
    """The two RIC-only lower bounds on the metric ratio.

    Returns
    -------
    bound_a : float
        ``(1 - d1) / (d1 * sqrt(s))`` with ``d1 = delta_{s+1}``.
    bound_b : float or None
        ``(1 - d) * sqrt(s - 1) / (d * s)`` with ``d = delta_s``; ``None``
        when ``s < 2``.
    """
    if delta_s < 0 or delta_s_plus_1 < 0 or s < 1:
        raise ValueError(f"invalid arguments delta_s={delta_s}, delta_s1={delta_s_plus_1}, s={s}")

    def ratio(num, den):
        if den == 0.0:
            return math.inf if num > 0 else 0.0
        return num / den

    bound_a = ratio(1.0 - delta_s_plus_1, delta_s_plus_1 * math.sqrt(s))
    bound_b = None
    if s >= 2:
        bound_b = ratio((1.0 - delta_s) * math.sqrt(s - 1), delta_s * s)
    return bound_a, bound_b


def erc2_threshold(s):
    return 1.0 / (math.sqrt(s) + 1.0)


def erc3_threshold(s):
    return math.sqrt(s - 1) / (math.sqrt(s - 1) + s)


@dataclass(frozen=True)
class ErcReport:
    """Exact constants, bound values and every recovery-criterion verdict for one ``(phi, s)``.

    ``erc3`` and ``lemma2_bound_b`` are ``None`` for ``s = 1`` (not
    applicable). ``erc_mo_sharp_informational`` is reported but is not a
    proven guarantee for the multi-vector algorithm. ``borderline`` names
    criteria whose quantity lies within ``1e-9`` of its threshold.
    """

    s: int
    delta_s: float
    delta_s_plus_1: float
    theta_1_s: float
    lemma1_bound: float
    lemma2_bound_a: float
    lemma2_bound_b: Optional[float]
    erc1: bool
    erc2: bool
    erc3: Optional[bool]
    erc_legacy_liu: bool
    erc_legacy_davenport: bool
    erc_mo_sharp_informational: bool
    borderline: tuple
    ric_s: IsometryCertificate
    ric_s_plus_1: IsometryCertificate
    roc_1_s: OrthogonalityCertificate

    @property
    def any_erc(self):
        return bool(self.erc1 or self.erc2 or self.erc3)

    def to_dict(self):
        return {
            "s": self.s,
            "delta_s": self.delta_s,
            "delta_s_plus_1": self.delta_s_plus_1,
            "theta_1_s": self.theta_1_s,
            "lemma1_bound": self.lemma1_bound,
            "lemma2_bound_a": self.lemma2_bound_a,
            "lemma2_bound_b": self.lemma2_bound_b,
            "erc1": self.erc1,
            "erc2": self.erc2,
            "erc3": self.erc3,
            "erc_legacy_liu": self.erc_legacy_liu,
            "erc_legacy_davenport": self.erc_legacy_davenport,
            "erc_mo_sharp_informational": self.erc_mo_sharp_informational,
            "borderline": list(self.borderline),
            "ric_s": self.ric_s.to_dict(),
            "ric_s_plus_1": self.ric_s_plus_1.to_dict(),
            "roc_1_s": self.roc_1_s.to_dict(),
        }


def erc_report_from_constants(s, ric_s, ric_s1, roc):
    """Assemble an :class:`ErcReport` from precomputed certificates."""
    d, d1, th = ric_s.delta, ric_s1.delta, roc.theta
    l1 = lemma1_bound(d, th, s)
    l2a, l2b = lemma2_bounds(d, d1, s)
    root = math.sqrt(s)
    near = TOL.erc_borderline

    checks = {
        "erc1": (l1, 1.0),
        "erc2": (d1, erc2_threshold(s)),
        "erc_legacy_liu": (d1, 1.0 / ((1.0 + math.sqrt(2.0)) * root)),
        "erc_legacy_davenport": (d1, 1.0 / (3.0 * root)),
        "erc_mo_sharp_informational": (d1, 1.0 / math.sqrt(s + 1)),
    }
    if s >= 2:
        checks["erc3"] = (d, erc3_threshold(s))
    borderline = tuple(sorted(name for name, (value, thr) in checks.items()
                              if math.isfinite(value) and abs(value - thr) <= near))

    return ErcReport(
        s=s, delta_s=d, delta_s_plus_1=d1, theta_1_s=th,
        lemma1_bound=l1, lemma2_bound_a=l2a, lemma2_bound_b=l2b,
        erc1=l1 > 1.0,
        erc2=d1 < erc2_threshold(s),
        erc3=(d < erc3_threshold(s)) if s >= 2 else None,
        erc_legacy_liu=d1 < 1.0 / ((1.0 + math.sqrt(2.0)) * root),
        erc_legacy_davenport=d1 < 1.0 / (3.0 * root),
        erc_mo_sharp_informational=d1 < 1.0 / math.sqrt(s + 1),
        borderline=borderline,
        ric_s=ric_s, ric_s_plus_1=ric_s1, roc_1_s=roc,
    )


def erc_evaluate(phi, s, budget=None):
    """Compute ``delta_s``, ``delta_{s+1}`` and ``theta_{1,s}`` exactly and evaluate every criterion."""
    phi = as_matrix(phi, "phi")
    n = phi.shape[1]
    if not 1 <= s < n:
        raise ValueError(f"need 1 <= s <= {n - 1} so that order s+1 exists, got {s}")
    # check both budgets up front so nothing is computed in vain
    _check_budget(math.comb(n, s), budget)
    _check_budget(math.comb(n, s + 1), budget)
    return erc_report_from_constants(
        s, ric_exact(phi, s, budget), ric_exact(phi, s + 1, budget), roc_one_exact(phi, s)
    )


@dataclass(frozen=True)
class TraceVerification:
    """Per-iteration margins ``observed_ratio - bound`` for each applicable bound.

    ``vacuous`` marks a trace with no eligible iteration (for instance a run
    that stopped before its first selection), so nothing was checked.
    """

    margins: tuple
    min_margin: float
    verified_iterations: int
    passed: bool
    vacuous: bool
    violations: tuple

    def to_dict(self):
        return {
            "margins": [dict(m) for m in self.margins],
            "min_margin": self.min_margin,
            "verified_iterations": self.verified_iterations,
            "passed": self.passed,
            "vacuous": self.vacuous,
            "violations": [dict(v) for v in self.violations],
        }


def _margin(ratio, bound):
    if ratio == math.inf:
        return math.inf
    return ratio - bound


def verify_trace_bounds(trace: RecoveryTrace, report: ErcReport):
    """Check every eligible iteration of ``trace`` against the lemma bounds in ``report``.

    Eligible iterations are those reached while only correct atoms had been
    selected. The bounds are evaluated with every constant moved by its
    computational accuracy (``1e-12``) in the unfavourable direction, so
    rounding in near-orthonormal dictionaries cannot fake a violation. A
    bound passes when the observed ratio is at least the bound minus ``1e-9``.
    """
    if trace.truth is None:
        raise ValueError("trace was produced without a truth support")
    if len(trace.truth) != report.s:
        raise DimensionError(f"trace truth has {len(trace.truth)} atoms, report is for s = {report.s}")

    eps = TOL.constant_accuracy
    s = report.s
    d, d1 = report.delta_s + eps, report.delta_s_plus_1 + eps
    bounds = {"lemma1": lemma1_bound(d, report.theta_1_s + eps, s)}
    bound_a, bound_b = lemma2_bounds(d, d1, s)
    bounds["lemma2_a"] = bound_a
    if bound_b is not None:
        bounds["lemma2_b"] = bound_b

    margins = []
    violations = []
    for rec in trace.records:
        if rec.observed_ratio is None:
            break
        row = {"iteration": rec.iteration}
        for name, bound in bounds.items():
            margin = _margin(rec.observed_ratio, bound)
            row[name] = margin
            if not margin >= -TOL.bound_slack:
                violations.append({"iteration": rec.iteration, "bound": name, "margin": margin})
        margins.append(row)

    all_margins = [v for row in margins for k, v in row.items() if k != "iteration"]
    return TraceVerification(
        margins=tuple(margins),
        min_margin=min(all_margins) if all_margins else math.inf,
        verified_iterations=len(margins),
        passed=not violations,
        vacuous=not margins,
        violations=tuple(violations),
    )
