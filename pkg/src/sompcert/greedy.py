"""Simultaneous orthogonal matching pursuit and its single-vector case."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constants import TOL
from .errors import DimensionError
from .linalg import as_matrix, inf_induced_norm, project_onto_span


class SupportSet(tuple):
    """Sorted tuple of distinct, non-negative atom indices (0-based)."""

    def __new__(cls, indices=(), n=None):
        idx = sorted(int(i) for i in indices)
        if len(set(idx)) != len(idx):
            raise ValueError(f"support has duplicate indices: {idx}")
        if idx and idx[0] < 0:
            raise ValueError(f"support has negative index: {idx[0]}")
        if n is not None and idx and idx[-1] >= n:
            raise ValueError(f"support index {idx[-1]} out of range for {n} atoms")
        return super().__new__(cls, idx)

    def complement(self, n):
        members = set(self)
        return SupportSet((j for j in range(n) if j not in members), n=n)

    def __repr__(self):
        return f"SupportSet({list(self)})"


@dataclass(frozen=True)
class JointSparseSignal:
    """Coefficient matrix ``x`` (n x K) whose nonzero rows form ``joint_support``."""

    x: np.ndarray
    joint_support: SupportSet

    def __post_init__(self):
        x = as_matrix(self.x, "x")
        object.__setattr__(self, "x", x)
        support = SupportSet(self.joint_support, n=x.shape[0])
        object.__setattr__(self, "joint_support", support)
        nonzero_rows = SupportSet(np.flatnonzero(np.any(x != 0, axis=1)))
        if nonzero_rows != support:
            raise ValueError(
                f"declared joint support {list(support)} differs from nonzero rows {list(nonzero_rows)}"
            )

    @property
    def sparsity(self):
        return len(self.joint_support)

    @classmethod
    def from_matrix(cls, x):
        x = as_matrix(x, "x")
        return cls(x, SupportSet(np.flatnonzero(np.any(x != 0, axis=1))))


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    selected_atom: int
    metric_selected: float
    metric_best_correct: Optional[float]
    metric_best_incorrect: Optional[float]
    residual_frobenius: float
    observed_ratio: Optional[float]

    def to_dict(self):
        return {
            "iteration": self.iteration,
            "selected_atom": self.selected_atom,
            "metric_selected": self.metric_selected,
            "metric_best_correct": self.metric_best_correct,
            "metric_best_incorrect": self.metric_best_incorrect,
            "residual_frobenius": self.residual_frobenius,
            "observed_ratio": self.observed_ratio,
        }


@dataclass(frozen=True)
class RecoveryTrace:
    """Per-iteration audit of one pursuit run.

    ``stopped_early`` is set when the residual vanished before ``s``
    iterations; the trace then holds fewer than ``s`` records.
    """

    records: tuple
    final_support: SupportSet
    requested_iterations: int
    truth: Optional[SupportSet] = None
    exact_recovery: Optional[bool] = None
    stopped_early: bool = False
    n_atoms: int = field(default=0)

    @property
    def selected_atoms(self):
        return [rec.selected_atom for rec in self.records]

    def to_dict(self):
        return {
            "records": [rec.to_dict() for rec in self.records],
            "final_support": list(self.final_support),
            "requested_iterations": self.requested_iterations,
            "truth": None if self.truth is None else list(self.truth),
            "exact_recovery": self.exact_recovery,
            "stopped_early": self.stopped_early,
            "n_atoms": self.n_atoms,
        }


def somp_metric(residual, atom):
    """Sum over residual columns of ``|<atom, r_k>|``."""
    residual = as_matrix(residual, "residual")
    atom = as_matrix(atom, "atom")
    if atom.shape != (residual.shape[0], 1):
        raise DimensionError(
            f"atom must be a {residual.shape[0]}x1 column, got {atom.shape[0]}x{atom.shape[1]}"
        )
    return float(np.abs(atom[:, 0] @ residual).sum())


def _all_metrics(phi, residual):
    return np.abs(phi.T @ residual).sum(axis=1)


def _argmax_smallest_index(metrics):
    best = metrics.max()
    ties = np.flatnonzero(metrics >= best - TOL.argmax_tie_relative * best)
    return int(ties[0])


def observed_ratio(phi, truth, residual):
    """Ratio of the largest metric over the true atoms to the largest over the others.

    Returns
    -------
    value : float
        ``inf`` when no incorrect atom correlates with the residual.
    degenerate : bool
        True when both numerator and denominator are zero (zero residual).
    """
    phi = as_matrix(phi, "phi")
    residual = as_matrix(residual, "residual")
    truth = SupportSet(truth, n=phi.shape[1])
    if not truth:
        raise ValueError("truth support must be non-empty")
    others = truth.complement(phi.shape[1])
    if not others:
        raise ValueError("truth support must leave at least one atom outside it")
    correlations = phi.T @ residual
    num = inf_induced_norm(correlations[list(truth)])
    den = inf_induced_norm(correlations[list(others)])
    if den == 0.0:
        return float("inf"), num == 0.0
    return num / den, False


def somp(phi, y, s, truth=None):
    """Simultaneous orthogonal matching pursuit.

    Parameters
    ----------
    phi : array_like, shape (m, n)
        Dictionary; its columns are the atoms.
    y : array_like, shape (m, K)
        Measurement vectors, one per column.
    s : int
        Number of iterations, i.e. atoms to select.
    truth : iterable of int, optional
        True joint support. When given, each record carries the best
        correct and incorrect metrics and, while only correct atoms have
        been picked, the observed correct/incorrect ratio.

    Returns
    -------
    RecoveryTrace

    Notes
    -----
    The argmax scans all ``n`` atoms; ties within ``1e-12`` of the best
    metric go to the smallest index. If the best metric falls to
    ``1e-9 * ||y||_F`` or below the measurements are already explained and
    the run stops early with ``stopped_early=True``.
    """
    phi = as_matrix(phi, "phi")
    y = as_matrix(y, "y")
    m, n = phi.shape
    if y.shape[0] != m:
        raise DimensionError(f"phi is {m}x{n} but y has {y.shape[0]} rows")
    if not 1 <= s <= min(m, n):
        raise ValueError(f"s must lie in [1, {min(m, n)}], got {s}")
    if np.all(phi == 0):
        raise ValueError("phi has only zero columns")
    if truth is not None:
        truth = SupportSet(truth, n=n)
        if len(truth) != s:
            raise ValueError(f"truth has {len(truth)} atoms but s = {s}")
        truth_mask = np.zeros(n, dtype=bool)
        truth_mask[list(truth)] = True

    y_norm = float(np.linalg.norm(y))
    stop_level = TOL.residual_orthogonality * y_norm
    residual = y.copy()
    selected = []
    records = []
    stopped_early = False
    for t in range(s):
        metrics = _all_metrics(phi, residual)
        j = _argmax_smallest_index(metrics)
        if metrics[j] <= stop_level or j in selected:
            stopped_early = True
            break

        best_correct = best_incorrect = ratio = None
        if truth is not None:
            best_correct = float(metrics[truth_mask].max())
            best_incorrect = float(metrics[~truth_mask].max()) if (~truth_mask).any() else 0.0
            if all(truth_mask[k] for k in selected) and (~truth_mask).any():
                ratio, _ = observed_ratio(phi, truth, residual)

        selected.append(j)
        residual = y - project_onto_span(phi[:, selected], y)
        records.append(IterationRecord(
            iteration=t,
            selected_atom=j,
            metric_selected=float(metrics[j]),
            metric_best_correct=best_correct,
            metric_best_incorrect=best_incorrect,
            residual_frobenius=float(np.linalg.norm(residual)),
            observed_ratio=ratio,
        ))

    final = SupportSet(selected, n=n)
    return RecoveryTrace(
        records=tuple(records),
        final_support=final,
        requested_iterations=s,
        truth=truth,
        exact_recovery=None if truth is None else final == truth,
        stopped_early=stopped_early,
        n_atoms=n,
    )


def omp(phi, y_single, s, truth=None):
    """Orthogonal matching pursuit: :func:`somp` with a single measurement column."""
    y_single = as_matrix(y_single, "y_single")
    if y_single.shape[1] != 1:
        raise DimensionError(f"omp takes one measurement column, got {y_single.shape[1]}")
    return somp(phi, y_single, s, truth=truth)
