"""Seeded instance generation and Monte-Carlo recovery campaigns."""

import csv
import dataclasses
import io
import math
import time
from dataclasses import dataclass

import numpy as np

from .certificates import erc_evaluate, verify_trace_bounds
from .errors import BudgetExceededError, RankDeficiencyError
from .greedy import JointSparseSignal, SupportSet, omp, somp
from .linalg import qr_decompose

AMPLITUDE_MODELS = ("unit", "gaussian", "rademacher")

# stream tags keep dictionary and signal draws independent for the same trial
_STREAM_DICTIONARY = 1
_STREAM_SIGNAL = 2

_GAUSSIAN_FLOOR = 1e-6


@dataclass(frozen=True)
class TrialConfig:
    m: int
    n: int
    K: int
    s: int
    trials: int = 1
    seed: int = 0
    amplitude_model: str = "gaussian"
    normalize_columns: bool = True
    orthogonalize: bool = False
    per_column_drop_probability: float = 0.0

    def validation_errors(self):
        """List every violated constraint (empty when the config is valid)."""
        errs = []
        for name in ("m", "n", "K", "s", "trials"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
                errs.append(f"{name} must be a positive integer, got {value!r}")
        if errs:
            return errs
        if self.s > self.m:
            errs.append(f"s = {self.s} exceeds m = {self.m}")
        if self.s + 1 > self.n:
            errs.append(f"s + 1 = {self.s + 1} exceeds n = {self.n}")
        if self.amplitude_model not in AMPLITUDE_MODELS:
            errs.append(f"amplitude_model must be one of {AMPLITUDE_MODELS}, got {self.amplitude_model!r}")
        if self.orthogonalize and self.m < self.n:
            errs.append(f"orthogonalize needs m >= n, got m = {self.m}, n = {self.n}")
        if not 0.0 <= self.per_column_drop_probability < 1.0:
            errs.append("per_column_drop_probability must lie in [0, 1)")
        if not 0 <= int(self.seed) < 2**64:
            errs.append("seed must be a 64-bit unsigned integer")
        return errs

    def validate(self):
        errs = self.validation_errors()
        if errs:
            raise ValueError("invalid TrialConfig: " + "; ".join(errs))
        return self

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - fields)
        if unknown:
            raise ValueError(f"unknown config fields: {unknown}")
        return cls(**data)


def trial_rng(seed, trial_index, stream):
    """Counter-based generator keyed by ``(seed, trial_index, stream)``.

    The result does not depend on how many other trials were drawn before,
    so trials can run in any order.
    """
    key = np.random.SeedSequence([int(seed), int(trial_index), int(stream)])
    return np.random.Generator(np.random.Philox(key))


def gen_dictionary(config, trial_index):
    """Gaussian ``m x n`` dictionary for one trial.

    Columns are scaled to unit norm when ``normalize_columns`` is set. With
    ``orthogonalize`` the matrix is replaced by the ``q`` factor of its QR
    decomposition, so its columns are exactly orthonormal up to rounding.
    """
    rng = trial_rng(config.seed, trial_index, _STREAM_DICTIONARY)
    phi = rng.standard_normal((config.m, config.n))
    if config.orthogonalize:
        phi = qr_decompose(phi).q
    if config.normalize_columns:
        phi = phi / np.linalg.norm(phi, axis=0)
    return phi


def _amplitudes(rng, model, shape):
    if model in ("unit", "rademacher"):
        return rng.choice(np.array([-1.0, 1.0]), size=shape)
    values = rng.standard_normal(shape)
    small = np.abs(values) < _GAUSSIAN_FLOOR
    while small.any():
        values[small] = rng.standard_normal(int(small.sum()))
        small = np.abs(values) < _GAUSSIAN_FLOOR
    return values


def gen_signal(config, trial_index):
    """Row-sparse ``n x K`` coefficient matrix with a uniformly drawn joint support.

    Every column is populated on the whole support unless
    ``per_column_drop_probability`` is positive, in which case entries are
    dropped independently while keeping at least one nonzero per support row.
    """
    rng = trial_rng(config.seed, trial_index, _STREAM_SIGNAL)
    support = np.sort(rng.choice(config.n, size=config.s, replace=False))
    coeffs = _amplitudes(rng, config.amplitude_model, (config.s, config.K))
    if config.per_column_drop_probability > 0:
        drop = rng.random((config.s, config.K)) < config.per_column_drop_probability
        keep = rng.integers(config.K, size=config.s)
        drop[np.arange(config.s), keep] = False
        coeffs[drop] = 0.0
    x = np.zeros((config.n, config.K))
    x[support] = coeffs
    return JointSparseSignal(x, SupportSet(support.tolist(), n=config.n))


def _clean(value):
    return None if value is None else float(value)


def _run_trial(config, index, phi=None, budget=None):
    if phi is None:
        phi = gen_dictionary(config, index)
    signal = gen_signal(config, index)
    y = phi @ signal.x
    s = signal.sparsity
    try:
        report = erc_evaluate(phi, s, budget)
    except BudgetExceededError as exc:
        raise BudgetExceededError(exc.required, exc.budget,
                                  f"supports (trial {index})") from exc
    trace = somp(phi, y, s, truth=signal.joint_support)
    check = verify_trace_bounds(trace, report)
    lemma1_margins = [row["lemma1"] for row in check.margins]
    return {
        "trial": index,
        "support": list(signal.joint_support),
        "selected": trace.selected_atoms,
        "exact_recovery": bool(trace.exact_recovery),
        "stopped_early": trace.stopped_early,
        "delta_s": report.delta_s,
        "delta_s_plus_1": report.delta_s_plus_1,
        "theta_1_s": report.theta_1_s,
        "lemma1_bound": report.lemma1_bound,
        "lemma2_bound_a": report.lemma2_bound_a,
        "lemma2_bound_b": _clean(report.lemma2_bound_b),
        "erc1": report.erc1,
        "erc2": report.erc2,
        "erc3": report.erc3,
        "erc_legacy_liu": report.erc_legacy_liu,
        "erc_legacy_davenport": report.erc_legacy_davenport,
        "erc_mo_sharp_informational": report.erc_mo_sharp_informational,
        "any_erc": report.any_erc,
        "observed_ratios": [rec.observed_ratio for rec in trace.records
                            if rec.observed_ratio is not None],
        "verified_iterations": check.verified_iterations,
        "min_margin": check.min_margin,
        "min_lemma1_margin": min(lemma1_margins) if lemma1_margins else math.inf,
        "bounds_passed": check.passed,
        "bound_violations": len(check.violations),
    }


_BUCKETS = ("erc1", "erc2", "erc3", "any_erc", "erc_legacy_liu",
            "erc_legacy_davenport", "erc_mo_sharp_informational")


def _aggregate(records):
    total = len(records)
    recovered = sum(r["exact_recovery"] for r in records)
    conditioned = {}
    for name in _BUCKETS:
        hits = [r for r in records if r[name]]
        ok = sum(r["exact_recovery"] for r in hits)
        conditioned[name] = {
            "trials": len(hits),
            "recovered": ok,
            "recovery_rate": ok / len(hits) if hits else "not applicable",
        }
    margins = [r["min_lemma1_margin"] for r in records if r["verified_iterations"]]
    return {
        "trials": total,
        "recovered": recovered,
        "recovery_rate": recovered / total if total else "not applicable",
        "conditioned": conditioned,
        "erc_true_but_failed": sum(1 for r in records if r["any_erc"] and not r["exact_recovery"]),
        "bound_violations": sum(r["bound_violations"] for r in records),
        "verified_iterations": sum(r["verified_iterations"] for r in records),
        "min_lemma1_margin": min(margins) if margins else "not applicable",
    }


@dataclass
class CampaignReport:
    config: TrialConfig
    records: list
    aggregates: dict
    wall_time: float = 0.0

    @property
    def soundness_violations(self):
        return self.aggregates["erc_true_but_failed"]

    def to_dict(self, include_wall_time=True):
        out = {
            "config": self.config.to_dict(),
            "records": self.records,
            "aggregates": self.aggregates,
        }
        if include_wall_time:
            out["wall_time_seconds"] = self.wall_time
        return out

    def to_csv(self):
        """One row per trial; list-valued fields are joined with spaces."""
        buf = io.StringIO()
        if not self.records:
            return ""
        writer = csv.DictWriter(buf, fieldnames=list(self.records[0]), lineterminator="\n")
        writer.writeheader()
        for rec in self.records:
            writer.writerow({k: " ".join(map(repr, v)) if isinstance(v, list) else v
                             for k, v in rec.items()})
        return buf.getvalue()


def run_campaign(config, progress=None, budget=None):
    """Run ``config.trials`` independent seeded trials and aggregate the outcomes.

    Each trial draws a dictionary and a joint-sparse signal, computes the
    exact recovery certificate, runs SOMP against the true support and
    checks the per-iteration lemma bounds. Output depends only on
    ``config`` (apart from ``wall_time``).
    """
    config.validate()
    start = time.perf_counter()
    records = []
    for index in range(config.trials):
        records.append(_run_trial(config, index, budget=budget))
        if progress is not None:
            progress(index)
    return CampaignReport(
        config=config,
        records=records,
        aggregates=_aggregate(records),
        wall_time=time.perf_counter() - start,
    )


def degenerate_dictionary(phi, distinct):
    """Copy of ``phi`` whose columns cycle through its first ``distinct`` columns."""
    n = phi.shape[1]
    return phi[:, np.arange(n) % distinct]


def blend_dictionary(phi, target, weight):
    """Convex blend ``(1 - weight) * phi + weight * target`` with unit-norm columns."""
    mixed = (1.0 - weight) * phi + weight * target
    norms = np.linalg.norm(mixed, axis=0)
    norms[norms == 0] = 1.0
    return mixed / norms


def replicated_equivalence(phi, y, copies, s):
    """True when SOMP on ``copies`` replicas of ``y`` picks the same atoms as OMP on ``y``."""
    y = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    single = omp(phi, y, s)
    multi = somp(phi, np.repeat(y, copies, axis=1), s)
    return single.selected_atoms == multi.selected_atoms


def boundary_probe(base, perturbation_steps, distinct=None, budget=None):
    """Drive a random dictionary towards a rank-deficient one and record recovery outcomes.

    For each blend weight in ``linspace(0, 1, perturbation_steps)`` and each
    of ``base.trials`` seeded trials, the Gaussian dictionary is blended
    towards a copy whose columns repeat its first ``distinct`` columns
    (default ``max(1, s // 2)``, so the end point has duplicated atoms).

    Returns
    -------
    list of dict
        One entry per instance with the blend weight, exact constants,
        criterion verdicts and margins, the recovery outcome, and for
        failures whether SOMP on replicated columns agrees with OMP.
    """
    base.validate()
    if perturbation_steps < 1:
        raise ValueError("perturbation_steps must be at least 1")
    distinct = distinct or max(1, base.s // 2)
    weights = np.linspace(0.0, 1.0, perturbation_steps) if perturbation_steps > 1 else np.array([0.0])
    out = []
    for trial in range(base.trials):
        raw = gen_dictionary(base, trial)
        target = degenerate_dictionary(raw, distinct)
        signal = gen_signal(base, trial)
        s = signal.sparsity
        for step, weight in enumerate(weights):
            phi = blend_dictionary(raw, target, float(weight))
            y = phi @ signal.x
            report = erc_evaluate(phi, s, budget)
            entry = {
                "trial": trial,
                "step": step,
                "blend": float(weight),
                "support": list(signal.joint_support),
                "delta_s": report.delta_s,
                "delta_s_plus_1": report.delta_s_plus_1,
                "theta_1_s": report.theta_1_s,
                "erc1": report.erc1,
                "erc2": report.erc2,
                "erc3": report.erc3,
                "erc1_margin": report.lemma1_bound - 1.0,
                "erc2_margin": (1.0 / (math.sqrt(s) + 1.0)) - report.delta_s_plus_1,
                "erc3_margin": (math.sqrt(s - 1) / (math.sqrt(s - 1) + s) - report.delta_s)
                if s >= 2 else None,
                "rank_deficient": False,
                "stopped_early": False,
            }
            try:
                trace = somp(phi, y, s, truth=signal.joint_support)
                entry["exact_recovery"] = bool(trace.exact_recovery)
                entry["selected"] = trace.selected_atoms
                entry["stopped_early"] = trace.stopped_early
            except RankDeficiencyError:
                entry["exact_recovery"] = False
                entry["selected"] = None
                entry["rank_deficient"] = True
            entry["any_erc"] = report.any_erc
            entry["sufficient_not_necessary"] = entry["exact_recovery"] and not report.any_erc
            entry["replicated_equivalence"] = None
            if not entry["exact_recovery"]:
                try:
                    entry["replicated_equivalence"] = replicated_equivalence(phi, y[:, 0], base.K, s)
                except RankDeficiencyError:
                    entry["replicated_equivalence"] = "rank deficient"
            out.append(entry)
    return out
