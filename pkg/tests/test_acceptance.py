"""Exit criteria for the package, one test per criterion.

Each test appends a PASS/FAIL line that is printed in the pytest terminal
summary under "acceptance criteria".
"""

import itertools
import math
import time

import numpy as np
import pytest

from sompcert import (
    RankDeficiencyError,
    SupportSet,
    TrialConfig,
    boundary_probe,
    erc_evaluate,
    gen_dictionary,
    lemma1_bound,
    lemma2_bounds,
    omp,
    ric_exact,
    roc_exact,
    roc_one_exact,
    run_campaign,
    somp,
)
from sompcert.experiments import blend_dictionary, degenerate_dictionary, gen_signal
from sompcert.io import dumps
from sompcert.linalg import symmetric_eigen_extremes

from conftest import unit_columns

CAMPAIGN_SPARSITIES = (2, 3, 4)
CAMPAIGN_SEED = 2016


def campaign_config(s):
    return TrialConfig(m=64, n=24, K=3, s=s, trials=1000, seed=CAMPAIGN_SEED,
                       amplitude_model="gaussian", normalize_columns=True)


def record(log, number, ok, detail):
    log.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}")
    assert ok, detail


@pytest.fixture(scope="session")
def campaign():
    start = time.perf_counter()
    reports = {s: run_campaign(campaign_config(s)) for s in CAMPAIGN_SPARSITIES}
    return reports, time.perf_counter() - start


@pytest.fixture(scope="session")
def small_dictionaries():
    return [gen_dictionary(TrialConfig(m=20, n=12, K=1, s=5, seed=404), i) for i in range(100)]


@pytest.fixture(scope="session")
def small_deltas(small_dictionaries):
    return [{k: ric_exact(phi, k).delta for k in range(1, 7)} for phi in small_dictionaries]


def test_1_theorem_soundness(campaign, acceptance_log):
    reports, elapsed = campaign
    covered = 0
    failures = 0
    for rep in reports.values():
        hits = [r for r in rep.records if r["erc1"] or r["erc2"] or r["erc3"]]
        covered += len(hits)
        failures += sum(1 for r in hits if not r["exact_recovery"])
    ok = failures == 0 and elapsed < 300
    record(acceptance_log, 1, ok,
           f"{covered} ERC-true trials of 3000, {failures} failed recoveries, {elapsed:.1f}s (< 300s)")


def test_2_lemma1_per_iteration(campaign, acceptance_log):
    reports, _ = campaign
    worst = math.inf
    violations = 0
    verified = 0
    for rep in reports.values():
        for r in rep.records:
            bound = lemma1_bound(r["delta_s"], r["theta_1_s"], rep.config.s)
            for ratio in r["observed_ratios"]:
                verified += 1
                margin = math.inf if ratio == math.inf else ratio - bound
                worst = min(worst, margin)
                if margin < -1e-9:
                    violations += 1
    record(acceptance_log, 2, violations == 0 and verified > 0,
           f"{verified} verified iterations, {violations} violations, min margin {worst:.3e}")


def test_3_lemma2_dominance(campaign, acceptance_log):
    # the bounds are defined only under the lemma hypothesis delta_s < 1;
    # beyond it both numerators turn negative and the ordering reverses
    reports, _ = campaign
    bad = 0
    checked = 0
    outside = 0
    for rep in reports.values():
        s = rep.config.s
        for r in rep.records:
            if r["delta_s"] >= 1.0:
                outside += 1
                continue
            l1 = lemma1_bound(r["delta_s"], r["theta_1_s"], s)
            for b in lemma2_bounds(r["delta_s"], r["delta_s_plus_1"], s):
                if b is None:
                    continue
                checked += 1
                if b > l1 + 1e-12:
                    bad += 1
    record(acceptance_log, 3, bad == 0,
           f"{checked} Lemma 2 bounds checked, {bad} exceed Lemma 1 "
           f"({outside} trials with delta_s >= 1 lie outside the bounds' domain)")


def test_4_roc_ric_inequalities(small_dictionaries, small_deltas, acceptance_log):
    start = time.perf_counter()
    pairs = [(a, b) for a in range(1, 5) for b in range(1, 5) if a + b <= 5]
    bad_first = bad_second = 0
    for phi, deltas in zip(small_dictionaries, small_deltas):
        for a, b in pairs:
            if roc_exact(phi, a, b).theta > deltas[a + b] + 1e-12:
                bad_first += 1
        for b in range(2, 6):
            if roc_exact(phi, 1, b).theta > math.sqrt(b / (b - 1)) * deltas[b] + 1e-12:
                bad_second += 1
    elapsed = time.perf_counter() - start
    record(acceptance_log, 4, bad_first == bad_second == 0 and elapsed < 120,
           f"100 dictionaries, {len(pairs)} (a, a') pairs: {bad_first} + {bad_second} violations, "
           f"{elapsed:.1f}s (< 120s)")


def test_5_ric_monotone(small_deltas, acceptance_log):
    bad = sum(1 for d in small_deltas for s in range(1, 6) if d[s] > d[s + 1] + 1e-12)
    record(acceptance_log, 5, bad == 0, f"delta_1..delta_6 on 100 dictionaries, {bad} violations")


def _ric_oracle(phi, s):
    best = 0.0
    for support in itertools.combinations(range(phi.shape[1]), s):
        sub = phi[:, support]
        lo, hi = symmetric_eigen_extremes(sub.T @ sub)
        best = max(best, 1 - lo, hi - 1)
    return best


def test_6_oracle_equivalence(acceptance_log):
    worst_roc = 0.0
    for i in range(50):
        phi = unit_columns(np.random.default_rng(6000 + i).standard_normal((12, 8)))
        for s in (2, 3, 4):
            worst_roc = max(worst_roc, abs(roc_one_exact(phi, s).theta - roc_exact(phi, 1, s).theta))
    worst_ric = 0.0
    for i in range(20):
        phi = unit_columns(np.random.default_rng(7000 + i).standard_normal((15, 10)))
        worst_ric = max(worst_ric, abs(ric_exact(phi, 3).delta - _ric_oracle(phi, 3)))
    record(acceptance_log, 6, worst_roc <= 1e-10 and worst_ric <= 1e-10,
           f"max |roc_one - roc(1,s)| = {worst_roc:.1e}, max |ric - oracle| = {worst_ric:.1e} (<= 1e-10)")


def _instance(seed, K):
    rng = np.random.default_rng(seed)
    phi = unit_columns(rng.standard_normal((16, 20)))
    support = sorted(rng.choice(20, 4, replace=False).tolist())
    x = np.zeros((20, K))
    x[support] = rng.standard_normal((4, K))
    return phi, phi @ x, support


def test_7_omp_somp_equivalence(acceptance_log):
    mismatched_a = 0
    for seed in range(500):
        phi, y, support = _instance(seed, 1)
        if somp(phi, y, 4, truth=support) != omp(phi, y, 4, truth=support):
            mismatched_a += 1

    cases = [(_instance(10_000 + seed, 1)[:2], 4) for seed in range(480)]
    probe = boundary_probe(TrialConfig(m=16, n=20, K=3, s=3, trials=10, seed=77), 6)
    failures = [e for e in probe if not e["exact_recovery"]][:20]
    cfg = TrialConfig(m=16, n=20, K=3, s=3, seed=77)
    for e in failures:
        raw = gen_dictionary(cfg, e["trial"])
        phi = blend_dictionary(raw, degenerate_dictionary(raw, 1), e["blend"])
        cases.append(((phi, phi @ gen_signal(cfg, e["trial"]).x[:, :1]), 3))
    mismatched_b = 0
    for (phi, y), s in cases:
        for copies in (2, 4, 8):
            try:
                single = omp(phi, y, s).selected_atoms
            except RankDeficiencyError:
                single = "rank"
            try:
                multi = somp(phi, np.repeat(y, copies, axis=1), s).selected_atoms
            except RankDeficiencyError:
                multi = "rank"
            if single != multi:
                mismatched_b += 1
    record(acceptance_log, 7, mismatched_a == 0 and mismatched_b == 0 and len(cases) >= 500,
           f"(a) 500 K=1 traces, {mismatched_a} mismatches; (b) {len(cases)} instances "
           f"({len(failures)} probe failures) x K in {{2,4,8}}, {mismatched_b} mismatches")


def test_8_erc3_implication(small_dictionaries, small_deltas, acceptance_log):
    applicable = 0
    bad = 0
    for phi, deltas in zip(small_dictionaries, small_deltas):
        for s in range(2, 5):
            if deltas[s + 1] < 1 / (s + 3 - math.sqrt(2)):
                applicable += 1
                if not erc_evaluate(phi, s).erc3:
                    bad += 1
    record(acceptance_log, 8, bad == 0,
           f"{applicable} (dictionary, s) pairs meet delta_(s+1) < 1/(s+3-sqrt2), {bad} without ERC3")


def test_9_degenerate_handling(acceptance_log):
    n, s = 8, 3
    phi = np.eye(n)
    rep = erc_evaluate(phi, s)
    constants_ok = rep.delta_s == rep.delta_s_plus_1 == rep.theta_1_s == 0.0
    ercs_ok = rep.erc1 and rep.erc2 and rep.erc3
    rng = np.random.default_rng(9)
    recovered = 0
    supports = list(itertools.combinations(range(n), s))
    for support in supports:
        x = np.zeros((n, 2))
        x[list(support)] = rng.standard_normal((s, 2))
        trace = somp(phi, phi @ x, s, truth=support)
        recovered += trace.exact_recovery and len(trace.records) == s

    dup = unit_columns(np.random.default_rng(10).standard_normal((10, 8)))
    dup[:, 5] = dup[:, 2]
    delta2 = ric_exact(dup, 2).delta
    paths = set()
    for support in itertools.combinations(range(8), 3):
        x = np.zeros((8, 2))
        x[list(support)] = 1.0
        try:
            trace = somp(dup, dup @ x, 3, truth=support)
            if trace.stopped_early:
                paths.add("early-stop")
        except RankDeficiencyError:
            paths.add("rank-deficiency")
    ok = (constants_ok and ercs_ok and recovered == len(supports)
          and abs(delta2 - 1.0) <= 1e-12 and paths)
    record(acceptance_log, 9, bool(ok),
           f"identity: deltas/theta zero={constants_ok}, all ERCs={ercs_ok}, "
           f"{recovered}/{len(supports)} supports in {s} iterations; duplicated column: "
           f"delta_2={delta2:.12f}, paths {sorted(paths)}, no crash")


def test_10_determinism(campaign, acceptance_log):
    reports, _ = campaign
    identical = all(
        dumps(run_campaign(campaign_config(s)).to_dict(include_wall_time=False))
        == dumps(reports[s].to_dict(include_wall_time=False))
        for s in CAMPAIGN_SPARSITIES
    )
    record(acceptance_log, 10, identical, "second full campaign run byte-identical JSON")
