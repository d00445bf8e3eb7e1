import json

import numpy as np
import pytest

from sompcert.certificates import erc_evaluate, ric_exact
from sompcert.experiments import (
    TrialConfig,
    blend_dictionary,
    boundary_probe,
    degenerate_dictionary,
    gen_dictionary,
    gen_signal,
    run_campaign,
)
from sompcert.io import dumps


def test_dictionary_deterministic_and_normalized():
    cfg = TrialConfig(m=10, n=14, K=2, s=3, seed=99)
    a = gen_dictionary(cfg, 4)
    assert np.array_equal(a, gen_dictionary(cfg, 4))
    assert not np.array_equal(a, gen_dictionary(cfg, 5))
    np.testing.assert_allclose(np.linalg.norm(a, axis=0), 1.0, atol=1e-12)


def test_dictionary_without_normalization():
    cfg = TrialConfig(m=10, n=14, K=2, s=3, normalize_columns=False)
    assert np.abs(np.linalg.norm(gen_dictionary(cfg, 0), axis=0) - 1).max() > 1e-3


def test_trial_independent_of_order():
    cfg = TrialConfig(m=8, n=10, K=2, s=2, seed=5)
    later = gen_signal(cfg, 7).x
    for i in range(7):
        gen_signal(cfg, i)
    assert np.array_equal(later, gen_signal(cfg, 7).x)


@pytest.mark.parametrize("model", ["unit", "rademacher"])
def test_unit_amplitudes(model):
    cfg = TrialConfig(m=8, n=12, K=3, s=4, amplitude_model=model)
    for i in range(20):
        sig = gen_signal(cfg, i)
        assert len(sig.joint_support) == 4
        np.testing.assert_array_equal(np.abs(sig.x[list(sig.joint_support)]), 1.0)


def test_gaussian_amplitudes_bounded_away_from_zero():
    cfg = TrialConfig(m=8, n=12, K=5, s=4, amplitude_model="gaussian", seed=3)
    smallest = min(np.abs(gen_signal(cfg, i).x[list(gen_signal(cfg, i).joint_support)]).min()
                   for i in range(500))
    assert smallest >= 1e-6


def test_drop_probability_keeps_union():
    cfg = TrialConfig(m=8, n=12, K=4, s=4, per_column_drop_probability=0.7, seed=1)
    for i in range(30):
        sig = gen_signal(cfg, i)
        assert len(sig.joint_support) == 4
        assert np.all(np.any(sig.x[list(sig.joint_support)] != 0, axis=1))


def test_config_validation_lists_every_error():
    cfg = TrialConfig(m=3, n=3, K=1, s=4, amplitude_model="weird", per_column_drop_probability=2.0)
    errs = cfg.validation_errors()
    assert len(errs) == 4
    with pytest.raises(ValueError):
        cfg.validate()


def test_orthogonalized_campaign_recovers_everything():
    cfg = TrialConfig(m=12, n=12, K=2, s=3, trials=15, orthogonalize=True, seed=2)
    rep = run_campaign(cfg)
    assert rep.aggregates["recovery_rate"] == 1.0
    for rec in rep.records:
        assert rec["erc1"] and rec["erc2"] and rec["erc3"]
    assert rep.aggregates["bound_violations"] == 0


def test_empty_bucket_is_not_applicable():
    cfg = TrialConfig(m=6, n=16, K=2, s=3, trials=5, seed=4)
    rep = run_campaign(cfg)
    assert rep.aggregates["conditioned"]["erc1"]["trials"] == 0
    assert rep.aggregates["conditioned"]["erc1"]["recovery_rate"] == "not applicable"
    json.loads(dumps(rep.to_dict()))


def test_campaign_deterministic_and_consistent():
    cfg = TrialConfig(m=30, n=12, K=3, s=2, trials=25, seed=11)
    a = run_campaign(cfg)
    b = run_campaign(cfg)
    assert dumps(a.to_dict(include_wall_time=False)) == dumps(b.to_dict(include_wall_time=False))
    agg = a.aggregates
    for name, bucket in agg["conditioned"].items():
        assert bucket["trials"] == sum(1 for r in a.records if r[name])
        assert bucket["recovered"] == sum(1 for r in a.records if r[name] and r["exact_recovery"])
    assert agg["erc_true_but_failed"] == 0
    assert a.to_csv().count("\n") == 26


def test_campaign_delta_distribution():
    cfg = TrialConfig(m=64, n=32, K=1, s=3, trials=200, seed=21)
    deltas = np.array([ric_exact(gen_dictionary(cfg, i), 3).delta for i in range(cfg.trials)])
    assert np.all(deltas < 1.0)
    assert 0.2 < np.median(deltas) < 0.8


def test_blend_endpoints():
    cfg = TrialConfig(m=16, n=20, K=2, s=3, seed=8)
    raw = gen_dictionary(cfg, 0)
    target = degenerate_dictionary(raw, 1)
    np.testing.assert_allclose(blend_dictionary(raw, target, 0.0), raw, atol=1e-15)
    end = blend_dictionary(raw, degenerate_dictionary(raw, 3), 1.0)
    assert ric_exact(end, 2).delta == pytest.approx(1.0, abs=1e-12)
    rep = erc_evaluate(end, 3)
    assert not (rep.erc1 or rep.erc2 or rep.erc3)


def test_boundary_probe_contrapositive():
    cfg = TrialConfig(m=16, n=20, K=3, s=3, trials=6, seed=13)
    instances = boundary_probe(cfg, 8)
    assert len(instances) == 48
    failures = [e for e in instances if not e["exact_recovery"]]
    assert failures, "the sweep should reach failing instances"
    for e in failures:
        assert not (e["erc1"] or e["erc2"] or e["erc3"])
        assert e["replicated_equivalence"] in (True, "rank deficient")
    assert instances[0]["blend"] == 0.0 and instances[-1]["blend"] == 1.0
