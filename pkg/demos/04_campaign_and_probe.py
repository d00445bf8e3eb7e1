"""
Monte-Carlo campaigns and the boundary probe
============================================

A campaign repeats certify-then-recover on seeded random instances. The
boundary probe blends a random dictionary towards one with duplicated
atoms and records where recovery starts to fail.
"""

from sompcert import TrialConfig, boundary_probe, run_campaign
from sompcert.io import dumps

config = TrialConfig(m=64, n=24, K=3, s=2, trials=100, seed=7)
report = run_campaign(config)
agg = report.aggregates
print("recovery rate", agg["recovery_rate"])
print("conditioned on any criterion", agg["conditioned"]["any_erc"])
print("criterion true but recovery failed:", agg["erc_true_but_failed"])

## JSON is canonical, so reruns are byte-identical apart from wall time
again = run_campaign(config)
print("deterministic:", dumps(report.to_dict(False)) == dumps(again.to_dict(False)))

probe = boundary_probe(TrialConfig(m=16, n=20, K=3, s=3, trials=3, seed=1), 6)
for entry in probe:
    print(f"trial {entry['trial']} blend {entry['blend']:.1f} "
          f"delta_s+1={entry['delta_s_plus_1']:.3f} any ERC={entry['any_erc']} "
          f"recovered={entry['exact_recovery']}")
