"""Smoke test for the franson extension module.

Build first:  maturin develop -m crates/python/Cargo.toml --release
"""
import math

import franson

geo = franson.redshift_phase(35_786e3)
assert abs(geo - 0.208) < 1e-3, geo
diff = franson.redshift_phase_difference(10_000e3, 20_000e3)
assert abs(diff - 0.0362) < 0.4e-3, diff
assert abs(franson.precision_target(0.208, 5) - 0.0416) < 1e-12

b = franson.noise_budget()
assert len(b["sources"]) == 8
assert abs(b["quadrature_total"] - 16.2e-3) < 0.2e-3
print(franson.noise_budget_table())

assert abs(franson.shot_noise_phase(36_300, 36_300, 0.863) - 4.3e-3) < 0.05e-3
phase, clamped = franson.extract_phase(500, 500, 0.8)
assert abs(phase - math.pi / 2) < 1e-12 and not clamped
try:
    franson.shot_noise_phase(-1, 2, 0.9)
except ValueError:
    pass
else:
    raise AssertionError("negative counts accepted")

assert abs(franson.cn2_from_fried(0.053, 671e-9, 8.4e3) / 4.5e-16 - 1) < 0.1
link = franson.link_budget()
assert link["total_db"] == 67.5
assert 0.22 <= link["acquisition_s"] / 3600 <= 0.34

cfg = franson.CampaignConfig.urban_link()
cfg.seed = 1
run = franson.simulate_campaign(cfg)
s = run["summary"]
assert s["n_samples"] == len(run["phase"]) == 94
assert 13.8e-3 <= s["detrended_std"] <= 18.6e-3, s
again = franson.simulate_campaign(cfg)
assert again["c1"] == run["c1"]
ens = franson.run_ensemble(cfg, 8)
assert len(ens) == 8

phases = [2 * math.pi * k / 16 for k in range(16)]
c1 = [round(5e4 * (1 + 0.863 * math.cos(p))) for p in phases]
c2 = [round(1e5) - x for x in c1]
fit = franson.fit_visibility(phases, c1, c2)
assert abs(fit["visibility"] - 0.863) < 1e-4, fit

g2 = franson.simulate_g2(0.071, seed=3, duration=1.0)
assert abs(g2 - 0.071) < 0.02, g2

temps = [21 + 0.25 * i for i in range(25)]
k = 2 * math.pi * 0.8 / 1550e-9
th = franson.fit_thermal_scan(temps, [0.5 * k * 6.8e-9 * (t - 23.87) ** 2 for t in temps])
assert abs(th["cte"]["zero_crossing_temp"] - 23.87) < 1e-6
assert abs(franson.suppression_ratio(550e-9, 1.4e-9) - 392.857) < 1e-2

print("smoke test ok")
