"""Fading-rate estimation walkthrough: per-heart delta-E time series,
windowed OLS fits, and the population aggregate.

Uses the bundled synthetic dataset (7 hearts on exact lines with slopes
averaging 0.041 dE/day, plus one heart with too little data).

Run: python3 demos/02_fading_rates.py
"""

import json
from importlib import resources

from heartfade import (
    LabColor,
    Window,
    aggregate_rates,
    build_series,
    estimate_heart_rate,
    load_observations,
)
from heartfade.rates import InsufficientDataError

data = resources.files("heartfade") / "data"
observations = load_observations((data / "synthetic_observations.csv").read_bytes())
windows_doc = json.loads((data / "synthetic_windows.json").read_bytes())
baseline = LabColor(49.3, 46.3, 20.5)  # fresh paint

series = build_series(observations, baseline)
print(f"{len(observations)} observations -> {len(series)} heart series\n")

fits = []
for s in series:
    w = windows_doc[s.heart_id]
    try:
        fit = estimate_heart_rate(s, Window(w["start_day"], w["end_day"]))
    except InsufficientDataError as exc:
        print(f"{s.heart_id}: excluded ({exc})")
        continue
    fits.append(fit)
    print(
        f"{s.heart_id}: slope {fit.slope:.4f} dE/day over {fit.n} points "
        f"(r2={fit.r2:.3f})"
    )

agg = aggregate_rates(fits)
print(
    f"\npopulation rate: {agg.mean_k:.4f} +/- {agg.sd_k:.4f} dE/day "
    f"({agg.rel_err:.1%} relative) from {agg.n_hearts} hearts"
)
print(f"days to cross the perception threshold (dE 10): {10 / agg.mean_k:.0f}")
