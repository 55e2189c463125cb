"""Which vegetation state wins? Closed-form thresholds for two climates.

The fate of a spatially uniform savanna is decided by three numbers.
R0 asks whether grass persists at all once trees are gone, R1 whether
trees can invade an intact grassland, and R2 whether grass can invade a
closed forest. All three come out of the single-season solution in
closed form, so this script runs in milliseconds.
"""

from pathlib import Path

from pulsefront import classify, load_config, normalize, thresholds_raw

CONFIGS = Path(__file__).parent / "configs"

for name in ("forest_invasion.cfg", "grassland_invasion.cfg"):
    params = load_config(CONFIGS / name)
    print(f"=== {name} (W = {params.W} mm/yr, eta = {params.eta}) ===")

    raw = thresholds_raw(params)
    print("biomass units:")
    print(f"  R0 = {raw.R0:.4f}  (grass persistence: > 1 keeps grassland alive)")
    print(f"  R1 = {raw.R1:.4f}  (grass invades forest when > 1)")
    print(f"  R2 = {raw.R2:.4f}  (trees invade grassland when > 1)")
    for label, point in raw.equilibria:
        verdict = dict(raw.verdicts)[label]
        print(f"  {label:<10} at ({point[0]:10.4f}, {point[1]:7.4f})  -> {verdict}")

    # The normalized system rescales biomass by carrying capacity and time
    # by tree growth; its thresholds agree with the raw ones exactly.
    norm = classify(normalize(params))
    print("normalized units:")
    print(f"  R0 = {norm.R0:.4f}, R1 = {norm.R1:.4f}, R2 = {norm.R2:.4f}")
    print()
