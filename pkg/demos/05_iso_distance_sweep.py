#!/usr/bin/env python3
"""Blob size versus distance and film speed, as a seeded batch study.

Runs the sweep command across ISO 100/400/800 and 10..100 cm, prints the
measured curves as a text table, and locates where each curve crosses the
276 px floor below which a full packet no longer fits in the blob. Higher
film speed pushes that floor further out, at the price of noisier frames.
"""

from pathlib import Path

from lightlink import cli

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)
csv_path = OUT / "sweep.csv"

args = ["sweep", "--iso", "100,400,800", "--dmin-cm", "10", "--dmax-cm", "100",
        "--step-cm", "10", "--trials", "4", "--seed", "11",
        "--focal-length-mm", "5", "--out", str(csv_path)]
print("running: lightlink " + " ".join(args) + "\n")
assert cli.main(args) == 0

rows = cli.read_sweep_csv(csv_path)
isos = sorted({r["iso"] for r in rows})
by_iso = {iso: sorted((r for r in rows if r["iso"] == iso),
                      key=lambda r: r["distance_cm"]) for iso in isos}

print(f"{'cm':>5} | " + " | ".join(f"ISO {iso:>3} px (decode)" for iso in isos))
for i, row in enumerate(by_iso[isos[0]]):
    cells = []
    for iso in isos:
        r = by_iso[iso][i]
        cells.append(f"{r['mean_diameter_px']:8.1f}  ({r['decode_rate']:.0%})")
    print(f"{row['distance_cm']:5.0f} | " + " | ".join(f"{c:>19}" for c in cells))


def crossing(rows, floor=276.0):
    for a, b in zip(rows, rows[1:]):
        if a["mean_diameter_px"] >= floor >= b["mean_diameter_px"]:
            frac = (a["mean_diameter_px"] - floor) / (a["mean_diameter_px"]
                                                      - b["mean_diameter_px"])
            return a["distance_cm"] + frac * (b["distance_cm"] - a["distance_cm"])
    return float("nan")


print("\n276 px packet floor crossed at:")
for iso in isos:
    print(f"  ISO {iso:4d}: {crossing(by_iso[iso]):5.1f} cm")
print("\nraising film speed buys reach before the blob shrinks below one packet")
print(f"sweep table: {csv_path}")
