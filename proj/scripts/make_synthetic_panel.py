#!/usr/bin/env python3
"""Generate data/synthetic_panel.csv, a season of binary forecasts.

Most forecasters report on every game. A few skip games and are dropped
at ingest time. Outcomes come from a latent home-win probability; each
forecaster sees it through their own noise level and bias.
"""

import argparse
import csv
import math
import random


def logistic(x):
    return 1.0 / (1.0 + math.exp(-x))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-o", "--output", default="data/synthetic_panel.csv")
    ap.add_argument("--games", type=int, default=267)
    ap.add_argument("--experts", type=int, default=40)
    ap.add_argument("--partial", type=int, default=4)
    ap.add_argument("--seed", type=int, default=20200910)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    experts = []
    for i in range(args.experts + args.partial):
        experts.append({
            "id": f"fc{i:03d}",
            "noise": rng.uniform(0.2, 1.5),
            "bias": rng.gauss(0.0, 0.3),
            "partial": i >= args.experts,
        })

    with open(args.output, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["event_id", "expert_id", "report", "outcome"])
        for g in range(args.games):
            latent = rng.gauss(0.3, 1.0)
            outcome = 1 if rng.random() < logistic(latent) else 0
            for e in experts:
                if e["partial"] and rng.random() < 0.1:
                    continue
                signal = latent + e["bias"] + rng.gauss(0.0, e["noise"])
                report = round(logistic(signal), 2)
                w.writerow([f"g{g + 1:03d}", e["id"], f"{report:.2f}", outcome])


if __name__ == "__main__":
    main()
