#!/usr/bin/env python3
"""Randomized cross-check of combinatorial ray enumeration vs. the oracle.

Draws random models, runs both the order-theoretic enumeration (connected
lower sets) and the constraint-basis oracle on both polyhedra, verifies the
ray sets agree exactly, and records timings per model in a CSV.
"""

from __future__ import annotations

import argparse
import csv
import random
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

from plmpoly import (
    Side,
    cross_check_rays,
    enumerate_rays,
    oracle_rays,
    plm_cone_constraints,
    random_plm,
)


@dataclass
class SweepConfig:
    models: int = 100
    seed: int = 0
    n_min: int = 3
    n_max: int = 7
    out: Path | None = None


def run_sweep(cfg: SweepConfig) -> tuple[list[list[str]], bool]:
    rng = random.Random(cfg.seed)
    rows: list[list[str]] = []
    all_ok = True
    for idx in range(cfg.models):
        m = random_plm(rng, n=rng.randint(cfg.n_min, cfg.n_max))
        for side in (Side.LOWER, Side.UPPER):
            t0 = time.perf_counter()
            rays = enumerate_rays(m, side)
            t1 = time.perf_counter()
            qs = oracle_rays(plm_cone_constraints(m, side), m.n)
            t2 = time.perf_counter()
            ok = cross_check_rays(rays, qs)
            all_ok = all_ok and ok
            rows.append(
                [
                    str(idx),
                    str(m.n),
                    m.order_mode,
                    side.value,
                    str(len(rays)),
                    f"{t1 - t0:.6f}",
                    f"{t2 - t1:.6f}",
                    "yes" if ok else "NO",
                ]
            )
    return rows, all_ok


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--models", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-min", type=int, default=3)
    ap.add_argument("--n-max", type=int, default=7)
    ap.add_argument("--out", default=None, help="CSV path for per-model rows")
    args = ap.parse_args(argv)
    cfg = SweepConfig(
        models=args.models,
        seed=args.seed,
        n_min=args.n_min,
        n_max=args.n_max,
        out=Path(args.out) if args.out else None,
    )

    rows, all_ok = run_sweep(cfg)
    header = ["model", "n", "orderMode", "side", "rays", "enumSec", "oracleSec", "match"]
    if cfg.out:
        with cfg.out.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        print(f"wrote {cfg.out}")

    enum_t = [float(r[5]) for r in rows]
    oracle_t = [float(r[6]) for r in rows]
    print(
        f"{cfg.models} models, {len(rows)} enumerations: "
        f"{'all match' if all_ok else 'MISMATCH FOUND'}"
    )
    print(
        f"enumeration: median {statistics.median(enum_t):.4f}s, max {max(enum_t):.4f}s"
    )
    print(
        f"oracle:      median {statistics.median(oracle_t):.4f}s, max {max(oracle_t):.4f}s"
    )
    return 0 if all_ok else 2


if __name__ == "__main__":
    raise SystemExit(main())
