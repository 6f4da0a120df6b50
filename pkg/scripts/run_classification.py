"""Multi-start classification of symmetric dephased 6x6 Hadamard matrices with
real diagonal, plus the tied-row search that turns up M6.

    python scripts/run_classification.py --seeds 2000 --rng 1 --out results/
"""

import argparse
import time
from pathlib import Path

from hadamard_lab.classify import REAL_DIAGONAL_PATTERNS, solve_pattern

TIED_RUNS = [("1,-1,1,1,f,f", (1, 1, -1, -1)), ("1,-1,1,f,f,f", (1, 1, -1, -1))]

ap = argparse.ArgumentParser()
ap.add_argument("--seeds", type=int, default=2000)
ap.add_argument("--rng", type=int, default=1)
ap.add_argument("--out", type=Path)
args = ap.parse_args()
if args.out:
    args.out.mkdir(parents=True, exist_ok=True)

runs = [(p, None) for p in REAL_DIAGONAL_PATTERNS] + TIED_RUNS
for k, (pattern, tie) in enumerate(runs):
    t0 = time.perf_counter()
    rep = solve_pattern(pattern, args.seeds, args.rng + k, tied_row2=tie)
    tag = " (row 2 tied)" if tie else ""
    print(f"{rep.summary()}{tag}  [{time.perf_counter() - t0:.1f}s]")
    if args.out:
        name = pattern.replace(",", "_").replace("*", "s").replace("-", "m") + ("_tied" if tie else "")
        (args.out / f"{name}.json").write_text(rep.dumps() + "\n")
