"""Run an experiment config and print one table per metric (rows: budget, columns: algorithm)."""

import argparse
import math
import sys
from collections import defaultdict

from epimit.harness import emit_csv, load_config, run_experiment


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config")
    ap.add_argument("--out", help="also write the raw CSV here")
    ap.add_argument("--threads", type=int)
    args = ap.parse_args(argv)

    cfg = load_config(args.config)
    rows = run_experiment(cfg, threads=args.threads)
    if args.out:
        emit_csv(rows, args.out)

    table = defaultdict(dict)
    for r in rows:
        table[(r.experiment_id, r.metric)][(r.k, r.algorithm)] = (r.value, r.half_width)
    for (exp, metric), cells in table.items():
        print(f"\n{exp}  {metric}")
        print("k".rjust(5) + "".join(a.rjust(24) for a in cfg.algorithms))
        for k in cfg.budgets:
            line = str(k).rjust(5)
            for a in cfg.algorithms:
                v, hw = cells[(k, a)]
                cell = "n/a" if math.isnan(v) else (f"{v:.3f}" if hw == 0 else f"{v:.3f} +/- {hw:.3f}")
                line += cell.rjust(24)
            print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
