#!/usr/bin/env python3
"""Audit the density-matrix measures against the four metric axioms."""

import argparse

from qmatch.density_metrics import METRIC_FNS, audit_metric, render_audit_table


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    reports = [
        audit_metric(name, trials=args.trials, dims=tuple(args.dims),
                     seed=args.seed)
        for name in sorted(METRIC_FNS)
    ]
    print(render_audit_table(reports), end="")
    for rep in reports:
        for axiom in ("non_negativity", "identity", "symmetry", "triangle"):
            result = rep.axiom(axiom)
            if result.violated:
                first = result.violations[0]
                print(f"{rep.metric}: {axiom} violated "
                      f"(first gap {first.gap:.3e}, trial {first.trial})")


if __name__ == "__main__":
    main()
