"""Run the mechanism and the exhaustive audit over a seeded random corpus."""

import argparse
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from bmgame.instance import random_suite
from bmgame.mechanism import run_mechanism
from bmgame.oracle import audit_core, coalition_values


@dataclass
class SuiteConfig:
    count: int = 200
    seed: int = 2024
    bipartite: bool = False
    max_n: int = 10


def run(cfg: SuiteConfig) -> dict:
    alphas: Counter = Counter()
    worst_gap = Fraction(1)
    worst_slack = None
    failures = []
    start = time.perf_counter()
    for inst in random_suite(cfg.count, cfg.seed, cfg.bipartite, cfg.max_n):
        r = run_mechanism(inst)
        gammas = coalition_values(inst)
        alphas[r.alpha] += 1
        full = (1 << inst.n) - 1
        if r.lp_value:
            worst_gap = min(worst_gap, gammas.get(full, 0) / r.lp_value)
        for alpha in {r.alpha, Fraction(2, 3)}:
            audit = audit_core(inst, r.allocation, alpha, gammas=gammas)
            if not audit.in_core:
                failures.append((inst.name, alpha))
        # smallest observed sum_S a / gamma(S)
        a = [r.allocation[v] for v in inst.vertices]
        for mask, g in gammas.items():
            if g:
                q = sum(a[i] for i in range(inst.n) if mask >> i & 1) / g
                worst_slack = q if worst_slack is None else min(worst_slack, q)
    return dict(
        instances=cfg.count,
        seconds=round(time.perf_counter() - start, 2),
        alphas={str(k): v for k, v in sorted(alphas.items())},
        min_integrality_ratio=str(worst_gap),
        min_coalition_ratio=str(worst_slack),
        failures=failures,
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--bipartite", action="store_true")
    parser.add_argument("--max-n", type=int, default=10)
    args = parser.parse_args()
    summary = run(SuiteConfig(args.count, args.seed, args.bipartite, args.max_n))
    for key, val in summary.items():
        print(f"{key:>22}: {val}")


if __name__ == "__main__":
    main()
