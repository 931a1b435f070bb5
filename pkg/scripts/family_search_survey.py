#!/usr/bin/env python3
"""Survey how often the constructive decomposition machinery fails per prime.

Over a small prime the avoiding sets can cover every candidate vector, and
then support elimination genuinely fails; over larger primes failures should
become rare. This script samples admissible arrangements, decomposes every
oracle basis vector, and tallies the outcomes, giving an empirical view of
how large p has to be before the construction is reliable.

Usage:
    python scripts/family_search_survey.py --primes 2,3,5,7,11 --cases 40
"""

import argparse
import random
import sys
import warnings
from collections import Counter

sys.path.insert(0, "src")

from affrigid.errors import ModelTooSmall, ThickPairPresent
from affrigid.finitemodel import FiniteSpace, space_basis
from affrigid.arrangement import perfect_pairs
from affrigid.rigidity import decompose
from affrigid.sampling import random_admissible_arrangements


def survey_prime(p: int, dims, cases: int, rng: random.Random,
                 budget: int) -> Counter:
    tally = Counter()
    for i in range(cases):
        n = dims[i % len(dims)]
        space = FiniteSpace(p, n)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            xs, ys = random_admissible_arrangements(rng, space)
        dimension, basis = space_basis(space, xs, ys)
        n_perfect = len(perfect_pairs(space.dual_pair, xs, ys))
        if not basis:
            tally["trivial"] += 1
            if dimension != n_perfect:
                tally["dimension-mismatch"] += 1
            continue
        outcome = "decomposed"
        for b in basis:
            try:
                decompose(space, b, xs, ys, budget=budget)
            except ModelTooSmall as exc:
                outcome = ("family-exhausted" if "candidates rejected"
                           in exc.detail else "model-too-small")
                break
            except ThickPairPresent:
                outcome = "thick"
                break
        tally[outcome] += 1
        if outcome == "decomposed" and dimension != n_perfect:
            tally["dimension-mismatch"] += 1
    return tally


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--primes", default="2,3,5,7,11")
    parser.add_argument("--dims", default="1,2")
    parser.add_argument("--cases", type=int, default=40)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=20000)
    args = parser.parse_args()

    primes = [int(x) for x in args.primes.split(",")]
    dims = [int(x) for x in args.dims.split(",")]

    print(f"{'p':>4}  {'decomposed':>10}  {'trivial':>8}  "
          f"{'too-small':>10}  {'dim-mismatch':>12}")
    for p in primes:
        rng = random.Random(args.seed * 1000 + p)
        tally = survey_prime(p, dims, args.cases, rng, args.budget)
        failures = (tally["model-too-small"] + tally["family-exhausted"])
        print(f"{p:>4}  {tally['decomposed']:>10}  {tally['trivial']:>8}  "
              f"{failures:>10}  {tally['dimension-mismatch']:>12}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
