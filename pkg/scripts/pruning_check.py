"""Exhaustive check that the pruned chain never loses to the full-message chain on random degraded networks."""

import argparse
import time

import numpy as np

from ifnet import oracle
from ifnet.model import MessageLabel, make_spec


def random_instance(rng, k2=2):
    while True:
        k1 = int(rng.integers(1, 4))
        labels = []
        for _ in range(int(rng.integers(1, 5))):
            tx = tuple(i for i in range(1, k1 + 1) if rng.random() < 0.5)
            rx = tuple(j for j in range(1, k2 + 1) if rng.random() < 0.5)
            if tx and rx and MessageLabel(tx, rx) not in labels:
                labels.append(MessageLabel(tx, rx))
        if not labels:
            continue
        # keep the enumeration small
        if sum(2 ** sum(i in m.tx for m in labels) for i in range(1, k1 + 1)) > 14:
            continue
        first = oracle.random_stochastic(rng, 2 ** k1, 2)
        links = [oracle.random_stochastic(rng, 2, 2) for _ in range(k2 - 1)]
        return make_spec(k1, k2, labels, discrete=oracle.cascade_network(first, links, (2,) * k1))


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    for n in range(args.instances):
        spec = random_instance(rng)
        r = oracle.pruning_equivalence_check(spec)
        names = " ".join(map(str, spec.messages))
        print(f"{n:3d} {'ok ' if r.holds else 'BAD'} configs={r.configurations:6d} "
              f"gap=[{r.min_gap:+.2e}, {r.max_gap:+.2e}]  {names}")
    print(f"done in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
