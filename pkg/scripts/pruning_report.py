"""Walk the seventeen-message three-receiver network through the pruning pipeline, for every receiver order."""

import itertools
import json

from ifnet.bounds import theorem2_expression
from ifnet.model import msg, make_spec
from ifnet.sumrate import degraded_prune, sumrate_expression

LABELS = [("124", "3"), ("124", "13"), ("124", "23"), ("12", "23"), ("12", "13"), ("34", "12"), ("34", "13"),
          ("34", "23"), ("1", "13"), ("1", "23"), ("2", "3"), ("2", "13"), ("3", "3"), ("3", "23"), ("4", "1"),
          ("4", "2"), ("4", "12")]


def main():
    spec = make_spec(4, 3, [msg(t, r) for t, r in LABELS])
    rep = degraded_prune(spec)
    print(json.dumps(rep.to_json(), indent=1))
    e = sumrate_expression(spec)
    print("\nsum-rate chain:")
    for t in e.term_strings():
        print("  ", t)
    print("law:", e.law)

    print("\nvirtual-receiver bound per order:")
    for order in itertools.permutations((1, 2, 3)):
        print(" ", order, " + ".join(theorem2_expression(spec, order).term_strings()))


if __name__ == "__main__":
    main()
