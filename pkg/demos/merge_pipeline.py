#!/usr/bin/env python3
"""Merging atoms and reducing distributions, one step at a time.

A finite distribution here carries (weight, value) atoms with values in
[0, 1].  Two atoms can be merged into one that preserves both the mean
value and the expected entropy: the merged value y solves

  H(y)/y = (p1 H(x1) + p2 H(x2)) / (p1 x1 + p2 x2)

and the merged weight is q = (p1 x1 + p2 x2) / y, with the leftover mass
q - p1 - p2 parked at value zero where it costs nothing.  Iterating the
merge crushes any distribution down to a single non-zero atom, and that
atom is exactly the witness of the joint entropy optimizer.

This demo traces one merge by hand, checks the conserved quantities, walks
a ten atom reduction step by step, and confirms the surviving atom matches
the optimizer's certificate.
"""

import random

from entroset.distribution import (
    FiniteDistribution,
    joint_entropy_optimum,
    merge_atoms,
    reduce_steps,
    reduce_support,
)
from entroset.kernel import binary_entropy, entropy_rate


def section(title: str) -> None:
    print()
    print(title)
    print("-" * len(title))


def main() -> None:
    section("One merge, by hand")
    p1, x1 = 0.5, 0.3
    p2, x2 = 0.5, 0.9
    m = merge_atoms(p1, x1, p2, x2)
    print(f"  merge ({p1}, {x1}) + ({p2}, {x2})")
    print(f"  merged weight q = {m.q:.15f}")
    print(f"  merged value  y = {m.y:.15f}")
    print(f"  mass parked at zero = {m.residual_at_zero:.15f}")
    mean_in = p1 * x1 + p2 * x2
    entropy_in = p1 * binary_entropy(x1) + p2 * binary_entropy(x2)
    print(f"  mean    before {mean_in:.15f}  after {m.q * m.y:.15f}")
    print(f"  entropy before {entropy_in:.15f}  after "
          f"{m.q * binary_entropy(m.y):.15f}")
    print(f"  rate at y: {entropy_rate(m.y):.12f} vs budget "
          f"{entropy_in / mean_in:.12f}")
    print(f"  y stays below max(x1, x2): {m.y <= max(x1, x2)}")

    section("Reducing ten atoms, step by step")
    rng = random.Random(7)
    raw = [(rng.uniform(0.02, 0.2), rng.uniform(0.05, 0.95)) for _ in range(10)]
    total = sum(w for w, _ in raw)
    dist = FiniteDistribution((w / total, v) for w, v in raw)
    print(f"  start: {len(dist.nonzero_atoms())} non-zero atoms, "
          f"mean {dist.mean():.9f}, entropy {dist.expected_entropy():.9f}")
    print("  each step merges the two smallest non-zero values;")
    print("  the expected joint entropy can only go down:")
    for i, step in enumerate(reduce_steps(dist)):
        print(f"    step {i:2d}: atoms {len(step.nonzero_atoms()):2d}  "
              f"joint entropy {step.expected_joint_entropy():.9f}")
    reduced = reduce_support(dist)
    live = reduced.nonzero_atoms()
    print(f"  final: {len(live)} non-zero atom, "
          f"zero mass {reduced.zero_mass():.9f}")
    q, v = live[0]
    print(f"  mean drift    {reduced.mean() - dist.mean():.2e}")
    print(f"  entropy drift {reduced.expected_entropy() - dist.expected_entropy():.2e}")

    section("Against the optimizer's certificate")
    cert = joint_entropy_optimum(dist.mean(), dist.expected_entropy())
    print(f"  certificate at (t, u) = ({cert.t:.6f}, {cert.u:.6f}):")
    print(f"  certified value v = {cert.v:.12f}   reduced atom {v:.12f}  "
          f"(diff {abs(cert.v - v):.2e})")
    wq, wv = cert.witness.nonzero_atoms()[0]
    print(f"  witness weight    {wq:.12f}   reduced atom {q:.12f}  "
          f"(diff {abs(wq - q):.2e})")
    print(f"  optimum joint entropy = {cert.optimum:.12f}")
    print(f"  reduced joint entropy = {reduced.expected_joint_entropy():.12f}")
    print("  The reduction is a fixed point: running it again changes nothing.")
    again = reduce_support(reduced)
    print(f"  idempotent: {again.atoms == reduced.atoms}")


if __name__ == "__main__":
    main()
