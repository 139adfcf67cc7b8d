"""Finite distributions on [0, 1] and the entropy-preserving merge calculus.

A ``FiniteDistribution`` is a weighted set of atoms ``(weight, value)`` with
values in [0, 1].  The central operation is the two-point merge: two atoms
are replaced by a single atom that preserves both the mean and the expected
entropy exactly, plus a residual mass parked at value 0.  Repeating the
merge reduces any distribution to at most one non-zero atom, and the
reduced endpoint coincides with the closed-form optimizer returned by
``joint_entropy_optimum``.

Numerical contracts (shared with the test suite):

* construction re-normalizes weights whose sum is within 1e-9 of 1;
* values below 1e-15 are treated as exact zeros, and values closer than
  1e-15 are coalesced so a merge never sees a degenerate pair;
* merge conservation holds to 1e-10, multi-step pipelines to 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .kernel import (
    DomainError,
    as_prob,
    binary_entropy,
    entropy_of_square,
    inverse_entropy_rate,
)

__all__ = [
    "DistributionError",
    "FeasibilityError",
    "FiniteDistribution",
    "MergeResult",
    "OptimumCertificate",
    "merge_atoms",
    "scaled_entropy_margin",
    "squared_merge_margin",
    "reduce_steps",
    "reduce_support",
    "joint_entropy_optimum",
    "random_distribution",
    "load_distribution",
    "dump_distribution",
]

#: Construction accepts weight sums within this distance of 1.
WEIGHT_TOL = 1e-9

#: The plain-text loader accepts (and re-normalizes) sums within this distance.
LOAD_TOL = 1e-6

#: Values below this are exact zeros; value gaps below it are coalesced.
VALUE_SNAP = 1e-15


class DistributionError(ValueError):
    """Invalid distribution construction or input data."""


class FeasibilityError(DistributionError):
    """A (mean, entropy) target outside the feasible region."""


@dataclass(frozen=True)
class FiniteDistribution:
    """Immutable finite distribution: atoms ``(weight, value)`` sorted by value."""

    atoms: tuple[tuple[float, float], ...]

    def __init__(self, atoms: Iterable[tuple[float, float]]) -> None:
        pairs = []
        for w, v in atoms:
            w = float(w)
            if not math.isfinite(w) or w < 0.0:
                raise DistributionError(f"weights must be finite and >= 0, got {w!r}")
            v = as_prob(v, "value")
            if v < VALUE_SNAP:
                v = 0.0
            if w > 0.0:
                pairs.append((v, w))
        if not pairs:
            raise DistributionError("a distribution needs at least one atom with positive weight")
        total = math.fsum(w for _, w in pairs)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise DistributionError(f"weights must sum to 1 within {WEIGHT_TOL}, got {total!r}")
        pairs.sort()
        merged: list[list[float]] = []
        for v, w in pairs:
            if merged and v - merged[-1][0] <= VALUE_SNAP:
                # equal up to snap tolerance: pool the mass at the weighted mean
                pv, pw = merged[-1]
                nw = pw + w
                merged[-1] = [(pv * pw + v * w) / nw, nw]
            else:
                merged.append([v, w])
        object.__setattr__(
            self,
            "atoms",
            tuple((w / total, v) for v, w in merged),
        )

    def mean(self) -> float:
        """Expected value of the atom positions."""
        return math.fsum(w * v for w, v in self.atoms)

    def expected_entropy(self) -> float:
        """Expected binary entropy, sum of w * H(v)."""
        return math.fsum(w * binary_entropy(v) for w, v in self.atoms)

    def expected_joint_entropy(self) -> float:
        """Full double sum over independent pairs: sum of w_i w_j H(v_i * v_j)."""
        atoms = self.atoms
        return math.fsum(
            wi * wj * binary_entropy(vi * vj)
            for wi, vi in atoms
            for wj, vj in atoms
        )

    def nonzero_atoms(self) -> tuple[tuple[float, float], ...]:
        return tuple((w, v) for w, v in self.atoms if v > 0.0)

    def zero_mass(self) -> float:
        return math.fsum(w for w, v in self.atoms if v == 0.0)

    def to_text(self) -> str:
        """Serialize as one ``weight value`` pair per line."""
        return "".join(f"{w!r} {v!r}\n" for w, v in self.atoms)

    @classmethod
    def from_text(cls, text: str) -> "FiniteDistribution":
        """Parse the plain-text format; '#' starts a comment.

        Weight sums within 1e-6 of 1 are re-normalized, anything further
        off is rejected.
        """
        pairs = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DistributionError(
                    f"line {lineno}: expected 'weight value', got {raw!r}"
                )
            try:
                w, v = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise DistributionError(f"line {lineno}: {raw!r} is not numeric") from exc
            pairs.append((w, v))
        if not pairs:
            raise DistributionError("no atoms found")
        total = math.fsum(w for w, _ in pairs)
        if abs(total - 1.0) > LOAD_TOL:
            raise DistributionError(
                f"weights sum to {total!r}; more than {LOAD_TOL} away from 1"
            )
        return cls((w / total, v) for w, v in pairs)


@dataclass(frozen=True)
class MergeResult:
    """Outcome of merging two atoms: the new atom (q, y) plus mass at zero.

    ``q * y`` equals the merged mass-weighted mean and ``q * H(y)`` the
    merged expected entropy, both to 1e-10; ``residual_at_zero`` is the
    leftover weight ``p1 + p2 - q`` (clipped at 0 against rounding).
    """

    q: float
    y: float
    residual_at_zero: float


def _require_positive_weight(p: float, name: str) -> float:
    p = float(p)
    if not math.isfinite(p) or p <= 0.0:
        raise DistributionError(f"{name} must be finite and positive, got {p!r}")
    return p


def _require_open_value(x: float, name: str) -> float:
    v = as_prob(x, name)
    if v == 0.0:
        raise DomainError(f"{name} must lie in (0, 1], got {x!r}")
    return v


def merge_atoms(p1: float, x1: float, p2: float, x2: float) -> MergeResult:
    """Merge atoms (p1, x1) and (p2, x2) into one atom preserving mean and entropy.

    The merged value y solves H(y)/y = (p1 H(x1) + p2 H(x2)) / (p1 x1 + p2 x2)
    and the merged weight is q = (p1 x1 + p2 x2) / y, so q <= p1 + p2 with the
    difference parked at value 0.
    """
    p1 = _require_positive_weight(p1, "p1")
    p2 = _require_positive_weight(p2, "p2")
    x1 = _require_open_value(x1, "x1")
    x2 = _require_open_value(x2, "x2")
    if x1 == x2:
        return MergeResult(q=p1 + p2, y=x1, residual_at_zero=0.0)
    mass = p1 * x1 + p2 * x2
    entropy = p1 * binary_entropy(x1) + p2 * binary_entropy(x2)
    y = inverse_entropy_rate(entropy / mass)
    q = mass / y
    residual = p1 + p2 - q
    return MergeResult(q=q, y=y, residual_at_zero=residual if residual > 0.0 else 0.0)


def scaled_entropy_margin(p1: float, x1: float, p2: float, x2: float, z: float) -> float:
    """Margin of the scaled-entropy comparison at scale z in [0, 1].

    Returns p1 H(z x1) + p2 H(z x2) - q H(z y) for the merge of the two
    atoms; nonnegative up to float noise for every z, with equality at
    z = 1 by construction of the merge.
    """
    z = as_prob(z, "z")
    r = merge_atoms(p1, x1, p2, x2)
    lhs = p1 * binary_entropy(z * x1) + p2 * binary_entropy(z * x2)
    return lhs - r.q * binary_entropy(z * r.y)


def squared_merge_margin(p1: float, x1: float, p2: float, x2: float) -> float:
    """Margin of the second-moment comparison for a two-atom merge.

    Returns p1^2 H(x1^2) + 2 p1 p2 H(x1 x2) + p2^2 H(x2^2) - q^2 H(y^2).
    This is the form the merge construction actually guarantees; one
    published statement of it squares the entropy rather than the value,
    which its own derivation contradicts.
    """
    r = merge_atoms(p1, x1, p2, x2)
    lhs = (
        p1 * p1 * entropy_of_square(x1)
        + 2.0 * p1 * p2 * binary_entropy(x1 * x2)
        + p2 * p2 * entropy_of_square(x2)
    )
    return lhs - r.q * r.q * entropy_of_square(r.y)


def reduce_steps(d: FiniteDistribution) -> Iterator[FiniteDistribution]:
    """Yield each intermediate of the reduction, ending with the fixed point.

    Every step merges the two smallest non-zero values, so the sequence has
    non-increasing expected joint entropy while mean and expected entropy
    stay fixed (to pipeline tolerance).
    """
    cur = d
    while True:
        nz = cur.nonzero_atoms()
        if len(nz) <= 1:
            return
        (p1, x1), (p2, x2) = nz[0], nz[1]
        r = merge_atoms(p1, x1, p2, x2)
        zmass = cur.zero_mass() + r.residual_at_zero
        atoms = [(r.q, r.y), *nz[2:]]
        if zmass > 0.0:
            atoms.append((zmass, 0.0))
        cur = FiniteDistribution(atoms)
        yield cur


def reduce_support(d: FiniteDistribution) -> FiniteDistribution:
    """Reduce ``d`` to at most one non-zero atom (plus mass at zero).

    Idempotent: a distribution that is already reduced is returned as is.
    """
    out = d
    for out in reduce_steps(d):
        pass
    return out


@dataclass(frozen=True)
class OptimumCertificate:
    """Closed-form minimum of the expected joint entropy at fixed (mean, entropy).

    ``optimum`` is t^2 H(v^2) / v^2 with v the inverse rate at u/t, and
    ``witness`` is the two-point distribution achieving it: value v with
    weight t/v, the rest at 0.
    """

    t: float
    u: float
    v: float
    optimum: float
    witness: FiniteDistribution


def joint_entropy_optimum(t: float, u: float) -> OptimumCertificate:
    """Certificate for the least expected joint entropy with mean t, entropy u.

    Feasible inputs satisfy 0 < t < 1 and 0 < u <= H(t); u = H(t) forces
    v = t and the witness degenerates to a single atom.
    """
    t = as_prob(t, "t")
    if t == 0.0 or t == 1.0:
        raise FeasibilityError("t must lie strictly inside (0, 1)")
    u = float(u)
    ht = binary_entropy(t)
    if not math.isfinite(u) or u <= 0.0 or u > ht + 1e-12:
        raise FeasibilityError(f"u must lie in (0, H(t)] = (0, {ht}], got {u!r}")
    u_eff = min(u, ht)
    v = inverse_entropy_rate(u_eff / t)
    if v < t:
        v = t  # rounding guard; mathematically v >= t always
    weight = t / v
    if weight > 1.0:
        weight = 1.0
    optimum = t * t * entropy_of_square(v) / (v * v)
    atoms = [(weight, v)]
    if weight < 1.0:
        atoms.append((1.0 - weight, 0.0))
    return OptimumCertificate(t=t, u=u, v=v, optimum=optimum, witness=FiniteDistribution(atoms))


def random_distribution(rng, n_atoms: int | None = None, max_atoms: int = 6) -> FiniteDistribution:
    """Draw a random distribution: flat simplex weights, uniform values.

    ``rng`` is a numpy Generator; atom count is uniform on 1..max_atoms
    unless pinned by ``n_atoms``.
    """
    k = int(n_atoms) if n_atoms is not None else int(rng.integers(1, max_atoms + 1))
    if k < 1:
        raise DistributionError("n_atoms must be at least 1")
    w = rng.exponential(size=k)
    w /= w.sum()
    v = rng.uniform(0.0, 1.0, size=k)
    return FiniteDistribution(zip(w.tolist(), v.tolist()))


def load_distribution(path: str | Path) -> FiniteDistribution:
    """Read a distribution from the plain-text format."""
    return FiniteDistribution.from_text(Path(path).read_text(encoding="utf-8"))


def dump_distribution(d: FiniteDistribution, path: str | Path) -> None:
    """Write a distribution in the plain-text format."""
    Path(path).write_text(d.to_text(), encoding="utf-8")
