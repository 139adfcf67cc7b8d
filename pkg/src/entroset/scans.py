"""Grid and randomized scans for the entropy inequalities behind the bound.

This module is the verification lab.  It knows four curve families and two
expectation inequalities, and for each one it provides a scalar margin
function (the contract) plus a scan that sweeps a grid or a seeded random
sample and reports the worst margin seen.

Curves, all in bits unless noted:

* ``entropy_sq_ratio``        R(x) = H(x^2) / H(x), increasing on (0, 1)
* ``entropy_sq_ratio_scaled`` S(x) = H(x^2) / (x H(x)), increasing past the
  golden threshold
* ``composed_rate``           x -> f(a * g(x)), convex for 0 < a < 1
* ``tail_rate``               z -> -(1 - z) ln(1 - z) / z in NATS, decreasing

Expectation inequalities over finite distributions:

* ``union_bound_margin``      pairwise-union entropy vs H(2a - a^2)/H(a)
  times the expected entropy, for means at most a <= FREQUENCY_BOUND
* ``product_bound_margin``    pairwise-product entropy vs H(b^2)/H(b) times
  the expected entropy, for means at least b >= GOLDEN_THRESHOLD

The two are images of each other under value complement (w = 1 - v,
b = 1 - a); ``complement_bridge_gap`` measures how closely the two code
paths agree on paired instances.

Every scan locates its minimum with vectorized numpy sweeps, then
re-certifies that minimum through the scalar functions; the reported
``min_margin`` is always the scalar value, so re-evaluating the witness
reproduces it exactly.  The vector figure and the route disagreement are
kept in ``details``.

Witness layouts by scan name:

* grid pair scans: ``(x_left, x_right)``
* ``rate-convexity``: ``(x_left, x_mid, x_right)`` with alpha in config
* ``tail-rate`` pointwise check: ``(z,)``
* ``union-bound`` / ``product-bound`` / ``threshold``: ``(param, weights, values)``
* ``merge-properties``: ``(p1, x1, p2, x2)``
* ``reduction``: ``(weights, values)``
* ``optimum-search``: ``(t, u, weights, values)``
* ``kernel-roundtrip`` / ``golden-anchor`` / ``bridge-gap``: tagged tuples
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .distribution import (
    FiniteDistribution,
    joint_entropy_optimum,
    merge_atoms,
    random_distribution,
    reduce_steps,
    reduce_support,
    scaled_entropy_margin,
    squared_merge_margin,
)
from .kernel import (
    FREQUENCY_BOUND,
    GOLDEN_THRESHOLD,
    KERNEL_TOL,
    LOG2E,
    DomainError,
    as_prob,
    binary_entropy,
    binary_entropy_arr,
    entropy_of_square,
    entropy_of_square_arr,
    entropy_rate,
    entropy_rate_arr,
    inverse_entropy_rate,
    inverse_entropy_rate_arr,
)
from .report import PreconditionError, ScanConfig, ScanReport, make_report

__all__ = [
    "entropy_sq_ratio",
    "entropy_sq_ratio_scaled",
    "entropy_sq_ratio_arr",
    "entropy_sq_ratio_scaled_arr",
    "tail_rate",
    "tail_rate_arr",
    "composed_rate",
    "composed_rate_slope",
    "union_bound_margin",
    "product_bound_margin",
    "complement_bridge_gap",
    "BoundChain",
    "product_bound_chain",
    "merge_quadruple_margin",
    "reduction_consistency_margin",
    "optimum_candidate_margin",
    "scan_sq_ratio",
    "scan_sq_ratio_scaled",
    "scan_rate_convexity",
    "scan_tail_rate",
    "scan_union_bound",
    "scan_product_bound",
    "bridge_gap_scan",
    "threshold_exploration",
    "merge_property_scan",
    "reduction_consistency_scan",
    "optimum_search_scan",
    "kernel_roundtrip_scan",
    "golden_anchor_check",
    "reevaluate_witness",
    "run_named_scan",
    "default_scan_config",
    "DEFAULT_CONFIGS",
    "SCAN_NAMES",
]

#: Sample rows drawn per batch inside the randomized engines.
_BATCH = 65536

#: Shared z-grid for the scaled-merge margin family.
_Z_GRID = tuple(i / 20.0 for i in range(21))

#: Mean-conservation bound for a single merge (should be exact in practice).
MERGE_CONSERVATION_TOL = 1e-10

#: Merged weight may exceed the input weight sum by at most this much.
MERGE_WEIGHT_TOL = 1e-12

#: Drift bounds for a full reduction pipeline.
REDUCTION_DRIFT_TOL = 1e-8

#: Final reduced atom vs the closed-form certificate.
REDUCTION_CERT_TOL = 1e-7

#: Paired complement instances must agree on their margins this closely.
BRIDGE_TOL = 1e-12


# ----------------------------------------------------------------------
# curve families
# ----------------------------------------------------------------------

def _h_near_one(delta: float) -> float:
    """Two-term series for H(1 - delta) in bits, accurate for delta <= 1e-8."""
    return delta * (LOG2E - math.log2(delta))


def entropy_sq_ratio(x: float) -> float:
    """R(x) = H(x^2) / H(x), extended by its limits R(0) = 0 and R(1) = 2.

    Strictly increasing on [0, 1]; R equals 1 exactly at the golden
    threshold where x^2 = 1 - x.  Near x = 1 both entropies vanish, so the
    ratio switches to a series in the complement to dodge 0/0 noise.
    """
    x = as_prob(x)
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 2.0
    eps = 1.0 - x
    if eps < 1e-8:
        return _h_near_one(eps * (2.0 - eps)) / _h_near_one(eps)
    return entropy_of_square(x) / binary_entropy(x)


def entropy_sq_ratio_scaled(x: float) -> float:
    """S(x) = H(x^2) / (x H(x)) with limits S(0) = S(1) = 2.

    Increasing on [GOLDEN_THRESHOLD, 1]; S at the golden threshold is
    (sqrt(5) + 1) / 2.
    """
    x = as_prob(x)
    if x == 0.0:
        return 2.0
    return entropy_sq_ratio(x) / x


def entropy_sq_ratio_arr(x: np.ndarray) -> np.ndarray:
    """Vector mirror of :func:`entropy_sq_ratio`."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    eps = 1.0 - x
    at_zero = x == 0.0
    at_one = eps == 0.0
    near_one = (eps < 1e-8) & ~at_one
    mid = ~(at_zero | at_one | near_one)
    out[at_zero] = 0.0
    out[at_one] = 2.0
    if near_one.any():
        e = eps[near_one]
        e2 = e * (2.0 - e)
        with np.errstate(divide="ignore"):
            num = e2 * (LOG2E - np.log2(e2))
            den = e * (LOG2E - np.log2(e))
        out[near_one] = num / den
    if mid.any():
        xm = x[mid]
        out[mid] = entropy_of_square_arr(xm) / binary_entropy_arr(xm)
    return out


def entropy_sq_ratio_scaled_arr(x: np.ndarray) -> np.ndarray:
    """Vector mirror of :func:`entropy_sq_ratio_scaled`."""
    x = np.asarray(x, dtype=float)
    ratio = entropy_sq_ratio_arr(x)
    out = np.where(x > 0.0, ratio / np.where(x > 0.0, x, 1.0), 2.0)
    return out


def tail_rate(z: float) -> float:
    """m(z) = -(1 - z) ln(1 - z) / z in nats, with m(0) = 1 and m(1) = 0.

    Strictly decreasing on [0, 1]; m(1/2) = ln 2 exactly in floats.
    """
    z = as_prob(z, "z")
    if z == 0.0:
        return 1.0
    if z == 1.0:
        return 0.0
    return -(1.0 - z) * math.log1p(-z) / z


def tail_rate_arr(z: np.ndarray) -> np.ndarray:
    """Vector mirror of :func:`tail_rate`."""
    z = np.asarray(z, dtype=float)
    safe = np.where((z > 0.0) & (z < 1.0), z, 0.5)
    core = -(1.0 - safe) * np.log1p(-safe) / safe
    return np.where(z == 0.0, 1.0, np.where(z == 1.0, 0.0, core))


def composed_rate(alpha: float, x: float) -> float:
    """The map x -> f(alpha * g(x)): rescale the rate's preimage by alpha.

    Defined for 0 < alpha < 1 and x >= 0.  Convex and increasing in x, and
    asymptotically affine with unit slope as x grows.
    """
    alpha = float(alpha)
    if not (math.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie strictly inside (0, 1), got {alpha!r}")
    return entropy_rate(alpha * inverse_entropy_rate(x))


def composed_rate_slope(alpha: float, x: float) -> float:
    """Closed-form derivative of :func:`composed_rate` in x.

    Writing s = g(x), the chain rule collapses to
    log(1 - alpha s) / (alpha log(1 - s)); the log base cancels.
    """
    alpha = float(alpha)
    if not (math.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie strictly inside (0, 1), got {alpha!r}")
    s = inverse_entropy_rate(x)
    if s == 1.0:
        return 0.0
    return math.log1p(-alpha * s) / (alpha * math.log1p(-s))


def _composed_rate_arr(alpha: float, x: np.ndarray) -> np.ndarray:
    return entropy_rate_arr(alpha * inverse_entropy_rate_arr(x))


# ----------------------------------------------------------------------
# expectation inequalities (scalar contracts)
# ----------------------------------------------------------------------

def _pair_union(a: float, b: float) -> float:
    v = a + b - a * b
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


def union_bound_margin(d: FiniteDistribution, alpha: float) -> float:
    """Margin of the pairwise-union entropy bound at level ``alpha``.

    For mean(d) <= alpha <= FREQUENCY_BOUND, the expected entropy of
    independent pairwise unions dominates H(2 alpha - alpha^2) / H(alpha)
    times the expected entropy.  Returns left side minus right side;
    nonnegative means the bound holds.

    Raises :class:`PreconditionError` when (d, alpha) violates the
    hypothesis, since a margin computed there certifies nothing.
    """
    alpha = as_prob(alpha, "alpha")
    if not (0.0 < alpha <= FREQUENCY_BOUND + 1e-15):
        raise PreconditionError(
            f"alpha must lie in (0, {FREQUENCY_BOUND}], got {alpha!r}"
        )
    mean = d.mean()
    if mean > alpha + 1e-12:
        raise PreconditionError(
            f"mean {mean!r} exceeds alpha {alpha!r}; the bound needs mean <= alpha"
        )
    atoms = d.atoms
    lhs = math.fsum(
        wi * wj * binary_entropy(_pair_union(vi, vj))
        for wi, vi in atoms
        for wj, vj in atoms
    )
    ratio = binary_entropy(alpha * (2.0 - alpha)) / binary_entropy(alpha)
    return lhs - ratio * d.expected_entropy()


def product_bound_margin(
    d: FiniteDistribution, beta: float, enforce_threshold: bool = True
) -> float:
    """Margin of the pairwise-product entropy bound at level ``beta``.

    For mean(d) >= beta >= GOLDEN_THRESHOLD, the expected joint entropy
    dominates H(beta^2) / H(beta) times the expected entropy.  Returns
    left side minus right side.

    ``enforce_threshold=False`` drops both hypothesis checks so the same
    margin can be explored below the golden threshold, where it does fail.
    """
    beta = as_prob(beta, "beta")
    if beta == 1.0:
        raise PreconditionError("beta must be strictly below 1")
    if enforce_threshold:
        if beta < GOLDEN_THRESHOLD - 1e-15:
            raise PreconditionError(
                f"beta must be at least {GOLDEN_THRESHOLD}, got {beta!r}"
            )
        mean = d.mean()
        if mean < beta - 1e-12:
            raise PreconditionError(
                f"mean {mean!r} is below beta {beta!r}; the bound needs mean >= beta"
            )
    elif beta == 0.0:
        raise PreconditionError("beta must be positive")
    ratio = entropy_of_square(beta) / binary_entropy(beta)
    return d.expected_joint_entropy() - ratio * d.expected_entropy()


def complement_bridge_gap(d: FiniteDistribution, beta: float) -> float:
    """Disagreement between the product and union margins on complements.

    ``d`` holds the product-side values w with mean(d) >= beta; the union
    side sees values 1 - w at level 1 - beta.  The two margins are equal
    in exact arithmetic; the return value is their absolute float gap.
    """
    pm = product_bound_margin(d, beta)
    comp = FiniteDistribution((w, 1.0 - v) for w, v in d.atoms)
    um = union_bound_margin(comp, 1.0 - beta)
    return abs(pm - um)


@dataclass(frozen=True)
class BoundChain:
    """Step-by-step decomposition of the product bound's proof route.

    The route: joint >= closed-form optimum = t u S(v) >= t u S(t)
    = u R(t) >= u R(beta) = bound.  Each ``step_*`` field is one link's
    margin; ``identity_residual`` is the float error in rewriting the
    optimum as t u S(v), which vanishes in exact arithmetic.
    """

    t: float
    u: float
    v: float
    joint: float
    optimum: float
    step_optimum: float
    step_scaled: float
    step_golden: float
    identity_residual: float
    margin: float


def product_bound_chain(d: FiniteDistribution, beta: float) -> BoundChain:
    """Decompose :func:`product_bound_margin` into its three proof steps.

    Every step margin should clear -1e-9 on valid inputs, and the steps
    plus the identity residual recompose the total margin.
    """
    beta = as_prob(beta, "beta")
    if beta == 1.0:
        raise PreconditionError("beta must be strictly below 1")
    if beta < GOLDEN_THRESHOLD - 1e-15:
        raise PreconditionError(
            f"beta must be at least {GOLDEN_THRESHOLD}, got {beta!r}"
        )
    t = d.mean()
    if t < beta - 1e-12:
        raise PreconditionError(
            f"mean {t!r} is below beta {beta!r}; the bound needs mean >= beta"
        )
    u = d.expected_entropy()
    joint = d.expected_joint_entropy()
    v = inverse_entropy_rate(u / t) if u > 0.0 else 1.0
    if v < t:
        v = t
    optimum = t * t * entropy_of_square(v) / (v * v)
    s_v = entropy_sq_ratio_scaled(v)
    s_t = entropy_sq_ratio_scaled(t)
    r_t = entropy_sq_ratio(t)
    r_beta = entropy_sq_ratio(beta)
    ratio = entropy_of_square(beta) / binary_entropy(beta)
    return BoundChain(
        t=t,
        u=u,
        v=v,
        joint=joint,
        optimum=optimum,
        step_optimum=joint - optimum,
        step_scaled=t * u * (s_v - s_t),
        step_golden=u * (r_t - r_beta),
        identity_residual=optimum - t * u * s_v,
        margin=joint - ratio * u,
    )


# ----------------------------------------------------------------------
# scalar margins for the pipeline consistency engines
# ----------------------------------------------------------------------

def merge_quadruple_margin(p1: float, x1: float, p2: float, x2: float) -> float:
    """Worst inequality margin for one merge: scaled family plus squares.

    Minimum over the shared z-grid of the scaled-entropy margin, together
    with the squared-merge margin.  Conservation residuals are checked
    separately; this function is only the inequality side.
    """
    worst = squared_merge_margin(p1, x1, p2, x2)
    for z in _Z_GRID:
        m = scaled_entropy_margin(p1, x1, p2, x2, z)
        if m < worst:
            worst = m
    return worst


def reduction_consistency_margin(d: FiniteDistribution) -> float:
    """Worst margin across every reduction consistency check for ``d``.

    Families folded into the minimum: mean and expected-entropy drift
    (bound REDUCTION_DRIFT_TOL), per-step monotonicity of the expected
    joint entropy (same bound), and the final atom against the
    closed-form certificate (bound REDUCTION_CERT_TOL).
    """
    t = d.mean()
    u = d.expected_entropy()
    worst = math.inf
    prev_joint = d.expected_joint_entropy()
    final = d
    for step in reduce_steps(d):
        j = step.expected_joint_entropy()
        worst = min(worst, REDUCTION_DRIFT_TOL - (j - prev_joint))
        prev_joint = j
        final = step
    worst = min(worst, REDUCTION_DRIFT_TOL - abs(final.mean() - t))
    worst = min(worst, REDUCTION_DRIFT_TOL - abs(final.expected_entropy() - u))
    if 0.0 < t < 1.0 and u > 0.0:
        cert = joint_entropy_optimum(t, min(u, binary_entropy(t)))
        nz = final.nonzero_atoms()
        if len(nz) == 1:
            (w, y) = nz[0]
            worst = min(worst, REDUCTION_CERT_TOL - abs(y - cert.v))
            worst = min(worst, REDUCTION_CERT_TOL - abs(w - cert.t / cert.v))
        worst = min(
            worst,
            REDUCTION_CERT_TOL - abs(final.expected_joint_entropy() - cert.optimum),
        )
    return worst


def optimum_candidate_margin(
    t: float, u: float, weights: tuple, values: tuple
) -> float:
    """Candidate joint entropy minus (optimum - 1e-4) for the search scan.

    The optimum is evaluated at the candidate's OWN mean and expected
    entropy, which is the certificate's actual claim.  Comparing against
    the optimum at the search pair (t, u) instead is falsifiable: the
    optimum moves by up to ~1e-3 across the matching box, an order beyond
    the 1e-4 slack.  (t, u) are kept to locate the witness in its search.
    """
    cand = FiniteDistribution(zip(weights, values))
    cert = joint_entropy_optimum(cand.mean(), cand.expected_entropy())
    return cand.expected_joint_entropy() - (cert.optimum - 1e-4)


# ----------------------------------------------------------------------
# default configurations and the scan registry
# ----------------------------------------------------------------------

DEFAULT_CONFIGS: dict[str, ScanConfig] = {
    "sq-ratio": ScanConfig(
        grid_step=1e-4, random_samples=0, seed=42, tolerance=1e-6,
        range_lo=1e-4, range_hi=1.0 - 1e-4,
    ),
    "sq-ratio-scaled": ScanConfig(
        grid_step=1e-5, random_samples=0, seed=42, tolerance=1e-6,
        range_lo=GOLDEN_THRESHOLD, range_hi=1.0 - 1e-6,
    ),
    "rate-convexity": ScanConfig(
        grid_step=1e-3, random_samples=0, seed=42, tolerance=1e-6,
        range_lo=0.05, range_hi=10.0,
    ),
    "tail-rate": ScanConfig(
        grid_step=1e-4, random_samples=0, seed=42, tolerance=1e-6,
        range_lo=1e-6, range_hi=1.0 - 1e-6,
    ),
    "union-bound": ScanConfig(
        grid_step=1e-4, random_samples=100_000, seed=42, tolerance=1e-9,
        range_lo=0.0, range_hi=FREQUENCY_BOUND,
    ),
    "product-bound": ScanConfig(
        grid_step=1e-4, random_samples=100_000, seed=42, tolerance=1e-9,
        range_lo=GOLDEN_THRESHOLD, range_hi=1.0,
    ),
    "threshold": ScanConfig(
        grid_step=0.01, random_samples=10_000, seed=42, tolerance=1e-9,
        range_lo=0.55, range_hi=0.70,
    ),
}


def default_scan_config(name: str) -> ScanConfig:
    try:
        return DEFAULT_CONFIGS[name]
    except KeyError:
        raise ValueError(f"unknown scan {name!r}; known: {sorted(DEFAULT_CONFIGS)}")


def _config_dict(cfg: ScanConfig, **extra) -> dict:
    doc = {
        "grid_step": cfg.grid_step,
        "random_samples": cfg.random_samples,
        "seed": cfg.seed,
        "range_lo": cfg.range_lo,
        "range_hi": cfg.range_hi,
    }
    doc.update(extra)
    return doc


def _grid(cfg: ScanConfig) -> np.ndarray:
    return np.linspace(cfg.range_lo, cfg.range_hi, cfg.grid_points())


# ----------------------------------------------------------------------
# grid scans
# ----------------------------------------------------------------------

def scan_sq_ratio(cfg: ScanConfig | None = None) -> ScanReport:
    """Check that R(x) = H(x^2)/H(x) increases across the grid."""
    if cfg is None:
        cfg = DEFAULT_CONFIGS["sq-ratio"]
    xs = _grid(cfg)
    vals = entropy_sq_ratio_arr(xs)
    diffs = vals[1:] - vals[:-1]
    i = int(np.argmin(diffs))
    witness = (float(xs[i]), float(xs[i + 1]))
    certified = entropy_sq_ratio(witness[1]) - entropy_sq_ratio(witness[0])
    details = {
        "vector_min_margin": float(diffs[i]),
        "route_gap": abs(certified - float(diffs[i])),
    }
    return make_report(
        "sq-ratio", xs.size, certified, witness, cfg.tolerance,
        config=_config_dict(cfg), details=details,
    )


def scan_sq_ratio_scaled(cfg: ScanConfig | None = None) -> ScanReport:
    """Check that S(x) = H(x^2)/(x H(x)) increases past the golden threshold."""
    if cfg is None:
        cfg = DEFAULT_CONFIGS["sq-ratio-scaled"]
    if cfg.range_lo < GOLDEN_THRESHOLD - 1e-12:
        raise PreconditionError(
            "the scaled ratio is only monotone from the golden threshold up"
        )
    xs = _grid(cfg)
    vals = entropy_sq_ratio_scaled_arr(xs)
    diffs = vals[1:] - vals[:-1]
    i = int(np.argmin(diffs))
    witness = (float(xs[i]), float(xs[i + 1]))
    certified = entropy_sq_ratio_scaled(witness[1]) - entropy_sq_ratio_scaled(witness[0])
    details = {
        "vector_min_margin": float(diffs[i]),
        "route_gap": abs(certified - float(diffs[i])),
    }
    return make_report(
        "sq-ratio-scaled", xs.size, certified, witness, cfg.tolerance,
        config=_config_dict(cfg), details=details,
    )


def scan_rate_convexity(
    alpha: float = 0.5, cfg: ScanConfig | None = None
) -> ScanReport:
    """Check convexity of x -> f(alpha g(x)) by second central differences."""
    alpha = float(alpha)
    if not (math.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie strictly inside (0, 1), got {alpha!r}")
    if cfg is None:
        cfg = DEFAULT_CONFIGS["rate-convexity"]
    if cfg.range_lo <= 0.0:
        raise PreconditionError("the convexity grid must stay strictly positive")
    xs = _grid(cfg)
    vals = _composed_rate_arr(alpha, xs)
    d2 = vals[:-2] - 2.0 * vals[1:-1] + vals[2:]
    i = int(np.argmin(d2))
    witness = (float(xs[i]), float(xs[i + 1]), float(xs[i + 2]))
    a, b, c = (composed_rate(alpha, w) for w in witness)
    certified = a - 2.0 * b + c
    details = {
        "vector_min_margin": float(d2[i]),
        "route_gap": abs(certified - float(d2[i])),
    }
    return make_report(
        "rate-convexity", xs.size, certified, witness, cfg.tolerance,
        config=_config_dict(cfg, alpha=alpha), details=details,
    )


def scan_tail_rate(cfg: ScanConfig | None = None) -> ScanReport:
    """Check that the nats tail rate decreases, plus ln(1-z) <= -z pointwise."""
    if cfg is None:
        cfg = DEFAULT_CONFIGS["tail-rate"]
    zs = _grid(cfg)
    vals = tail_rate_arr(zs)
    diffs = vals[:-1] - vals[1:]
    i = int(np.argmin(diffs))
    pointwise = -zs - np.log1p(-np.minimum(zs, 1.0 - 1e-16))
    j = int(np.argmin(pointwise))
    if float(diffs[i]) <= float(pointwise[j]):
        witness: tuple = (float(zs[i]), float(zs[i + 1]))
        certified = tail_rate(witness[0]) - tail_rate(witness[1])
        vector_min = float(diffs[i])
    else:
        witness = (float(zs[j]),)
        certified = -witness[0] - math.log1p(-witness[0])
        vector_min = float(pointwise[j])
    details = {
        "vector_min_margin": vector_min,
        "route_gap": abs(certified - vector_min),
        "min_pair_margin": float(diffs[i]),
        "min_pointwise_margin": float(pointwise[j]),
    }
    return make_report(
        "tail-rate", zs.size, certified, witness, cfg.tolerance,
        config=_config_dict(cfg), details=details,
    )


# ----------------------------------------------------------------------
# randomized expectation scans
# ----------------------------------------------------------------------

def _sample_batch(rng: np.random.Generator, m: int, kmax: int = 6):
    """(weights, values) for m random distributions, zero-padded to kmax."""
    counts = rng.integers(1, kmax + 1, size=m)
    live = np.arange(kmax)[None, :] < counts[:, None]
    raw = rng.exponential(size=(m, kmax))
    raw *= live
    weights = raw / raw.sum(axis=1, keepdims=True)
    values = rng.uniform(size=(m, kmax))
    values *= live
    return weights, values


def _witness_atoms(w: np.ndarray, v: np.ndarray) -> tuple[tuple, tuple]:
    keep = w > 0.0
    return (
        tuple(float(x) for x in w[keep]),
        tuple(float(x) for x in v[keep]),
    )


def _union_margins_arr(w: np.ndarray, v: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    hv = binary_entropy_arr(v)
    u = np.einsum("ij,ij->i", w, hv)
    a = v[:, :, None]
    b = v[:, None, :]
    pair = np.clip(a + b - a * b, 0.0, 1.0)
    lhs = np.einsum("ni,nj,nij->n", w, w, binary_entropy_arr(pair))
    mix = np.clip(alpha * (2.0 - alpha), 0.0, 1.0)
    ratio = binary_entropy_arr(mix) / binary_entropy_arr(alpha)
    return lhs - ratio * u


def _product_margins_arr(w: np.ndarray, v: np.ndarray, beta: np.ndarray) -> np.ndarray:
    hv = binary_entropy_arr(v)
    u = np.einsum("ij,ij->i", w, hv)
    pair = v[:, :, None] * v[:, None, :]
    lhs = np.einsum("ni,nj,nij->n", w, w, binary_entropy_arr(pair))
    ratio = entropy_of_square_arr(beta) / binary_entropy_arr(beta)
    return lhs - ratio * u


def _random_margin_scan(name: str, cfg: ScanConfig, side: str) -> ScanReport:
    """Shared engine: rejection-sample (d, level) pairs, track the worst margin.

    ``side`` selects the conditioning: "union" keeps mean <= level with the
    level drawn from (range_lo, range_hi], "product" keeps mean >= level
    with the level drawn from [range_lo, range_hi).
    """
    rng = np.random.default_rng(cfg.seed)
    needed = cfg.random_samples
    if needed <= 0:
        raise ValueError("random_samples must be positive for this scan")
    span = cfg.range_hi - cfg.range_lo
    best = math.inf
    best_witness: tuple = ()
    checked = 0
    drawn = 0
    while checked < needed:
        w, v = _sample_batch(rng, _BATCH)
        drawn += _BATCH
        if side == "union":
            level = cfg.range_hi - span * rng.uniform(size=_BATCH)
            keep = np.einsum("ij,ij->i", w, v) <= level
        else:
            level = cfg.range_lo + span * rng.uniform(size=_BATCH)
            keep = np.einsum("ij,ij->i", w, v) >= level
        if not keep.any():
            continue
        w2, v2, lv2 = w[keep], v[keep], level[keep]
        take = min(w2.shape[0], needed - checked)
        w2, v2, lv2 = w2[:take], v2[:take], lv2[:take]
        if side == "union":
            margins = _union_margins_arr(w2, v2, lv2)
        else:
            margins = _product_margins_arr(w2, v2, lv2)
        i = int(np.argmin(margins))
        if float(margins[i]) < best:
            best = float(margins[i])
            ws, vs = _witness_atoms(w2[i], v2[i])
            best_witness = (float(lv2[i]), ws, vs)
        checked += take
    level, ws, vs = best_witness
    d = FiniteDistribution(zip(ws, vs))
    if side == "union":
        certified = union_bound_margin(d, level)
    else:
        certified = product_bound_margin(d, level)
    details = {
        "vector_min_margin": best,
        "route_gap": abs(certified - best),
        "raw_draws": drawn,
    }
    return make_report(
        name, checked, certified, best_witness, cfg.tolerance,
        config=_config_dict(cfg), details=details,
    )


def scan_union_bound(cfg: ScanConfig | None = None) -> ScanReport:
    """Randomized check of the union bound on (d, alpha) with mean <= alpha."""
    if cfg is None:
        cfg = DEFAULT_CONFIGS["union-bound"]
    if not (0.0 <= cfg.range_lo < cfg.range_hi <= FREQUENCY_BOUND + 1e-15):
        raise PreconditionError(
            f"alpha range must sit inside (0, {FREQUENCY_BOUND}]"
        )
    return _random_margin_scan("union-bound", cfg, "union")


def scan_product_bound(cfg: ScanConfig | None = None) -> ScanReport:
    """Randomized check of the product bound on (d, beta) with mean >= beta."""
    if cfg is None:
        cfg = DEFAULT_CONFIGS["product-bound"]
    if not (GOLDEN_THRESHOLD - 1e-15 <= cfg.range_lo < cfg.range_hi <= 1.0):
        raise PreconditionError(
            f"beta range must sit inside [{GOLDEN_THRESHOLD}, 1)"
        )
    return _random_margin_scan("product-bound", cfg, "product")


def bridge_gap_scan(
    samples: int = 10_000, seed: int = 42, bound: float = BRIDGE_TOL
) -> ScanReport:
    """Check the complement bridge on paired random instances.

    Margin convention: bound - gap per pair, so the report passes at
    tolerance zero iff every pair agrees within ``bound``.
    """
    rng = np.random.default_rng(seed)
    span = 1.0 - GOLDEN_THRESHOLD
    best = math.inf
    best_witness: tuple = ()
    checked = 0
    while checked < samples:
        w, v = _sample_batch(rng, _BATCH)
        beta = GOLDEN_THRESHOLD + span * rng.uniform(size=_BATCH)
        keep = np.einsum("ij,ij->i", w, v) >= beta
        if not keep.any():
            continue
        w2, v2, b2 = w[keep], v[keep], beta[keep]
        take = min(w2.shape[0], samples - checked)
        for row in range(take):
            ws, vs = _witness_atoms(w2[row], v2[row])
            d = FiniteDistribution(zip(ws, vs))
            margin = bound - complement_bridge_gap(d, float(b2[row]))
            if margin < best:
                best = margin
                best_witness = (float(b2[row]), ws, vs)
        checked += take
    details = {"bound": bound}
    return make_report(
        "bridge-gap", checked, best, best_witness, 0.0,
        config={"random_samples": samples, "seed": seed}, details=details,
    )


def threshold_exploration(cfg: ScanConfig | None = None) -> ScanReport:
    """Map the product bound's margin across a band of thresholds.

    For each beta on the grid this sweeps the two-point family
    {(beta/v, v), (1 - beta/v, 0)} over v in [beta, 1) and a seeded batch
    of random distributions with mean >= beta, recording the worst margin
    per beta WITHOUT enforcing the golden threshold.  Exploratory: the
    report always passes; negative margins below the threshold are the
    interesting output, not a failure.
    """
    if cfg is None:
        cfg = DEFAULT_CONFIGS["threshold"]
    rng = np.random.default_rng(cfg.seed)
    betas = _grid(cfg)
    rows = []
    total = 0
    global_best = math.inf
    global_witness: tuple = ()
    for beta in betas:
        beta = float(beta)
        ratio = entropy_of_square(beta) / binary_entropy(beta)
        vs = np.linspace(beta, 1.0 - 1e-6, 2001)
        q = beta / vs
        two_point = q * q * entropy_of_square_arr(vs) - ratio * q * binary_entropy_arr(vs)
        i = int(np.argmin(two_point))
        row_best = float(two_point[i])
        vstar = float(vs[i])
        qstar = beta / vstar
        row_witness: tuple = (
            beta,
            (qstar, 1.0 - qstar) if qstar < 1.0 else (1.0,),
            (vstar, 0.0) if qstar < 1.0 else (vstar,),
        )
        row_points = vs.size
        got = 0
        while got < cfg.random_samples:
            w, v = _sample_batch(rng, _BATCH)
            keep = np.einsum("ij,ij->i", w, v) >= beta
            if not keep.any():
                continue
            w2, v2 = w[keep], v[keep]
            take = min(w2.shape[0], cfg.random_samples - got)
            w2, v2 = w2[:take], v2[:take]
            margins = _product_margins_arr(w2, v2, np.full(take, beta))
            j = int(np.argmin(margins))
            if float(margins[j]) < row_best:
                row_best = float(margins[j])
                ws, vals = _witness_atoms(w2[j], v2[j])
                row_witness = (beta, ws, vals)
            got += take
        row_points += got
        total += row_points
        d = FiniteDistribution(zip(row_witness[1], row_witness[2]))
        certified = product_bound_margin(d, beta, enforce_threshold=False)
        rows.append({
            "beta": beta,
            "min_margin": certified,
            "points": row_points,
            "above_golden": beta >= GOLDEN_THRESHOLD - 1e-15,
        })
        if certified < global_best:
            global_best = certified
            global_witness = row_witness
    report = make_report(
        "threshold", total, global_best, global_witness, cfg.tolerance,
        config=_config_dict(cfg), details={"rows": rows},
    )
    # exploration never fails: the negative margins below the golden
    # threshold are its findings, not defects
    return replace(report, passed=True)


# ----------------------------------------------------------------------
# pipeline consistency engines
# ----------------------------------------------------------------------

def merge_property_scan(cfg: ScanConfig | None = None) -> ScanReport:
    """Randomized audit of one merge step: conservation plus both margins.

    Draws quadruples (p1, x1, p2, x2), recomputes the merge vectorized,
    and checks mean and entropy conservation, the weight cap, the scaled
    inequality on the shared z-grid, and the squared inequality.  The
    reported min_margin covers the two inequality families; conservation
    residuals live in details with their own fixed bounds and fold into
    the verdict.
    """
    if cfg is None:
        cfg = ScanConfig(random_samples=100_000, seed=42, tolerance=1e-9)
    n = cfg.random_samples
    rng = np.random.default_rng(cfg.seed)
    p1 = 0.5 * (1.0 - rng.uniform(size=n))
    p2 = 0.5 * (1.0 - rng.uniform(size=n))
    x1 = rng.uniform(1e-12, 1.0, size=n)
    x2 = rng.uniform(1e-12, 1.0, size=n)
    ent = p1 * binary_entropy_arr(x1) + p2 * binary_entropy_arr(x2)
    load = p1 * x1 + p2 * x2
    y = inverse_entropy_rate_arr(ent / load)
    q = load / y
    cons_mean = np.abs(q * y - load)
    cons_ent = np.abs(q * binary_entropy_arr(y) - ent)
    weight_excess = q - (p1 + p2)
    sq = (
        p1 * p1 * entropy_of_square_arr(x1)
        + 2.0 * p1 * p2 * binary_entropy_arr(x1 * x2)
        + p2 * p2 * entropy_of_square_arr(x2)
        - q * q * entropy_of_square_arr(y)
    )
    worst = sq.copy()
    for z in _Z_GRID:
        m = (
            p1 * binary_entropy_arr(z * x1)
            + p2 * binary_entropy_arr(z * x2)
            - q * binary_entropy_arr(z * y)
        )
        np.minimum(worst, m, out=worst)
    i = int(np.argmin(worst))
    witness = (float(p1[i]), float(x1[i]), float(p2[i]), float(x2[i]))
    certified = merge_quadruple_margin(*witness)
    details = {
        "vector_min_margin": float(worst[i]),
        "route_gap": abs(certified - float(worst[i])),
        "max_mean_residual": float(cons_mean.max()),
        "max_entropy_residual": float(cons_ent.max()),
        "max_weight_excess": float(weight_excess.max()),
        "mean_residual_bound": MERGE_CONSERVATION_TOL,
        "weight_excess_bound": MERGE_WEIGHT_TOL,
    }
    report = make_report(
        "merge-properties", n, certified, witness, cfg.tolerance,
        config=_config_dict(cfg), details=details,
    )
    ok = (
        report.passed
        and details["max_mean_residual"] <= MERGE_CONSERVATION_TOL
        and details["max_entropy_residual"] <= MERGE_CONSERVATION_TOL
        and details["max_weight_excess"] <= MERGE_WEIGHT_TOL
    )
    return replace(report, passed=ok)


def reduction_consistency_scan(cfg: ScanConfig | None = None) -> ScanReport:
    """Run full reductions on random distributions and audit every step."""
    if cfg is None:
        cfg = ScanConfig(random_samples=1000, seed=42, tolerance=1e-9)
    rng = np.random.default_rng(cfg.seed)
    best = math.inf
    best_witness: tuple = ()
    for _ in range(cfg.random_samples):
        k = int(rng.integers(2, 21))
        d = random_distribution(rng, n_atoms=k)
        m = reduction_consistency_margin(d)
        if m < best:
            best = m
            best_witness = (
                tuple(w for w, _ in d.atoms),
                tuple(v for _, v in d.atoms),
            )
    details = {
        "drift_bound": REDUCTION_DRIFT_TOL,
        "certificate_bound": REDUCTION_CERT_TOL,
    }
    return make_report(
        "reduction", cfg.random_samples, best, best_witness, 0.0,
        config=_config_dict(cfg), details=details,
    )


def optimum_search_scan(
    cfg: ScanConfig | None = None, pairs: int = 100
) -> ScanReport:
    """Random search for joint entropies below the closed-form optimum.

    For each (t, u) pair this draws cfg.random_samples candidate
    distributions of up to three atoms (values rescaled toward mean t to
    boost the hit rate), keeps the ones matching the pair within 1e-3 in
    both mean and expected entropy, and verifies none undercuts the
    certificate at its own moments by more than 1e-4.  The loosest
    undercut relative to the pair's optimum is recorded in details; that
    figure legitimately drifts with the matching box and is not judged.
    """
    if cfg is None:
        cfg = ScanConfig(random_samples=200_000, seed=42, tolerance=0.0)
    rng = np.random.default_rng(cfg.seed)
    best = math.inf
    best_witness: tuple = ()
    pair_undercut = math.inf
    qualified = 0
    for _ in range(pairs):
        t = float(rng.uniform(0.05, 0.95))
        u = float((1.0 - rng.uniform()) * binary_entropy(t))
        cert = joint_entropy_optimum(t, u)
        w, v = _sample_batch(rng, cfg.random_samples, kmax=3)
        means = np.einsum("ij,ij->i", w, v)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.minimum(t / means, 1.0 / np.maximum(v, 1e-300).max(axis=1))
        v = v * scale[:, None]
        means = np.einsum("ij,ij->i", w, v)
        ents = np.einsum("ij,ij->i", w, binary_entropy_arr(v))
        keep = (np.abs(means - t) <= 1e-3) & (np.abs(ents - u) <= 1e-3)
        if not keep.any():
            continue
        w2, v2 = w[keep], v[keep]
        m2, e2 = means[keep], ents[keep]
        pair = v2[:, :, None] * v2[:, None, :]
        joints = np.einsum("ni,nj,nij->n", w2, w2, binary_entropy_arr(pair))
        qualified += int(w2.shape[0])
        own_v = inverse_entropy_rate_arr(e2 / m2)
        own_v = np.maximum(own_v, m2)
        own_opt = m2 * m2 * entropy_of_square_arr(own_v) / (own_v * own_v)
        margins = joints - (own_opt - 1e-4)
        i = int(np.argmin(margins))
        pair_undercut = min(pair_undercut, float(np.min(joints) - (cert.optimum - 1e-4)))
        if float(margins[i]) < best:
            best = float(margins[i])
            ws, vs = _witness_atoms(w2[i], v2[i])
            best_witness = (t, u, ws, vs)
    certified = best
    route_gap = 0.0
    if best_witness:
        certified = optimum_candidate_margin(*best_witness)
        route_gap = abs(certified - best)
    details = {
        "pairs": pairs,
        "qualified_candidates": qualified,
        "vector_min_margin": best,
        "route_gap": route_gap,
        "slack": 1e-4,
        "pair_level_min_margin": pair_undercut,
    }
    return make_report(
        "optimum-search", qualified, certified, best_witness, 0.0,
        config=_config_dict(cfg), details=details,
    )


# ----------------------------------------------------------------------
# kernel self-checks packaged as reports
# ----------------------------------------------------------------------

def kernel_roundtrip_scan(
    x_tol: float = 1e-9,
    rate_tol: float = KERNEL_TOL,
    cfg: ScanConfig | None = None,
) -> ScanReport:
    """Round-trip the rate both ways across dense grids.

    Checks |g(f(x)) - x| <= x_tol on an x-grid and the defining contract
    |f(g(y)) - y| <= rate_tol * max(1, y) on a y-grid.  Margins are the
    bounds minus the residuals, judged at tolerance zero.
    """
    if cfg is None:
        cfg = ScanConfig(grid_step=1e-3, random_samples=0, seed=42,
                         tolerance=0.0, range_lo=1e-3, range_hi=0.999)
    xs = _grid(cfg)
    back = inverse_entropy_rate_arr(entropy_rate_arr(xs))
    m_x = x_tol - np.abs(back - xs)
    i = int(np.argmin(m_x))
    ys = np.linspace(0.0, 20.0, 20001)
    resid = np.abs(entropy_rate_arr(inverse_entropy_rate_arr(ys)) - ys)
    m_y = rate_tol * np.maximum(1.0, ys) - resid
    j = int(np.argmin(m_y))
    if float(m_x[i]) <= float(m_y[j]):
        x = float(xs[i])
        witness: tuple = ("roundtrip-x", x)
        certified = x_tol - abs(inverse_entropy_rate(entropy_rate(x)) - x)
        vector_min = float(m_x[i])
    else:
        yv = float(ys[j])
        witness = ("roundtrip-rate", yv)
        certified = rate_tol * max(1.0, yv) - abs(
            entropy_rate(inverse_entropy_rate(yv)) - yv
        )
        vector_min = float(m_y[j])
    details = {
        "vector_min_margin": vector_min,
        "route_gap": abs(certified - vector_min),
        "x_tol": x_tol,
        "rate_tol": rate_tol,
        "min_x_margin": float(m_x[i]),
        "min_rate_margin": float(m_y[j]),
    }
    return make_report(
        "kernel-roundtrip", xs.size + ys.size, certified, witness, 0.0,
        config=_config_dict(cfg), details=details,
    )


def golden_anchor_check(
    identity_tol: float = 1e-12, margin_tol: float = 1e-9
) -> ScanReport:
    """Pin the golden-threshold identities that anchor the whole chain.

    At b = GOLDEN_THRESHOLD: b^2 = 1 - b, so H(b^2) = H(b) (ratio one) and
    the single-atom product bound is exactly tight.
    """
    b = GOLDEN_THRESHOLD
    checks = [
        ("sq-ratio-at-golden", identity_tol - abs(entropy_sq_ratio(b) - 1.0)),
        ("square-vs-complement", identity_tol - abs(b * b - (1.0 - b))),
        (
            "single-atom-margin",
            margin_tol - abs(product_bound_margin(FiniteDistribution([(1.0, b)]), b)),
        ),
        (
            "scaled-ratio-at-golden",
            identity_tol - abs(entropy_sq_ratio_scaled(b) - (math.sqrt(5.0) + 1.0) / 2.0),
        ),
    ]
    tag, worst = min(checks, key=lambda c: c[1])
    details = {name: margin for name, margin in checks}
    details["identity_tol"] = identity_tol
    details["margin_tol"] = margin_tol
    return make_report(
        "golden-anchor", len(checks), worst, (tag, b), 0.0, config={}, details=details,
    )


# ----------------------------------------------------------------------
# witness re-evaluation
# ----------------------------------------------------------------------

def _reeval_pair(fn, witness):
    lo, hi = witness
    return fn(hi) - fn(lo)


def reevaluate_witness(report: ScanReport) -> float:
    """Recompute a report's margin at its witness through the scalar route.

    Returns the margin the scan would report for that witness alone; by
    construction it reproduces ``report.min_margin`` up to float identity
    for every scan in this module.
    """
    name = report.name
    w = report.argmin_witness
    if name == "sq-ratio":
        return _reeval_pair(entropy_sq_ratio, w)
    if name == "sq-ratio-scaled":
        return _reeval_pair(entropy_sq_ratio_scaled, w)
    if name == "rate-convexity":
        alpha = report.config["alpha"]
        a, b, c = (composed_rate(alpha, x) for x in w)
        return a - 2.0 * b + c
    if name == "tail-rate":
        if len(w) == 1:
            return -w[0] - math.log1p(-w[0])
        return tail_rate(w[0]) - tail_rate(w[1])
    if name == "union-bound":
        level, ws, vs = w
        return union_bound_margin(FiniteDistribution(zip(ws, vs)), level)
    if name == "product-bound":
        level, ws, vs = w
        return product_bound_margin(FiniteDistribution(zip(ws, vs)), level)
    if name == "threshold":
        level, ws, vs = w
        return product_bound_margin(
            FiniteDistribution(zip(ws, vs)), level, enforce_threshold=False
        )
    if name == "bridge-gap":
        level, ws, vs = w
        bound = (report.details or {}).get("bound", BRIDGE_TOL)
        return bound - complement_bridge_gap(FiniteDistribution(zip(ws, vs)), level)
    if name == "merge-properties":
        return merge_quadruple_margin(*w)
    if name == "reduction":
        ws, vs = w
        return reduction_consistency_margin(FiniteDistribution(zip(ws, vs)))
    if name == "optimum-search":
        return optimum_candidate_margin(*w)
    if name == "kernel-roundtrip":
        tag, val = w
        if tag == "roundtrip-x":
            x_tol = (report.details or {}).get("x_tol", 1e-9)
            return x_tol - abs(inverse_entropy_rate(entropy_rate(val)) - val)
        rate_tol = (report.details or {}).get("rate_tol", KERNEL_TOL)
        return rate_tol * max(1.0, val) - abs(
            entropy_rate(inverse_entropy_rate(val)) - val
        )
    if name == "golden-anchor":
        return (report.details or {})[w[0]]
    raise ValueError(f"no scalar re-evaluation known for scan {name!r}")


#: Names accepted by the command-line ``scan`` subcommand.
SCAN_NAMES = (
    "sq-ratio",
    "sq-ratio-scaled",
    "rate-convexity",
    "tail-rate",
    "union-bound",
    "product-bound",
    "threshold",
)


def run_named_scan(
    name: str, cfg: ScanConfig | None = None, alpha: float = 0.5
) -> ScanReport:
    """Dispatch one of the named scans; raises ValueError on unknown names."""
    if name == "sq-ratio":
        return scan_sq_ratio(cfg)
    if name == "sq-ratio-scaled":
        return scan_sq_ratio_scaled(cfg)
    if name == "rate-convexity":
        return scan_rate_convexity(alpha, cfg)
    if name == "tail-rate":
        return scan_tail_rate(cfg)
    if name == "union-bound":
        return scan_union_bound(cfg)
    if name == "product-bound":
        return scan_product_bound(cfg)
    if name == "threshold":
        return threshold_exploration(cfg)
    raise ValueError(f"unknown scan {name!r}; known: {', '.join(SCAN_NAMES)}")
