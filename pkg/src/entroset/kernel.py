"""Binary entropy kernel.

Scalar primitives for the entropy of a biased coin and for the rate map
``H(x)/x`` that drives everything else in this package: the rate, its
closed-form derivative, and the numerical inverse of the rate.  Array
versions of the hot primitives are provided for the bulk scan engines;
they use the same formulas and are cross-checked against the scalar path
in the test suite.

Conventions
-----------
* All entropies are in bits (log base 2).  The one place natural logs
  appear is flagged explicitly at its definition site.
* ``binary_entropy`` is evaluated symmetrically from the smaller of
  ``(x, 1 - x)``, so ``binary_entropy(x) == binary_entropy(1 - x)``
  bitwise whenever ``1 - x`` is exactly representable.
* Tolerances shared by scanners and tests live here as module constants
  so there is exactly one place to read them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "KERNEL_TOL",
    "DERIV_TOL",
    "GOLDEN_THRESHOLD",
    "FREQUENCY_BOUND",
    "RatePoint",
    "as_prob",
    "binary_entropy",
    "entropy_of_square",
    "entropy_rate",
    "entropy_rate_deriv",
    "inverse_entropy_rate",
    "rate_point",
    "binary_entropy_arr",
    "entropy_of_square_arr",
    "entropy_rate_arr",
    "inverse_entropy_rate_arr",
]

LN2 = math.log(2.0)
LOG2E = 1.0 / LN2

#: Residual bound for the rate inverse: |rate(inverse(y)) - y| <= KERNEL_TOL * max(1, y).
KERNEL_TOL = 1e-10

#: Agreement bound between closed-form derivatives and central finite differences.
DERIV_TOL = 1e-5

#: The positive root of b^2 = 1 - b.  At this bias the entropy of the square
#: equals the entropy of the bias itself, which pins the tight constant in the
#: product-form inequality.
GOLDEN_THRESHOLD = (math.sqrt(5.0) - 1.0) / 2.0

#: 1 - GOLDEN_THRESHOLD = GOLDEN_THRESHOLD^2 = (3 - sqrt 5)/2, the frequency
#: bound certified by the exact-arithmetic family sweep.
FREQUENCY_BOUND = (3.0 - math.sqrt(5.0)) / 2.0


class DomainError(ValueError):
    """Input outside the mathematical domain of a kernel function."""


def as_prob(x: float, name: str = "x") -> float:
    """Validate and return ``x`` as a probability in [0, 1].

    Rejects NaN, infinities, and out-of-range values with DomainError.
    """
    try:
        v = float(x)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {x!r}") from exc
    if not math.isfinite(v) or v < 0.0 or v > 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
    return v


def _h(x: float) -> float:
    # Core evaluation on 0 < x < 1, no validation.  Both terms are computed
    # from the smaller of (x, 1-x): -s*log2(s) is exact-argument, and the
    # log1p form keeps the complement term accurate when s is tiny.
    s = x if x <= 0.5 else 1.0 - x
    if s == 0.5:
        return 1.0
    v = -s * math.log2(s) - (1.0 - s) * math.log1p(-s) * LOG2E
    return v if v < 1.0 else 1.0


def binary_entropy(x: float) -> float:
    """Entropy in bits of a coin with bias ``x``; H(0) = H(1) = 0."""
    v = as_prob(x, "x")
    if v == 0.0 or v == 1.0:
        return 0.0
    return _h(v)


def entropy_of_square(x: float) -> float:
    """H(x^2), evaluated without cancellation near x = 1.

    For x above 0.7 the complement 1 - x^2 = (1 - x)(1 + x) is formed from
    the exact difference 1 - x, which keeps full relative precision where
    direct squaring would lose it.
    """
    v = as_prob(x, "x")
    if v == 0.0:
        return 0.0
    if v == 1.0:
        return 0.0
    if v <= 0.7:
        return _h(v * v)
    c = (1.0 - v) * (1.0 + v)
    if c == 0.0:
        return 0.0
    return _h(c)


def entropy_rate(x: float) -> float:
    """The entropy rate H(x)/x on (0, 1]; strictly decreasing, rate(1) = 0."""
    v = as_prob(x, "x")
    if v == 0.0:
        raise DomainError("entropy_rate is undefined at x = 0")
    if v == 1.0:
        return 0.0
    return _h(v) / v


def entropy_rate_deriv(x: float) -> float:
    """Closed-form derivative of the rate: log2(1 - x) / x^2 on (0, 1).

    Always negative; diverges like -log2(e)/x at 0 and logarithmically at 1.
    """
    v = as_prob(x, "x")
    if v == 0.0 or v == 1.0:
        raise DomainError("entropy_rate_deriv is defined on the open interval (0, 1)")
    if v >= 0.5:
        return math.log2(1.0 - v) / (v * v)
    return math.log1p(-v) * LOG2E / (v * v)


def _rate(x: float) -> float:
    # rate on (0, 1], no validation
    if x >= 1.0:
        return 0.0
    return _h(x) / x


def _rate_deriv(x: float) -> float:
    if x >= 0.5:
        return math.log2(1.0 - x) / (x * x)
    return math.log1p(-x) * LOG2E / (x * x)


# rate(1 - 2^-52): targets below this are indistinguishable from the root
# x = 1 at double precision.
_RATE_AT_ONE_ULP = _rate(1.0 - 2.0 ** -52)


def inverse_entropy_rate(y: float) -> float:
    """The unique x in (0, 1] with entropy_rate(x) = y, for y >= 0.

    Bracketed bisection with Newton steps accepted only while they stay
    inside the bracket.  The result satisfies
    ``|entropy_rate(x) - y| <= KERNEL_TOL * max(1, y)``.
    """
    try:
        yv = float(y)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"y must be a real number, got {y!r}") from exc
    if not math.isfinite(yv) or yv < 0.0:
        raise DomainError(f"y must be finite and nonnegative, got {y!r}")
    if yv == 0.0:
        return 1.0
    if yv <= _RATE_AT_ONE_ULP:
        # The root is within one double-precision step of 1; the residual
        # bound holds at x = 1 itself.
        return 1.0

    lo = 1e-15
    hi = 1.0
    if _rate(lo) < yv:
        # rate(x) > log2(1/x), so this lower end is guaranteed to bracket.
        lo = 2.0 ** (-(yv + 3.0))
        if lo == 0.0:
            raise DomainError(f"y = {yv} exceeds the representable rate range")

    # Geometric bisection first: the rate behaves like log2(1/x) near 0, so
    # halving the exponent gap converges where arithmetic midpoints crawl.
    while hi > 2.0 * lo:
        mid = 2.0 ** (0.5 * (math.log2(lo) + math.log2(hi)))
        if not (lo < mid < hi):
            break
        if _rate(mid) > yv:
            lo = mid
        else:
            hi = mid

    target = 1e-13 * max(1.0, yv)
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx = _rate(x) - yv
        if fx > 0.0:
            lo = x
        elif fx < 0.0:
            hi = x
        else:
            break
        if abs(fx) <= target:
            break
        if hi - lo <= 1e-15 * hi:
            break
        if x > 1e-150:
            step = fx / _rate_deriv(x)
            xn = x - step
            if lo < xn < hi:
                x = xn
                continue
        x = 0.5 * (lo + hi)
    if x < 1e-290 and abs(_rate(x) - yv) > KERNEL_TOL * max(1.0, yv):
        # Subnormal roots cannot carry enough precision to meet the contract.
        raise DomainError(f"y = {yv} exceeds the representable rate range")
    return x


@dataclass(frozen=True)
class RatePoint:
    """A point (x, y) on the rate curve, i.e. y = entropy_rate(x)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        v = as_prob(self.x, "x")
        if v == 0.0:
            raise DomainError("RatePoint requires x in (0, 1]")
        expected = entropy_rate(v)
        if abs(self.y - expected) > 1e-12 * max(1.0, expected):
            raise DomainError(
                f"RatePoint ({self.x}, {self.y}) is off the rate curve; "
                f"expected y = {expected}"
            )


def rate_point(x: float) -> RatePoint:
    """Construct the rate-curve point above ``x``."""
    v = as_prob(x, "x")
    if v == 0.0:
        raise DomainError("rate_point requires x in (0, 1]")
    return RatePoint(v, entropy_rate(v))


# ---------------------------------------------------------------------------
# Array versions for the bulk scan engines.  Same formulas as the scalar
# path; inputs are trusted to lie in the valid range.
# ---------------------------------------------------------------------------


def binary_entropy_arr(x: np.ndarray) -> np.ndarray:
    """Elementwise binary entropy in bits for x in [0, 1]."""
    x = np.asarray(x, dtype=float)
    s = np.minimum(x, 1.0 - x)
    out = np.zeros(s.shape, dtype=float)
    m = s > 0.0
    sm = s[m]
    out[m] = -sm * np.log2(sm) - (1.0 - sm) * np.log1p(-sm) * LOG2E
    np.minimum(out, 1.0, out=out)
    return out


def entropy_of_square_arr(x: np.ndarray) -> np.ndarray:
    """Elementwise H(x^2) with the cancellation-free complement branch."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape, dtype=float)
    hi = x > 0.7
    lo = ~hi
    out[lo] = binary_entropy_arr(x[lo] * x[lo])
    xh = x[hi]
    out[hi] = binary_entropy_arr((1.0 - xh) * (1.0 + xh))
    return out


def entropy_rate_arr(x: np.ndarray) -> np.ndarray:
    """Elementwise H(x)/x for x in (0, 1]."""
    x = np.asarray(x, dtype=float)
    return binary_entropy_arr(x) / x


def inverse_entropy_rate_arr(y: np.ndarray) -> np.ndarray:
    """Elementwise inverse of the rate map for y >= 0.

    Vectorized bisection (60 halvings) followed by guarded Newton polish;
    meets the same residual contract as the scalar version.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 0:
        return np.asarray(inverse_entropy_rate(float(y)))
    if np.any(~np.isfinite(y)) or np.any(y < 0.0):
        raise DomainError("y must be finite and nonnegative")

    flat = y.ravel()
    x = np.ones(flat.shape, dtype=float)
    solve = flat > _RATE_AT_ONE_ULP
    ys = flat[solve]
    if ys.size:
        lo = np.where(ys <= 49.0, 1e-15, 2.0 ** (-(ys + 3.0)))
        if np.any(lo == 0.0):
            raise DomainError("y exceeds the representable rate range")
        hi = np.ones_like(ys)
        for _ in range(25):
            mid = 2.0 ** (0.5 * (np.log2(lo) + np.log2(hi)))
            mid = np.clip(mid, lo, hi)
            too_high = entropy_rate_arr(np.maximum(mid, 5e-324)) > ys
            lo = np.where(too_high, mid, lo)
            hi = np.where(too_high, hi, mid)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            too_high = entropy_rate_arr(mid) > ys
            lo = np.where(too_high, mid, lo)
            hi = np.where(too_high, hi, mid)
        xs = 0.5 * (lo + hi)
        for _ in range(4):
            fx = entropy_rate_arr(xs) - ys
            with np.errstate(divide="ignore"):
                d = np.where(
                    xs >= 0.5,
                    np.log2(np.maximum(1.0 - xs, 5e-324)),
                    np.log1p(-np.minimum(xs, 0.5)) * LOG2E,
                ) / (xs * xs)
            xn = xs - fx / d
            ok = (xn > lo) & (xn < hi)
            xs = np.where(ok, xn, xs)
        x[solve] = xs
    return x.reshape(y.shape)
