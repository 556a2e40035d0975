"""Piecewise affine interval maps: linear mod 1, beta and (-beta) transformations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

import mpmath

from .numeric import (
    APPROX,
    EXACT,
    DomainError,
    NumberPolicy,
    Scalar,
    realize_algebraic,
)


@dataclass(frozen=True)
class Branch:
    """Affine branch x -> slope*x + intercept on the open interval (lo, hi)."""

    lo: Scalar
    hi: Scalar
    slope: Scalar
    intercept: Scalar

    @property
    def increasing(self) -> bool:
        return self.slope > 0

    def __call__(self, x):
        return self.slope * x + self.intercept

    def inverse(self, y):
        return (y - self.intercept) / self.slope

    def image(self, lo, hi):
        """Image of the open interval (lo, hi) as an ordered pair."""
        a, b = self(lo), self(hi)
        return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class PiecewiseMonotoneMap:
    breakpoints: tuple
    branches: tuple
    policy: NumberPolicy = EXACT
    spec: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        bps, brs = self.breakpoints, self.branches
        if len(brs) < 2 or len(bps) != len(brs) + 1:
            raise DomainError("need k > 1 branches and k + 1 breakpoints")
        if bps[0] != 0 or bps[-1] != 1:
            raise DomainError("breakpoints must run from 0 to 1")
        for j, br in enumerate(brs):
            if not bps[j] < bps[j + 1]:
                raise DomainError("breakpoints must be strictly increasing")
            if br.lo != bps[j] or br.hi != bps[j + 1]:
                raise DomainError(f"branch {j + 1} domain does not match the partition")
            if br.slope == 0:
                raise DomainError("branch slopes must be nonzero")

    @property
    def k(self) -> int:
        return len(self.branches)

    def domain(self, j: int) -> tuple:
        """Open domain (a_{j-1}, a_j) of symbol j (1-indexed)."""
        return self.breakpoints[j - 1], self.breakpoints[j]

    def branch(self, j: int) -> Branch:
        return self.branches[j - 1]

    def locate(self, x) -> tuple[int, bool]:
        """Branch symbol used at x and whether x is a breakpoint a_0..a_k.

        Interior breakpoints use the right branch, x = 1 the last branch.
        """
        pol = self.policy
        bps = self.breakpoints
        if pol.lt(x, bps[0]) or pol.lt(bps[-1], x):
            raise DomainError(f"x = {x} outside [0, 1]")
        for j in range(self.k + 1):
            if pol.eq(x, bps[j]):
                return min(j + 1, self.k), True
        for j in range(1, self.k + 1):
            if x < bps[j]:
                return j, False
        raise AssertionError("unreachable")

    def eval_flagged(self, x) -> tuple[Scalar, bool]:
        x = self.policy.convert(x) if not isinstance(x, (Fraction, mpmath.mpf)) else x
        j, hit = self.locate(x)
        y = self.branch(j)(x)
        if not self.policy.exact:
            # rounding at breakpoints can leave [0, 1] by a few ulps
            y = min(max(y, mpmath.mpf(0)), mpmath.mpf(1))
        return y, hit

    def __call__(self, x) -> Scalar:
        return self.eval_flagged(x)[0]

    def orbit(self, x, n: int) -> tuple[list, list]:
        """Points x, T(x), ..., T^n(x) and per-point breakpoint flags.

        ``flags[i]`` is True when T^i(x) sits on a breakpoint; the last
        point is flagged too, so ``any(flags)`` means x leaves X_T by step n.
        """
        if n < 1:
            raise DomainError("orbit length must be >= 1")
        x = self.policy.convert(x) if not isinstance(x, (Fraction, mpmath.mpf)) else x
        points, flags = [x], []
        for _ in range(n):
            x, hit = self.eval_flagged(x)
            flags.append(hit)
            points.append(x)
        flags.append(self.locate(x)[1])
        return points, flags


def evaluate(T: PiecewiseMonotoneMap, x) -> Scalar:
    return T(x)


def orbit(T: PiecewiseMonotoneMap, x, n: int):
    return T.orbit(x, n)


def _policy_for(*values) -> NumberPolicy:
    if any(isinstance(v, (float, mpmath.mpf)) for v in values):
        return APPROX
    return EXACT


def _ceil(x) -> int:
    return math.ceil(x) if isinstance(x, Fraction) else int(mpmath.ceil(x))


def make_mod1(alpha, beta, policy: NumberPolicy | None = None) -> PiecewiseMonotoneMap:
    """The linear mod 1 transformation x -> beta*x + alpha (mod 1).

    Rationals (Fraction, int, "p/q" strings) give an exact map; floats and
    mpf values give an approximate one at the default precision.
    """
    alpha = Fraction(alpha) if isinstance(alpha, str) else alpha
    beta = Fraction(beta) if isinstance(beta, str) else beta
    policy = policy or _policy_for(alpha, beta)
    alpha, beta = policy.convert(alpha), policy.convert(beta)
    if not (0 <= alpha < 1):
        raise DomainError(f"alpha = {alpha} not in [0, 1)")
    if not beta > 1:
        raise DomainError(f"beta = {beta} must exceed 1")
    k = _ceil(beta + alpha)
    bps = [policy.convert(0)]
    bps += [(m - alpha) / beta for m in range(1, k)]
    bps.append(policy.convert(1))
    branches = tuple(
        Branch(bps[j - 1], bps[j], beta, alpha - (j - 1)) for j in range(1, k + 1)
    )
    spec = {"type": "mod1", "alpha": alpha, "beta": beta}
    return PiecewiseMonotoneMap(tuple(bps), branches, policy, spec)


def make_beta(beta, policy: NumberPolicy | None = None) -> PiecewiseMonotoneMap:
    T = make_mod1(0, beta, policy)
    return PiecewiseMonotoneMap(T.breakpoints, T.branches, T.policy, {"type": "beta", "beta": T.spec["beta"]})


GOLDEN_MINPOLY = (-1, -1, 1)
CUBIC_MINPOLY = (-1, 1, -2, 1)  # t^3 - 2t^2 + t - 1


def make_neg_beta(beta, policy: NumberPolicy | None = None) -> PiecewiseMonotoneMap:
    """(-beta)-transformation: -beta*x + 1 on [0, 1/beta), -beta*x + 2 on [1/beta, 1]."""
    beta = Fraction(beta) if isinstance(beta, str) else beta
    policy = policy or _policy_for(beta)
    beta = policy.convert(beta)
    # beta > golden mean  <=>  beta^2 - beta - 1 > 0 (exact for rationals)
    if not (beta * beta - beta - 1 > 0 and beta < 2):
        raise DomainError(f"beta = {beta} not in ((1+sqrt5)/2, 2)")
    one = policy.convert(1)
    a1 = one / beta
    branches = (
        Branch(policy.convert(0), a1, -beta, one),
        Branch(a1, one, -beta, 2 * one),
    )
    return PiecewiseMonotoneMap((policy.convert(0), a1, one), branches, policy, {"type": "negbeta", "beta": beta})


def golden_mean():
    return realize_algebraic(GOLDEN_MINPOLY, (1.6, 1.7))


def cubic_neg_beta_parameter():
    """Real root of t^3 - 2t^2 + t - 1, approximately 1.7548776662."""
    return realize_algebraic(CUBIC_MINPOLY, (1.7, 1.8))


# --- map-spec JSON ------------------------------------------------------------

def _parse_param(value):
    if isinstance(value, Mapping):
        if "dyadic" in value:
            return APPROX.convert(Fraction(value["dyadic"]))
        return realize_algebraic(value["minpoly"], value["bracket"])
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise DomainError(f"cannot parse parameter {value!r}")


def from_spec(spec: Mapping[str, Any]) -> PiecewiseMonotoneMap:
    """Build a map from its JSON spec, e.g. {"type":"mod1","alpha":"1/10","beta":"5/2"}."""
    kind = spec.get("type")
    if kind == "mod1":
        T = make_mod1(_parse_param(spec.get("alpha", "0")), _parse_param(spec["beta"]))
    elif kind == "beta":
        T = make_beta(_parse_param(spec["beta"]))
    elif kind == "negbeta":
        T = make_neg_beta(_parse_param(spec["beta"]))
    else:
        raise DomainError(f"unknown map type {kind!r}")
    return PiecewiseMonotoneMap(T.breakpoints, T.branches, T.policy, dict(spec))


def to_spec(T: PiecewiseMonotoneMap) -> dict:
    """JSON-ready spec; rational parameters become "p/q" strings."""
    from .numeric import scalar_to_str

    out = {}
    for key, val in T.spec.items():
        if isinstance(val, Fraction):
            out[key] = scalar_to_str(val)
        elif isinstance(val, mpmath.mpf):
            out[key] = {"dyadic": scalar_to_str(val)}
        else:
            out[key] = val
    return out
