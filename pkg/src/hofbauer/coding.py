"""Coding space of a piecewise monotone map: itineraries, cylinders, languages."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .maps import PiecewiseMonotoneMap
from .numeric import CapExceeded, DomainError, Scalar

Word = tuple  # symbols in 1..k

DEFAULT_WORD_CAP = 24


class BoundaryHit(DomainError):
    """The orbit met a breakpoint, so the point lies outside X_T."""

    def __init__(self, step: int, point):
        super().__init__(f"orbit hits a breakpoint at step {step} (point {point})")
        self.step = step
        self.point = point


@dataclass(frozen=True)
class CylinderInterval:
    word: Word
    lo: Scalar
    hi: Scalar
    empty: bool

    @property
    def width(self):
        return 0 if self.empty else self.hi - self.lo

    def midpoint(self):
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return not self.empty and self.lo < x < self.hi


def parse_word(text: str) -> Word:
    return tuple(int(s) for s in text.replace(" ", "").split(",") if s)


def format_word(u: Sequence[int]) -> str:
    return ",".join(str(s) for s in u)


def _check_symbols(T: PiecewiseMonotoneMap, u: Sequence[int]) -> None:
    if len(u) == 0:
        raise DomainError("words have length >= 1")
    for s in u:
        if not 1 <= s <= T.k:
            raise DomainError(f"symbol {s} outside 1..{T.k}")


def intersect(T: PiecewiseMonotoneMap, lo, hi, symbol: int):
    """(lo, hi) ∩ (a_{symbol-1}, a_symbol), or None when empty."""
    a, b = T.domain(symbol)
    lo2, hi2 = max(lo, a), min(hi, b)
    if not T.policy.positive_width(lo2, hi2):
        return None
    return lo2, hi2


def follow(T: PiecewiseMonotoneMap, u: Sequence[int]):
    """Forward image data for the word u.

    Returns (V, slope, offset): V = T^{n-1}(cylinder(u)) as an open interval
    inside the domain of u_n (None when u is inadmissible) and the affine map
    x -> slope*x + offset composing the first n-1 branches.
    """
    V = T.domain(u[0])
    slope, offset = T.policy.convert(1), T.policy.convert(0)
    for prev, sym in zip(u, u[1:]):
        br = T.branch(prev)
        V = intersect(T, *br.image(*V), sym)
        if V is None:
            return None, slope, offset
        slope, offset = br.slope * slope, br.slope * offset + br.intercept
    return V, slope, offset


def itinerary(T: PiecewiseMonotoneMap, x, n: int) -> Word:
    """Length-n coding word of x; raises BoundaryHit if the orbit meets a breakpoint."""
    if n < 1:
        raise DomainError("n must be >= 1")
    pts, flags = T.orbit(x, n)
    word = []
    for step in range(n):
        sym, hit = T.locate(pts[step])
        if hit:
            raise BoundaryHit(step, pts[step])
        word.append(sym)
    return tuple(word)


def cylinder_interval(T: PiecewiseMonotoneMap, u: Sequence[int]) -> CylinderInterval:
    """Open interval of points whose itinerary starts with u (pulled back through branches)."""
    u = tuple(u)
    _check_symbols(T, u)
    V, slope, offset = follow(T, u)
    zero = T.policy.convert(0)
    if V is None:
        return CylinderInterval(u, zero, zero, True)
    lo, hi = (V[0] - offset) / slope, (V[1] - offset) / slope
    if lo > hi:
        lo, hi = hi, lo
    if not T.policy.positive_width(lo, hi):
        return CylinderInterval(u, zero, zero, True)
    return CylinderInterval(u, lo, hi, False)


def is_admissible(T: PiecewiseMonotoneMap, u: Sequence[int]) -> bool:
    try:
        return not cylinder_interval(T, u).empty
    except DomainError:
        return False


def iter_words(T: PiecewiseMonotoneMap, n: int) -> Iterator[tuple[Word, tuple]]:
    """Depth-first lexicographic walk yielding (word, follower interval V)."""
    pol = T.policy

    def rec(prefix, V, scale):
        if len(prefix) == n:
            yield prefix, V
            return
        br = T.branch(prefix[-1])
        J = br.image(*V)
        new_scale = scale * abs(br.slope)
        for l in range(1, T.k + 1):
            W = intersect(T, *J, l)
            # cylinder width is |V| / |prod slopes|
            if W is None or not pol.positive_width(0, (W[1] - W[0]) / new_scale):
                continue
            yield from rec(prefix + (l,), W, new_scale)

    for j in range(1, T.k + 1):
        yield from rec((j,), T.domain(j), pol.convert(1))


def enumerate_words(T: PiecewiseMonotoneMap, n: int, cap: int = DEFAULT_WORD_CAP) -> list[Word]:
    """All admissible words of length n, lexicographically sorted."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > cap:
        raise CapExceeded(f"word length {n} exceeds cap {cap}")
    return [w for w, _ in iter_words(T, n)]


def count_words(T: PiecewiseMonotoneMap, n: int) -> int:
    """|L_n|, the lap count of T^n, by memoizing on follower intervals.

    Runs in time linear in the number of distinct follower intervals, so it
    reaches lengths far beyond what enumeration can.
    """
    if n < 1:
        raise DomainError("n must be >= 1")

    @lru_cache(maxsize=None)
    def extensions(sym, lo, hi, m):
        if m == 0:
            return 1
        J = T.branch(sym).image(lo, hi)
        total = 0
        for l in range(1, T.k + 1):
            W = intersect(T, *J, l)
            if W is not None:
                total += extensions(l, W[0], W[1], m - 1)
        return total

    return sum(extensions(j, *T.domain(j), n - 1) for j in range(1, T.k + 1))
