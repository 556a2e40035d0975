"""Finite truncations of Hofbauer's Markov diagram.

A vertex sigma^{|u|-1}[u] is stored as its symbol together with the open
interval T^{|u|-1}(cylinder(u)), which lies inside the symbol's branch
domain.  For affine branches the interval determines the follower set, so
two vertices coincide exactly when symbol and endpoints agree.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .coding import Word, intersect
from .maps import PiecewiseMonotoneMap
from .numeric import CapExceeded, DomainError, Scalar

DEFAULT_DEPTH_CAP = 200
DEFAULT_VERTEX_CAP = 100_000
DEFAULT_PMAX = 12


@dataclass(frozen=True)
class Vertex:
    symbol: int
    lo: Scalar
    hi: Scalar
    witness: Word
    level: int

    @property
    def interval(self):
        return self.lo, self.hi


@dataclass
class Diagram:
    map: PiecewiseMonotoneMap
    vertices: list
    arrows: list
    depth: int
    complete: list
    succ: list = field(repr=False, default_factory=list)

    def __post_init__(self):
        if not self.succ:
            self.succ = [[] for _ in self.vertices]
            for a, b in self.arrows:
                self.succ[a].append(b)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def stable(self) -> bool:
        """True when no vertex has successors outside the truncation."""
        return all(self.complete)

    def find(self, symbol: int, lo, hi) -> int | None:
        pol = self.map.policy
        for i, v in enumerate(self.vertices):
            if v.symbol == symbol and pol.eq(v.lo, lo) and pol.eq(v.hi, hi):
                return i
        return None


def successors(T: PiecewiseMonotoneMap, v: Vertex) -> list[Vertex]:
    """Vertices [l] ∩ sigma(v), one per symbol l the branch image meets."""
    J = T.branch(v.symbol).image(v.lo, v.hi)
    out = []
    for l in range(1, T.k + 1):
        W = intersect(T, *J, l)
        if W is not None:
            out.append(Vertex(l, W[0], W[1], v.witness + (l,), v.level + 1))
    return out


class _Index:
    """Vertex lookup: hashing in exact mode, tolerance scan per symbol otherwise."""

    def __init__(self, T: PiecewiseMonotoneMap):
        self.pol = T.policy
        self.exact = {}
        self.by_symbol = {}

    def get(self, v: Vertex):
        if self.pol.exact:
            return self.exact.get((v.symbol, v.lo, v.hi))
        for i, w in self.by_symbol.get(v.symbol, ()):
            if self.pol.eq(w.lo, v.lo) and self.pol.eq(w.hi, v.hi):
                return i
        return None

    def add(self, i: int, v: Vertex):
        if self.pol.exact:
            self.exact[(v.symbol, v.lo, v.hi)] = i
        else:
            self.by_symbol.setdefault(v.symbol, []).append((i, v))


def build_truncation(
    T: PiecewiseMonotoneMap,
    N: int,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> Diagram:
    """D_N: start from the full branch domains and apply the successor rule N times."""
    if N < 0:
        raise DomainError("depth must be >= 0")
    if N > depth_cap:
        raise CapExceeded(f"depth {N} exceeds cap {depth_cap}")
    index = _Index(T)
    vertices: list[Vertex] = []
    for j in range(1, T.k + 1):
        v = Vertex(j, *T.domain(j), (j,), 0)
        index.add(len(vertices), v)
        vertices.append(v)

    frontier = list(range(len(vertices)))
    for _ in range(N):
        new = []
        for i in frontier:
            for w in successors(T, vertices[i]):
                if index.get(w) is None:
                    index.add(len(vertices), w)
                    new.append(len(vertices))
                    vertices.append(w)
                    if len(vertices) > vertex_cap:
                        raise CapExceeded(f"more than {vertex_cap} vertices")
        if not new:
            break
        frontier = new

    arrows, complete = [], []
    for i, v in enumerate(vertices):
        ok = True
        for w in successors(T, v):
            t = index.get(w)
            if t is None:
                ok = False
            else:
                arrows.append((i, t))
        complete.append(ok)
    return Diagram(T, vertices, arrows, N, complete)


def adjacency(diagram: Diagram, subset: Sequence[int] | None = None) -> np.ndarray:
    """0/1 matrix M(C) over ``subset`` (default all vertices), in the given order."""
    idx = list(range(len(diagram))) if subset is None else list(subset)
    pos = {v: i for i, v in enumerate(idx)}
    M = np.zeros((len(idx), len(idx)), dtype=np.int64)
    for a, b in diagram.arrows:
        if a in pos and b in pos:
            M[pos[a], pos[b]] = 1
    return M


# --- strongly connected components --------------------------------------------

def tarjan(n: int, succ: Sequence[Iterable[int]]) -> list[list[int]]:
    """Iterative Tarjan SCC algorithm on vertices 0..n-1."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class SCC:
    vertices: tuple
    spectral_radius: float
    complete: bool
    maximal: bool = False

    def __len__(self) -> int:
        return len(self.vertices)


def scc_decompose(diagram: Diagram, complete_only: bool = False) -> list[SCC]:
    """SCCs ordered by least vertex index.

    With ``complete_only`` the frontier vertices (successors not all in the
    truncation) are dropped first.  The complete SCC(s) of largest spectral
    radius are marked maximal.
    """
    from .spectral import spectral_radius

    n = len(diagram)
    keep = [diagram.complete[i] or not complete_only for i in range(n)]
    succ = [[w for w in diagram.succ[v] if keep[w]] if keep[v] else [] for v in range(n)]
    comps = [c for c in tarjan(n, succ) if keep[c[0]]]
    comps.sort(key=lambda c: c[0])
    rows = []
    for comp in comps:
        M = adjacency(diagram, comp)
        lam = 0.0 if not M.any() else spectral_radius(M).lam
        rows.append((tuple(comp), lam, all(diagram.complete[i] for i in comp)))
    best = max((lam for _, lam, ok in rows if ok and lam > 0), default=None)
    out = []
    for comp, lam, ok in rows:
        is_max = best is not None and ok and abs(lam - best) <= 1e-12 * max(1.0, best)
        out.append(SCC(comp, lam, ok, is_max))
    return out


def maximal_scc(diagram: Diagram) -> SCC:
    """First complete SCC of maximal spectral radius, frontier vertices excluded."""
    for c in scc_decompose(diagram, complete_only=True):
        if c.maximal:
            return c
    raise DomainError("no complete SCC with positive entropy; increase the depth")


def period(diagram: Diagram, comp: Sequence[int]) -> int:
    """Period (gcd of cycle lengths) of an SCC, by BFS levels."""
    from math import gcd

    members = set(comp)
    root = comp[0]
    level = {root: 0}
    queue = deque([root])
    g = 0
    while queue:
        v = queue.popleft()
        for w in diagram.succ[v]:
            if w not in members:
                continue
            if w not in level:
                level[w] = level[v] + 1
                queue.append(w)
            else:
                g = gcd(g, level[v] + 1 - level[w])
    return abs(g)


# --- cycles and periodic points -----------------------------------------------

def simple_cycles(diagram: Diagram, p_max: int = DEFAULT_PMAX, subset: Sequence[int] | None = None):
    """All simple cycles of length <= p_max, each rooted at its least vertex.

    Yields vertex-index lists; DFS with path marking.
    """
    allowed = set(range(len(diagram))) if subset is None else set(subset)
    for start in sorted(allowed):
        path = [start]
        on_path = {start}

        def dfs(v):
            for w in diagram.succ[v]:
                if w not in allowed or w < start:
                    continue
                if w == start:
                    yield list(path)
                elif w not in on_path and len(path) < p_max:
                    path.append(w)
                    on_path.add(w)
                    yield from dfs(w)
                    path.pop()
                    on_path.discard(w)

        yield from dfs(start)


@dataclass(frozen=True)
class PeriodicPoint:
    x: Scalar
    word: Word
    orbit: tuple
    residual: Scalar


def periodic_points(T: PiecewiseMonotoneMap, cycle: Sequence[Vertex]) -> PeriodicPoint:
    """Periodic point whose itinerary repeats the symbols along a diagram cycle.

    Solves g(x) = x for the composed affine branch chain g and checks that x
    lies in the closure of the cycle's cylinder.
    """
    word = tuple(v.symbol for v in cycle)
    for v, w in zip(cycle, tuple(cycle[1:]) + (cycle[0],)):
        if not any(T.policy.eq(s.lo, w.lo) and T.policy.eq(s.hi, w.hi) and s.symbol == w.symbol
                   for s in successors(T, v)):
            raise DomainError("vertices do not form a diagram cycle")
    a, b = T.policy.convert(1), T.policy.convert(0)
    for s in word:
        br = T.branch(s)
        a, b = br.slope * a, br.slope * b + br.intercept
    if a == 1:
        raise DomainError("composed branch has slope 1; no isolated fixed point")
    x = b / (1 - a)
    pol = T.policy
    orbit = [x]
    y = x
    for s in word:
        lo, hi = T.domain(s)
        if pol.lt(y, lo) or pol.lt(hi, y):
            raise DomainError(f"cycle {word} not realizable: orbit point {y} outside branch {s}")
        y = T.branch(s)(y)
        orbit.append(y)
    residual = abs(orbit[-1] - x)
    return PeriodicPoint(x, word, tuple(orbit[:-1]), residual)


def map_residual(T: PiecewiseMonotoneMap, pt: PeriodicPoint):
    """|T^p(x) - x| using the map itself, or None when the orbit meets an interior
    breakpoint where the map's right-branch convention differs from the cycle."""
    y = pt.x
    for s in pt.word:
        sym, hit = T.locate(y)
        if hit and sym != s and not (sym == T.k and s == T.k):
            return None
        y = T.branch(s)(y) if hit else T(y)
    return abs(y - pt.x)


# --- condition (1.2) certificates -----------------------------------------------

@dataclass(frozen=True)
class IrreducibilityCertificate:
    interval: tuple
    L: tuple
    tau: int
    chain: Word


@dataclass(frozen=True)
class IrreducibilityFailure:
    interval: tuple
    tau_max: int
    max_width: Scalar


def check_irreducibility(T: PiecewiseMonotoneMap, I: Sequence, tau_max: int = 50):
    """Breadth-first search for L ⊆ I, tau and a symbol chain with T^tau(L) = (0, 1).

    Returns an IrreducibilityCertificate, or IrreducibilityFailure carrying the
    widest image reached (inconclusive, not a disproof).
    """
    pol = T.policy
    lo, hi = pol.convert(I[0]), pol.convert(I[1])
    if not (0 <= lo < hi <= 1):
        raise DomainError("I must be a nonempty open subinterval of (0, 1)")
    zero, one = pol.convert(0), pol.convert(1)
    # state: current image J, chain so far, affine x -> a x + b of the chain
    queue = deque([((lo, hi), (), one, zero)])
    seen = set()
    max_width = hi - lo
    for tau in range(1, tau_max + 1):
        nxt = deque()
        while queue:
            J, chain, a, b = queue.popleft()
            for l in range(1, T.k + 1):
                W = intersect(T, *J, l)
                if W is None or not pol.positive_width(*W, factor=100.0):
                    continue
                br = T.branch(l)
                img = br.image(*W)
                a2, b2 = br.slope * a, br.slope * b + br.intercept
                chain2 = chain + (l,)
                if pol.eq(img[0], zero) and pol.eq(img[1], one):
                    L = sorted(((W[0] - b) / a, (W[1] - b) / a))
                    return IrreducibilityCertificate((lo, hi), tuple(L), tau, chain2)
                max_width = max(max_width, img[1] - img[0])
                key = (img if pol.exact else tuple(round(float(e), 15) for e in img))
                if key in seen:
                    continue
                seen.add(key)
                nxt.append((img, chain2, a2, b2))
        queue = nxt
        if not queue:
            break
    return IrreducibilityFailure((lo, hi), tau_max, max_width)


def verify_certificate(T: PiecewiseMonotoneMap, cert: IrreducibilityCertificate) -> bool:
    """Forward-iterate L through the chain and confirm T^tau(L) = (0, 1)."""
    pol = T.policy
    lo, hi = cert.L
    if pol.lt(lo, cert.interval[0]) or pol.lt(cert.interval[1], hi):
        return False
    for s in cert.chain:
        a, b = T.domain(s)
        if pol.lt(lo, a) or pol.lt(b, hi):
            return False
        # interior sample must take the same branch
        if T.locate((lo + hi) / 2)[0] != s:
            return False
        lo, hi = T.branch(s).image(lo, hi)
    return pol.eq(lo, 0) and pol.eq(hi, 1)


# --- JSON round trip --------------------------------------------------------------

def to_json(diagram: Diagram) -> dict:
    from .maps import to_spec
    from .numeric import scalar_to_str

    return {
        "map": to_spec(diagram.map),
        "depth": diagram.depth,
        "vertices": [
            {
                "id": i,
                "symbol": v.symbol,
                "lo": float(v.lo),
                "hi": float(v.hi),
                "lo_exact": scalar_to_str(v.lo),
                "hi_exact": scalar_to_str(v.hi),
                "level": v.level,
                "witness": list(v.witness),
                "complete": diagram.complete[i],
            }
            for i, v in enumerate(diagram.vertices)
        ],
        "arrows": [list(a) for a in diagram.arrows],
    }


def from_json(data: dict) -> Diagram:
    from .maps import from_spec
    from .numeric import scalar_from_str

    T = from_spec(data["map"])
    vertices = [
        Vertex(
            d["symbol"],
            scalar_from_str(d["lo_exact"], T.policy),
            scalar_from_str(d["hi_exact"], T.policy),
            tuple(d["witness"]),
            d["level"],
        )
        for d in data["vertices"]
    ]
    return Diagram(
        T,
        vertices,
        [tuple(a) for a in data["arrows"]],
        data["depth"],
        [d["complete"] for d in data["vertices"]],
    )
