"""Perron-Frobenius data on diagram truncations.

Entropy, the Parry measure of maximal entropy with its L/R product form,
weak Gibbs constants, and pressure of locally constant potentials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .coding import Word, enumerate_words
from .diagram import Diagram, adjacency, build_truncation, maximal_scc, period, tarjan
from .maps import PiecewiseMonotoneMap
from .numeric import DomainError

DEFAULT_TOL = 1e-12
DEFAULT_QMAX = 50.0


class NotIrreducible(DomainError):
    pass


@dataclass(frozen=True)
class PerronData:
    lam: float
    left: np.ndarray
    right: np.ndarray
    iterations: int = 0


def _power(A: np.ndarray, x: np.ndarray, tol: float, max_iter: int) -> tuple[np.ndarray, int]:
    x = x / x.sum()
    for it in range(1, max_iter + 1):
        y = A @ x
        y /= y.sum()
        if np.max(np.abs(y - x)) <= tol * np.max(y):
            return y, it
        x = y
    return x, max_iter


def _squared_start(A: np.ndarray, rounds: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Approximate right/left Perron vectors from A^(2^j) by repeated squaring."""
    B = A / A.max()
    for _ in range(rounds):
        C = B @ B
        C /= C.max()
        if np.allclose(C, B, rtol=1e-13, atol=0):
            B = C
            break
        B = C
    return B.sum(axis=1), B.sum(axis=0)


def spectral_radius(M, tol: float = DEFAULT_TOL, max_iter: int = 100_000) -> PerronData:
    """Perron root and positive left/right vectors of an irreducible nonnegative matrix.

    Works on A = M / s + I (s the largest row sum), which has the same Perron
    vectors and is aperiodic, so periodic SCCs converge too.  Starting
    vectors come from repeated squaring of A; power iteration from there
    polishes them to ``tol``.  Normalization: sum(r) = 1, sum(l * r) = 1.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[1] != n:
        raise ValueError("square matrix expected")
    if n == 0:
        raise NotIrreducible("empty matrix")
    if (M < 0).any():
        raise ValueError("matrix must be nonnegative")
    if n == 1:
        one = np.ones(1)
        return PerronData(float(M[0, 0]), one, one, 0)
    succ = [np.nonzero(M[i])[0].tolist() for i in range(n)]
    if len(tarjan(n, succ)) != 1:
        raise NotIrreducible("matrix is reducible")
    scale = np.max(M.sum(axis=1))
    A = M / scale + np.eye(n)
    r0, l0 = _squared_start(A)
    if (r0 <= 0).any() or (l0 <= 0).any():
        r0, l0 = np.ones(n), np.ones(n)
    r, it_r = _power(A, r0, tol * 1e-2, max_iter)
    l, it_l = _power(A.T, l0, tol * 1e-2, max_iter)
    if (r <= 0).any() or (l <= 0).any():
        raise NotIrreducible("Perron vector has zero components")
    lam = float(((M @ r) / r).mean())
    r = r / r.sum()
    l = l / float(l @ r)
    return PerronData(lam, l, r, max(it_r, it_l))


# --- entropy --------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyEstimate:
    h: float
    lam: float
    scc: tuple
    depth: int
    diagram: Diagram = field(repr=False, compare=False)


def entropy_estimate(T: PiecewiseMonotoneMap, N: int) -> EntropyEstimate:
    """h_N = log of the Perron root of the maximal complete SCC of D_N."""
    D = build_truncation(T, N)
    scc = maximal_scc(D)
    return EntropyEstimate(math.log(scc.spectral_radius), scc.spectral_radius, scc.vertices, N, D)


# --- measure of maximal entropy -------------------------------------------------

@dataclass
class MMEModel:
    """Parry measure on an SCC of a diagram truncation.

    ``L`` carries one factor of lambda so vertex-path masses read
    L(C_1) R(C_n) exp(-n h).
    """

    diagram: Diagram
    scc: tuple
    h: float
    lam: float
    L: np.ndarray
    R: np.ndarray
    P: np.ndarray
    pi: np.ndarray
    period: int
    symbols: np.ndarray = field(init=False)

    def __post_init__(self):
        self.symbols = np.array([self.diagram.vertices[i].symbol for i in self.scc])
        self.M = adjacency(self.diagram, self.scc)

    @property
    def map(self) -> PiecewiseMonotoneMap:
        return self.diagram.map

    @property
    def size(self) -> int:
        return len(self.scc)

    def position(self, vertex: int) -> int:
        return self.scc.index(vertex)

    def path_mass(self, path: Sequence[int]) -> float:
        """Mass of the vertex cylinder [C_1 ... C_n], positions within the SCC."""
        m = self.pi[path[0]]
        for a, b in zip(path, path[1:]):
            m *= self.P[a, b]
        return float(m)

    def product_formula(self, path: Sequence[int]) -> float:
        return float(self.L[path[0]] * self.R[path[-1]] * math.exp(-len(path) * self.h))


def mme_on_truncation(diagram: Diagram, scc: Sequence[int] | None = None) -> MMEModel:
    """Parry construction P(C,D) = M[C,D] r(D) / (lam r(C)), pi = l r."""
    if scc is None:
        scc = maximal_scc(diagram).vertices
    scc = tuple(scc)
    M = adjacency(diagram, scc).astype(float)
    if len(scc) == 1 and M[0, 0] == 0:
        raise NotIrreducible("single vertex without a loop")
    pd = spectral_radius(M)
    lam, l, r = pd.lam, pd.left, pd.right
    P = M * r[None, :] / (lam * r[:, None])
    P /= P.sum(axis=1, keepdims=True)
    pi = l * r
    pi /= pi.sum()
    h = math.log(lam) if lam > 0 else 0.0
    return MMEModel(diagram, scc, h, lam, lam * l, r, P, pi, period(diagram, scc))


def word_mass_vector(model: MMEModel, u: Sequence[int]) -> np.ndarray:
    """Mass carried by each SCC vertex at the end of paths projecting onto u."""
    v = np.where(model.symbols == u[0], model.pi, 0.0)
    for s in u[1:]:
        v = (v @ model.P) * (model.symbols == s)
    return v


def project_cylinder_mass(model: MMEModel, u: Sequence[int]) -> float:
    """m^+[u]: sum of path masses over vertex paths whose symbols spell u."""
    if len(u) == 0:
        return 1.0
    return float(word_mass_vector(model, u).sum())


def iter_word_masses(model: MMEModel, n: int) -> Iterator[tuple[Word, float]]:
    """All words of length n with positive mass, lexicographically, with masses."""
    k = model.map.k
    masks = {s: (model.symbols == s) for s in range(1, k + 1)}

    def rec(prefix, v):
        if len(prefix) == n:
            yield prefix, float(v.sum())
            return
        w = v @ model.P
        for s in range(1, k + 1):
            nv = w * masks[s]
            if nv.any():
                yield from rec(prefix + (s,), nv)

    for s in range(1, k + 1):
        v0 = model.pi * masks[s]
        if v0.any():
            yield from rec((s,), v0)


def iter_subset_words(model: MMEModel, F: Sequence[int], n: int) -> Iterator[Word]:
    """Distinct symbol words of length n realized by paths inside F (positions)."""
    F = set(F)
    k = model.map.k
    succ = {a: [b for b in F if model.M[a, b]] for a in F}

    def rec(prefix, states):
        if len(prefix) == n:
            yield prefix
            return
        nxt = {}
        for a in states:
            for b in succ[a]:
                nxt.setdefault(int(model.symbols[b]), set()).add(b)
        for s in sorted(nxt):
            yield from rec(prefix + (s,), nxt[s])

    for s in range(1, k + 1):
        start = {a for a in F if model.symbols[a] == s}
        if start:
            yield from rec((s,), start)


# --- weak Gibbs -----------------------------------------------------------------

@dataclass
class GibbsReport:
    F: tuple
    K: float
    L_sum: float
    R_sup: float
    min_LR: float
    n_max: int
    h: float
    violations: list
    checked_upper: int = 0
    checked_lower: int = 0


GIBBS_SLACK = 1e-9


def gibbs_constant(model: MMEModel, F: Sequence[int]) -> tuple[float, float, float, float]:
    L_sum = float(model.L.sum())
    R_sup = float(model.R.max())
    min_LR = min(float(model.L[c]) * float(model.R[d]) for c in F for d in F)
    return max(2.0, L_sum * R_sup, 1.0 / min_LR), L_sum, R_sup, min_LR


def gibbs_check(model: MMEModel, F: Sequence[int] | None = None, n_max: int = 12) -> GibbsReport:
    """Check K^{-1} e^{-nh} <= m^+[u] <= K e^{-nh} for n <= n_max.

    The upper bound runs over every admissible word of the map (words the
    SCC misses carry mass 0); the lower bound over words realized inside F.
    F holds positions within ``model.scc``.  Comparisons allow a relative
    slack of 1e-9 for floating-point rounding.
    """
    F = tuple(range(model.size)) if F is None else tuple(F)
    if not F or any(not 0 <= c < model.size for c in F):
        raise DomainError("F must be a nonempty subset of the SCC")
    K, L_sum, R_sup, min_LR = gibbs_constant(model, F)
    report = GibbsReport(F, K, L_sum, R_sup, min_LR, n_max, model.h, [])
    for n in range(1, n_max + 1):
        bound = math.exp(-n * model.h)
        masses = dict(iter_word_masses(model, n))
        language = set(enumerate_words(model.map, n, cap=max(n, 24)))
        for u, m in masses.items():
            if u not in language:
                report.violations.append(("not-admissible", u, m, 0.0))
        for u in language:
            m = masses.get(u, 0.0)
            report.checked_upper += 1
            if m > K * bound * (1 + GIBBS_SLACK):
                report.violations.append(("upper", u, m, K * bound))
        for u in iter_subset_words(model, F, n):
            m = masses.get(u, 0.0)
            report.checked_lower += 1
            if m < bound / K * (1 - GIBBS_SLACK):
                report.violations.append(("lower", u, m, bound / K))
    return report


# --- pressure -------------------------------------------------------------------

def potential(f, k: int) -> np.ndarray:
    """Normalize a symbol potential (mapping, sequence indexed from symbol 1, or callable)."""
    if isinstance(f, Mapping):
        return np.array([float(f.get(s, 0.0)) for s in range(1, k + 1)])
    if callable(f):
        return np.array([float(f(s)) for s in range(1, k + 1)])
    vals = np.asarray(f, dtype=float)
    if vals.shape != (k,):
        raise DomainError(f"potential needs {k} values")
    return vals


def indicator(symbol: int) -> Callable[[int], float]:
    return lambda s: 1.0 if s == symbol else 0.0


def pressure(model: MMEModel, f, q: float, q_max: float = DEFAULT_QMAX) -> float:
    """log spectral radius of M[C,D] exp(q f(symbol D)).

    The exponent is shifted by its maximum before exponentiating; for
    |q| > q_max that shift is what keeps the entries finite.
    """
    vals = potential(f, model.map.k)[model.symbols - 1]
    expo = q * vals
    shift = float(expo.max())
    W = model.M * np.exp(expo - shift)[None, :]
    if W.shape[0] == 1:
        lam = float(W[0, 0])
    else:
        lam = spectral_radius(W).lam
    return math.log(lam) + shift


def mme_mean(model: MMEModel, f) -> float:
    """MME average of f, the derivative of q -> P(q f) at 0."""
    vals = potential(f, model.map.k)[model.symbols - 1]
    return float(model.pi @ vals)
