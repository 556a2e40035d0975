"""Large deviations under the measure of maximal entropy.

Level-1 rate functions come from the Legendre transform of the pressure
q -> P(q f); Monte Carlo estimates sample the Parry Markov chain.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .coding import Word, cylinder_interval
from .numeric import CapExceeded, DomainError
from .spectral import MMEModel, mme_mean, potential, pressure

CHUNK = 1 << 16
MAX_TRIALS = 10**8


def _rng(seed: int, stream: int) -> np.random.Generator:
    """Philox stream ``stream`` derived from ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(ss))


# --- sampling -------------------------------------------------------------------

@dataclass(frozen=True)
class Sample:
    path: tuple
    word: Word
    x: object
    width: object
    resolution: int


def _chain(model: MMEModel, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Vertex positions of ``size`` independent stationary chains, shape (size, n)."""
    cum_pi = np.cumsum(model.pi)
    cum_P = np.cumsum(model.P, axis=1)
    cum_pi[-1] = 1.0
    cum_P[:, -1] = 1.0
    out = np.empty((size, n), dtype=np.int64)
    out[:, 0] = np.searchsorted(cum_pi, rng.random(size), side="right")
    for t in range(1, n):
        u = rng.random(size)
        rows = cum_P[out[:, t - 1]]
        out[:, t] = (u[:, None] >= rows).sum(axis=1)
    return out


def sample_mme(model: MMEModel, n: int, seed: int) -> Sample:
    """One MME sample: a vertex path, its symbol word and the cylinder midpoint.

    The midpoint is taken on the longest prefix whose cylinder the number
    policy can still resolve; ``width`` is that cylinder's width.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    path = _chain(model, n, 1, _rng(seed, 0))[0]
    word = tuple(int(model.symbols[i]) for i in path)
    res = n
    while True:
        cyl = cylinder_interval(model.map, word[:res])
        if not cyl.empty or res == 1:
            break
        res -= 1
    return Sample(tuple(model.scc[i] for i in path), word, cyl.midpoint(), cyl.width, res)


# --- empirical statistics -------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalStats:
    n: int
    frequencies: np.ndarray
    averages: dict


def empirical_stats(word: Sequence[int], observables: dict | Sequence = (), k: int | None = None) -> EmpiricalStats:
    """Symbol frequencies and Birkhoff averages S_n f / n along a word."""
    word = np.asarray(word, dtype=np.int64)
    k = k or int(word.max())
    freq = np.bincount(word - 1, minlength=k)[:k] / len(word)
    if not isinstance(observables, dict):
        observables = {f"f{i}": f for i, f in enumerate(observables)}
    avgs = {name: float(potential(f, k) @ freq) for name, f in observables.items()}
    return EmpiricalStats(len(word), freq, avgs)


# --- level-1 rate function -------------------------------------------------------

@dataclass(frozen=True)
class RatePoint:
    s: float
    q_star: float
    I: float
    at_boundary: bool = False


def mean_range(model: MMEModel, f) -> tuple[float, float]:
    """Min and max cycle mean of f on the SCC (Karp), the range of MME-reachable averages."""
    vals = potential(f, model.map.k)[model.symbols - 1]
    M = model.M
    n = M.shape[0]

    def karp(sign):
        w = sign * vals
        D = np.full((n + 1, n), np.inf)
        D[0, :] = 0.0
        for j in range(1, n + 1):
            # D[j, v] = min over paths of j arrows ending in v, weighted by target values
            cand = D[j - 1][:, None] + np.where(M > 0, w[None, :], np.inf)
            D[j] = cand.min(axis=0)
        best = np.inf
        for v in range(n):
            if not np.isfinite(D[n, v]):
                continue
            worst = max((D[n, v] - D[j, v]) / (n - j) for j in range(n) if np.isfinite(D[j, v]))
            best = min(best, worst)
        return sign * best

    return karp(1.0), karp(-1.0)


def rate_level1(model: MMEModel, f, s: float, q_max: float = 50.0, tol: float = 1e-8) -> RatePoint:
    """I(s) = sup_q [q s - P(q f) + h] by ternary search over [-q_max, q_max].

    Outside the achievable range returns I = inf.  If the optimum sits on
    the q boundary the window is widened once and the point flagged.
    """
    lo_s, hi_s = mean_range(model, f)
    eps = 1e-12
    if s < lo_s - eps or s > hi_s + eps:
        return RatePoint(s, math.copysign(math.inf, s - lo_s), math.inf, True)
    h = model.h

    def obj(q):
        return q * s - pressure(model, f, q) + h

    def search(qm):
        a, b = -qm, qm
        while b - a > tol:
            m1 = a + (b - a) / 3
            m2 = b - (b - a) / 3
            if obj(m1) < obj(m2):
                a = m1
            else:
                b = m2
        q = (a + b) / 2
        return q, abs(abs(q) - qm) < 10 * tol

    q, edge = search(q_max)
    if edge:
        q, edge = search(2 * q_max)
    return RatePoint(s, q, max(obj(q), 0.0), edge)


# --- Monte Carlo deviation probabilities ----------------------------------------------

@dataclass
class DeviationEstimate:
    f: list
    A: tuple
    ns: list
    trials: int
    hits: list
    probabilities: list
    std_errors: list
    censored: list
    rates: list
    fitted_rate: float
    fitted_rate_plain: float
    band: tuple
    prefactor_correction: bool
    seed: int
    extra: dict = field(default_factory=dict)


def _hits_chunk(model, vals, n, size, lo, hi, seed, stream):
    rng = _rng(seed, stream)
    path = _chain(model, n, size, rng)
    sums = vals[path].sum(axis=1)
    slack = 1e-9 * n
    return int(((sums >= lo * n - slack) & (sums <= hi * n + slack)).sum())


def count_hits(model: MMEModel, f, A: Sequence[float], n: int, trials: int, seed: int, jobs: int = 1) -> int:
    """Number of trials with S_n f / n in A.  Trials are split into fixed
    chunks with their own RNG streams, so the count does not depend on ``jobs``."""
    vals = potential(f, model.map.k)[model.symbols - 1]
    sizes = [CHUNK] * (trials // CHUNK)
    if trials % CHUNK:
        sizes.append(trials % CHUNK)
    # distinct stream per (n, chunk)
    tasks = [(model, vals, n, size, A[0], A[1], seed, n * 100_003 + i) for i, size in enumerate(sizes)]
    if jobs <= 1:
        return sum(_hits_chunk(*t) for t in tasks)
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return sum(ex.map(lambda t: _hits_chunk(*t), tasks))


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line y = a + b x; returns (a, b, stderr(a))."""
    X = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    if len(x) <= 2:
        return float(coef[0]), float(coef[1]), float("nan")
    resid = y - X @ coef
    sigma2 = float(resid @ resid) / (len(x) - 2)
    cov = sigma2 * np.linalg.inv(X.T @ X)
    return float(coef[0]), float(coef[1]), math.sqrt(max(cov[0, 0], 0.0))


def deviation_probability(
    model: MMEModel,
    f,
    A: Sequence[float],
    ns: Sequence[int],
    trials: int,
    seed: int,
    jobs: int = 1,
) -> DeviationEstimate:
    """Monte Carlo m(S_n f / n ∈ A) over ``ns`` and the extrapolated decay rate.

    The rate is the intercept of a line fitted to -(1/n) log p_n against 1/n.
    When A excludes the MME mean, p_n carries an n^{-1/2} prefactor, so the
    fit uses -(1/n) log p_n - log(n)/(2n); the uncorrected intercept is kept
    as ``fitted_rate_plain``.  Zero-hit cells are censored (reported rate is
    the lower bound log(trials)/n) and left out of the fit.
    """
    if trials < 1000:
        raise DomainError("need at least 1000 trials")
    if trials > MAX_TRIALS:
        raise CapExceeded(f"trials {trials} exceeds {MAX_TRIALS}")
    lo, hi = float(A[0]), float(A[1])
    if lo > hi:
        raise DomainError("empty interval A")
    vals = potential(f, model.map.k)
    mean = mme_mean(model, f)
    correct = not (lo <= mean <= hi)
    hits, probs, ses, cens, rates = [], [], [], [], []
    for n in ns:
        c = count_hits(model, f, (lo, hi), n, trials, seed, jobs)
        p = c / trials
        hits.append(c)
        probs.append(p)
        ses.append(math.sqrt(p * (1 - p) / trials))
        cens.append(c == 0)
        rates.append(math.log(trials) / n if c == 0 else -math.log(p) / n)
    x = np.array([1 / n for n, z in zip(ns, cens) if not z])
    y = np.array([r for r, z in zip(rates, cens) if not z])
    if len(x) >= 2:
        plain, _, _ = _ols(x, y)
        if correct:
            y = y - np.log(1 / x) * x / 2
        rate, _, se = _ols(x, y)
    elif len(x) == 1:
        plain = rate = float(y[0])
        se = float("nan")
    else:
        plain = rate = se = float("nan")
    band = (rate - 1.96 * se, rate + 1.96 * se)
    return DeviationEstimate(
        list(map(float, vals)), (lo, hi), list(ns), trials, hits, probs, ses, cens, rates,
        rate, plain, band, correct, seed,
    )


# --- Pfister-Sullivan counting -----------------------------------------------------------

def count_words_constrained(model: MMEModel, F: Sequence[int] | None, n: int, f, A: Sequence, cap: int = 10_000) -> int:
    """Exact number of length-n words realized by paths in F with S_n f / n in A.

    Determinizes the F-subgraph (states are vertex sets reachable by a word)
    and runs a DP over (state set, exact sum of f).  F holds positions within
    the SCC (default: all).
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > cap:
        raise CapExceeded(f"n = {n} exceeds cap {cap}")
    F = frozenset(range(model.size) if F is None else F)
    k = model.map.k
    fvals = [Fraction(v).limit_denominator(10**9) for v in potential(f, k)]
    lo, hi = Fraction(A[0]).limit_denominator(10**9), Fraction(A[1]).limit_denominator(10**9)
    sym = {a: int(model.symbols[a]) for a in F}
    succ = {a: [b for b in F if model.M[a, b]] for a in F}
    trans: dict = {}

    def step(states):
        if states not in trans:
            nxt: dict = {}
            for a in states:
                for b in succ[a]:
                    nxt.setdefault(sym[b], set()).add(b)
            trans[states] = [(s, frozenset(v)) for s, v in sorted(nxt.items())]
        return trans[states]

    layer: dict = {}
    for s in range(1, k + 1):
        start = frozenset(a for a in F if sym[a] == s)
        if start:
            key = (start, fvals[s - 1])
            layer[key] = layer.get(key, 0) + 1
    for _ in range(n - 1):
        new: dict = {}
        for (states, total), c in layer.items():
            for s, nxt in step(states):
                key = (nxt, total + fvals[s - 1])
                new[key] = new.get(key, 0) + c
        layer = new
    return sum(c for (_, total), c in layer.items() if lo * n <= total <= hi * n)


# --- report ---------------------------------------------------------------------

def ldp_report(
    model: MMEModel,
    f,
    levels: Sequence[float],
    ns: Sequence[int],
    trials: int,
    seed: int,
    jobs: int = 1,
    count_n: int | None = None,
    eps: float = 0.05,
) -> dict:
    """Analytic rate vs Monte Carlo decay rate for each level s.

    For s above the MME mean the deviation set is [s, max f], below it
    [min f, s]; at the mean it is [s, max f].  Each row also checks the
    count growth (1/n) log #words >= h - I(s) - eps at ``count_n``.
    """
    lo_s, hi_s = mean_range(model, f)
    mean = mme_mean(model, f)
    count_n = count_n or max(ns)
    rows = []
    for i, s in enumerate(levels):
        A = (s, hi_s) if s >= mean else (lo_s, s)
        rp = rate_level1(model, f, s)
        est = deviation_probability(model, f, A, ns, trials, seed + i, jobs)
        rel = abs(est.fitted_rate - rp.I) / rp.I if rp.I > 1e-12 else abs(est.fitted_rate - rp.I)
        cnt = count_words_constrained(model, None, count_n, f, A)
        growth = math.log(cnt) / count_n if cnt else -math.inf
        h_c = model.h - rp.I
        rows.append({
            "s": s,
            "A": list(A),
            "analytic_rate": rp.I,
            "q_star": rp.q_star,
            "mc_rate": est.fitted_rate,
            "mc_rate_plain": est.fitted_rate_plain,
            "mc_band": list(est.band),
            "relative_error": rel,
            "ns": list(ns),
            "probabilities": est.probabilities,
            "std_errors": est.std_errors,
            "hits": est.hits,
            "censored": est.censored,
            "count_n": count_n,
            "count": cnt,
            "count_growth": growth,
            "h_constrained": h_c,
            "count_check": growth >= h_c - eps,
        })
    return {"h": model.h, "mme_mean": mean, "range": [lo_s, hi_s], "trials": trials, "seed": seed, "rows": rows}
