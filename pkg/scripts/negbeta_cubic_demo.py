"""Markov diagram, entropy, MME and Gibbs constant for the (-beta) map at the cubic root."""
import math

from hofbauer.diagram import build_truncation, maximal_scc, periodic_points, simple_cycles
from hofbauer.maps import cubic_neg_beta_parameter, make_neg_beta
from hofbauer.spectral import gibbs_check, indicator, mme_mean, mme_on_truncation


def main():
    beta = cubic_neg_beta_parameter()
    T = make_neg_beta(beta)
    D = build_truncation(T, 10)
    print(f"beta = {float(beta):.12f}, log beta = {math.log(float(beta)):.12f}")
    print(f"{len(D)} vertices, stable = {D.stable}")
    for i, v in enumerate(D.vertices):
        print(f"  {i}: symbol {v.symbol} on ({float(v.lo):.6f}, {float(v.hi):.6f})  -> {D.succ[i]}")
    model = mme_on_truncation(D)
    print(f"h = {model.h:.12f}, period {model.period}")
    print("pi =", [round(float(p), 6) for p in model.pi])
    print(f"MME frequency of symbol 1: {mme_mean(model, indicator(1)):.6f}")
    rep = gibbs_check(model, n_max=12)
    print(f"Gibbs K = {rep.K:.4f}, violations = {len(rep.violations)}")
    scc = maximal_scc(D).vertices
    for cyc in simple_cycles(D, 6, subset=scc):
        pt = periodic_points(T, [D.vertices[i] for i in cyc])
        print(f"  cycle {pt.word}: x = {float(pt.x):.12f}, residual {float(pt.residual):.1e}")


if __name__ == "__main__":
    main()
