"""h_N for a linear mod 1 map against the lap-count growth rate."""
import argparse
import math
from fractions import Fraction

from hofbauer.coding import count_words
from hofbauer.maps import make_mod1
from hofbauer.spectral import entropy_estimate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", default="1/10")
    ap.add_argument("--beta", default="5/2")
    ap.add_argument("--depth", type=int, default=20)
    args = ap.parse_args()
    T = make_mod1(Fraction(args.alpha), Fraction(args.beta))
    ref = math.log(float(Fraction(args.beta)))
    print(f"{'N':>3} {'h_N':>14} {'lap growth':>12} {'log beta':>12}")
    for N in range(1, args.depth + 1):
        h = entropy_estimate(T, N).h
        lap = math.log(count_words(T, N)) / N
        print(f"{N:>3} {h:14.10f} {lap:12.6f} {ref:12.6f}")


if __name__ == "__main__":
    main()
