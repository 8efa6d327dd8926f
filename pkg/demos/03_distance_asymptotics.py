"""The distance from uniformity along local alternatives.

For each parametric family, n times the sup distance between the
model's inner-product law and the null converges to a closed-form
limit on the minimax scale.  This script evaluates the deterministic
quadrature at desk scale and compares with those limits.
"""

import math

from sphuni import Fvml, LowRank, Watson, distance_from_uniformity, fvml_llr_second_moment


def main():
    print("FvML, kappa = tau p^{3/4}/sqrt(n), tau = 1:")
    print("  limit of n d is 1/sqrt(2 pi) = 0.39894")
    for n in (500, 1000):
        p = n
        kappa = p**0.75 / math.sqrt(n)
        nd = n * distance_from_uniformity(Fvml(p, kappa))
        print(f"  n = p = {n}: n d = {nd:.5f}")

    print("\nLow-rank uniform, k = p(1 - tau/n), tau = 2:")
    print("  limit of n d is 2/(2 sqrt(2 e pi)) = 0.24197")
    n, p = 1000, 10000
    k = round(p * (1 - 2.0 / n))
    nd = n * distance_from_uniformity(LowRank(p, k))
    print(f"  n = {n}, p = {p}, k = {k}: n d = {nd:.5f}")

    print("\nWatson on the concentration scale n kappa^2/(p (p/2 - kappa)^2) = 1:")
    print("  limit of n d is 1/(2 sqrt(2 e pi)) = 0.12099")
    n, p, tau = 1000, 3000, 1.0
    kappa = p**1.5 * math.sqrt(tau) / (2 * (math.sqrt(n) + math.sqrt(tau * p)))
    nd = n * distance_from_uniformity(Watson(p, kappa))
    print(f"  n = {n}, p = {p}, kappa = {kappa:.1f}: n d = {nd:.5f}")

    print("\nLikelihood-ratio second moment (FvML, location-mixed), tau = 1:")
    print("  limit is e^{tau^4/2} = e^0.5 = 1.6487")
    n = p = 500
    kappa = p**0.75 / math.sqrt(n)
    print(f"  n = p = {n}: E L^2 = {fvml_llr_second_moment(n, p, kappa):.4f}")


if __name__ == "__main__":
    main()
