"""Non-local alternatives that defeat the moment-based tests.

The cap mixture places all mass on tiny caps around a simplex frame:
its first two inner-product moments nearly match uniformity, so the
Rayleigh and Bingham tests see nothing, while the full inner-product
CDF sits at distance ~1/2 from the null.  Heavy-tailed alpha-spherical
laws behave similarly.  Both remain easy for the sup-distance test.
"""

from sphuni import CapMixture, AlphaSpherical, RngSeed, estimate_distance_mc, run_nonlocal_experiment


def main():
    # deep in the p >> n^2 regime: with 20 draws over 4001 caps, two
    # samples rarely share a cap, so the moment tests stay near level
    n, p = 20, 4000
    res = run_nonlocal_experiment("capmixture", n, p, alpha=0.05, reps=100, seed=31)
    print(f"cap mixture, n = {n}, p = {p}, 100 replications:")
    for meth, rate in res.rates.items():
        print(f"  {meth:13s} rejection rate {rate:.2f}")
    print(f"  mean R_n = {res.mean_rayleigh:+.3f}; share of B_n < 0: "
          f"{res.share_bingham_negative:.2f}")
    d = estimate_distance_mc(CapMixture(p), 10**5, RngSeed(37))
    print(f"  Monte Carlo distance from uniformity: {d:.3f} (limit ~ 0.5)")

    n2, p2 = 40, 4000
    res2 = run_nonlocal_experiment("alphaspherical", n2, p2, alpha=0.05, reps=100,
                                   seed=41, model_param=1.0)
    print(f"\nalpha-spherical (tail index 1), n = {n2}, p = {p2}:")
    for meth, rate in res2.rates.items():
        print(f"  {meth:13s} rejection rate {rate:.2f}")
    d2 = estimate_distance_mc(AlphaSpherical(p2, 1.0), 10**5, RngSeed(43))
    print(f"  Monte Carlo distance from uniformity: {d2:.3f} (limit ~ 0.31)")


if __name__ == "__main__":
    main()
