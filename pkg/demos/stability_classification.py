"""Classify contraction semigroups by their spectral gap at zero.

A negative self-adjoint generator A drives ||e^{tA}x||^2 =
integral of e^{2 t lambda} over the spectral measure of x.  The orbit
dies exponentially exactly when the measure keeps a gap below zero;
an atom sitting at zero freezes part of the vector forever.  This
script classifies one measure of each kind and shows the family-of-
thresholds view: membership in {lambda_top <= -1/n} for growing n.
"""

import numpy as np

import semistab as ss


def show(label, subject, gap_tol=ss.DEFAULT_GAP_TOL):
    verdict = ss.classify_stability(subject, gap_tol=gap_tol)
    print(f"{label:<28} {verdict.describe()}")
    return verdict


def main():
    print("== one measure of each stability class ==")
    gapped = ss.AtomicMeasure.from_points([-1.0, -2.0], [0.5, 0.5])
    show("two atoms below -1", gapped)

    frozen = ss.AtomicMeasure.from_points([0.0, -1.0], [0.25, 0.75])
    show("atom parked at zero", frozen)

    creeping = ss.lacunary_measure(0.5, (0.5, 4.0), 12)
    show("lacunary atoms creeping to 0", creeping)

    print()
    print("== threshold-family membership for the lacunary measure ==")
    print("an exponentially stable measure joins some {lambda_top <= -1/n};")
    print("this one has atoms above every fixed threshold, so it never does")
    for n in (1, 10, 10**4, 10**8):
        member = ss.check_fn_membership(creeping, n)
        print(f"  n={n:<12d} lambda_top <= -1/n : {member}")

    print()
    print("== the gap tolerance is an honest knob ==")
    show("gap 1 vs gap_tol 2", gapped, gap_tol=2.0)

    print()
    print("== discretized operators classify the same way ==")
    well = ss.gaussian_well(depth=1.0, width=1.0, nu=1, a_bound=1.0)
    H = ss.discretize(well, L=12.0, h=0.1)
    show("gaussian well on [-12,12]", H)

    print()
    print("== orbit norms confirm the verdicts ==")
    for label, mu in (("gapped", gapped), ("frozen", frozen)):
        trace = ss.evolve_norms(mu, 1.0, 100.0, 5)
        norms = ", ".join(f"{v:.3e}" for v in np.sqrt(np.exp(trace.log_norm_sq)))
        print(f"  {label:<8} ||e^(tA)x|| at t=1..100: {norms}")


if __name__ == "__main__":
    main()
