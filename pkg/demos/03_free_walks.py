"""Random walks on the free group F2 = <x, y>.

Three facts drive the counting argument: a walk is at any given word with
probability at most (sqrt3/2)^n, and the commutator [S1, S2] and the double
commutator [[S1,S2],[S3,S4]] of independent walks vanish only with
correspondingly small probability.  The radial DP gives the first exactly;
the other two are estimated by Monte Carlo and compared against their bounds.
"""

import math

from sl2lab.freewalks import (
    bounds,
    double_commutator_crossover,
    exact_event_probability,
    radial_distribution,
    simulate_events,
)

print("n    P(S_2n = 1)^(1/2n)")
for n in (5, 10, 20, 40, 80):
    q = radial_distribution(2 * n).q(0)
    print(f"{n:<4} {float(q) ** (1 / (2 * n)):.6f}")
print(f"      limit sqrt3/2 = {math.sqrt(3) / 2:.6f}")

print()
print("exact at n = 2: commutator", exact_event_probability(2, "commutator"),
      " double commutator", float(exact_event_probability(2, "double_commutator")))

print()
print("n    event               estimate    95% upper    bound")
for n in (10, 20):
    b = bounds(n)
    limits = {"return": b.kesten, "commutator": b.commutator_bound,
              "double_commutator": b.double_commutator_bound}
    for e in simulate_events(n, 200_000, seed=0):
        print(f"{n:<4} {e.event:<19} {e.estimate:.6f}    {e.upper_confidence_95:.6f}     {limits[e.event]:.4g}")

# the double-commutator bound is only informative once it drops below 1
print()
print("double-commutator bound < 1 from n =", double_commutator_crossover())
