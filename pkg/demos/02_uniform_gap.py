"""The uniform gap g(p): the worst spectral gap over every generating pair.

A direct search over all |G|^2 pairs is wasteful.  Conjugation by GL(2,p),
swapping the generators and inverting either of them all preserve the
spectrum, so only one pair per orbit needs an eigensolve.
"""

import time

from sl2lab.core import build_table, standard_pair
from sl2lab.spectral import spectral_gap_pair
from sl2lab.uniform import uniform_gap

for p in (3, 5, 7):
    t0 = time.perf_counter()
    table = build_table(p)
    rep = uniform_gap(p, table=table)
    a, b = rep.argmin.pair(table)
    print(f"p = {p}: {rep.n_generating_pairs} generating pairs in {rep.n_orbits} orbits")
    print(f"   g(p) = {rep.g_p:.12f}   (two-sided {rep.g_p_two_sided:.6f})")
    print(f"   worst pair a = {a.rows()}, b = {b.rows()}   [{time.perf_counter() - t0:.1f}s]")

# The worst pair is no better than the unipotent one.
table = build_table(7)
print("standard pair at p = 7:", round(spectral_gap_pair(*standard_pair(7), table).gap, 6))
