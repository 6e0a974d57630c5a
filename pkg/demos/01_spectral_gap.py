"""Spectral gap of the unipotent pair in SL(2, p), and what it says about expansion.

The averaging operator mu_(a,b) = (a + a^-1 + b + b^-1)/4 acts on functions
on the group.  Its second eigenvalue controls how fast the random walk mixes;
for SL(2,3) we can also find the vertex expansion by brute force and see it
land between the two Cheeger-type bounds.
"""

from sl2lab.core import SymmetricGeneratorMultiset, build_table, standard_pair
from sl2lab.spectral import expansion_exact, girth_pair, spectral_gap_pair

print("p    |G|    lambda2     gap        girth")
for p in (3, 5, 7, 11, 13, 17):
    table = build_table(p)
    a, b = standard_pair(p)
    r = spectral_gap_pair(a, b, table)
    print(f"{p:<4} {table.size:<6} {r.lambda2:.6f}  {r.gap:.6f}  {girth_pair(a, b, table)}")

# the gap shrinks with p for this pair; whether some family keeps it bounded
# below is the question the uniform gap (demo 02) asks.

table = build_table(3)
rep = expansion_exact(table, SymmetricGeneratorMultiset.from_pair(*standard_pair(3)))
print()
print("SL(2,3), standard pair, all 2^24 subsets searched")
print(f"  exact expansion c = {rep.c_exact} = {float(rep.c_exact):.4f}")
print(f"  attained by a set of size {len(rep.argmin_subset)}")
print(f"  Cheeger sandwich: {rep.cheeger_lower:.4f} <= c <= {rep.vertex_upper:.4f}")
