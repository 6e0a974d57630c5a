"""Does the l-step walk avoid subgroups?

Take l about tau log_3 p.  The walk passes condition (wg) when no proper
subgroup holds more than p^-gamma of its mass.  It is enough to look at the
maximal subgroups and the trivial one.  A pair inside a Borel subgroup never
escapes it, whatever gamma is.

The flattening identity mu^(2l)(e) = ||mu^(l)||^2 is checked exactly along
the way, which is what makes l2 bounds usable for return probabilities.
"""

from sl2lab.concentration import check_wg, flattening_profile
from sl2lab.core import GroupElement, build_table, standard_pair

table = build_table(7)
a, b = standard_pair(7)
print("l   mu^(2l)(e)            ||mu^(l)||^2          equal")
for rec in flattening_profile(a, b, 5, table, exact=True):
    print(f"{rec.l:<3} {str(rec.return_2l):<21} {str(rec.l2_sq):<21} {rec.equal}")

print()
print("p    l   sup mass   where            p^-gamma   pass")
for p in (5, 7, 11, 13):
    rep = check_wg(*standard_pair(p), tau=2.0, gamma=0.1, table=build_table(p))
    print(f"{p:<4} {rep.l_used:<3} {rep.sup_mass:.5f}    {rep.sup_class:<16} {rep.threshold:.5f}    {rep.passed}")

rep = check_wg(standard_pair(13)[0], GroupElement(2, 0, 0, 7, 13), table=build_table(13))
print(f"Borel pair at p = 13: sup mass {rep.sup_mass} in {rep.sup_class}, pass = {rep.passed}")
