"""Short words that generate, and what they buy spectrally.

Start from an arbitrary symmetric generating set S (here a few elements of
order 4).  Breadth-first search over words finds two short ones w1, w2 that
still generate SL(2,p).  The comparison argument then converts the gap of the
pair (w1, w2) into a lower bound on the gap of S, divided by a constant that
depends on the word lengths and the weights of S.
"""

import numpy as np

from sl2lab.core import SymmetricGeneratorMultiset, build_table, standard_pair
from sl2lab.words import comparison_check, find_generating_pair, max_girth_pair

p = 11
table = build_table(p)
order4 = np.flatnonzero(table.element_orders() == 4)
S = SymmetricGeneratorMultiset.symmetric_closure([table.element(int(i)) for i in order4[[0, 5, 40]]])
rep = find_generating_pair(S, N_max=4, table=table)
print(f"S has {len(S)} elements; found = {rep.found}, word lengths {rep.lengths}")
print(f"  <w1, w2> has order {rep.certificate} (|G| = {table.size}); shortest relation {rep.shortest_relation}")
cmp = comparison_check(S, rep, table)
print(f"  gap(S) = {cmp.gap_S:.5f}, gap(w1, w2) = {cmp.gap_words:.5f}")
print(f"  comparison constant A = {cmp.constant}, bound gap(w)/A = {cmp.bound:.5f}, holds = {cmp.holds}")

# girth: how long must a relation between two short words be?
p = 13
table = build_table(p)
rep = max_girth_pair(SymmetricGeneratorMultiset.from_pair(*standard_pair(p)), N_max=3, L=12, table=table)
print()
print(f"p = {p}: best girth among words of length <= 3 is {rep.shortest_relation}"
      f" (pigeonhole ceiling {rep.ceiling}), exceeds L = 12: {rep.sufficient}")
