"""Product replacement graphs: generating k-tuples joined by Nielsen moves.

Gamma_k(G) has one vertex per generating k-tuple and 4k(k-1) moves
g_i -> g_i g_j^+-1, g_j^+-1 g_i out of every vertex.  Connectivity is not
automatic for k = 2, and the spectral gap per component is what a product
replacement sampler would see.
"""

import time

from sl2lab.prg import build_prg, prg_spectrum

for p, k in ((3, 2), (3, 3), (5, 2)):
    t0 = time.perf_counter()
    rep = prg_spectrum(build_prg(p, k))
    gaps = ", ".join(f"{g:.4f}" for g in rep.component_gaps)
    print(f"Gamma_{k}(SL(2,{p})): {rep.vertex_count} vertices, degree {rep.degree}, "
          f"{rep.component_count} component(s), gaps [{gaps}]  ({rep.method}, {time.perf_counter() - t0:.1f}s)")

# Gamma_2(SL(2,5)) splits into three pieces; the pairs in each piece are
# related by Nielsen moves but not to those in the others.
