"""Bound formulas side by side, and the bi-criteria lower-bound instance.

Run:  python3 demos/04_bounds_and_lower_bound.py
"""

import numpy as np

from kmseed import (
    BiCriteriaConfig,
    bicriteria_factor,
    bicriteria_kmeanspp,
    bicriteria_lb_instance,
    bound_table,
    make_rng,
    wei_factor,
)

k = 100
print(" delta  bi-criteria   comparator")
for delta in (1, 5, 22, 50, 100, 200):
    print(f"{delta:6d}  {bicriteria_factor(k, delta):11.3f}  {wei_factor(k, delta):11.3f}")

tab = bound_table(k, ell=float(k), T=5, delta=22, r_star=3, opt1=1e4, optk=100.0)
for name, value in tab.rows():
    print(f"{name:32s} {'n/a' if value is None else f'{value:.4f}'}")

# heavy simplex plus k-1 light singletons
inst = bicriteria_lb_instance(32, 4, 2000)
rng = make_rng(11)
uncovered = []
for _ in range(50):
    cl = bicriteria_kmeanspp(inst.dataset, BiCriteriaConfig(32, 4), rng)
    uncovered.append(31 - len(set(inst.labels[cl.indices].tolist()) - {0}))
print(f"light clusters left uncovered with k+delta centers: mean {np.mean(uncovered):.1f}, min {min(uncovered)}")
