"""Covered and uncovered cost along a k-means++ trajectory.

Replays one seeded run on Gaussian blobs and prints, per step, the covered
cost H, uncovered cost U, proxy cost Htilde, misses M and uncovered clusters
K.  K - M drops by exactly one per step while t <= k.

Run:  python3 demos/03_covered_costs.py
"""

from kmseed import coverage_report, kmeanspp, make_rng, supermartingale_probe, synthetic_blobs

rng = make_rng(3)
inst = synthetic_blobs(6, 30, 2, 4.0, rng)
cl = kmeanspp(inst.dataset, 8, rng)
rep = coverage_report(inst.dataset, inst.labels, cl)

print(f"OPT_k (reference partition) = {inst.opt_k:.2f}; Htilde_0 = 5 OPT_k = {rep.proxy_initial:.2f}")
print(" t  hit        H          U     Htilde  M  K  K-M")
for t in range(len(cl)):
    print(
        f"{t + 1:2d}  {'yes' if rep.hit[t] else ' no'}  {rep.covered_cost[t]:9.2f}  {rep.uncovered_cost[t]:9.2f}"
        f"  {rep.proxy_cost[t]:9.2f}  {rep.misses[t]}  {rep.uncovered_clusters[t]}  {rep.uncovered_clusters[t] - rep.misses[t]:3d}"
    )

means, se = supermartingale_probe(inst.dataset, inst.labels, 2000, rng)
print("mean Htilde_t over 2000 runs:", " ".join(f"{m:.1f}" for m in means))
