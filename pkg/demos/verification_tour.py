"""
Exact checks behind the tester
==============================

Every suite here is deterministic.  Reports carry both sides of each
identity or inequality so the slack can be inspected.
"""

from collections import defaultdict

from hgut import verification as vf

# Fourier identities: spectral and definitional operators agree
for r in vf.fourier_reports(seed=0, count=10)[:6]:
    print(f"{r.name:24s} shape={r.instance['shape']}  max error {r.lhs:.2e}")

# the mass-driven orientation and the rules it must obey
worst = defaultdict(float)
for r in vf.lemma_reports(seed=0, per_shape=4):
    if r.kind == "inequality" and r.rhs:
        worst[r.name] = max(worst[r.name], r.lhs / r.rhs)
    elif not r.holds:
        worst[r.name] = float("inf")
print("\nworst lhs/rhs per lemma check (<= 1 means it holds):")
for name, v in sorted(worst.items()):
    print(f"  {name:28s} {v:.3f}")

# the calibrated constant on held-out instances, and its trend with n
reps = vf.robust_pisier_reports(seed=0, count=30)
print("\nworst held-out ratio:", round(max(r.details.get("ratio", 0) for r in reps), 3))
print("mean ratio by n:", reps[-1].details["mean_ratio_by_n"])

# a deliberately broken orientation is caught
bad = vf.hard_failures(vf.lemma_reports(seed=0, per_shape=2, inject_fault=True))
print("\nfailures with a reversed subgraph:", len(bad))
