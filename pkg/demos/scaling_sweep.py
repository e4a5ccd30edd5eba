"""
How query counts move with dimension
====================================

Mean queries over a biased product family at fixed distance, for several n,
next to sqrt(n) growth.  Also shows how the repetition constants trade
queries for reliability.
"""

import math

from hgut import corpus, harness
from hgut.testers import TesterConfig, depth_bound, query_budget

rep = harness.sweep(ns=(16, 64, 256), eps=0.25, trials=10)
for n, q, rel in zip(rep["n"], rep["mean_queries"], rep["queries_over_sqrt_n_relative"]):
    print(f"n={n:4d}  mean queries {q:9.0f}  per sqrt(n), relative to n=16: {rel:.3f}")
# far inputs are usually rejected by the first statistic, so counts stay flat
print("within factor 2.5 of sqrt(n):", rep["within_factor"])

# uniform inputs are the expensive case: every branch must run to completion
cfg = TesterConfig.practical()
for n in (8, 12, 16):
    p = corpus.make("uniform", (2,) * n)
    res = harness.run_trials(p, 0.25, cfg, 3, seed=0)
    mean = sum(r.queries_total for r in res) / len(res)
    print(f"uniform 2^{n}: mean {mean:10.0f} queries, "
          f"{mean / math.sqrt(n):9.0f} per sqrt(n), worst-case depth {depth_bound(n, 0.25, cfg)}")

# the analytic budget for comparison (hidden constants set to 1)
for n in (16, 64, 256):
    print(f"budget n={n}: {query_budget(n, 2, 0.25):.3e}")

# halving the repetition multiplier saves queries once the main case runs
cheap = cfg.with_(r_mult=0.25)
p = corpus.make("uniform", (2,) * 16)
for c in (cfg, cheap):
    res = harness.run_trials(p, 0.25, c, 4, seed=1)
    acc = sum(r.verdict == "accept" for r in res)
    print(f"r_mult={c.r_mult}: {acc}/4 accepted, "
          f"{sum(r.queries_total for r in res) / 4:.0f} queries on average")
