"""
Running the subcube-conditioning tester by hand
===============================================

Build a distribution, wrap it in a seeded oracle, run the tester and read
the query ledger and recursion trace.
"""

import numpy as np

from hgut import corpus
from hgut.oracle import DistributionOracle
from hgut.testers import TesterConfig, sub_cond_uni

# a uniform field over Z_3^4 and a heavy atom over Z_3^3
uniform = corpus.make("uniform", (3, 3, 3, 3))
atom = corpus.make("heavy_atom", (3, 3, 3), {"weight": 0.35})
print("distance of the atom instance:", round(corpus.exact_tv(atom), 4))

cfg = TesterConfig.practical()
print("practical constants:", cfg.to_dict())

for label, p in [("uniform", uniform), ("heavy atom", atom)]:
    oracle = DistributionOracle(p, np.random.default_rng(7))
    v = sub_cond_uni(oracle, 0.25, cfg)
    print(f"\n{label}: {v.decision}")
    print("  queries by phase:", v.ledger["by_phase"])
    print("  deepest recursion:", v.depth_max)
    print("  top-level branch:", v.trace["branch"])

# a larger product instance; the oracle never materialises 2^16 cells
product = corpus.make("product_biased", (2,) * 16, {"k": 8, "bias": 0.5})
v = sub_cond_uni(DistributionOracle(product, np.random.default_rng(1)), 0.25, cfg)
print("\nbiased product over Z_2^16:", v.decision, "after", v.ledger["total"], "queries")
