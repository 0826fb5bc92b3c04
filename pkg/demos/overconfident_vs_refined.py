#!/usr/bin/env python
"""Show how intervals widen once partition uncertainty is taken seriously.

The overconfident run trusts the partition completely: each subset only sees
its own members. The refined run lets every report contribute to every
subset it could plausibly belong to, discounted by its credibility there.
"""

from nonspecific import pipeline

inputs = pipeline.load_bakers()
over = pipeline.run_overconfident(inputs)
refined = pipeline.run_refined(inputs)


def intervals(report, j):
    return {r["query"]: (r["bel"], r["pls"]) for r in report.subsets[j - 1]["intervals"]}


# Watch BI (brown-haired insider) at subset 1: the overconfident run reports
# a tight [0.483, 0.69]; the refined interval is lower and wider.
for j in (1, 2):
    print(f"subset {j}        overconfident         refined")
    a, b = intervals(over, j), intervals(refined, j)
    for q in a:
        (ob, op), (rb, rp) = a[q], b[q]
        print(f"  {q:>3}   [{ob:.3f}, {op:.3f}]   ->   [{rb:.3f}, {rp:.3f}]")
    print()
