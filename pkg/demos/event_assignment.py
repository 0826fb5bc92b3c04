#!/usr/bin/env python
"""Decide which subset describes which event.

Each subset's combined evidence hints at an event. Two subsets may not
describe the same event, so we combine the hints under that constraint.
"""

from nonspecific import pipeline
from nonspecific.assignment import assign_events, project_events

inputs = pipeline.load_bakers()
report = pipeline.run_refined(inputs)
combined = report.stages["combined"]

projections = [project_events(combined[j], j) for j in sorted(combined)]
for p in projections:
    parts = ", ".join(f"{'|'.join(sorted(k))}: {m:.4f}" for k, m in p.masses.items())
    print(f"subset {p.subset} points at {parts} (rest undecided: {p.theta_mass:.4f})")

result = assign_events(projections, inputs.frame.events)
print(f"\nconflict from clashing events: {result.conflict:.4f}")
for a, (bel, pls) in result.intervals.items():
    label = ", ".join(f"subset {s} -> {e}" for s, e in result.bpa.mapping(a).items())
    print(f"  {label}: [{bel:.4f}, {pls:.4f}]")
print("best:", result.best())
