"""Which event does each subset refer to?

Each subset's combined bpa is projected onto its event parts.  The
projections are then combined on a metalevel whose atoms are the injective
(one event per subset, never shared) complete assignments of events to
subsets.  A projection focal set ``E`` for subset ``i`` stands for every
complete assignment that maps ``i`` into ``E``; two subsets forced onto the
same event therefore intersect to the empty set and feed the conflict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Mapping, Sequence

from .core import EPS, MassFunction
from .errors import InfeasibleAssignmentError, InputError, TotalConflictError

Assignment = tuple  # events, one per subset, in subset order


@dataclass(frozen=True)
class EventProjection:
    subset: int
    events: tuple[str, ...]
    masses: Mapping[frozenset, float]

    @property
    def theta_mass(self) -> float:
        return max(0.0, 1.0 - math.fsum(self.masses.values()))

    def mass(self, event_set) -> float:
        key = frozenset(event_set)
        if key == frozenset(self.events):
            return self.theta_mass
        return self.masses.get(key, 0.0)


def project_events(combined: MassFunction, subset: int) -> EventProjection:
    """Drop the action part of every focal element and merge equal event parts."""
    events = combined.frame.events
    acc: dict[frozenset, float] = {}
    for p, m in combined.focal.items():
        if len(p.events) == len(events):
            continue
        acc[p.events] = acc.get(p.events, 0.0) + m
    ordered = dict(sorted(acc.items(), key=lambda kv: sorted(events.index(e) for e in kv[0])))
    return EventProjection(subset, tuple(events), ordered)


@dataclass(frozen=True)
class AssignmentBpa:
    subsets: tuple[int, ...]
    focal: Mapping[frozenset, float]

    def bel(self, a: Assignment) -> float:
        return math.fsum(m for s, m in self.focal.items() if s == {a})

    def pls(self, a: Assignment) -> float:
        return math.fsum(m for s, m in self.focal.items() if a in s)

    def mapping(self, a: Assignment) -> dict[int, str]:
        return dict(zip(self.subsets, a))


@dataclass(frozen=True)
class AssignmentResult:
    bpa: AssignmentBpa
    conflict: float
    intervals: Mapping[Assignment, tuple[float, float]]

    def best(self) -> Assignment:
        """Complete assignment with the highest belief (ties: plausibility, then order)."""
        items = list(self.intervals.items())
        return max(items, key=lambda kv: (round(kv[1][0], 12), round(kv[1][1], 12),
                                          -items.index(kv)))[0]


def complete_assignments(n_subsets: int, events: Sequence[str]) -> list[Assignment]:
    return list(permutations(events, n_subsets))


def assign_events(projections: Sequence[EventProjection], events: Sequence[str]
                  ) -> AssignmentResult:
    events = tuple(events)
    projections = sorted(projections, key=lambda p: p.subset)
    if not projections:
        raise InputError("need at least one subset projection")
    for p in projections:
        if tuple(p.events) != events:
            raise InputError(f"projection of subset {p.subset} uses a different event list")
    r = len(projections)
    if r > len(events):
        raise InfeasibleAssignmentError(
            f"{r} subsets cannot refer to distinct events out of {len(events)}")
    universe = complete_assignments(r, events)
    everything = frozenset(universe)

    def lift(pos: int, proj: EventProjection) -> dict[frozenset, float]:
        out = {frozenset(a for a in universe if a[pos] in key): m
               for key, m in proj.masses.items() if m > 0}
        if proj.theta_mass > 0:
            out[everything] = out.get(everything, 0.0) + proj.theta_mass
        return out

    acc = lift(0, projections[0])
    k = 0.0
    for pos, proj in enumerate(projections[1:], start=1):
        nxt: dict[frozenset, float] = {}
        for s1, m1 in acc.items():
            for s2, m2 in lift(pos, proj).items():
                s = s1 & s2
                if s:
                    nxt[s] = nxt.get(s, 0.0) + m1 * m2
                else:
                    k += m1 * m2
        acc = nxt
    if k >= 1.0 - EPS:
        raise TotalConflictError(f"every combination assigns one event to two subsets (k = {k:.12g})")
    norm = 1.0 - k
    order = {a: i for i, a in enumerate(universe)}
    focal = dict(sorted(((s, m / norm) for s, m in acc.items()),
                        key=lambda kv: (len(kv[0]), sorted(order[a] for a in kv[0]))))
    bpa = AssignmentBpa(tuple(p.subset for p in projections), focal)
    intervals = {a: (bpa.bel(a), bpa.pls(a)) for a in universe}
    return AssignmentResult(bpa, k, intervals)
