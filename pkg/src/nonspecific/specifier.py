"""Specifying nonspecific evidence.

For each piece of evidence ``q`` sitting in subset ``i`` of a (minimal)
partition we look at how the conflicts change when ``q`` is moved:

* out of its own subset (cluster conflict ``c_i -> c_i*``),
* into every other subset ``k`` (``c_k -> c_k*``),
* into a fresh subset of its own, or, for a singleton, out of existence
  (domain conflict ``c0 -> c0*``).

Each variation becomes a simple support function on the metalevel frame of
subsets ("q is not in subset j", or for a growing domain conflict "q is in
its own subset").  Combining them gives a belief/plausibility interval for
membership in every subset and, through the conflict of that combination,
a degree of falsity for ``q``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping

from .core import DEFAULT_PRODUCT_CAP, EPS
from .errors import DegenerateConflictError, InputError, NoMembershipError
from .metaconflict import DomainPrior, Partition, domain_conflict, subset_conflict

MULTI_MEMBER = "multi_member"
SINGLETON_DECREASE = "singleton_decrease"
SINGLETON_INCREASE = "singleton_increase"
SINGLETON_NEUTRAL = "singleton_neutral"


@dataclass(frozen=True)
class ConflictVariation:
    q: str
    home: int
    n_subsets: int
    c_home: float
    c_home_removed: float
    per_other_subset: tuple[tuple[int, float, float], ...]  # (k, c_k, c_k*)
    c0: float
    c0_star: float
    case: str


@dataclass(frozen=True)
class MetaEvidenceSet:
    q: str
    home: int
    case: str
    not_in: Mapping[int, float]
    in_home: float | None = None


@dataclass(frozen=True)
class MembershipSpecification:
    q: str
    home: int
    case: str
    per_subset: Mapping[int, tuple[float, float]]
    falsity: float

    def bel(self, j: int) -> float:
        return self.per_subset[j][0]

    def pls(self, j: int) -> float:
        return self.per_subset[j][1]


def classify(subset_size: int, c0: float, c0_star: float) -> str:
    if subset_size > 1:
        return MULTI_MEMBER
    if c0 > c0_star + EPS:
        return SINGLETON_DECREASE
    if c0 < c0_star - EPS:
        return SINGLETON_INCREASE
    return SINGLETON_NEUTRAL


def conflict_variations(partition: Partition, prior: DomainPrior, evidences, q: str,
                        cap: int = DEFAULT_PRODUCT_CAP) -> ConflictVariation:
    by_id = {e.id: e for e in evidences}
    if partition.ids != set(by_id):
        raise InputError("partition does not cover exactly the given evidence ids")
    if q not in by_id:
        raise InputError(f"unknown evidence id {q!r}")
    home = partition.index_of(q)
    members = [by_id[x] for x in partition.block(home)]
    rest = [e for e in members if e.id != q]
    c_home = subset_conflict(members, cap)
    c_removed = subset_conflict(rest, cap) if len(rest) > 1 else 0.0

    others = []
    for k in range(1, partition.r + 1):
        if k == home:
            continue
        block = [by_id[x] for x in partition.block(k)]
        others.append((k, subset_conflict(block, cap), subset_conflict(block + [by_id[q]], cap)))

    r = partition.r
    c0 = domain_conflict(prior, r)
    c0_star = domain_conflict(prior, r + 1 if len(members) > 1 else r - 1)
    return ConflictVariation(q, home, r, c_home, c_removed, tuple(others), c0, c0_star,
                             classify(len(members), c0, c0_star))


def _ratio(num: float, den: float, what: str, q: str) -> float:
    if den <= EPS:
        raise DegenerateConflictError(f"{what} for {q!r}: denominator is zero")
    if num < 0:
        if num < -EPS:
            warnings.warn(f"{what} for {q!r} is negative ({num / den:.6g}); "
                          "the partition is not minimal here, clamping to 0",
                          RuntimeWarning, stacklevel=3)
        return 0.0
    return min(1.0, num / den)


def meta_evidence(v: ConflictVariation) -> MetaEvidenceSet:
    """Turn conflict variations into masses for "q is (not) in subset j"."""
    not_in: dict[int, float] = {}
    in_home = None
    if v.case == MULTI_MEMBER:
        not_in[v.home] = _ratio(v.c_home - v.c_home_removed, 1.0 - v.c_home_removed,
                                "removal evidence", v.q)
    elif v.case == SINGLETON_DECREASE:
        not_in[v.home] = _ratio(v.c0 - v.c0_star, 1.0 - v.c0_star, "domain decrease evidence", v.q)
    elif v.case == SINGLETON_INCREASE:
        in_home = v.c0 / v.c0_star
    else:
        not_in[v.home] = 0.0
    for k, ck, ck_star in v.per_other_subset:
        not_in[k] = _ratio(ck_star - ck, 1.0 - ck, f"insertion evidence (subset {k})", v.q)
    if v.case == MULTI_MEMBER:
        not_in[v.n_subsets + 1] = _ratio(v.c0_star - v.c0, 1.0 - v.c0, "new-subset evidence", v.q)
    return MetaEvidenceSet(v.q, v.home, v.case, dict(sorted(not_in.items())), in_home)


def specify(mes: MetaEvidenceSet) -> MembershipSpecification:
    """Combine the meta-evidence about one piece of evidence.

    Membership in a subset only ever receives belief in the case where the
    domain conflict grew when the evidence was taken out of its singleton
    subset; everywhere else belief is 0 and plausibility is
    ``(1 - m(not in j)) / (1 - k)`` with ``k`` the product of all exclusion
    masses.
    """
    x = mes.not_in
    if mes.case == SINGLETON_INCREASE:
        h = mes.in_home
        others = [j for j in x if j != mes.home]
        per = {j: (0.0, (1.0 - h) * (1.0 - x[j])) for j in others}
        per[mes.home] = (h + (1.0 - h) * math.prod(x[j] for j in others), 1.0)
        return MembershipSpecification(mes.q, mes.home, mes.case, dict(sorted(per.items())), 0.0)

    k = math.prod(x.values())
    if k >= 1.0 - EPS:
        raise NoMembershipError(f"evidence {mes.q!r} is excluded from every subset")
    per = {j: (0.0, (1.0 - xj) / (1.0 - k)) for j, xj in x.items()}
    return MembershipSpecification(mes.q, mes.home, mes.case, per, k)


def specify_all(partition: Partition, prior: DomainPrior, evidences,
                cap: int = DEFAULT_PRODUCT_CAP) -> list[MembershipSpecification]:
    items = list(evidences)
    return [specify(meta_evidence(conflict_variations(partition, prior, items, eid, cap)))
            for eid in sorted(e.id for e in items)]
