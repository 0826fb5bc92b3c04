"""Discounting specified evidence.

Two discounts are applied, always in this order:

1. falsity: each piece of evidence is discounted by ``1 - k`` where ``k`` is
   its degree of falsity;
2. credibility: when used inside subset ``j`` it is discounted again by its
   credibility of belonging there,
   ``alpha_j = Bel_home * [j == home] + (1 - Bel_home) * Pls_j**2 / sum_k Pls_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import Evidence, EvidenceStore, discount
from .errors import InputError, NoMembershipError
from .specifier import MembershipSpecification


@dataclass(frozen=True)
class CredibilityVector:
    q: str
    alpha: Mapping[int, float]


def _check(e: Evidence, spec: MembershipSpecification) -> None:
    if spec.q != e.id:
        raise InputError(f"specification for {spec.q!r} applied to evidence {e.id!r}")


def falsity_discount(e: Evidence, spec: MembershipSpecification) -> tuple[Evidence, float]:
    _check(e, spec)
    alpha = 1.0 - spec.falsity
    return Evidence(e.id, discount(e.bpa, alpha)), alpha


def discount_store(store: EvidenceStore, specs: Iterable[MembershipSpecification]
                   ) -> dict[str, float]:
    """Falsity-discount every evidence of ``store`` in place and lock it
    against repartitioning.  Returns the credibility used per id."""
    by_id = {s.q: s for s in specs}
    out, alphas = [], {}
    for e in store:
        if e.id not in by_id:
            raise InputError(f"no specification for evidence {e.id!r}")
        d, a = falsity_discount(e, by_id[e.id])
        out.append(d)
        alphas[e.id] = a
    store.replace(out)
    store.mark_discounted()
    return alphas


def subset_credibilities(spec: MembershipSpecification) -> CredibilityVector:
    total = math.fsum(pls for _, pls in spec.per_subset.values())
    if total <= 0.0:
        raise NoMembershipError(f"evidence {spec.q!r} has zero plausibility for every subset")
    bel_home = spec.bel(spec.home)
    alpha = {}
    for j, (_, pls) in spec.per_subset.items():
        a = (1.0 - bel_home) * pls * pls / total
        if j == spec.home:
            a += bel_home
        alpha[j] = min(1.0, a)
    return CredibilityVector(spec.q, alpha)


def subset_discount(e: Evidence, cv: CredibilityVector, j: int) -> Evidence:
    if cv.q != e.id:
        raise InputError(f"credibilities for {cv.q!r} applied to evidence {e.id!r}")
    if j not in cv.alpha:
        raise KeyError(f"no credibility for subset {j} of evidence {e.id!r}")
    return Evidence(e.id, discount(e.bpa, cv.alpha[j]))
