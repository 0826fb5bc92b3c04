"""Metaconflict function and partition search.

The metaconflict of a partition into ``r`` subsets is
``1 - (1 - c0) * prod_i (1 - c_i)`` where ``c_i`` is the Dempster conflict
inside subset ``i`` and ``c0 = 1 - m(E_r)`` measures how badly ``r``
disagrees with the prior on the number of subsets.

Two searches are provided.  :func:`brute_force_minimize` walks every set
partition (restricted growth strings) and is the reference.
:func:`minimize` uses it for small inputs and otherwise runs a seeded,
restarted steepest-descent relocation search, scanning subset counts in
decreasing prior mass and stopping as soon as the incumbent beats every
remaining count's domain conflict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .core import DEFAULT_PRODUCT_CAP, EPS, Evidence, conflict
from .errors import InputError, MassSumError, RepartitionError, ResourceLimitError

BRUTE_FORCE_MAX_N = 12
_TIE = 1e-12


@dataclass(frozen=True, eq=False)
class DomainPrior:
    """Prior probability ``m(E_i)`` that there are exactly ``i`` subsets."""

    masses: Mapping[int, float]

    def __post_init__(self):
        clean: dict[int, float] = {}
        for k, v in dict(self.masses).items():
            i = int(k)
            if i < 1 or str(i) != str(k).strip():
                raise InputError(f"subset count must be a positive integer, got {k!r}")
            v = float(v)
            if not math.isfinite(v) or v < 0:
                raise InputError(f"prior mass for {i} subsets must be >= 0, got {v!r}")
            clean[i] = clean.get(i, 0.0) + v
        total = math.fsum(clean.values())
        if abs(total - 1.0) > EPS:
            raise MassSumError(f"domain prior sums to {total:.12g}, expected 1")
        object.__setattr__(self, "masses", dict(sorted(clean.items())))

    def mass(self, r: int) -> float:
        return self.masses.get(r, 0.0)

    @property
    def support(self) -> list[int]:
        return [r for r, m in self.masses.items() if m > 0]

    def __eq__(self, other):
        return isinstance(other, DomainPrior) and self.masses == other.masses


def domain_conflict(prior: DomainPrior, r: int) -> float:
    """``c0``: total prior mass on subset counts other than ``r``."""
    if r < 0:
        raise InputError("number of subsets must be nonnegative")
    return max(0.0, 1.0 - prior.mass(r))


@dataclass(frozen=True)
class Partition:
    """Evidence ids grouped into ``r`` nonempty subsets, numbered 1..r."""

    blocks: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(b) for b in self.blocks)
        if any(len(b) == 0 for b in blocks):
            raise InputError("partition subsets must be nonempty")
        ids = [x for b in blocks for x in b]
        if len(set(ids)) != len(ids):
            raise InputError("an evidence id appears in more than one subset")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_assignment(cls, assignment: Mapping[str, int]) -> Partition:
        """Build from ``id -> subset index``; indices must be 1..r without gaps."""
        r = max(assignment.values(), default=0)
        blocks: list[list[str]] = [[] for _ in range(r)]
        for eid, idx in assignment.items():
            if idx < 1:
                raise InputError(f"subset index must be >= 1, got {idx}")
            blocks[idx - 1].append(eid)
        return cls(tuple(tuple(b) for b in blocks))

    @classmethod
    def from_labels(cls, ids: Sequence[str], labels: Sequence[int]) -> Partition:
        """Build from a label per id; blocks are numbered by first appearance."""
        order: dict[int, list[str]] = {}
        for eid, lab in zip(ids, labels):
            order.setdefault(lab, []).append(eid)
        return cls(tuple(tuple(b) for b in order.values()))

    @property
    def r(self) -> int:
        return len(self.blocks)

    @property
    def assignment(self) -> dict[str, int]:
        return {eid: i for i, b in enumerate(self.blocks, start=1) for eid in b}

    @property
    def ids(self) -> set[str]:
        return {x for b in self.blocks for x in b}

    def block(self, index: int) -> tuple[str, ...]:
        return self.blocks[index - 1]

    def index_of(self, eid: str) -> int:
        for i, b in enumerate(self.blocks, start=1):
            if eid in b:
                return i
        raise KeyError(eid)

    def as_sets(self) -> frozenset[frozenset[str]]:
        return frozenset(frozenset(b) for b in self.blocks)


@dataclass(frozen=True)
class ConflictProfile:
    c0: float
    subset_conflicts: tuple[float, ...]
    mcf: float

    def recomputed_mcf(self) -> float:
        return metaconflict_value(self.c0, self.subset_conflicts)


def metaconflict_value(c0: float, subset_conflicts: Iterable[float]) -> float:
    keep = 1.0 - c0
    for c in subset_conflicts:
        keep *= 1.0 - c
    return 1.0 - keep


def _as_list(evidences) -> list[Evidence]:
    if getattr(evidences, "discounted", False):
        raise RepartitionError(
            "evidence has been discounted for falsity and must not be repartitioned")
    items = list(evidences)
    ids = [e.id for e in items]
    if len(set(ids)) != len(ids):
        raise InputError("duplicate evidence ids")
    return items


def subset_conflict(evidences: Sequence[Evidence], cap: int = DEFAULT_PRODUCT_CAP) -> float:
    if not evidences:
        raise InputError("a subset must contain at least one piece of evidence")
    return conflict([e.bpa for e in evidences], cap)


def metaconflict(partition: Partition, prior: DomainPrior, evidences,
                 cap: int = DEFAULT_PRODUCT_CAP) -> ConflictProfile:
    by_id = {e.id: e for e in evidences}
    if partition.ids != set(by_id):
        raise InputError("partition does not cover exactly the given evidence ids")
    c0 = domain_conflict(prior, partition.r)
    cs = tuple(subset_conflict([by_id[x] for x in b], cap) for b in partition.blocks)
    return ConflictProfile(c0, cs, metaconflict_value(c0, cs))


class _ConflictCache:
    """Memoized subset conflicts keyed by a bitmask over evidence positions."""

    def __init__(self, evidences: Sequence[Evidence], cap: int):
        self.bpas = [e.bpa for e in evidences]
        self.cap = cap
        self.memo: dict[int, float] = {}

    def __call__(self, mask: int) -> float:
        c = self.memo.get(mask)
        if c is None:
            members = [self.bpas[i] for i in range(len(self.bpas)) if mask >> i & 1]
            c = conflict(members, self.cap) if len(members) > 1 else 0.0
            self.memo[mask] = c
        return c


def _masks(labels: Sequence[int], r: int) -> list[int]:
    masks = [0] * r
    for i, lab in enumerate(labels):
        masks[lab] |= 1 << i
    return masks


def _canonical(labels: Sequence[int]) -> tuple[int, ...]:
    """Relabel so blocks are numbered by their smallest member (restricted growth)."""
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(lab, len(seen)) for lab in labels)


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """All set partitions of ``range(n)`` as restricted growth strings, in
    lexicographic order."""
    if n == 0:
        yield ()
        return
    a = [0] * n
    b = [1] * n  # b[i] = 1 + max(a[:i])
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] == b[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0
            b[j] = max(b[i], a[i] + 1)


def _evaluate(labels, cache: _ConflictCache, prior: DomainPrior):
    r = max(labels) + 1
    cs = [cache(m) for m in _masks(labels, r)]
    c0 = domain_conflict(prior, r)
    return metaconflict_value(c0, cs), c0, cs


def _better(mcf: float, key: tuple, best_mcf: float, best_key: tuple) -> bool:
    if mcf < best_mcf - _TIE:
        return True
    return abs(mcf - best_mcf) <= _TIE and key < best_key


def _present(ids: Sequence[str], labels: Sequence[int], cache: _ConflictCache,
             prior: DomainPrior) -> tuple[Partition, ConflictProfile]:
    """Number subsets by decreasing internal conflict, ties by smallest member."""
    r = max(labels) + 1
    masks = _masks(labels, r)
    order = sorted(range(r), key=lambda b: (-round(cache(masks[b]), 12), labels.index(b)))
    blocks = tuple(tuple(ids[i] for i in range(len(ids)) if labels[i] == b) for b in order)
    cs = tuple(cache(masks[b]) for b in order)
    c0 = domain_conflict(prior, r)
    return Partition(blocks), ConflictProfile(c0, cs, metaconflict_value(c0, cs))


def brute_force_minimize(evidences, prior: DomainPrior, subsets: int | None = None,
                         cap: int = DEFAULT_PRODUCT_CAP) -> tuple[Partition, ConflictProfile]:
    """Exhaustive minimum of the metaconflict over all set partitions.

    Ties go to fewer subsets, then to the lexicographically smallest
    restricted growth string.  ``subsets`` restricts the search to partitions
    with exactly that many subsets.
    """
    items = _as_list(evidences)
    n = len(items)
    if n == 0:
        raise InputError("need at least one piece of evidence")
    if n > BRUTE_FORCE_MAX_N:
        raise ResourceLimitError(f"brute force is limited to {BRUTE_FORCE_MAX_N} pieces of evidence")
    if subsets is not None and not 1 <= subsets <= n:
        raise InputError(f"cannot split {n} pieces of evidence into {subsets} subsets")
    cache = _ConflictCache(items, cap)
    best_mcf, best_key, best = math.inf, (), None
    for rgs in restricted_growth_strings(n):
        r = max(rgs) + 1
        if subsets is not None and r != subsets:
            continue
        mcf, _, _ = _evaluate(rgs, cache, prior)
        key = (r, rgs)
        if best is None or _better(mcf, key, best_mcf, best_key):
            best_mcf, best_key, best = mcf, key, rgs
    return _present([e.id for e in items], best, cache, prior)


@dataclass
class SearchResult:
    labels: tuple[int, ...]
    mcf: float
    trace: list[float] = field(default_factory=list)


def local_search(labels: Sequence[int], cache: _ConflictCache, prior: DomainPrior) -> SearchResult:
    """Steepest-descent single-evidence relocation to a fixed point.

    Every evidence may move to any other existing subset, or to a fresh
    subset when the prior gives the larger count positive mass.  The best
    strict improvement is applied; ties go to the smallest evidence index,
    then the smallest target subset.  Labels are kept in restricted growth
    form throughout.
    """
    state = _canonical(labels)
    mcf = _evaluate(state, cache, prior)[0]
    trace = [mcf]
    n = len(state)
    while True:
        r = max(state) + 1
        sizes = [0] * r
        for lab in state:
            sizes[lab] += 1
        best_mcf, best_state = mcf, None
        for q in range(n):
            targets = list(range(r))
            if sizes[state[q]] > 1 and prior.mass(r + 1) > 0:
                targets.append(r)
            for t in targets:
                if t == state[q]:
                    continue
                cand = list(state)
                cand[q] = t
                cand = _canonical(cand)
                cm = _evaluate(cand, cache, prior)[0]
                if cm < best_mcf - _TIE:
                    best_mcf, best_state = cm, cand
        if best_state is None:
            return SearchResult(state, mcf, trace)
        state, mcf = best_state, best_mcf
        trace.append(mcf)


def _random_labels(rng: np.random.Generator, n: int, r: int) -> list[int]:
    labels = rng.integers(0, r, size=n).tolist()
    seeds = rng.permutation(n)[:r].tolist()
    for b, i in enumerate(seeds):
        labels[i] = b
    return labels


def candidate_counts(prior: DomainPrior, n: int) -> list[int]:
    """Subset counts worth scanning, in decreasing prior mass (ties: smaller first)."""
    counts = sorted((r for r in prior.support if r <= n), key=lambda r: (-prior.mass(r), r))
    if not counts:
        counts = [next(r for r in range(1, n + 1) if prior.mass(r) == 0)]
    return counts


def minimize(evidences, prior: DomainPrior, restarts: int = 32, seed: int = 0,
             exact_threshold: int = 8, cap: int = DEFAULT_PRODUCT_CAP
             ) -> tuple[Partition, ConflictProfile]:
    """Partition the evidence so as to minimize the metaconflict.

    Inputs of at most ``exact_threshold`` pieces are solved exactly.
    """
    items = _as_list(evidences)
    n = len(items)
    if n == 0:
        raise InputError("need at least one piece of evidence")
    if n <= exact_threshold:
        return brute_force_minimize(items, prior, cap=cap)
    if restarts < 1:
        raise InputError("restarts must be >= 1")

    cache = _ConflictCache(items, cap)
    rng = np.random.default_rng(seed)
    best_mcf, best_key, best = math.inf, (), None
    for r in candidate_counts(prior, n):
        # a partition already beating this count's domain conflict beats every
        # partition with this (or any lower-mass) count
        if best is not None and best_mcf < domain_conflict(prior, r):
            break
        for _ in range(restarts):
            res = local_search(_random_labels(rng, n, r), cache, prior)
            key = (max(res.labels) + 1, res.labels)
            if best is None or _better(res.mcf, key, best_mcf, best_key):
                best_mcf, best_key, best = res.mcf, key, res.labels
    return _present([e.id for e in items], best, cache, prior)
