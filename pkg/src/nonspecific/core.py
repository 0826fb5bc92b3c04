"""Belief-function algebra over two-part propositions.

A proposition is the conjunction of an *action part* (a subset of the action
atoms) and an *event part* (a subset of the event labels).  Two propositions
intersect componentwise and the result is the contradiction as soon as either
component becomes empty.  The frame of discernment is therefore the product
``action_atoms x events``.

Mass functions never store the frame itself as a focal element; whatever mass
is left over belongs to it implicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import (
    FrameMismatchError,
    InputError,
    InvalidPropositionError,
    MassSumError,
    ResourceLimitError,
    TotalConflictError,
)

EPS = 1e-9
DROP_BELOW = 1e-12
DEFAULT_PRODUCT_CAP = 10**7


@dataclass(frozen=True)
class Frame:
    action_atoms: tuple[str, ...]
    events: tuple[str, ...]

    def __post_init__(self):
        atoms = tuple(self.action_atoms)
        events = tuple(self.events)
        object.__setattr__(self, "action_atoms", atoms)
        object.__setattr__(self, "events", events)
        if not atoms or not events:
            raise InputError("frame needs at least one action atom and one event")
        if len(set(atoms)) != len(atoms):
            raise InputError(f"duplicate action atoms in {atoms}")
        if len(set(events)) != len(events):
            raise InputError(f"duplicate event labels in {events}")

    @property
    def theta(self) -> Proposition:
        return Proposition(self, frozenset(self.action_atoms), frozenset(self.events))

    @property
    def size(self) -> int:
        """Number of atoms of the product frame."""
        return len(self.action_atoms) * len(self.events)

    def proposition(self, action: Iterable[str] | None = None,
                    events: Iterable[str] | None = None) -> Proposition:
        """Build a proposition; ``None`` for a component means the whole component."""
        a = frozenset(self.action_atoms if action is None else action)
        e = frozenset(self.events if events is None else events)
        return Proposition(self, a, e)


@dataclass(frozen=True)
class Proposition:
    frame: Frame
    action: frozenset
    events: frozenset

    def __post_init__(self):
        object.__setattr__(self, "action", frozenset(self.action))
        object.__setattr__(self, "events", frozenset(self.events))
        unknown = self.action.difference(self.frame.action_atoms)
        if unknown:
            raise InvalidPropositionError(f"unknown action atoms {sorted(unknown)}")
        unknown = self.events.difference(self.frame.events)
        if unknown:
            raise InvalidPropositionError(f"unknown events {sorted(unknown)}")

    @property
    def is_empty(self) -> bool:
        return not self.action or not self.events

    @property
    def is_theta(self) -> bool:
        return (len(self.action) == len(self.frame.action_atoms)
                and len(self.events) == len(self.frame.events))

    @property
    def size(self) -> int:
        return len(self.action) * len(self.events)

    def issubset(self, other: Proposition) -> bool:
        if self.is_empty:
            return True
        return self.action <= other.action and self.events <= other.events

    def sort_key(self) -> tuple:
        atoms = self.frame.action_atoms
        events = self.frame.events
        return (tuple(sorted(atoms.index(a) for a in self.action)),
                tuple(sorted(events.index(e) for e in self.events)))

    def __repr__(self) -> str:
        a = ",".join(x for x in self.frame.action_atoms if x in self.action)
        e = ",".join(x for x in self.frame.events if x in self.events)
        return f"<{{{a}}} & {{{e}}}>"


def _check_frame(frame: Frame, other: Frame) -> None:
    if frame != other:
        raise FrameMismatchError("objects are defined over different frames")


def intersect(p: Proposition, q: Proposition) -> Proposition:
    """Componentwise intersection; check ``.is_empty`` on the result."""
    _check_frame(p.frame, q.frame)
    return Proposition(p.frame, p.action & q.action, p.events & q.events)


class MassFunction:
    """A basic probability assignment with an implicit remainder on the frame.

    ``focal`` may be a mapping or an iterable of ``(proposition, mass)``
    pairs; repeated propositions are summed and masses given to the whole
    frame are folded into the remainder.
    """

    __slots__ = ("frame", "_focal", "_theta")

    def __init__(self, frame: Frame,
                 focal: Mapping[Proposition, float] | Iterable[tuple[Proposition, float]] = ()):
        items = focal.items() if isinstance(focal, Mapping) else focal
        acc: dict[Proposition, float] = {}
        for prop, mass in items:
            _check_frame(frame, prop.frame)
            mass = float(mass)
            if not math.isfinite(mass) or mass < -DROP_BELOW:
                raise InputError(f"invalid mass {mass!r} for {prop!r}")
            if prop.is_theta:
                continue
            if prop.is_empty:
                if mass > DROP_BELOW:
                    raise InvalidPropositionError("the empty proposition cannot carry mass")
                continue
            acc[prop] = acc.get(prop, 0.0) + mass
        acc = {p: m for p, m in acc.items() if m > DROP_BELOW}
        total = math.fsum(acc.values())
        if total > 1.0 + EPS:
            raise MassSumError(f"focal masses sum to {total:.12g} > 1")
        ordered = dict(sorted(acc.items(), key=lambda kv: kv[0].sort_key()))
        self.frame = frame
        self._focal = MappingProxyType(ordered)
        self._theta = max(0.0, 1.0 - total)

    @classmethod
    def vacuous(cls, frame: Frame) -> MassFunction:
        return cls(frame)

    @classmethod
    def simple(cls, prop: Proposition, mass: float) -> MassFunction:
        """Simple support function: ``mass`` on ``prop``, the rest on the frame."""
        return cls(prop.frame, [(prop, mass)])

    @property
    def focal(self) -> Mapping[Proposition, float]:
        return self._focal

    @property
    def theta_mass(self) -> float:
        return self._theta

    def items(self, include_theta: bool = True) -> list[tuple[Proposition, float]]:
        out = list(self._focal.items())
        if include_theta and self._theta > DROP_BELOW:
            out.append((self.frame.theta, self._theta))
        return out

    def __len__(self) -> int:
        """Number of focal elements, the frame included when it carries mass."""
        return len(self._focal) + (1 if self._theta > DROP_BELOW else 0)

    def __getitem__(self, prop: Proposition) -> float:
        if prop.is_theta:
            return self._theta
        return self._focal.get(prop, 0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MassFunction):
            return NotImplemented
        return self.frame == other.frame and dict(self._focal) == dict(other._focal)

    def __hash__(self):
        return hash((self.frame, tuple(self._focal.items())))

    def isclose(self, other: MassFunction, tol: float = EPS) -> bool:
        if self.frame != other.frame:
            return False
        keys = set(self._focal) | set(other._focal)
        return (all(abs(self[k] - other[k]) <= tol for k in keys)
                and abs(self._theta - other._theta) <= tol)

    def __repr__(self) -> str:
        parts = [f"{p!r}: {m:.6g}" for p, m in self._focal.items()]
        parts.append(f"Theta: {self._theta:.6g}")
        return "MassFunction({" + ", ".join(parts) + "})"


@dataclass(frozen=True)
class Evidence:
    id: str
    bpa: MassFunction


class EvidenceStore:
    """An ordered collection of evidence with a one-way *discounted* flag.

    Once any falsity discount has been applied the store must never be
    partitioned again; :func:`nonspecific.metaconflict.minimize` refuses it.
    """

    def __init__(self, evidences: Iterable[Evidence]):
        self._items = tuple(evidences)
        ids = [e.id for e in self._items]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate evidence ids")
        self._discounted = False

    @property
    def discounted(self) -> bool:
        return self._discounted

    def mark_discounted(self) -> None:
        self._discounted = True

    def replace(self, evidences: Iterable[Evidence]) -> None:
        new = tuple(evidences)
        if [e.id for e in new] != [e.id for e in self._items]:
            raise InputError("replacement must keep the same evidence ids in order")
        self._items = new

    def __iter__(self):
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __getitem__(self, i):
        return self._items[i]


# -- combination -----------------------------------------------------------

def _table(bpa: MassFunction) -> dict[tuple[frozenset, frozenset], float]:
    return {(p.action, p.events): m for p, m in bpa.items()}


def _conjunctive(bpas: Sequence[MassFunction], cap: int):
    """Unnormalized conjunctive combination; returns (table, empty mass)."""
    if not bpas:
        raise InputError("need at least one mass function")
    frame = bpas[0].frame
    for b in bpas[1:]:
        _check_frame(frame, b.frame)
    n_products = 1
    for b in bpas:
        n_products *= len(b)
        if n_products > cap:
            raise ResourceLimitError(
                f"focal cross product exceeds cap {cap}; reduce the subset or raise the cap")
    acc = _table(bpas[0])
    empty = 0.0
    for b in bpas[1:]:
        nxt: dict[tuple[frozenset, frozenset], float] = {}
        other = _table(b)
        for (a1, e1), m1 in acc.items():
            for (a2, e2), m2 in other.items():
                a = a1 & a2
                e = e1 & e2
                if not a or not e:
                    empty += m1 * m2
                else:
                    key = (a, e)
                    nxt[key] = nxt.get(key, 0.0) + m1 * m2
        acc = nxt
    return acc, empty


def combine(bpas: Sequence[MassFunction], cap: int = DEFAULT_PRODUCT_CAP
            ) -> tuple[MassFunction, float]:
    """Dempster's rule over any number of mass functions.

    Returns the normalized combination together with the conflict ``k``.
    """
    acc, k = _conjunctive(bpas, cap)
    if k >= 1.0 - EPS:
        raise TotalConflictError(f"total conflict in Dempster's rule (k = {k:.12g})")
    frame = bpas[0].frame
    norm = 1.0 - k
    focal = [(Proposition(frame, a, e), m / norm) for (a, e), m in acc.items()]
    return MassFunction(frame, focal), k


def conflict(bpas: Sequence[MassFunction], cap: int = DEFAULT_PRODUCT_CAP) -> float:
    """Mass Dempster's rule would send to the empty set (no normalization)."""
    if len(bpas) <= 1:
        if bpas:
            return 0.0
        raise InputError("need at least one mass function")
    _, k = _conjunctive(bpas, cap)
    return min(1.0, k)


def belief(bpa: MassFunction, p: Proposition) -> float:
    _check_frame(bpa.frame, p.frame)
    if p.is_empty:
        raise InvalidPropositionError("belief of the empty proposition is undefined here")
    if p.is_theta:
        return 1.0
    return math.fsum(m for q, m in bpa.focal.items() if q.issubset(p))


def plausibility(bpa: MassFunction, p: Proposition) -> float:
    _check_frame(bpa.frame, p.frame)
    if p.is_empty:
        raise InvalidPropositionError("plausibility of the empty proposition is undefined here")
    total = bpa.theta_mass
    total += math.fsum(m for q, m in bpa.focal.items()
                       if (q.action & p.action) and (q.events & p.events))
    return min(1.0, total)


def discount(bpa: MassFunction, alpha: float) -> MassFunction:
    """Scale every non-frame mass by ``alpha``; the removed mass goes to the frame."""
    if not 0.0 <= alpha <= 1.0:
        raise InputError(f"discount factor must lie in [0, 1], got {alpha!r}")
    return MassFunction(bpa.frame, [(p, alpha * m) for p, m in bpa.focal.items()])


def entropy(bpa: MassFunction) -> float:
    """Average total uncertainty: nonspecificity plus scattering, in bits.

    ``|A|`` counts the product-frame atoms covered by ``A``.
    """
    h = 0.0
    for p, m in bpa.items():
        h += m * math.log2(p.size) - m * math.log2(m)
    return h
