"""Focused computation of a concept and its closed neighbourhood.

One step grows the focus context along the chosen strategy, completes the
focus intent, and derives three cover families without ever enumerating a
full lattice: relational covers come straight from the maximal relational
attributes of the completed intent, lower covers from minimal transversals
of the extent's minimal generators, and upper covers from extent-minimal
closures of the extent plus one object.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .algebra import (
    Strategy,
    closure,
    extent_of,
    grow_all,
    intent_of,
    normalize_attributes,
)
from .model import (
    Concept,
    InputError,
    InvariantError,
    NotClosedError,
    RelationalAttribute,
    RelationalContextFamily,
    ScalingOperator,
    attribute_key,
    concept_key,
    set_key,
)

__all__ = [
    "RelationalCover",
    "Neighborhood",
    "GeneratorFamily",
    "min_generators",
    "min_transversals",
    "generator_family",
    "concept_from_query",
    "rca_step",
    "relational_covers_of",
]


@dataclass(frozen=True)
class RelationalCover:
    """A target concept reachable from the focus through one relation."""

    relation: str
    op: ScalingOperator
    concept: Concept


@dataclass(frozen=True)
class Neighborhood:
    """A completed focus concept with its upper, lower and relational covers."""

    focus: Concept
    upper: tuple[Concept, ...]
    lower: tuple[Concept, ...]
    relational: tuple[RelationalCover, ...]


@dataclass(frozen=True)
class GeneratorFamily:
    """Minimal generators of a closed extent and their minimal transversals."""

    extent: frozenset[str]
    generators: tuple[frozenset[str], ...]
    transversals: tuple[frozenset[str], ...]


def min_generators(
    rcf: RelationalContextFamily, ctx_id: str, objects: Iterable[str]
) -> tuple[frozenset[str], ...]:
    """All inclusion-minimal subsets of a closed extent that close back to it.

    Enumerates candidate subsets in size order, pruning supersets of
    generators already found.
    """
    extent = frozenset(objects)
    ctx = rcf.context(ctx_id)
    ctx.require_objects(extent)
    if closure(rcf, ctx_id, extent) != extent:
        raise NotClosedError(
            f"{sorted(extent)} is not a closed object set of context {ctx_id!r}"
        )
    members = sorted(extent)
    found: list[frozenset[str]] = []
    for size in range(len(members) + 1):
        for combo in itertools.combinations(members, size):
            candidate = frozenset(combo)
            if any(gen <= candidate for gen in found):
                continue
            if closure(rcf, ctx_id, candidate) == extent:
                found.append(candidate)
    return tuple(sorted(found, key=set_key))


def _inclusion_minimal(sets: Iterable[frozenset]) -> list[frozenset]:
    distinct = set(sets)
    return [s for s in distinct if not any(other < s for other in distinct)]


def min_transversals(family: Iterable[frozenset]) -> tuple[frozenset[str], ...]:
    """All inclusion-minimal sets hitting every member of ``family``.

    Berge multiplication: fold members in, extending each partial transversal
    that misses the next member, and keep the inclusion-minimal results.
    """
    members = [frozenset(m) for m in family]
    if not members:
        raise InputError("cannot compute transversals of an empty family")
    if any(not m for m in members):
        raise InputError("a family member is empty; no transversal exists")
    transversals: list[frozenset] = [frozenset()]
    for member in sorted(members, key=set_key):
        hitting = [t for t in transversals if t & member]
        extended = [
            t | {v}
            for t in transversals
            if not t & member
            for v in sorted(member)
        ]
        transversals = _inclusion_minimal(hitting + extended)
    return tuple(sorted(transversals, key=set_key))


def generator_family(
    rcf: RelationalContextFamily, ctx_id: str, objects: Iterable[str]
) -> GeneratorFamily:
    extent = frozenset(objects)
    generators = min_generators(rcf, ctx_id, extent)
    if any(not g for g in generators):
        transversals: tuple[frozenset[str], ...] = ()
    else:
        transversals = min_transversals(generators)
    return GeneratorFamily(extent, generators, transversals)


def concept_from_query(
    rcf: RelationalContextFamily, ctx_id: str, attributes: Iterable
) -> Concept:
    """The concept whose extent is selected by the queried attributes."""
    extent = extent_of(rcf, ctx_id, attributes)
    intent = intent_of(rcf, ctx_id, extent)
    return Concept(ctx_id, extent, normalize_attributes(intent))


def relational_covers_of(intent: Iterable) -> tuple[RelationalCover, ...]:
    """Relational covers read off an already-normalized intent."""
    covers = []
    relational = [a for a in intent if isinstance(a, RelationalAttribute)]
    for attr in sorted(relational, key=attribute_key):
        covers.append(
            RelationalCover(
                attr.relation,
                attr.op,
                Concept(
                    attr.target,
                    attr.target_extent,
                    normalize_attributes(attr.target_intent),
                ),
            )
        )
    return tuple(covers)


def rca_step(
    rcf: RelationalContextFamily, strategy: Strategy, focus: Concept
) -> tuple[RelationalContextFamily, Neighborhood]:
    """Grow the focus context, complete the focus, and compute its covers.

    Returns the extended family snapshot together with the neighbourhood.
    The focus extent must be closed in the extended snapshot; the empty
    extent is accepted as the degenerate bottom query even when it is not
    closed (it then has no lower covers and its upper covers are the atoms).
    """
    grown = grow_all(rcf, strategy, focus.home)
    ctx = grown.context(focus.home)
    extent = frozenset(focus.extent)
    ctx.require_objects(extent)
    if extent and closure(grown, focus.home, extent) != extent:
        raise NotClosedError(
            f"{sorted(extent)} is not a concept extent of context {focus.home!r}"
        )

    completed_intent = normalize_attributes(intent_of(grown, focus.home, extent))
    completed = Concept(focus.home, extent, completed_intent)

    relational = relational_covers_of(completed_intent)

    lower: list[Concept] = []
    if extent:
        generators = min_generators(grown, focus.home, extent)
        if not any(not g for g in generators):
            for transversal in min_transversals(generators):
                remaining = extent - transversal
                intent = intent_of(grown, focus.home, remaining)
                if extent_of(grown, focus.home, intent) != remaining:
                    raise InvariantError(
                        f"lower cover candidate {sorted(remaining)} of "
                        f"{sorted(extent)} is not closed"
                    )
                lower.append(
                    Concept(focus.home, remaining, normalize_attributes(intent))
                )
    lower.sort(key=concept_key)

    candidates: dict[frozenset[str], Concept] = {}
    for obj in ctx.objects:
        if obj in extent:
            continue
        intent = intent_of(grown, focus.home, extent | {obj})
        cand_extent = extent_of(grown, focus.home, intent)
        candidates.setdefault(
            cand_extent,
            Concept(focus.home, cand_extent, normalize_attributes(intent)),
        )
    upper = [
        c
        for c in candidates.values()
        if not any(other < c.extent for other in candidates if other != c.extent)
    ]
    upper.sort(key=concept_key)

    return grown, Neighborhood(completed, tuple(upper), tuple(lower), relational)
