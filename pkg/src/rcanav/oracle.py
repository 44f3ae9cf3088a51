"""Exhaustive reference implementations used for cross-checking.

Everything here trades speed for certainty: lattices are rebuilt from
scratch by closing the full intersection system of column extents, and
relational columns are fully materialised (one column per target concept)
instead of being derived lazily. The focused engine must agree with these
results on every concept; `verify_one_step` performs that comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .algebra import Strategy, grow_all, normalize_attributes
from .model import (
    Concept,
    FormalContext,
    InputError,
    RelationalAttribute,
    RelationalContextFamily,
    ScalingOperator,
    concept_key,
    prime_objects,
)
from .neighborhood import Neighborhood, rca_step, relational_covers_of

__all__ = [
    "Lattice",
    "build_lattice",
    "scaled_context",
    "neighborhood_from_lattice",
    "rca_fixpoint",
    "verify_one_step",
    "neighborhood_differences",
]


@dataclass(frozen=True, eq=False)
class Lattice:
    """All concepts of one context plus the Hasse edges between them."""

    context_id: str
    concepts: tuple[Concept, ...]
    covers: tuple[tuple[int, int], ...]  # (lower index, upper index)
    _index: Mapping[frozenset, int] = field(init=False, repr=False)
    _up: Mapping[int, tuple[int, ...]] = field(init=False, repr=False)
    _down: Mapping[int, tuple[int, ...]] = field(init=False, repr=False)

    def __post_init__(self):
        index = {c.extent: i for i, c in enumerate(self.concepts)}
        up: dict[int, list[int]] = {i: [] for i in range(len(self.concepts))}
        down: dict[int, list[int]] = {i: [] for i in range(len(self.concepts))}
        for low, high in self.covers:
            up[low].append(high)
            down[high].append(low)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_up", {k: tuple(sorted(v)) for k, v in up.items()})
        object.__setattr__(self, "_down", {k: tuple(sorted(v)) for k, v in down.items()})

    def index_of(self, extent: Iterable[str]) -> int:
        key = frozenset(extent)
        try:
            return self._index[key]
        except KeyError:
            raise InputError(
                f"{sorted(key)} is not a concept extent of context {self.context_id!r}"
            ) from None

    def upper_covers(self, extent: Iterable[str]) -> tuple[Concept, ...]:
        return tuple(
            self.concepts[i] for i in self._up[self.index_of(extent)]
        )

    def lower_covers(self, extent: Iterable[str]) -> tuple[Concept, ...]:
        return tuple(
            self.concepts[i] for i in self._down[self.index_of(extent)]
        )

    @property
    def top(self) -> Concept:
        return max(self.concepts, key=lambda c: len(c.extent))

    @property
    def bottom(self) -> Concept:
        return min(self.concepts, key=lambda c: len(c.extent))


def build_lattice(rcf: RelationalContextFamily, ctx_id: str) -> Lattice:
    """Classic concept lattice of a context's stored incidence table.

    Closed extents are generated by intersecting column extents; intents are
    plain shared-column sets. Relational columns take part as opaque columns.
    """
    ctx = rcf.context(ctx_id)
    full = frozenset(ctx.objects)
    extents = {full}
    for attr in ctx.attributes:
        column = frozenset(o for o in ctx.objects if (o, attr) in ctx.incidence)
        extents |= {e & column for e in extents}
    concepts = tuple(
        sorted(
            (Concept(ctx_id, e, prime_objects(ctx, e)) for e in extents),
            key=concept_key,
        )
    )
    covers = []
    for i, low in enumerate(concepts):
        for j, high in enumerate(concepts):
            if not (low.extent < high.extent):
                continue
            between = any(
                low.extent < mid.extent < high.extent for mid in concepts
            )
            if not between:
                covers.append((i, j))
    return Lattice(ctx_id, concepts, tuple(sorted(covers)))


def scaled_context(
    rcf: RelationalContextFamily, strategy: Strategy, ctx_id: str
) -> FormalContext:
    """Materialise every relational column the strategy implies.

    For each (relation, operator) entry starting at ``ctx_id``, one column per
    concept of the target's lattice is added, with crosses computed directly
    from the raw relation images. The focused engine derives these columns
    lazily; here they are spelled out so a classic lattice can be built.
    """
    ctx = rcf.context(ctx_id)
    strategy.validate(rcf)
    attrs = set(ctx.attributes)
    pairs = set(ctx.incidence)
    for relation, op in strategy.entries_for(rcf, ctx_id):
        rel = rcf.relation(relation)
        target_lattice = build_lattice(rcf, rel.target)
        for concept in target_lattice.concepts:
            attr = RelationalAttribute(
                op,
                relation,
                rel.target,
                concept.extent,
                normalize_attributes(concept.intent),
                step=ctx.next_step,
            )
            crosses = []
            for obj in ctx.objects:
                image = rel.image(obj)
                if op is ScalingOperator.EXISTENTIAL:
                    qualifies = bool(image & concept.extent)
                else:
                    qualifies = bool(image) and image <= concept.extent
                if qualifies:
                    crosses.append((obj, attr))
            # a column no object carries is not an abstraction of the data;
            # the lazily derived attribute space never contains it either
            if crosses:
                attrs.add(attr)
                pairs.update(crosses)
    return FormalContext.build(ctx.id, ctx.objects, attrs, pairs)


def neighborhood_from_lattice(lattice: Lattice, extent: Iterable[str]) -> Neighborhood:
    """Read a concept's neighbourhood off an exhaustively built lattice."""
    index = lattice.index_of(extent)
    concept = lattice.concepts[index]
    intent = normalize_attributes(concept.intent)
    focus = Concept(lattice.context_id, concept.extent, intent)
    upper = tuple(
        Concept(lattice.context_id, c.extent, normalize_attributes(c.intent))
        for c in sorted(lattice.upper_covers(extent), key=concept_key)
    )
    lower = tuple(
        Concept(lattice.context_id, c.extent, normalize_attributes(c.intent))
        for c in sorted(lattice.lower_covers(extent), key=concept_key)
    )
    return Neighborhood(focus, upper, lower, relational_covers_of(intent))


def rca_fixpoint(
    rcf: RelationalContextFamily, strategy: Strategy
) -> dict[str, Lattice]:
    """Iterate grow-then-rebuild over every context until nothing changes.

    Termination is guaranteed: attribute sets only grow and are bounded by
    the possible target extents.
    """
    strategy.validate(rcf)
    current = rcf
    while True:
        before = {
            cid: len(ctx.attributes) for cid, ctx in current.contexts.items()
        }
        grown = current
        for ctx_id in sorted(current.contexts):
            grown = grow_all(grown, strategy, ctx_id)
        after = {cid: len(ctx.attributes) for cid, ctx in grown.contexts.items()}
        current = grown
        if before == after:
            break
    return {cid: build_lattice(current, cid) for cid in sorted(current.contexts)}


def _intent_signature(concept: Concept):
    """Comparable intent form. The empty extent carries the whole attribute
    order as its intent; its listed representation depends on which columns
    happen to be materialised, so it is compared as a single ⊤ marker."""
    if not concept.extent:
        return "⊤"
    signature = []
    for a in concept.intent:
        if isinstance(a, RelationalAttribute):
            signature.append((a.op.display, a.relation, tuple(sorted(a.target_extent))))
        else:
            signature.append(("intrinsic", a.name, ()))
    return sorted(signature)


def _describe_concepts(items) -> list:
    return sorted((sorted(c.extent), _intent_signature(c)) for c in items)


def neighborhood_differences(expected: Neighborhood, actual: Neighborhood) -> list[str]:
    """Human-readable mismatches between two neighbourhoods (empty if equal)."""
    issues = []
    if expected.focus.extent != actual.focus.extent:
        issues.append(
            f"focus extent {sorted(actual.focus.extent)} != {sorted(expected.focus.extent)}"
        )
    if _intent_signature(expected.focus) != _intent_signature(actual.focus):
        issues.append("focus intent differs")
    for side in ("upper", "lower"):
        exp = _describe_concepts(getattr(expected, side))
        act = _describe_concepts(getattr(actual, side))
        if exp != act:
            issues.append(f"{side} covers differ: {act} != {exp}")
    if expected.focus.extent:
        exp_rel = sorted(
            (c.relation, c.op.display, tuple(sorted(c.concept.extent)))
            for c in expected.relational
        )
        act_rel = sorted(
            (c.relation, c.op.display, tuple(sorted(c.concept.extent)))
            for c in actual.relational
        )
        if exp_rel != act_rel:
            issues.append(f"relational covers differ: {act_rel} != {exp_rel}")
    return issues


def verify_one_step(
    rcf: RelationalContextFamily, strategy: Strategy, ctx_id: str
) -> tuple[int, list[str]]:
    """Compare the focused engine against the materialised lattice.

    For every concept of the fully scaled context, the one-step neighbourhood
    computed lazily must match the one read off the exhaustive lattice.
    Returns (number of concepts checked, mismatch descriptions).
    """
    scaled = scaled_context(rcf, strategy, ctx_id)
    lattice = build_lattice(rcf.with_context(scaled), ctx_id)
    issues = []
    for concept in lattice.concepts:
        expected = neighborhood_from_lattice(lattice, concept.extent)
        _, actual = rca_step(rcf, strategy, Concept(ctx_id, concept.extent))
        for issue in neighborhood_differences(expected, actual):
            issues.append(f"extent {sorted(concept.extent)}: {issue}")
    return len(lattice.concepts), issues
