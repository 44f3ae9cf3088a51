"""Derivation over implicitly known relational attributes, and context growth.

A context only stores a small number of relational attribute columns — those
pointing at object-concepts of target contexts, plus whatever strict-universal
columns growth produced. Every other relational attribute is implied: an
object carrying ``∃ r.(X₂,Y₂)`` implicitly carries every ``∃ r.(X,Y)`` with
``Y ⊆ Y₂``. The operators here (`intersect`, `intent_of`, `extent_of`)
compute with that implied downward closure while only ever materialising
maximal representatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import (
    Attribute,
    Concept,
    FormalContext,
    InputError,
    Intrinsic,
    RelationalAttribute,
    RelationalContextFamily,
    ScalingOperator,
    UnknownNameError,
    attribute_key,
    coerce_attribute,
    concept_key,
)

__all__ = [
    "Strategy",
    "normalize_attributes",
    "intersect",
    "intent_of",
    "extent_of",
    "closure",
    "object_concept",
    "object_poset",
    "grow_context",
    "grow_all",
]


@dataclass(frozen=True)
class Strategy:
    """The (relation, scaling operator) pairs guiding one exploration step."""

    entries: tuple[tuple[str, ScalingOperator], ...] = ()

    @classmethod
    def of(cls, *entries) -> "Strategy":
        normalized = set()
        for relation, op in entries:
            if not isinstance(op, ScalingOperator):
                op = ScalingOperator.parse(op)
            normalized.add((relation, op))
        return cls(tuple(sorted(normalized, key=lambda e: (e[0], e[1].rank))))

    def validate(self, rcf: RelationalContextFamily) -> None:
        for relation, _ in self.entries:
            rcf.relation(relation)

    def entries_for(self, rcf: RelationalContextFamily, source_id: str):
        """Entries whose relation starts at ``source_id``; others are ignored."""
        return tuple(
            (relation, op)
            for relation, op in self.entries
            if rcf.relation(relation).source == source_id
        )


def normalize_attributes(attrs: Iterable[Attribute]) -> frozenset[Attribute]:
    """Maximal normal form: one antichain per (operator, relation).

    A relational attribute is dropped when another one over the same relation
    and operator points at a strictly smaller target extent — the latter's
    target intent is larger, so it implies the dropped attribute.
    """
    attrs = frozenset(attrs)
    kept = set()
    for a in attrs:
        if isinstance(a, Intrinsic):
            kept.add(a)
            continue
        dominated = any(
            isinstance(b, RelationalAttribute)
            and b.op is a.op
            and b.relation == a.relation
            and b.target_extent < a.target_extent
            for b in attrs
        )
        if not dominated:
            kept.add(a)
    return frozenset(kept)


def _check_attributes(rcf: RelationalContextFamily, ctx: FormalContext, attrs) -> None:
    known = set(ctx.attributes)
    for a in attrs:
        if isinstance(a, Intrinsic):
            if a not in known:
                raise UnknownNameError(
                    f"unknown attribute {a.name!r} in context {ctx.id!r}"
                )
        else:
            rel = rcf.relation(a.relation)
            if rel.source != ctx.id:
                raise InputError(
                    f"attribute over relation {a.relation!r} does not belong to "
                    f"context {ctx.id!r}"
                )


def extent_of(rcf: RelationalContextFamily, ctx_id: str, attrs: Iterable[Attribute]) -> frozenset[str]:
    """Objects satisfying every attribute: incidence for intrinsic ones,
    ``r(o) ∩ X ≠ ∅`` for ∃, and ``∅ ≠ r(o) ⊆ X`` for ∃∀."""
    ctx = rcf.context(ctx_id)
    attrs = frozenset(coerce_attribute(a) for a in attrs)
    _check_attributes(rcf, ctx, attrs)
    objects = list(ctx.objects)
    for a in sorted(attrs, key=attribute_key):
        if isinstance(a, Intrinsic):
            objects = [o for o in objects if (o, a) in ctx.incidence]
        elif a.op is ScalingOperator.EXISTENTIAL:
            rel = rcf.relation(a.relation)
            objects = [o for o in objects if rel.image(o) & a.target_extent]
        else:
            rel = rcf.relation(a.relation)
            objects = [
                o
                for o in objects
                if rel.image(o) and rel.image(o) <= a.target_extent
            ]
    return frozenset(objects)


def _maximal(attrs: set[RelationalAttribute]) -> set[RelationalAttribute]:
    return {
        a
        for a in attrs
        if not any(b.target_extent < a.target_extent for b in attrs)
    }


def intersect(rcf: RelationalContextFamily, ctx_id: str, first, second) -> frozenset[Attribute]:
    """Meet of two attribute sets given by their maximal representatives.

    Intrinsic attributes intersect plainly. Relational attributes over the
    same relation and operator are combined pairwise: the target intents are
    intersected recursively and the resulting concept re-derived in the
    target context. Existential results keep only maximal members;
    strict-universal results keep every distinct combination.
    """
    ctx = rcf.context(ctx_id)
    a_set = frozenset(coerce_attribute(a) for a in first)
    b_set = frozenset(coerce_attribute(a) for a in second)
    _check_attributes(rcf, ctx, a_set | b_set)

    result: set[Attribute] = {
        a for a in a_set & b_set if isinstance(a, Intrinsic)
    }

    def grouped(attrs):
        groups: dict[tuple[str, ScalingOperator], list[RelationalAttribute]] = {}
        for a in attrs:
            if isinstance(a, RelationalAttribute):
                groups.setdefault((a.relation, a.op), []).append(a)
        return {
            key: sorted(members, key=attribute_key)
            for key, members in groups.items()
        }

    a_groups = grouped(a_set)
    b_groups = grouped(b_set)
    for key in sorted(
        set(a_groups) & set(b_groups), key=lambda k: (k[0], k[1].rank)
    ):
        relation, op = key
        rel = rcf.relation(relation)
        combos: set[RelationalAttribute] = set()
        for b_attr in b_groups[key]:
            for a_attr in a_groups[key]:
                meet_intent = intersect(
                    rcf, rel.target, b_attr.target_intent, a_attr.target_intent
                )
                meet_extent = extent_of(rcf, rel.target, meet_intent)
                combos.add(
                    RelationalAttribute(
                        op,
                        relation,
                        rel.target,
                        meet_extent,
                        meet_intent,
                        step=max(a_attr.step, b_attr.step),
                    )
                )
        if op is ScalingOperator.EXISTENTIAL:
            result |= _maximal(combos)
        else:
            result |= combos
    return frozenset(result)


def intent_of(rcf: RelationalContextFamily, ctx_id: str, objects: Iterable[str]) -> frozenset[Attribute]:
    """Intent of an object set, folding `intersect` over stored descriptions.

    Starts from every explicitly known attribute, so the empty set maps to
    the full attribute set (the top of the attribute order).
    """
    ctx = rcf.context(ctx_id)
    objects = frozenset(objects)
    ctx.require_objects(objects)
    attrs: frozenset[Attribute] = frozenset(ctx.attributes)
    for obj in sorted(objects):
        attrs = intersect(rcf, ctx_id, attrs, ctx.row(obj))
    return attrs


def closure(rcf: RelationalContextFamily, ctx_id: str, objects: Iterable[str]) -> frozenset[str]:
    return extent_of(rcf, ctx_id, intent_of(rcf, ctx_id, objects))


def object_concept(rcf: RelationalContextFamily, ctx_id: str, obj: str) -> Concept:
    """The lowest concept whose extent contains ``obj``."""
    ctx = rcf.context(ctx_id)
    ctx.require_objects([obj])
    intent = intent_of(rcf, ctx_id, [obj])
    extent = extent_of(rcf, ctx_id, intent)
    return Concept(ctx_id, extent, normalize_attributes(intent))


def object_poset(rcf: RelationalContextFamily, ctx_id: str) -> tuple[Concept, ...]:
    """Deduplicated object-concepts of a context, in canonical extent order."""
    ctx = rcf.context(ctx_id)
    seen: dict[frozenset[str], Concept] = {}
    for obj in ctx.objects:
        concept = object_concept(rcf, ctx_id, obj)
        seen.setdefault(concept.extent, concept)
    return tuple(sorted(seen.values(), key=concept_key))


def _growth_additions(rcf, rel, op, obj, object_concepts, step):
    """New (attribute, cross) pairs for one object under one strategy entry."""
    additions = []
    image = rel.image(obj)
    if op is ScalingOperator.EXISTENTIAL:
        for concept in object_concepts:
            if image & concept.extent:
                attr = RelationalAttribute(
                    op, rel.name, rel.target, concept.extent, concept.intent, step=step
                )
                additions.append((attr, (obj, attr)))
    else:
        if image:
            intent = intent_of(rcf, rel.target, image)
            extent = extent_of(rcf, rel.target, intent)
            attr = RelationalAttribute(
                op, rel.name, rel.target, extent, normalize_attributes(intent), step=step
            )
            additions.append((attr, (obj, attr)))
    return additions


def _extend_context(ctx: FormalContext, additions) -> FormalContext:
    if not additions:
        return ctx
    attrs = set(ctx.attributes)
    pairs = set(ctx.incidence)
    new_attrs = []
    for attr, cross in additions:
        if attr not in attrs:
            attrs.add(attr)
            new_attrs.append(attr)
        pairs.add(cross)
    if not new_attrs and pairs == ctx.incidence:
        return ctx
    # keep original attribute instances so stored intents stay stable
    merged = list(ctx.attributes) + new_attrs
    return FormalContext.build(ctx.id, ctx.objects, merged, pairs)


def grow_context(
    rcf: RelationalContextFamily,
    ctx_id: str,
    relation: str,
    op: ScalingOperator,
    obj: str,
    object_concepts: Iterable[Concept],
) -> FormalContext:
    """Extend one context with the relational attributes of a single object.

    Under ∃ every target object-concept reachable from ``obj`` becomes a
    column with a cross; under ∃∀ the closure of ``obj``'s image becomes one
    column (objects with an empty image are skipped). Re-growing adds
    nothing new.
    """
    ctx = rcf.context(ctx_id)
    rel = rcf.relation(relation)
    if rel.source != ctx_id:
        raise InputError(
            f"relation {relation!r} does not start at context {ctx_id!r}"
        )
    ctx.require_objects([obj])
    additions = _growth_additions(
        rcf, rel, op, obj, tuple(object_concepts), ctx.next_step
    )
    return _extend_context(ctx, additions)


def grow_all(
    rcf: RelationalContextFamily, strategy: Strategy, ctx_id: str
) -> RelationalContextFamily:
    """Extend ``ctx_id`` for every strategy entry it is the source of.

    Each entry's target object poset is computed once, from the snapshot
    passed in, so the result does not depend on entry order (self-loops
    included). Returns the family with the extended context; a no-op growth
    returns the family unchanged.
    """
    ctx = rcf.context(ctx_id)
    strategy.validate(rcf)
    additions = []
    step = ctx.next_step
    for relation, op in strategy.entries_for(rcf, ctx_id):
        rel = rcf.relation(relation)
        posets = object_poset(rcf, rel.target)
        for obj in ctx.objects:
            additions.extend(
                _growth_additions(rcf, rel, op, obj, posets, step)
            )
    extended = _extend_context(ctx, additions)
    if extended is ctx:
        return rcf
    return rcf.with_context(extended)
