"""Immutable data model for relational context families.

A relational context family couples formal contexts (objects described by
attributes) with directed object-object relations between their object sets.
Every value here is a snapshot: derivation never mutates one, and context
growth builds a replacement snapshot instead. Snapshots can therefore be
shared freely across threads.

Ordering is pinned everywhere so that outputs are reproducible: object sets
iterate lexicographically, and concepts / relational attributes follow the
canonical extent order (smaller extents first, ties broken by reverse
lexicographic member names).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Union


class InputError(ValueError):
    """An argument does not fit the snapshot it was used against."""


class UnknownNameError(InputError):
    """An object, attribute, context or relation name is not defined."""


class NotClosedError(InputError):
    """An object set that must be closed under derivation is not."""


class InvariantError(RuntimeError):
    """A structural guarantee the engine relies on was violated (a bug)."""


class ScalingOperator(Enum):
    """How a relation ties a source object to a target concept."""

    EXISTENTIAL = "∃"
    UNIVERSAL_STRICT = "∃∀"

    @property
    def display(self) -> str:
        return self.value

    @property
    def rank(self) -> int:
        return 0 if self is ScalingOperator.EXISTENTIAL else 1

    @classmethod
    def parse(cls, text: str) -> "ScalingOperator":
        key = text.strip()
        for op in cls:
            if key == op.value:
                return op
        aliases = {
            "exists": cls.EXISTENTIAL,
            "existential": cls.EXISTENTIAL,
            "e": cls.EXISTENTIAL,
            "exists-forall": cls.UNIVERSAL_STRICT,
            "universal": cls.UNIVERSAL_STRICT,
            "universal-strict": cls.UNIVERSAL_STRICT,
            "ef": cls.UNIVERSAL_STRICT,
        }
        try:
            return aliases[key.lower()]
        except KeyError:
            raise InputError(f"unknown scaling operator {text!r}") from None


@dataclass(frozen=True)
class Intrinsic:
    """A plain named attribute of a context."""

    name: str


@dataclass(frozen=True)
class RelationalAttribute:
    """A link to a target-context concept through a relation and operator.

    Identity is ``(op, relation, target_extent)``. The stored target intent
    is a snapshot taken when the attribute was created and never takes part
    in equality; ``step`` records the growth generation that introduced the
    attribute (intents created at step k only reference attributes created
    before step k, which bounds recursive derivation).
    """

    op: ScalingOperator
    relation: str
    target: str = field(compare=False)
    target_extent: frozenset[str] = field(default_factory=frozenset)
    target_intent: frozenset["Attribute"] = field(
        default_factory=frozenset, compare=False, repr=False
    )
    step: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "target_extent", frozenset(self.target_extent))
        object.__setattr__(self, "target_intent", frozenset(self.target_intent))


Attribute = Union[Intrinsic, RelationalAttribute]


def coerce_attribute(value) -> Attribute:
    if isinstance(value, (Intrinsic, RelationalAttribute)):
        return value
    if isinstance(value, str):
        return Intrinsic(value)
    raise InputError(f"cannot use {value!r} as an attribute")


@functools.total_ordering
class _Desc:
    """Wrapper inverting string comparison, for reverse-lexicographic keys."""

    __slots__ = ("value",)

    def __init__(self, value: str):
        self.value = value

    def __eq__(self, other):
        return self.value == other.value

    def __lt__(self, other):
        return self.value > other.value


def set_key(names: Iterable[str]):
    """Canonical order for object sets: by size, then reverse-lexicographic."""
    ordered = tuple(sorted(names))
    return (len(ordered), tuple(_Desc(n) for n in ordered))


def attribute_key(attr: Attribute):
    """Total order over attributes: intrinsics by name, then relational ones
    by relation, operator and canonical target-extent order."""
    if isinstance(attr, Intrinsic):
        return (0, attr.name, 0, (0, ()))
    return (1, attr.relation, attr.op.rank, set_key(attr.target_extent))


def concept_key(concept: "Concept"):
    return set_key(concept.extent)


@dataclass(frozen=True)
class Concept:
    """An extent/intent pair of one context; equality is by (home, extent)."""

    home: str
    extent: frozenset[str]
    intent: frozenset[Attribute] = field(
        default_factory=frozenset, compare=False, repr=False
    )


@dataclass(frozen=True, eq=False)
class FormalContext:
    """A named objects × attributes incidence table."""

    id: str
    objects: tuple[str, ...]
    attributes: tuple[Attribute, ...]
    incidence: frozenset[tuple[str, Attribute]]
    _rows: Mapping[str, frozenset[Attribute]] = field(init=False, repr=False)

    def __post_init__(self):
        rows: dict[str, list[Attribute]] = {o: [] for o in self.objects}
        for obj, attr in self.incidence:
            rows[obj].append(attr)
        object.__setattr__(
            self, "_rows", {o: frozenset(v) for o, v in rows.items()}
        )

    @classmethod
    def build(cls, ctx_id, objects, attributes, incidence=()) -> "FormalContext":
        objs = tuple(sorted(objects))
        if len(set(objs)) != len(objs):
            raise InputError(f"duplicate object name in context {ctx_id!r}")
        attrs = tuple(
            sorted((coerce_attribute(a) for a in attributes), key=attribute_key)
        )
        if len(set(attrs)) != len(attrs):
            raise InputError(f"duplicate attribute in context {ctx_id!r}")
        known_objects = set(objs)
        known_attrs = set(attrs)
        pairs = set()
        for obj, attr in incidence:
            attr = coerce_attribute(attr)
            if obj not in known_objects:
                raise UnknownNameError(
                    f"incidence references unknown object {obj!r} in context {ctx_id!r}"
                )
            if attr not in known_attrs:
                raise UnknownNameError(
                    f"incidence references unknown attribute {attr!r} in context {ctx_id!r}"
                )
            pairs.add((obj, attr))
        return cls(ctx_id, objs, attrs, frozenset(pairs))

    @classmethod
    def from_rows(cls, ctx_id, rows: Mapping[str, Iterable], attributes=()) -> "FormalContext":
        """Build from a mapping of object name to the attributes it has."""
        attrs = {coerce_attribute(a) for a in attributes}
        pairs = []
        for obj, row in rows.items():
            for a in row:
                a = coerce_attribute(a)
                attrs.add(a)
                pairs.append((obj, a))
        return cls.build(ctx_id, rows.keys(), attrs, pairs)

    def row(self, obj: str) -> frozenset[Attribute]:
        try:
            return self._rows[obj]
        except KeyError:
            raise UnknownNameError(
                f"unknown object {obj!r} in context {self.id!r}"
            ) from None

    def has(self, obj: str, attr: Attribute) -> bool:
        return (obj, coerce_attribute(attr)) in self.incidence

    def require_objects(self, objects: Iterable[str]) -> None:
        missing = sorted(o for o in objects if o not in self._rows)
        if missing:
            raise UnknownNameError(
                f"unknown object(s) {missing} in context {self.id!r}"
            )

    @property
    def intrinsic_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes if isinstance(a, Intrinsic))

    @property
    def relational_attributes(self) -> tuple[RelationalAttribute, ...]:
        return tuple(a for a in self.attributes if isinstance(a, RelationalAttribute))

    @property
    def next_step(self) -> int:
        return 1 + max(
            (a.step for a in self.attributes if isinstance(a, RelationalAttribute)),
            default=0,
        )


@dataclass(frozen=True, eq=False)
class RelationalContext:
    """A directed object-object relation between two contexts."""

    name: str
    source: str
    target: str
    pairs: frozenset[tuple[str, str]]
    _images: Mapping[str, frozenset[str]] = field(init=False, repr=False)

    def __post_init__(self):
        images: dict[str, set[str]] = {}
        for src, tgt in self.pairs:
            images.setdefault(src, set()).add(tgt)
        object.__setattr__(
            self, "_images", {k: frozenset(v) for k, v in images.items()}
        )

    @classmethod
    def build(cls, name, source, target, pairs=()) -> "RelationalContext":
        return cls(name, source, target, frozenset(tuple(p) for p in pairs))

    def image(self, obj: str) -> frozenset[str]:
        return self._images.get(obj, frozenset())


@dataclass(frozen=True, eq=False)
class RelationalContextFamily:
    """A set of formal contexts plus the relations connecting them."""

    contexts: Mapping[str, FormalContext]
    relations: Mapping[str, RelationalContext]

    @classmethod
    def build(cls, contexts: Iterable[FormalContext], relations=()) -> "RelationalContextFamily":
        ctx_map: dict[str, FormalContext] = {}
        for ctx in contexts:
            if ctx.id in ctx_map:
                raise InputError(f"duplicate context id {ctx.id!r}")
            ctx_map[ctx.id] = ctx
        rel_map: dict[str, RelationalContext] = {}
        for rel in relations:
            if rel.name in rel_map:
                raise InputError(f"duplicate relation name {rel.name!r}")
            for side, cid in (("source", rel.source), ("target", rel.target)):
                if cid not in ctx_map:
                    raise UnknownNameError(
                        f"relation {rel.name!r} {side} context {cid!r} is not defined"
                    )
            src, tgt = ctx_map[rel.source], ctx_map[rel.target]
            for a, b in rel.pairs:
                if a not in src._rows:
                    raise UnknownNameError(
                        f"relation {rel.name!r} pair references unknown source object {a!r}"
                    )
                if b not in tgt._rows:
                    raise UnknownNameError(
                        f"relation {rel.name!r} pair references unknown target object {b!r}"
                    )
            rel_map[rel.name] = rel
        return cls(
            dict(sorted(ctx_map.items())), dict(sorted(rel_map.items()))
        )

    def context(self, ctx_id: str) -> FormalContext:
        try:
            return self.contexts[ctx_id]
        except KeyError:
            raise UnknownNameError(f"unknown context {ctx_id!r}") from None

    def relation(self, name: str) -> RelationalContext:
        try:
            return self.relations[name]
        except KeyError:
            raise UnknownNameError(f"unknown relation {name!r}") from None

    def relations_from(self, ctx_id: str) -> tuple[RelationalContext, ...]:
        return tuple(
            rel for _, rel in sorted(self.relations.items()) if rel.source == ctx_id
        )

    def with_context(self, ctx: FormalContext) -> "RelationalContextFamily":
        replaced = dict(self.contexts)
        replaced[ctx.id] = ctx
        return RelationalContextFamily.build(replaced.values(), self.relations.values())


def prime_objects(ctx: FormalContext, objects: Iterable[str]) -> frozenset[Attribute]:
    """Attributes shared by every object of ``objects`` (incidence only);
    the empty set yields all attributes."""
    objects = list(objects)
    ctx.require_objects(objects)
    return frozenset(
        a for a in ctx.attributes if all((o, a) in ctx.incidence for o in objects)
    )


def prime_attributes(ctx: FormalContext, attributes: Iterable) -> frozenset[str]:
    """Objects possessing every attribute of ``attributes`` (incidence only);
    the empty set yields all objects."""
    attrs = [coerce_attribute(a) for a in attributes]
    known = set(ctx.attributes)
    missing = [a for a in attrs if a not in known]
    if missing:
        raise UnknownNameError(
            f"unknown attribute(s) {missing} in context {ctx.id!r}"
        )
    return frozenset(
        o for o in ctx.objects if all((o, a) in ctx.incidence for a in attrs)
    )
