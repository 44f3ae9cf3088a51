"""Serialization, deterministic concept naming, and neighbourhood export.

Two interchangeable document forms describe a relational context family:

* a JSON form (``{"format": "rcf/1", "contexts": [...], "relations": [...]}``)
  used by the HTTP service, and
* a line-oriented cross-table text form convenient for authoring fixtures by
  hand.

Both parse into the same model and reject malformed input with
machine-readable, position-bearing errors. Concept names (``C_<ctx>_<n>``)
are handed out by a session-scoped registry in first-seen order, so the same
extent always renders under the same name within a session.
"""

from __future__ import annotations

import json
import re
from typing import Iterable

from .model import (
    Attribute,
    Concept,
    FormalContext,
    InputError,
    Intrinsic,
    RelationalAttribute,
    RelationalContext,
    RelationalContextFamily,
    attribute_key,
)
from .neighborhood import Neighborhood

__all__ = [
    "ParseError",
    "parse_rcf",
    "serialize_rcf_json",
    "serialize_rcf_table",
    "ConceptRegistry",
    "concept_name",
    "attribute_display",
    "concept_payload",
    "neighborhood_payload",
    "export_neighborhood_dot",
]

FORMAT_TAG = "rcf/1"


class ParseError(InputError):
    """A document problem, carrying a machine code and a position."""

    def __init__(self, code, message, line=None, column=None, path=None):
        self.code = code
        self.line = line
        self.column = column
        self.path = path
        super().__init__(message)

    def __str__(self):
        where = ""
        if self.line is not None:
            where = f" (line {self.line}"
            if self.column is not None:
                where += f", column {self.column}"
            where += ")"
        elif self.path:
            where = f" (at {self.path})"
        return f"[{self.code}] {self.args[0]}{where}"

    def to_payload(self) -> dict:
        payload = {"code": self.code, "message": self.args[0]}
        if self.line is not None:
            payload["line"] = self.line
        if self.column is not None:
            payload["column"] = self.column
        if self.path is not None:
            payload["path"] = self.path
        return payload


def parse_rcf(text: str) -> RelationalContextFamily:
    """Parse either document form, sniffing JSON by its leading brace."""
    if text.lstrip().startswith("{"):
        return parse_rcf_json(text)
    return parse_rcf_table(text)


# ---------------------------------------------------------------------------
# JSON form


def _require_fields(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise ParseError("bad-type", f"expected an object at {path}", path=path)
    for key in obj:
        if key not in required and key not in optional:
            raise ParseError(
                "unknown-field", f"unknown field {key!r}", path=f"{path}.{key}"
            )
    for key in required:
        if key not in obj:
            raise ParseError(
                "missing-field", f"missing field {key!r}", path=f"{path}.{key}"
            )


def _string_list(value, path):
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError("bad-type", f"expected a list of strings at {path}", path=path)
    return value


def _pair_list(value, path):
    if not isinstance(value, list):
        raise ParseError("bad-type", f"expected a list of pairs at {path}", path=path)
    pairs = []
    for i, item in enumerate(value):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(v, str) for v in item)
        ):
            raise ParseError(
                "bad-type",
                "expected a [string, string] pair",
                path=f"{path}[{i}]",
            )
        pairs.append((item[0], item[1]))
    return pairs


def parse_rcf_json(text: str) -> RelationalContextFamily:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("syntax", exc.msg, line=exc.lineno, column=exc.colno) from None
    _require_fields(doc, "$", ("format", "contexts"), ("relations",))
    if doc["format"] != FORMAT_TAG:
        raise ParseError(
            "bad-version",
            f"unsupported format {doc['format']!r}, expected {FORMAT_TAG!r}",
            path="$.format",
        )
    if not isinstance(doc["contexts"], list):
        raise ParseError("bad-type", "contexts must be a list", path="$.contexts")

    contexts = []
    seen_ctx: dict[str, str] = {}
    objects_by_ctx: dict[str, set[str]] = {}
    for i, entry in enumerate(doc["contexts"]):
        path = f"$.contexts[{i}]"
        _require_fields(entry, path, ("id", "objects", "attributes"), ("incidence",))
        ctx_id = entry["id"]
        if not isinstance(ctx_id, str):
            raise ParseError("bad-type", "context id must be a string", path=f"{path}.id")
        if ctx_id in seen_ctx:
            raise ParseError(
                "duplicate-name", f"context {ctx_id!r} defined twice", path=f"{path}.id"
            )
        seen_ctx[ctx_id] = path
        objects = _string_list(entry["objects"], f"{path}.objects")
        attributes = _string_list(entry["attributes"], f"{path}.attributes")
        if len(set(objects)) != len(objects):
            raise ParseError(
                "duplicate-name", "duplicate object name", path=f"{path}.objects"
            )
        if len(set(attributes)) != len(attributes):
            raise ParseError(
                "duplicate-name", "duplicate attribute name", path=f"{path}.attributes"
            )
        incidence = _pair_list(entry.get("incidence", []), f"{path}.incidence")
        for j, (obj, attr) in enumerate(incidence):
            if obj not in set(objects):
                raise ParseError(
                    "unknown-name",
                    f"incidence references unknown object {obj!r}",
                    path=f"{path}.incidence[{j}]",
                )
            if attr not in set(attributes):
                raise ParseError(
                    "unknown-name",
                    f"incidence references unknown attribute {attr!r}",
                    path=f"{path}.incidence[{j}]",
                )
        objects_by_ctx[ctx_id] = set(objects)
        contexts.append(FormalContext.build(ctx_id, objects, attributes, incidence))

    relations = []
    seen_rel: set[str] = set()
    for i, entry in enumerate(doc.get("relations", [])):
        path = f"$.relations[{i}]"
        _require_fields(entry, path, ("name", "source", "target"), ("pairs",))
        name = entry["name"]
        if name in seen_rel:
            raise ParseError(
                "duplicate-name", f"relation {name!r} defined twice", path=f"{path}.name"
            )
        seen_rel.add(name)
        for side in ("source", "target"):
            if entry[side] not in objects_by_ctx:
                raise ParseError(
                    "dangling-endpoint",
                    f"relation {name!r} {side} context {entry[side]!r} is not defined",
                    path=f"{path}.{side}",
                )
        pairs = _pair_list(entry.get("pairs", []), f"{path}.pairs")
        for j, (src, tgt) in enumerate(pairs):
            if src not in objects_by_ctx[entry["source"]]:
                raise ParseError(
                    "dangling-endpoint",
                    f"relation {name!r} references unknown source object {src!r}",
                    path=f"{path}.pairs[{j}]",
                )
            if tgt not in objects_by_ctx[entry["target"]]:
                raise ParseError(
                    "dangling-endpoint",
                    f"relation {name!r} references unknown target object {tgt!r}",
                    path=f"{path}.pairs[{j}]",
                )
        relations.append(
            RelationalContext.build(name, entry["source"], entry["target"], pairs)
        )

    return RelationalContextFamily.build(contexts, relations)


def _intrinsic_names(ctx: FormalContext) -> list[str]:
    grown = [a for a in ctx.attributes if not isinstance(a, Intrinsic)]
    if grown:
        raise InputError(
            f"context {ctx.id!r} carries grown relational attributes and "
            "cannot be serialized"
        )
    return list(ctx.intrinsic_names)


def serialize_rcf_json(rcf: RelationalContextFamily) -> str:
    doc = {
        "format": FORMAT_TAG,
        "contexts": [
            {
                "id": ctx.id,
                "objects": list(ctx.objects),
                "attributes": _intrinsic_names(ctx),
                "incidence": sorted(
                    [obj, attr.name] for obj, attr in ctx.incidence
                ),
            }
            for _, ctx in sorted(rcf.contexts.items())
        ],
        "relations": [
            {
                "name": rel.name,
                "source": rel.source,
                "target": rel.target,
                "pairs": sorted([a, b] for a, b in rel.pairs),
            }
            for _, rel in sorted(rcf.relations.items())
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Cross-table text form

_CROSS_MARKS = {"x": True, "X": True, ".": False, "-": False}


def _split_names(raw: str) -> list[str]:
    if not raw.strip():
        return []
    return [part.strip() for part in raw.split("|")]


def _parse_marks(marks_part: str, line_no: int, offset: int, count: int, what: str):
    tokens = list(re.finditer(r"\S+", marks_part))
    if len(tokens) != count:
        raise ParseError(
            "bad-row",
            f"{what} row has {len(tokens)} marks, expected {count}",
            line=line_no,
        )
    flags = []
    for match in tokens:
        token = match.group()
        if token not in _CROSS_MARKS:
            raise ParseError(
                "bad-mark",
                f"unexpected mark {token!r} (use 'x' or '.')",
                line=line_no,
                column=offset + match.start() + 1,
            )
        flags.append(_CROSS_MARKS[token])
    return flags


def parse_rcf_table(text: str) -> RelationalContextFamily:
    contexts: list[FormalContext] = []
    relations: list[RelationalContext] = []
    objects_by_ctx: dict[str, list[str]] = {}

    section = None  # ("context", id, attrs, rows) | ("relation", name, src, tgt, targets, rows)
    saw_header = False

    def finish_section():
        nonlocal section
        if section is None:
            return
        if section[0] == "context":
            _, ctx_id, attrs, rows, line_no = section
            if any(ctx.id == ctx_id for ctx in contexts):
                raise ParseError(
                    "duplicate-name", f"context {ctx_id!r} defined twice", line=line_no
                )
            objects_by_ctx[ctx_id] = [obj for obj, _ in rows]
            incidence = [
                (obj, attr)
                for obj, flags in rows
                for attr, flag in zip(attrs, flags)
                if flag
            ]
            try:
                contexts.append(
                    FormalContext.build(ctx_id, [o for o, _ in rows], attrs, incidence)
                )
            except InputError as exc:
                raise ParseError("duplicate-name", str(exc), line=line_no) from None
        else:
            _, name, src, tgt, targets, rows, line_no = section
            if any(rel.name == name for rel in relations):
                raise ParseError(
                    "duplicate-name", f"relation {name!r} defined twice", line=line_no
                )
            for side, cid in (("source", src), ("target", tgt)):
                if cid not in objects_by_ctx:
                    raise ParseError(
                        "dangling-endpoint",
                        f"relation {name!r} {side} context {cid!r} is not defined",
                        line=line_no,
                    )
            for target in targets:
                if target not in objects_by_ctx[tgt]:
                    raise ParseError(
                        "dangling-endpoint",
                        f"relation {name!r} references unknown target object {target!r}",
                        line=line_no,
                    )
            pairs = []
            for obj, flags, row_line in rows:
                if obj not in objects_by_ctx[src]:
                    raise ParseError(
                        "dangling-endpoint",
                        f"relation {name!r} references unknown source object {obj!r}",
                        line=row_line,
                    )
                pairs.extend(
                    (obj, target) for target, flag in zip(targets, flags) if flag
                )
            relations.append(RelationalContext.build(name, src, tgt, pairs))
        section = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("rcf"):
            if stripped != "rcf v1":
                raise ParseError(
                    "bad-version", f"unsupported header {stripped!r}", line=line_no
                )
            saw_header = True
            continue
        if stripped.startswith("context "):
            finish_section()
            section = ("context", stripped[len("context "):].strip(), None, [], line_no)
            continue
        if stripped.startswith("relation "):
            finish_section()
            m = re.match(r"relation\s+(.+?)\s*:\s*(.+?)\s*->\s*(.+)$", stripped)
            if not m:
                raise ParseError(
                    "syntax",
                    "expected 'relation <name> : <source> -> <target>'",
                    line=line_no,
                )
            section = ("relation", m.group(1), m.group(2), m.group(3), None, [], line_no)
            continue
        if section is None:
            raise ParseError("syntax", f"unexpected line {stripped!r}", line=line_no)
        if section[0] == "context":
            if stripped.startswith("attributes:"):
                if section[2] is not None:
                    raise ParseError(
                        "syntax", "attributes listed twice", line=line_no
                    )
                section = (
                    section[0],
                    section[1],
                    _split_names(stripped[len("attributes:"):]),
                    section[3],
                    section[4],
                )
                continue
            if section[2] is None:
                raise ParseError(
                    "syntax", "expected an 'attributes:' line first", line=line_no
                )
            obj, sep, marks = line.rpartition(":")
            if not sep:
                raise ParseError(
                    "syntax", "expected '<object> : <marks>'", line=line_no
                )
            flags = _parse_marks(
                marks, line_no, len(obj) + 1, len(section[2]), "object"
            )
            section[3].append((obj.strip(), flags))
        else:
            if stripped.startswith("targets:"):
                if section[4] is not None:
                    raise ParseError("syntax", "targets listed twice", line=line_no)
                section = section[:4] + (
                    _split_names(stripped[len("targets:"):]),
                    section[5],
                    section[6],
                )
                continue
            if section[4] is None:
                raise ParseError(
                    "syntax", "expected a 'targets:' line first", line=line_no
                )
            obj, sep, marks = line.rpartition(":")
            if not sep:
                raise ParseError(
                    "syntax", "expected '<object> : <marks>'", line=line_no
                )
            flags = _parse_marks(
                marks, line_no, len(obj) + 1, len(section[4]), "relation"
            )
            section[5].append((obj.strip(), flags, line_no))
    finish_section()
    if not saw_header:
        raise ParseError("syntax", "missing 'rcf v1' header", line=1)
    return RelationalContextFamily.build(contexts, relations)


def serialize_rcf_table(rcf: RelationalContextFamily) -> str:
    lines = ["rcf v1", ""]
    for _, ctx in sorted(rcf.contexts.items()):
        names = _intrinsic_names(ctx)
        lines.append(f"context {ctx.id}")
        lines.append("  attributes: " + " | ".join(names))
        for obj in ctx.objects:
            marks = " ".join(
                "x" if (obj, Intrinsic(a)) in ctx.incidence else "." for a in names
            )
            lines.append(f"  {obj} : {marks}".rstrip())
        lines.append("")
    for _, rel in sorted(rcf.relations.items()):
        targets = list(rcf.context(rel.target).objects)
        lines.append(f"relation {rel.name} : {rel.source} -> {rel.target}")
        lines.append("  targets: " + " | ".join(targets))
        for obj in rcf.context(rel.source).objects:
            marks = " ".join(
                "x" if (obj, t) in rel.pairs else "." for t in targets
            )
            lines.append(f"  {obj} : {marks}".rstrip())
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Concept naming and rendering


class ConceptRegistry:
    """Session-scoped name table: the same extent always maps to one name."""

    def __init__(self):
        self._names: dict[tuple[str, frozenset[str]], str] = {}
        self._extents: dict[str, tuple[str, frozenset[str]]] = {}
        self._counters: dict[str, int] = {}

    def name(self, ctx_id: str, extent: Iterable[str]) -> str:
        key = (ctx_id, frozenset(extent))
        found = self._names.get(key)
        if found is None:
            self._counters[ctx_id] = self._counters.get(ctx_id, 0) + 1
            found = f"C_{ctx_id}_{self._counters[ctx_id]}"
            self._names[key] = found
            self._extents[found] = key
        return found

    def lookup(self, name: str):
        """(context id, extent) for a previously issued name, else None."""
        return self._extents.get(name)


def concept_name(ctx_id: str, concept: Concept, registry: ConceptRegistry) -> str:
    return registry.name(ctx_id, concept.extent)


def attribute_display(attr: Attribute, registry: ConceptRegistry) -> str:
    if isinstance(attr, Intrinsic):
        return attr.name
    target_name = registry.name(attr.target, attr.target_extent)
    return f"{attr.op.display} {attr.relation}.({target_name})"


def _intent_entries(intent, registry: ConceptRegistry) -> list[dict]:
    entries = []
    for attr in sorted(intent, key=attribute_key):
        if isinstance(attr, Intrinsic):
            entries.append({"kind": "intrinsic", "name": attr.name})
        else:
            entries.append(
                {
                    "kind": "relational",
                    "op": attr.op.display,
                    "relation": attr.relation,
                    "display": attribute_display(attr, registry),
                    "target": {
                        "context": attr.target,
                        "name": registry.name(attr.target, attr.target_extent),
                        "extent": sorted(attr.target_extent),
                    },
                }
            )
    return entries


def concept_payload(concept: Concept, registry: ConceptRegistry) -> dict:
    return {
        "name": registry.name(concept.home, concept.extent),
        "context": concept.home,
        "extent": sorted(concept.extent),
        "intent": _intent_entries(concept.intent, registry),
    }


def neighborhood_payload(
    neighborhood: Neighborhood, registry: ConceptRegistry, warning: bool = False
) -> dict:
    return {
        "context": neighborhood.focus.home,
        "warning": warning,
        "focus": concept_payload(neighborhood.focus, registry),
        "upper": [concept_payload(c, registry) for c in neighborhood.upper],
        "lower": [concept_payload(c, registry) for c in neighborhood.lower],
        "relational": [
            {
                "relation": cover.relation,
                "op": cover.op.display,
                "concept": concept_payload(cover.concept, registry),
            }
            for cover in neighborhood.relational
        ],
    }


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _dot_quote(text: str) -> str:
    return '"' + _dot_escape(text) + '"'


def _dot_label(name: str, concept: Concept) -> str:
    members = ", ".join(sorted(concept.extent))
    return '"' + _dot_escape(name) + "\\n{" + _dot_escape(members) + '}"'


def export_neighborhood_dot(
    neighborhood: Neighborhood, registry: ConceptRegistry
) -> str:
    """Render the focus and its covers as a byte-stable DOT digraph.

    Solid edges point from subconcept to superconcept; dashed edges carry the
    relation and operator of relational covers.
    """
    focus = neighborhood.focus
    focus_name = registry.name(focus.home, focus.extent)
    lines = [
        "digraph neighborhood {",
        "  rankdir=BT;",
        "  node [shape=box, fontname=\"Helvetica\"];",
        f"  {_dot_quote(focus_name)} [label={_dot_label(focus_name, focus)}, penwidth=2];",
    ]
    for concept in neighborhood.upper:
        name = registry.name(concept.home, concept.extent)
        lines.append(f"  {_dot_quote(name)} [label={_dot_label(name, concept)}];")
    for concept in neighborhood.lower:
        name = registry.name(concept.home, concept.extent)
        lines.append(f"  {_dot_quote(name)} [label={_dot_label(name, concept)}];")
    for cover in neighborhood.relational:
        name = registry.name(cover.concept.home, cover.concept.extent)
        lines.append(
            f"  {_dot_quote(name)} [label={_dot_label(name, cover.concept)}, style=rounded];"
        )
    for concept in neighborhood.upper:
        name = registry.name(concept.home, concept.extent)
        lines.append(f"  {_dot_quote(focus_name)} -> {_dot_quote(name)};")
    for concept in neighborhood.lower:
        name = registry.name(concept.home, concept.extent)
        lines.append(f"  {_dot_quote(name)} -> {_dot_quote(focus_name)};")
    for cover in neighborhood.relational:
        name = registry.name(cover.concept.home, cover.concept.extent)
        label = _dot_quote(f"{cover.op.display} {cover.relation}")
        lines.append(
            f"  {_dot_quote(focus_name)} -> {_dot_quote(name)} "
            f"[style=dashed, label={label}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
