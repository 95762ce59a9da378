"""Line-oriented text formats for categories, presheaves and morphisms.

The grammar is deliberately tiny.  Category files:

    objects: o0 o1
    mor a0: o0 -> o1
    compose a1 a0 = a2

Identities are implicit but addressable as ``id_<object>`` in compose
results.  Presheaf files start with a shape reference and list each level
and each non-identity restriction entry; the basepoint is spelled ``*`` and
its mappings stay implicit:

    shape: arrow
    at o0: * e1
    at o1: * e1 e2
    map a0: e1 -> *

Morphism files hold ``component <object>: <element> -> <element>`` lines
against a known source and target.  Blank lines and ``#`` comments are
allowed everywhere.  Parsing either returns a validated core value or
raises ParseError with the offending line number; serialization emits the
canonical form, so parse and serialize are mutually inverse on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .fincat import FiniteCategory, build_arrow, build_grid_poset, build_terminal
from .presheaf import PointedPresheaf, PointedSet, PresheafMorphism


class ParseError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class ParsedCategory:
    category: FiniteCategory
    object_names: tuple[str, ...]
    morphism_names: tuple[str, ...]

    def object_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.object_names)}

    def morphism_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.morphism_names)}


@dataclass(frozen=True)
class ParsedPresheaf:
    presheaf: PointedPresheaf
    shape: ParsedCategory
    shape_ref: str
    element_names: tuple[tuple[str, ...], ...]

    def element_index(self, obj: int) -> dict[str, int]:
        return {name: e for e, name in enumerate(self.element_names[obj])}


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            out.append((lineno, stripped))
    return out


def parse_category(text: str) -> ParsedCategory:
    lines = _content_lines(text)
    object_names: list[str] = []
    mor_decls: list[tuple[int, str, str, str]] = []
    compose_decls: list[tuple[int, str, str, str]] = []
    seen_objects_line = False
    for lineno, line in lines:
        if line.startswith("objects:"):
            if seen_objects_line:
                raise ParseError(lineno, "duplicate objects line")
            seen_objects_line = True
            object_names = line[len("objects:"):].split()
            if not object_names:
                raise ParseError(lineno, "at least one object is required")
            if len(set(object_names)) != len(object_names):
                raise ParseError(lineno, "duplicate object name")
        elif line.startswith("mor "):
            body = line[len("mor "):]
            if ":" not in body or "->" not in body:
                raise ParseError(lineno, "expected 'mor <name>: <obj> -> <obj>'")
            name, arrow = body.split(":", 1)
            src, dst = arrow.split("->", 1)
            mor_decls.append((lineno, name.strip(), src.strip(), dst.strip()))
        elif line.startswith("compose "):
            body = line[len("compose "):]
            if "=" not in body:
                raise ParseError(lineno, "expected 'compose <g> <f> = <h>'")
            left, result = body.split("=", 1)
            parts = left.split()
            if len(parts) != 2:
                raise ParseError(lineno, "expected two morphism names before '='")
            compose_decls.append((lineno, parts[0], parts[1], result.strip()))
        else:
            raise ParseError(lineno, f"unrecognized line: {line!r}")
    if not seen_objects_line:
        raise ParseError(1, "missing objects line")

    num_objects = len(object_names)
    obj_index = {name: i for i, name in enumerate(object_names)}
    morphism_names = [f"id_{name}" for name in object_names]
    dom = list(range(num_objects))
    cod = list(range(num_objects))
    for lineno, name, src, dst in mor_decls:
        if name in morphism_names:
            raise ParseError(lineno, f"duplicate morphism name {name!r}")
        if src not in obj_index:
            raise ParseError(lineno, f"unknown object {src!r}")
        if dst not in obj_index:
            raise ParseError(lineno, f"unknown object {dst!r}")
        morphism_names.append(name)
        dom.append(obj_index[src])
        cod.append(obj_index[dst])
    mor_index = {name: i for i, name in enumerate(morphism_names)}

    num = len(morphism_names)
    table: list[list[int | None]] = [[None] * num for _ in range(num)]
    for g in range(num):
        for f in range(num):
            if cod[f] != dom[g]:
                continue
            if g < num_objects:
                table[g][f] = f
            elif f < num_objects:
                table[g][f] = g
    for lineno, g_name, f_name, h_name in compose_decls:
        for name in (g_name, f_name, h_name):
            if name not in mor_index:
                raise ParseError(lineno, f"unknown morphism {name!r}")
        g, f, h = mor_index[g_name], mor_index[f_name], mor_index[h_name]
        if cod[f] != dom[g]:
            raise ParseError(lineno, f"{g_name} and {f_name} are not composable")
        if table[g][f] is not None and table[g][f] != h:
            raise ParseError(lineno, f"conflicting composite for {g_name} {f_name}")
        table[g][f] = h
    for g in range(num_objects, num):
        for f in range(num_objects, num):
            if cod[f] == dom[g] and table[g][f] is None:
                raise ParseError(
                    lines[-1][0],
                    "composition not total: missing "
                    f"compose {morphism_names[g]} {morphism_names[f]}",
                )
    category = FiniteCategory(
        num_objects=num_objects,
        dom=tuple(dom),
        cod=tuple(cod),
        identity=tuple(range(num_objects)),
        compose_table=tuple(tuple(row) for row in table),
    )
    category.validate()
    return ParsedCategory(
        category=category,
        object_names=tuple(object_names),
        morphism_names=tuple(morphism_names),
    )


def serialize_category(cat: FiniteCategory) -> str:
    names = _canonical_names(cat)
    lines = ["objects: " + " ".join(names.object_names[c] for c in cat.objects())]
    for f in cat.non_identity_morphisms():
        lines.append(
            f"mor {names.morphism_names[f]}: "
            f"{names.object_names[cat.dom[f]]} -> {names.object_names[cat.cod[f]]}"
        )
    for g in cat.non_identity_morphisms():
        for f in cat.non_identity_morphisms():
            if cat.cod[f] == cat.dom[g]:
                h = cat.compose(g, f)
                lines.append(
                    f"compose {names.morphism_names[g]} {names.morphism_names[f]}"
                    f" = {names.morphism_names[h]}"
                )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class _Names:
    object_names: tuple[str, ...]
    morphism_names: tuple[str, ...]


def _canonical_names(cat: FiniteCategory) -> _Names:
    object_names = tuple(f"o{c}" for c in cat.objects())
    morphism_names: list[str] = [""] * cat.num_morphisms
    for c in cat.objects():
        morphism_names[cat.identity[c]] = f"id_o{c}"
    for j, f in enumerate(cat.non_identity_morphisms()):
        morphism_names[f] = f"a{j}"
    return _Names(object_names=object_names, morphism_names=tuple(morphism_names))


def canonical_parsed_category(cat: FiniteCategory) -> ParsedCategory:
    names = _canonical_names(cat)
    return ParsedCategory(
        category=cat,
        object_names=names.object_names,
        morphism_names=names.morphism_names,
    )


def resolve_shape_ref(ref: str, base_dir: Path | None = None) -> ParsedCategory:
    """Turn a shape reference ('terminal', 'arrow', 'grid N', 'category PATH')
    into a named category."""
    tokens = ref.split()
    if tokens == ["terminal"]:
        return canonical_parsed_category(build_terminal())
    if tokens == ["arrow"]:
        return canonical_parsed_category(build_arrow())
    if len(tokens) == 2 and tokens[0] == "grid":
        try:
            n = int(tokens[1])
        except ValueError:
            raise ValueError(f"grid size must be an integer, got {tokens[1]!r}")
        cat, _ = build_grid_poset(n).to_category()
        return canonical_parsed_category(cat)
    if len(tokens) == 2 and tokens[0] == "category":
        path = Path(tokens[1])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return parse_category(path.read_text(encoding="utf-8"))
    raise ValueError(f"unrecognized shape reference {ref!r}")


def parse_presheaf(
    text: str,
    shape: ParsedCategory | None = None,
    base_dir: Path | None = None,
) -> ParsedPresheaf:
    lines = _content_lines(text)
    shape_ref = ""
    at_decls: list[tuple[int, str, list[str]]] = []
    map_decls: list[tuple[int, str, str, str]] = []
    for lineno, line in lines:
        if line.startswith("shape:"):
            if shape_ref:
                raise ParseError(lineno, "duplicate shape line")
            shape_ref = line[len("shape:"):].strip()
            if not shape_ref:
                raise ParseError(lineno, "empty shape reference")
        elif line.startswith("at "):
            body = line[len("at "):]
            if ":" not in body:
                raise ParseError(lineno, "expected 'at <obj>: * <elem>*'")
            obj, elems = body.split(":", 1)
            tokens = elems.split()
            if not tokens or tokens[0] != "*":
                raise ParseError(lineno, "level must start with the basepoint '*'")
            at_decls.append((lineno, obj.strip(), tokens[1:]))
        elif line.startswith("map "):
            body = line[len("map "):]
            if ":" not in body or "->" not in body:
                raise ParseError(lineno, "expected 'map <mor>: <elem> -> <elem>'")
            mor, arrow = body.split(":", 1)
            src, dst = arrow.split("->", 1)
            map_decls.append((lineno, mor.strip(), src.strip(), dst.strip()))
        else:
            raise ParseError(lineno, f"unrecognized line: {line!r}")

    if shape_ref:
        referenced = resolve_shape_ref(shape_ref, base_dir)
        if shape is not None and referenced.category != shape.category:
            raise ParseError(1, "shape reference disagrees with the supplied shape")
        shape = referenced if shape is None else shape
    if shape is None:
        raise ParseError(1, "missing shape line and no shape supplied")
    cat = shape.category
    obj_index = shape.object_index()
    mor_index = shape.morphism_index()

    element_names: list[tuple[str, ...] | None] = [None] * cat.num_objects
    at_lines: dict[int, int] = {}
    for lineno, obj, names in at_decls:
        if obj not in obj_index:
            raise ParseError(lineno, f"unknown object {obj!r}")
        c = obj_index[obj]
        if element_names[c] is not None:
            raise ParseError(lineno, f"duplicate level for object {obj!r}")
        if "*" in names or len(set(names)) != len(names):
            raise ParseError(lineno, f"element names at {obj!r} must be distinct")
        element_names[c] = ("*",) + tuple(names)
        at_lines[c] = lineno
    for c in cat.objects():
        if element_names[c] is None:
            raise ParseError(
                lines[-1][0] if lines else 1,
                f"missing level for object {shape.object_names[c]!r}",
            )
    levels = tuple(PointedSet(len(element_names[c])) for c in cat.objects())
    elem_index = [
        {name: e for e, name in enumerate(element_names[c])} for c in cat.objects()
    ]

    tables: list[list[int | None]] = [
        [None] * levels[cat.cod[f]].size for f in cat.morphisms()
    ]
    for c in cat.objects():
        tables[cat.identity[c]] = list(range(levels[c].size))
    for f in cat.morphisms():
        tables[f][0] = 0
    for lineno, mor, src, dst in map_decls:
        if mor not in mor_index:
            raise ParseError(lineno, f"unknown morphism {mor!r}")
        f = mor_index[mor]
        if cat.is_identity(f):
            raise ParseError(lineno, "identity restrictions are implicit")
        c, d = cat.dom[f], cat.cod[f]
        if src == "*":
            raise ParseError(lineno, "the basepoint must map to the basepoint")
        if src not in elem_index[d]:
            raise ParseError(lineno, f"unknown element {src!r} at the source level")
        if dst not in elem_index[c]:
            raise ParseError(lineno, f"unknown element {dst!r} at the target level")
        e = elem_index[d][src]
        if tables[f][e] is not None:
            raise ParseError(lineno, f"duplicate entry for {src!r} along {mor!r}")
        tables[f][e] = elem_index[c][dst]
    for f in cat.non_identity_morphisms():
        d = cat.cod[f]
        for e in range(1, levels[d].size):
            if tables[f][e] is None:
                raise ParseError(
                    lines[-1][0],
                    "restriction not total: missing map "
                    f"{shape.morphism_names[f]}: {element_names[d][e]}",
                )
    presheaf_value = PointedPresheaf(
        shape=cat,
        levels=levels,
        restrict=tuple(tuple(t) for t in tables),
    )
    try:
        presheaf_value.validate()
    except ValueError as exc:
        raise ParseError(at_lines.get(0, 1), str(exc)) from exc
    return ParsedPresheaf(
        presheaf=presheaf_value,
        shape=shape,
        shape_ref=shape_ref or "<supplied>",
        element_names=tuple(n for n in element_names if n is not None),
    )


def canonical_element_names(p: PointedPresheaf) -> tuple[tuple[str, ...], ...]:
    return tuple(
        ("*",) + tuple(f"e{e}" for e in range(1, p.size(c)))
        for c in p.shape.objects()
    )


def serialize_presheaf(p: PointedPresheaf, shape_ref: str) -> str:
    shape = canonical_parsed_category(p.shape)
    names = canonical_element_names(p)
    lines = [f"shape: {shape_ref}"]
    for c in p.shape.objects():
        lines.append(
            f"at {shape.object_names[c]}: " + " ".join(names[c])
        )
    for f in p.shape.non_identity_morphisms():
        c, d = p.shape.dom[f], p.shape.cod[f]
        for e in range(1, p.size(d)):
            lines.append(
                f"map {shape.morphism_names[f]}: {names[d][e]} -> "
                f"{names[c][p.restrict[f][e]]}"
            )
    return "\n".join(lines) + "\n"


def parse_morphism(
    text: str, source: ParsedPresheaf, target: ParsedPresheaf
) -> PresheafMorphism:
    if source.shape.category != target.shape.category:
        raise ValueError("source and target have different shapes")
    cat = source.shape.category
    obj_index = source.shape.object_index()
    lines = _content_lines(text)
    tables: list[list[int | None]] = [
        [None] * source.presheaf.size(c) for c in cat.objects()
    ]
    for c in cat.objects():
        tables[c][0] = 0
    src_index = [source.element_index(c) for c in cat.objects()]
    tgt_index = [target.element_index(c) for c in cat.objects()]
    for lineno, line in lines:
        if not line.startswith("component "):
            raise ParseError(lineno, f"unrecognized line: {line!r}")
        body = line[len("component "):]
        if ":" not in body or "->" not in body:
            raise ParseError(lineno, "expected 'component <obj>: <elem> -> <elem>'")
        obj, arrow = body.split(":", 1)
        src, dst = arrow.split("->", 1)
        obj, src, dst = obj.strip(), src.strip(), dst.strip()
        if obj not in obj_index:
            raise ParseError(lineno, f"unknown object {obj!r}")
        c = obj_index[obj]
        if src == "*":
            raise ParseError(lineno, "the basepoint must map to the basepoint")
        if src not in src_index[c]:
            raise ParseError(lineno, f"unknown element {src!r} at the source level")
        if dst not in tgt_index[c]:
            raise ParseError(lineno, f"unknown element {dst!r} at the target level")
        e = src_index[c][src]
        if tables[c][e] is not None:
            raise ParseError(lineno, f"duplicate entry for {src!r} at {obj!r}")
        tables[c][e] = tgt_index[c][dst]
    for c in cat.objects():
        for e in range(1, source.presheaf.size(c)):
            if tables[c][e] is None:
                raise ParseError(
                    lines[-1][0] if lines else 1,
                    f"component not total at object {source.shape.object_names[c]!r}",
                )
    morphism = PresheafMorphism(
        source=source.presheaf,
        target=target.presheaf,
        components=tuple(tuple(t) for t in tables),
    )
    try:
        morphism.validate()
    except ValueError as exc:
        raise ParseError(lines[0][0] if lines else 1, str(exc)) from exc
    return morphism


def serialize_morphism(m: PresheafMorphism) -> str:
    shape = canonical_parsed_category(m.source.shape)
    src_names = canonical_element_names(m.source)
    tgt_names = canonical_element_names(m.target)
    lines = []
    for c in m.source.shape.objects():
        for e in range(1, m.source.size(c)):
            lines.append(
                f"component {shape.object_names[c]}: {src_names[c][e]} -> "
                f"{tgt_names[c][m.components[c][e]]}"
            )
    return "\n".join(lines) + "\n" if lines else ""
