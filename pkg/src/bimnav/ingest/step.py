"""Reader for the STEP (ISO-10303-21) subset the engine understands.

Only three product classes are recognised: IFCSPACE, IFCDOOR and
IFCFURNISHINGELEMENT. For each one we pull the Name and Description
attributes, resolve IFCLOCALPLACEMENT chains to an absolute anchor point,
and reduce any referenced geometry (bounding boxes, extruded profiles,
polylines) to a world-frame vertex bounding box. No solid modelling, no
schema coverage beyond that; unknown records are kept only as link targets
for the graph walk.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from ..errors import MalformedStep, UnsupportedSchema
from ..geometry import Aabb, Point3, aabb_of_points
from .model import BimModel, IfcClass, RawElement

LOGGER = logging.getLogger(__name__)

# Attribute slots shared by all three product classes.
_ATTR_NAME = 2
_ATTR_DESCRIPTION = 3
_ATTR_PLACEMENT = 5
_ATTR_REPRESENTATION = 6


@dataclass(frozen=True)
class _Ref:
    """Reference to another record, ``#123`` in the source text."""

    id: int


class _Enum(str):
    """Enumeration literal such as ``.ELEMENT.``; kept verbatim."""


def parse_step_subset(data: bytes) -> BimModel:
    """Parse a STEP payload into a :class:`BimModel`.

    Raises :class:`MalformedStep` for structural damage (missing header or
    terminator, unbalanced records, duplicate ids) and
    :class:`UnsupportedSchema` when FILE_SCHEMA names no IFC schema.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        text = data.decode("latin-1")

    statements = _split_statements(text)
    if not statements or statements[0].strip() != "ISO-10303-21":
        raise MalformedStep("missing ISO-10303-21 header")
    if statements[-1].strip() != "END-ISO-10303-21":
        raise MalformedStep("missing END-ISO-10303-21 terminator")

    schema_names = _schema_names(statements)
    if not any("IFC" in name.upper() for name in schema_names):
        raise UnsupportedSchema(f"FILE_SCHEMA names no IFC schema: {schema_names!r}")

    records = _collect_records(statements)
    building = _building_name(statements)

    elements = []
    for rec_id in sorted(records):
        class_name, args = records[rec_id]
        ifc_class = IfcClass.from_step(class_name)
        if ifc_class is None:
            continue
        elements.append(_element_from_record(rec_id, ifc_class, args, records))
    return BimModel(
        building=building,
        elements=tuple(elements),
        anchors=(),
        source_format="step",
    )


# ---------------------------------------------------------------------------
# statement and record scanning
# ---------------------------------------------------------------------------

def _split_statements(text: str) -> list[str]:
    """Split the file into ';'-terminated statements.

    Tracks string and comment state so separators inside quotes never
    split a record. Unterminated strings, comments or parentheses at end
    of input are reported as :class:`MalformedStep`.
    """
    statements: list[str] = []
    buf: list[str] = []
    depth = 0
    i = 0
    n = len(text)
    in_string = False
    while i < n:
        ch = text[i]
        if in_string:
            buf.append(ch)
            if ch == "'":
                if i + 1 < n and text[i + 1] == "'":
                    buf.append("'")
                    i += 2
                    continue
                in_string = False
            i += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "*":
            end = text.find("*/", i + 2)
            if end == -1:
                raise MalformedStep("unterminated comment")
            i = end + 2
            continue
        if ch == "'":
            in_string = True
            buf.append(ch)
            i += 1
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise MalformedStep("unbalanced parentheses")
        if ch == ";" and depth == 0:
            stmt = "".join(buf).strip()
            if stmt:
                statements.append(stmt)
            buf = []
            i += 1
            continue
        buf.append(ch)
        i += 1
    if in_string:
        raise MalformedStep("unterminated string")
    if depth != 0 or "".join(buf).strip():
        raise MalformedStep("truncated record at end of input")
    return statements


def _schema_names(statements: list[str]) -> list[str]:
    for stmt in statements:
        if stmt.upper().startswith("FILE_SCHEMA"):
            args = _parse_arguments(stmt[stmt.index("(") + 1 : stmt.rindex(")")])
            names: list[str] = []
            for arg in args:
                if isinstance(arg, list):
                    names.extend(str(v) for v in arg)
                elif isinstance(arg, str):
                    names.append(arg)
            return names
    raise MalformedStep("header has no FILE_SCHEMA")


def _building_name(statements: list[str]) -> str:
    for stmt in statements:
        if stmt.upper().startswith("FILE_NAME"):
            args = _parse_arguments(stmt[stmt.index("(") + 1 : stmt.rindex(")")])
            if args and isinstance(args[0], str) and args[0]:
                return args[0]
    return "unnamed"


def _collect_records(statements: list[str]) -> dict[int, tuple[str, list]]:
    records: dict[int, tuple[str, list]] = {}
    in_data = False
    for stmt in statements:
        upper = stmt.upper()
        if upper == "DATA":
            in_data = True
            continue
        if upper == "ENDSEC":
            in_data = False
            continue
        if not in_data or not stmt.startswith("#"):
            continue
        eq = stmt.find("=")
        if eq == -1:
            raise MalformedStep(f"record without '=': {stmt[:40]!r}")
        try:
            rec_id = int(stmt[1:eq].strip())
        except ValueError as exc:
            raise MalformedStep(f"bad record id in {stmt[:40]!r}") from exc
        rest = stmt[eq + 1 :].strip()
        open_paren = rest.find("(")
        if open_paren == -1 or not rest.endswith(")"):
            raise MalformedStep(f"record #{rec_id} has no argument list")
        class_name = rest[:open_paren].strip().upper()
        args = _parse_arguments(rest[open_paren + 1 : -1])
        if rec_id in records:
            raise MalformedStep(f"duplicate record id #{rec_id}")
        records[rec_id] = (class_name, args)
    return records


def _parse_arguments(body: str):
    values, pos = _parse_value_list(body, 0)
    if body[pos:].strip():
        raise MalformedStep(f"trailing garbage in argument list: {body[pos:][:30]!r}")
    return values


def _parse_value_list(body: str, pos: int):
    values = []
    n = len(body)
    while True:
        pos = _skip_ws(body, pos)
        if pos >= n:
            return values, pos
        value, pos = _parse_value(body, pos)
        values.append(value)
        pos = _skip_ws(body, pos)
        if pos < n and body[pos] == ",":
            pos += 1
            continue
        return values, pos


def _parse_value(body: str, pos: int):
    ch = body[pos]
    if ch == "$":
        return None, pos + 1
    if ch == "*":
        return None, pos + 1
    if ch == "'":
        return _parse_string(body, pos)
    if ch == "#":
        end = pos + 1
        while end < len(body) and body[end].isdigit():
            end += 1
        if end == pos + 1:
            raise MalformedStep("bare '#' in argument list")
        return _Ref(int(body[pos + 1 : end])), end
    if ch == "(":
        values, end = _parse_value_list(body, pos + 1)
        end = _skip_ws(body, end)
        if end >= len(body) or body[end] != ")":
            raise MalformedStep("unbalanced list in record")
        return values, end + 1
    if ch == ".":
        end = body.find(".", pos + 1)
        if end == -1:
            raise MalformedStep("unterminated enumeration literal")
        return _Enum(body[pos : end + 1]), end + 1
    if ch.isdigit() or ch in "+-":
        return _parse_number(body, pos)
    if ch.isalpha() or ch == "_":
        end = pos
        while end < len(body) and (body[end].isalnum() or body[end] == "_"):
            end += 1
        name = body[pos:end]
        end = _skip_ws(body, end)
        if end < len(body) and body[end] == "(":
            inner, after = _parse_value_list(body, end + 1)
            after = _skip_ws(body, after)
            if after >= len(body) or body[after] != ")":
                raise MalformedStep(f"unbalanced typed value {name}")
            # measures like IFCLENGTHMEASURE(2.5) unwrap to their payload
            return (inner[0] if len(inner) == 1 else inner), after + 1
        return name, end
    raise MalformedStep(f"unexpected character {ch!r} in record arguments")


def _parse_string(body: str, pos: int):
    out = []
    i = pos + 1
    n = len(body)
    while i < n:
        ch = body[i]
        if ch == "'":
            if i + 1 < n and body[i + 1] == "'":
                out.append("'")
                i += 2
                continue
            return "".join(out), i + 1
        out.append(ch)
        i += 1
    # statements that passed _split_statements cannot get here; keep the guard
    raise MalformedStep("unterminated string in record")


def _parse_number(body: str, pos: int):
    end = pos + 1
    n = len(body)
    while end < n and (body[end].isdigit() or body[end] in ".eE+-"):
        # '+'/'-' only valid right after an exponent marker
        if body[end] in "+-" and body[end - 1] not in "eE":
            break
        end += 1
    token = body[pos:end]
    try:
        return float(token), end
    except ValueError as exc:
        raise MalformedStep(f"bad numeric literal {token!r}") from exc


def _skip_ws(body: str, pos: int) -> int:
    n = len(body)
    while pos < n and body[pos] in " \t\r\n":
        pos += 1
    return pos


# ---------------------------------------------------------------------------
# geometry and placement resolution
# ---------------------------------------------------------------------------

_Mat3 = tuple[Point3, Point3, Point3]  # rows

_IDENTITY: _Mat3 = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


def _element_from_record(
    rec_id: int, ifc_class: IfcClass, args: list, records: dict
) -> RawElement:
    name = args[_ATTR_NAME] if len(args) > _ATTR_NAME and isinstance(args[_ATTR_NAME], str) else ""
    description = (
        args[_ATTR_DESCRIPTION]
        if len(args) > _ATTR_DESCRIPTION and isinstance(args[_ATTR_DESCRIPTION], str)
        else ""
    )
    global_id = args[0] if args and isinstance(args[0], str) else f"#{rec_id}"

    placement = None
    rotation = _IDENTITY
    placement_arg = args[_ATTR_PLACEMENT] if len(args) > _ATTR_PLACEMENT else None
    if isinstance(placement_arg, _Ref):
        resolved = _resolve_placement(placement_arg.id, records, set())
        if resolved is not None:
            rotation, placement = resolved

    geometry = None
    rep_arg = args[_ATTR_REPRESENTATION] if len(args) > _ATTR_REPRESENTATION else None
    if isinstance(rep_arg, _Ref):
        vertices = _collect_vertices(rep_arg.id, records, set())
        if vertices:
            if placement is not None:
                vertices = [_mat_apply(rotation, v, placement) for v in vertices]
            geometry = aabb_of_points(vertices)

    return RawElement(
        id=global_id,
        ifc_class=ifc_class,
        name=name,
        description=description,
        placement=placement,
        geometry=geometry,
    )


def _resolve_placement(
    rec_id: int, records: dict, seen: set[int]
) -> tuple[_Mat3, Point3] | None:
    """Compose an IFCLOCALPLACEMENT chain into (rotation, origin)."""
    if rec_id in seen or rec_id not in records:
        return None
    seen.add(rec_id)
    class_name, args = records[rec_id]
    if class_name != "IFCLOCALPLACEMENT":
        return None
    parent_rot, parent_origin = _IDENTITY, (0.0, 0.0, 0.0)
    if args and isinstance(args[0], _Ref):
        parent = _resolve_placement(args[0].id, records, seen)
        if parent is not None:
            parent_rot, parent_origin = parent
    local_rot, local_origin = _IDENTITY, (0.0, 0.0, 0.0)
    if len(args) > 1 and isinstance(args[1], _Ref):
        axis = _axis2placement3d(args[1].id, records)
        if axis is not None:
            local_rot, local_origin = axis
    origin = _mat_apply(parent_rot, local_origin, parent_origin)
    return _mat_mul(parent_rot, local_rot), origin


def _axis2placement3d(rec_id: int, records: dict) -> tuple[_Mat3, Point3] | None:
    if rec_id not in records:
        return None
    class_name, args = records[rec_id]
    if class_name != "IFCAXIS2PLACEMENT3D":
        return None
    location = _cartesian_point(args[0], records) if args else None
    if location is None:
        return None
    z_axis = _direction(args[1], records) if len(args) > 1 else None
    x_ref = _direction(args[2], records) if len(args) > 2 else None
    z = _normalize(z_axis) if z_axis else (0.0, 0.0, 1.0)
    x_seed = x_ref if x_ref else (1.0, 0.0, 0.0)
    # project the x seed off z, then rebuild y for a right-handed frame
    dot = sum(a * b for a, b in zip(x_seed, z))
    x = _normalize(tuple(a - dot * b for a, b in zip(x_seed, z)))  # type: ignore[arg-type]
    if x is None:
        x = (0.0, 1.0, 0.0) if abs(z[0]) > 0.9 else (1.0, 0.0, 0.0)
        dot = sum(a * b for a, b in zip(x, z))
        x = _normalize(tuple(a - dot * b for a, b in zip(x, z)))  # type: ignore[arg-type]
    y = _cross(z, x)
    rotation: _Mat3 = (
        (x[0], y[0], z[0]),
        (x[1], y[1], z[1]),
        (x[2], y[2], z[2]),
    )
    return rotation, location


def _axis2placement2d(value, records) -> tuple[Point3, Point3] | None:
    """2D placement as (origin2d-as-3d, x-direction)."""
    if not isinstance(value, _Ref) or value.id not in records:
        return None
    class_name, args = records[value.id]
    if class_name != "IFCAXIS2PLACEMENT2D":
        return None
    location = _cartesian_point(args[0], records) if args else None
    if location is None:
        return None
    x_dir = _direction(args[1], records) if len(args) > 1 else None
    x = _normalize((x_dir[0], x_dir[1], 0.0)) if x_dir else (1.0, 0.0, 0.0)
    return location, x or (1.0, 0.0, 0.0)


def _cartesian_point(value, records) -> Point3 | None:
    if not isinstance(value, _Ref) or value.id not in records:
        return None
    class_name, args = records[value.id]
    if class_name != "IFCCARTESIANPOINT" or not args or not isinstance(args[0], list):
        return None
    coords = [c for c in args[0] if isinstance(c, float)]
    while len(coords) < 3:
        coords.append(0.0)
    return (coords[0], coords[1], coords[2])


def _direction(value, records) -> Point3 | None:
    if not isinstance(value, _Ref) or value.id not in records:
        return None
    class_name, args = records[value.id]
    if class_name != "IFCDIRECTION" or not args or not isinstance(args[0], list):
        return None
    coords = [c for c in args[0] if isinstance(c, float)]
    while len(coords) < 3:
        coords.append(0.0)
    return (coords[0], coords[1], coords[2])


# geometry record classes handled directly; everything else is walked through
_GEOMETRY_HANDLERS = ("IFCBOUNDINGBOX", "IFCEXTRUDEDAREASOLID", "IFCPOLYLINE")


def _collect_vertices(rec_id: int, records: dict, seen: set[int]) -> list[Point3]:
    """Walk the representation graph and gather vertices of known shapes."""
    if rec_id in seen or rec_id not in records:
        return []
    seen.add(rec_id)
    class_name, args = records[rec_id]
    if class_name == "IFCBOUNDINGBOX":
        return _bounding_box_vertices(args, records)
    if class_name == "IFCEXTRUDEDAREASOLID":
        return _extruded_solid_vertices(args, records)
    if class_name == "IFCPOLYLINE":
        return _polyline_vertices(args, records)
    vertices: list[Point3] = []
    for ref in _iter_refs(args):
        vertices.extend(_collect_vertices(ref.id, records, seen))
    return vertices


def _iter_refs(value):
    if isinstance(value, _Ref):
        yield value
    elif isinstance(value, list):
        for item in value:
            yield from _iter_refs(item)


def _bounding_box_vertices(args: list, records: dict) -> list[Point3]:
    corner = _cartesian_point(args[0], records) if args else None
    if corner is None or len(args) < 4:
        return []
    dims = [a if isinstance(a, float) else 0.0 for a in args[1:4]]
    return [
        corner,
        (corner[0] + dims[0], corner[1] + dims[1], corner[2] + dims[2]),
    ]


def _polyline_vertices(args: list, records: dict) -> list[Point3]:
    if not args or not isinstance(args[0], list):
        return []
    points = []
    for ref in args[0]:
        point = _cartesian_point(ref, records)
        if point is not None:
            points.append(point)
    return points


def _extruded_solid_vertices(args: list, records: dict) -> list[Point3]:
    if len(args) < 4:
        return []
    profile = _profile_vertices(args[0], records)
    if not profile:
        return []
    position = _axis2placement3d(args[1].id, records) if isinstance(args[1], _Ref) else None
    direction = _direction(args[2], records) or (0.0, 0.0, 1.0)
    depth = args[3] if isinstance(args[3], float) else 0.0
    base = [(px, py, 0.0) for px, py in profile]
    sweep = (direction[0] * depth, direction[1] * depth, direction[2] * depth)
    vertices = base + [
        (p[0] + sweep[0], p[1] + sweep[1], p[2] + sweep[2]) for p in base
    ]
    if position is not None:
        rotation, origin = position
        vertices = [_mat_apply(rotation, v, origin) for v in vertices]
    return vertices


def _profile_vertices(value, records) -> list[tuple[float, float]]:
    if not isinstance(value, _Ref) or value.id not in records:
        return []
    class_name, args = records[value.id]
    if class_name == "IFCRECTANGLEPROFILEDEF" and len(args) >= 5:
        x_dim = args[3] if isinstance(args[3], float) else 0.0
        y_dim = args[4] if isinstance(args[4], float) else 0.0
        corners = [
            (-x_dim / 2.0, -y_dim / 2.0),
            (x_dim / 2.0, -y_dim / 2.0),
            (x_dim / 2.0, y_dim / 2.0),
            (-x_dim / 2.0, y_dim / 2.0),
        ]
        placement = _axis2placement2d(args[2], records)
        if placement is not None:
            (ox, oy, _), (xx, xy, _) = placement
            yx, yy = -xy, xx
            corners = [
                (ox + cx * xx + cy * yx, oy + cx * xy + cy * yy) for cx, cy in corners
            ]
        return corners
    if class_name == "IFCARBITRARYCLOSEDPROFILEDEF" and len(args) >= 3:
        if isinstance(args[2], _Ref) and args[2].id in records:
            inner_class, inner_args = records[args[2].id]
            if inner_class == "IFCPOLYLINE":
                return [(p[0], p[1]) for p in _polyline_vertices(inner_args, records)]
    return []


def _mat_apply(m: _Mat3, v: Point3, t: Point3) -> Point3:
    return (
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2] + t[0],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2] + t[1],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2] + t[2],
    )


def _mat_mul(a: _Mat3, b: _Mat3) -> _Mat3:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )  # type: ignore[return-value]


def _normalize(v: Point3 | None) -> Point3 | None:
    if v is None:
        return None
    n = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    if n < 1e-12:
        return None
    return (v[0] / n, v[1] / n, v[2] / n)


def _cross(a: Point3, b: Point3) -> Point3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
