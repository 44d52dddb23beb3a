#!/usr/bin/env python3
"""Regenerate fixtures/building.ifc from fixtures/building.json.

The STEP fixture must describe the same building as the manifest (same
ids, names and positions) while exercising the different source shapes the
reader supports: bare bounding boxes, extruded rectangle profiles, and
placement chains hanging off a storey placement. Run from the repo root:

    python scripts/make_step_fixture.py
"""

from __future__ import annotations

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
STOREY_ORIGIN = (1.0, 0.0, 0.5)

# entities rendered as extruded rectangle profiles instead of bounding boxes
EXTRUDED = {"corridor", "room_v2003"}
# entities that get a placement chain (storey -> element) plus relative geometry
PLACED = {
    "room_v2001", "room_v2014",
    "door_reception", "door_coffee", "door_seating", "door_v2001", "door_v2003",
    "door_mens", "door_womens", "door_v2014",
    "reception_desk", "seating_sofa",
}


def step_string(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def fmt(value: float) -> str:
    text = f"{value:.6f}".rstrip("0")
    if text.endswith("."):
        text += "0"
    return text


class Writer:
    def __init__(self) -> None:
        self.lines: list[str] = []
        self.next_id = 1

    def add(self, body: str) -> int:
        rec_id = self.next_id
        self.next_id += 1
        self.lines.append(f"#{rec_id}={body};")
        return rec_id

    def point(self, x: float, y: float, z: float) -> int:
        return self.add(f"IFCCARTESIANPOINT(({fmt(x)},{fmt(y)},{fmt(z)}))")

    def direction(self, x: float, y: float, z: float) -> int:
        return self.add(f"IFCDIRECTION(({fmt(x)},{fmt(y)},{fmt(z)}))")

    def axis_placement(self, origin: tuple, axis: int | None = None, ref: int | None = None) -> int:
        pt = self.point(*origin)
        axis_s = f"#{axis}" if axis else "$"
        ref_s = f"#{ref}" if ref else "$"
        return self.add(f"IFCAXIS2PLACEMENT3D(#{pt},{axis_s},{ref_s})")

    def local_placement(self, parent: int | None, origin: tuple) -> int:
        axis = self.axis_placement(origin)
        parent_s = f"#{parent}" if parent else "$"
        return self.add(f"IFCLOCALPLACEMENT({parent_s},#{axis})")

    def bounding_box_shape(self, corner: tuple, dims: tuple) -> int:
        pt = self.point(*corner)
        box = self.add(
            f"IFCBOUNDINGBOX(#{pt},{fmt(dims[0])},{fmt(dims[1])},{fmt(dims[2])})"
        )
        rep = self.add(f"IFCSHAPEREPRESENTATION($,'Body','BoundingBox',(#{box}))")
        return self.add(f"IFCPRODUCTDEFINITIONSHAPE($,$,(#{rep}))")

    def extruded_shape(self, center: tuple, dx: float, dz: float) -> int:
        # profile plane spans world x-z: solid z axis is world +y
        axis = self.direction(0.0, 1.0, 0.0)
        ref = self.direction(1.0, 0.0, 0.0)
        position = self.axis_placement(center, axis=axis, ref=ref)
        profile = self.add(f"IFCRECTANGLEPROFILEDEF(.AREA.,$,$,{fmt(dx)},{fmt(dz)})")
        extrude_dir = self.direction(0.0, 0.0, 1.0)
        solid = self.add(
            f"IFCEXTRUDEDAREASOLID(#{profile},#{position},#{extrude_dir},0.0)"
        )
        rep = self.add(f"IFCSHAPEREPRESENTATION($,'Body','SweptSolid',(#{solid}))")
        return self.add(f"IFCPRODUCTDEFINITIONSHAPE($,$,(#{rep}))")


def main() -> None:
    manifest = json.loads((ROOT / "fixtures" / "building.json").read_text())
    w = Writer()

    context = w.add("IFCGEOMETRICREPRESENTATIONCONTEXT($,'Model',3,1.0E-5,$,$)")
    project = w.add(
        f"IFCPROJECT('project-000',$,{step_string(manifest['building'])},$,$,$,$,(#{context}),$)"
    )
    storey_placement = w.local_placement(None, STOREY_ORIGIN)
    w.add(
        f"IFCBUILDINGSTOREY('storey-002',$,'Floor 2',$,$,#{storey_placement},$,$,.ELEMENT.,0.0)"
    )
    del project

    for entity in manifest["entities"]:
        eid = entity["id"]
        cls = entity["class"]
        name = entity["name"]
        desc = entity.get("description", "")
        aabb = entity.get("aabb")
        low = tuple(aabb["min"]) if aabb else None
        high = tuple(aabb["max"]) if aabb else None

        placement_ref = "$"
        shape_ref = "$"
        if eid in PLACED:
            if "position" in entity:
                anchor = tuple(entity["position"])
            else:
                anchor = tuple((a + b) / 2.0 for a, b in zip(low, high))
            rel = tuple(a - s for a, s in zip(anchor, STOREY_ORIGIN))
            placement = w.local_placement(storey_placement, rel)
            placement_ref = f"#{placement}"
            corner = tuple(a - b for a, b in zip(low, anchor))
            dims = tuple(b - a for a, b in zip(low, high))
            if cls == "space":
                dims = (dims[0], 3.0, dims[2])  # placed rooms get real height
            shape = w.bounding_box_shape(corner, dims)
            shape_ref = f"#{shape}"
        elif eid in EXTRUDED:
            center = tuple((a + b) / 2.0 for a, b in zip(low, high))
            shape = w.extruded_shape(center, high[0] - low[0], high[2] - low[2])
            shape_ref = f"#{shape}"
        else:
            dims = tuple(b - a for a, b in zip(low, high))
            shape = w.bounding_box_shape(low, dims)
            shape_ref = f"#{shape}"

        if cls == "space":
            w.add(
                f"IFCSPACE({step_string(eid)},$,{step_string(name)},{step_string(desc)},$,"
                f"{placement_ref},{shape_ref},{step_string(name)},.ELEMENT.,$)"
            )
        elif cls == "door":
            w.add(
                f"IFCDOOR({step_string(eid)},$,{step_string(name)},{step_string(desc)},$,"
                f"{placement_ref},{shape_ref},{step_string(eid)},2.1,1.0)"
            )
        else:
            w.add(
                f"IFCFURNISHINGELEMENT({step_string(eid)},$,{step_string(name)},"
                f"{step_string(desc)},$,{placement_ref},{shape_ref},{step_string(eid)})"
            )

    header = "\n".join(
        [
            "ISO-10303-21;",
            "HEADER;",
            "FILE_DESCRIPTION(('plan subset of Vector Campus floor 2'),'2;1');",
            "FILE_NAME('building.ifc','2026-08-16T00:00:00',('facilities'),"
            "('Vector Campus'),'','','');",
            "FILE_SCHEMA(('IFC4'));",
            "ENDSEC;",
            "DATA;",
        ]
    )
    footer = "\n".join(["ENDSEC;", "END-ISO-10303-21;", ""])
    out = header + "\n" + "\n".join(w.lines) + "\n" + footer
    (ROOT / "fixtures" / "building.ifc").write_text(out)
    print(f"wrote {len(w.lines)} records to fixtures/building.ifc")


if __name__ == "__main__":
    main()
