"""STEP reader tests, checked against an independent regex scan."""

import pytest

from bimnav.errors import MalformedStep, UnsupportedSchema
from bimnav.ingest import IfcClass, extract_report, load_manifest_file, parse_step_subset

from conftest import FIXTURES
from oracles import scan_step_products

_CLS = {
    "IFCSPACE": IfcClass.SPACE,
    "IFCDOOR": IfcClass.DOOR,
    "IFCFURNISHINGELEMENT": IfcClass.FURNISHING,
}


@pytest.fixture(scope="module")
def mini_model():
    return parse_step_subset((FIXTURES / "mini12.ifc").read_bytes())


def _assert_matches_oracle(model, text):
    expected = scan_step_products(text)
    assert len(model.elements) == len(expected)
    # both sides emit products in record-id order, so plain zip lines them up
    for element, want in zip(model.elements, expected):
        assert element.ifc_class is _CLS[want["cls"]]
        assert element.name == want["name"]
        assert element.description == want["description"]
        if want["placement"] is None:
            assert element.placement is None
        else:
            assert element.placement == pytest.approx(want["placement"], abs=1e-9)


def test_mini12_matches_oracle_scan(mini_model):
    _assert_matches_oracle(mini_model, (FIXTURES / "mini12.ifc").read_text())


def test_building_matches_oracle_scan(step_model):
    _assert_matches_oracle(step_model, (FIXTURES / "building.ifc").read_text())


def test_mini12_shape(mini_model):
    assert mini_model.building == "mini12.ifc"
    assert mini_model.source_format == "step"
    assert len(mini_model.elements) == 12
    assert mini_model.anchors == ()


def test_quote_escape_unwrapped(mini_model):
    bench = next(e for e in mini_model.elements if e.id == "bench")
    assert bench.description == "technician's bench with power rails"


def test_placement_chain_composes_translations(mini_model):
    by_id = {e.id: e for e in mini_model.elements}
    # lobby chains through the site placement at (1, 0, 1)
    assert by_id["lobby"].placement == pytest.approx((0.0, 0.0, 0.0))
    assert by_id["d2"].placement == pytest.approx((6.0, 0.0, 4.0))
    # d1 carries the same local coordinates but no parent
    assert by_id["d1"].placement == pytest.approx((5.0, 0.0, 3.0))


def test_bounding_box_geometry(mini_model):
    store = next(e for e in mini_model.elements if e.id == "store")
    assert store.placement is None
    assert store.geometry is not None
    assert store.geometry.min == pytest.approx((10.0, 0.0, 0.0))
    assert store.geometry.max == pytest.approx((12.0, 0.0, 2.0))


def test_unplaced_element_dropped_with_reason(mini_model):
    report = extract_report(mini_model)
    assert [d.id for d in report.dropped] == ["void"]
    assert "no placement" in report.dropped[0].reason
    assert len(report.entities) == 11


def test_extruded_corridor_footprint(step_model):
    corridor = next(e for e in step_model.elements if e.id == "corridor")
    assert corridor.geometry is not None
    assert corridor.geometry.min == pytest.approx((0.0, 0.0, 8.5))
    assert corridor.geometry.max == pytest.approx((40.0, 0.0, 11.5))


def test_step_and_manifest_extract_identically(step_model):
    """building.ifc was authored to mirror building.json entity for entity."""
    manifest = load_manifest_file(FIXTURES / "building.json")
    from_step = extract_report(step_model).entities
    from_manifest = extract_report(manifest).entities
    assert [e.id for e in from_step] == [e.id for e in from_manifest]
    for a, b in zip(from_step, from_manifest):
        assert a.ifc_class is b.ifc_class
        assert a.name == b.name
        assert a.description == b.description
        assert a.position == pytest.approx(b.position, abs=1e-9)


def test_truncated_file_rejected():
    data = (FIXTURES / "mini12_truncated.ifc").read_bytes()
    with pytest.raises(MalformedStep):
        parse_step_subset(data)


def test_non_ifc_schema_rejected():
    data = (FIXTURES / "not_ifc.step").read_bytes()
    with pytest.raises(UnsupportedSchema):
        parse_step_subset(data)


def test_missing_header_rejected():
    with pytest.raises(MalformedStep):
        parse_step_subset(b"HEADER;ENDSEC;DATA;ENDSEC;END-ISO-10303-21;")


def test_missing_terminator_rejected():
    text = (FIXTURES / "mini12.ifc").read_text().replace("END-ISO-10303-21;", "")
    with pytest.raises(MalformedStep):
        parse_step_subset(text.encode())


def test_duplicate_record_id_rejected():
    text = (
        "ISO-10303-21;HEADER;FILE_SCHEMA(('IFC4'));ENDSEC;DATA;"
        "#1=IFCCARTESIANPOINT((0.,0.,0.));"
        "#1=IFCCARTESIANPOINT((1.,1.,1.));"
        "ENDSEC;END-ISO-10303-21;"
    )
    with pytest.raises(MalformedStep, match="duplicate"):
        parse_step_subset(text.encode())


def test_unterminated_string_rejected():
    text = "ISO-10303-21;HEADER;FILE_SCHEMA(('IFC4"
    with pytest.raises(MalformedStep):
        parse_step_subset(text.encode())


def test_semicolon_inside_string_does_not_split():
    text = (
        "ISO-10303-21;HEADER;FILE_SCHEMA(('IFC4'));"
        "FILE_NAME('a;b',$,$,$,$,$,$);ENDSEC;DATA;"
        "#1=IFCCARTESIANPOINT((2.0,0.0,3.0));"
        "#2=IFCAXIS2PLACEMENT3D(#1,$,$);"
        "#3=IFCLOCALPLACEMENT($,#2);"
        "#4=IFCSPACE('s1',$,'Room; with semicolon','x;y',$,#3,$,'s1',.ELEMENT.,$);"
        "ENDSEC;END-ISO-10303-21;"
    )
    model = parse_step_subset(text.encode())
    assert model.building == "a;b"
    (space,) = model.elements
    assert space.name == "Room; with semicolon"
    assert space.description == "x;y"
    assert space.placement == pytest.approx((2.0, 0.0, 3.0))


def test_placement_cycle_is_tolerated():
    # a self-referencing placement chain must not hang; the cycle edge is
    # ignored and the local origin (here the default) is what remains
    text = (
        "ISO-10303-21;HEADER;FILE_SCHEMA(('IFC4'));ENDSEC;DATA;"
        "#3=IFCLOCALPLACEMENT(#3,#2);"
        "#4=IFCSPACE('s1',$,'Loops',$,$,#3,$,'s1',.ELEMENT.,$);"
        "ENDSEC;END-ISO-10303-21;"
    )
    model = parse_step_subset(text.encode())
    (space,) = model.elements
    assert space.placement == pytest.approx((0.0, 0.0, 0.0))
