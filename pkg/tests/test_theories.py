"""Class membership, symmetry closure, and diagram completion per theory."""

import pytest

from finindep import StructureBuilder
from finindep.theories import (
    atom_variants,
    builtin,
    builtin_names,
    complete_in_class,
    in_class,
)


def test_builtin_catalog():
    assert builtin_names() == ("circular", "generic_function", "incidence_4_2", "og")
    with pytest.raises(KeyError):
        builtin("nope")


def test_circular_rejects_incompatible_orientations():
    t = builtin("circular")
    b = StructureBuilder(t.signature)
    x, y, z = (b.add_element("O") for _ in range(3))
    for row in atom_variants(t, "cyc", (x, y, z)) | atom_variants(t, "cyc", (x, z, y)):
        b.add_rel("cyc", row)
    assert in_class(t, b.build())


def test_circular_accepts_consistent_arcs():
    t = builtin("circular")
    b = StructureBuilder(t.signature)
    w, x, y, z = (b.add_element("O") for _ in range(4))
    for row in atom_variants(t, "cyc", (w, x, y)) | atom_variants(t, "cyc", (x, y, z)):
        b.add_rel("cyc", row)
    assert not in_class(t, b.build())


def test_circular_completion_decides_every_triple():
    t = builtin("circular")
    b = StructureBuilder(t.signature)
    pts = [b.add_element("O") for _ in range(4)]
    for row in atom_variants(t, "cyc", tuple(pts[:3])):
        b.add_rel("cyc", row)
    s = complete_in_class(t, b.build())
    assert not in_class(t, s)
    import itertools

    for tri in itertools.permutations(pts, 3):
        assert tri in s.rels["cyc"] or (tri[0], tri[2], tri[1]) in s.rels["cyc"]


def test_generic_function_rejects_two_values():
    t = builtin("generic_function")
    b = StructureBuilder(t.signature)
    x, y, z = (b.add_element("O") for _ in range(3))
    b.add_fun("f", (x, x), y)
    b.add_fun("f", (x, x), z)
    assert in_class(t, b.build())


def test_og_rejects_two_colors_on_one_edge():
    t = builtin("og")
    b = StructureBuilder(t.signature)
    c0, c1 = b.add_element("C"), b.add_element("C")
    b.set_constant("0", c0)
    b.set_constant("1", c1)
    g, h = b.add_element("G"), b.add_element("G")
    for c in (c0, c1):
        for row in atom_variants(t, "R", (g, h, c)):
            b.add_rel("R", row)
    vs = in_class(t, b.build())
    assert any(v.condition == "colored-graphs" for v in vs)


def test_og_rejects_shared_edge_witness():
    t = builtin("og")
    b = StructureBuilder(t.signature)
    c0, c1 = b.add_element("C"), b.add_element("C")
    b.set_constant("0", c0)
    b.set_constant("1", c1)
    g, h = b.add_element("G"), b.add_element("G")
    o = b.add_element("O")
    for row in atom_variants(t, "R", (g, h, c0)):
        b.add_rel("R", row)
    b.add_rel("E", (o, g, c0))
    b.add_rel("E", (o, h, c0))
    vs = in_class(t, b.build())
    assert any(v.condition == "edge-witness-exclusion" for v in vs)
    assert not in_class(t.drop_condition("edge-witness-exclusion"), b.build())


def test_og_rejects_unnamed_colors():
    t = builtin("og")
    b = StructureBuilder(t.signature)
    c0, c1, c2 = (b.add_element("C") for _ in range(3))
    b.set_constant("0", c0)
    b.set_constant("1", c1)
    vs = in_class(t, b.build())
    assert any(v.condition == "two-colors" for v in vs)


def test_incidence_rejects_four_points_on_two_lines():
    t = builtin("incidence_4_2")
    b = StructureBuilder(t.signature)
    ps = [b.add_element("P") for _ in range(4)]
    l0, l1 = b.add_element("L"), b.add_element("L")
    for p in ps:
        b.add_rel("I", (p, l0))
        b.add_rel("I", (p, l1))
    assert in_class(t, b.build())
    # three common points stay legal
    b2 = StructureBuilder(t.signature)
    ps = [b2.add_element("P") for _ in range(3)]
    l0, l1 = b2.add_element("L"), b2.add_element("L")
    for p in ps:
        b2.add_rel("I", (p, l0))
        b2.add_rel("I", (p, l1))
    assert not in_class(t, b2.build())


def test_atom_variants_closures():
    t = builtin("circular")
    assert atom_variants(t, "cyc", (1, 2, 3)) == {(1, 2, 3), (2, 3, 1), (3, 1, 2)}
    t = builtin("og")
    assert atom_variants(t, "R", (1, 2, 5)) == {(1, 2, 5), (2, 1, 5)}
    assert atom_variants(t, "E", (1, 2, 5)) == {(1, 2, 5)}


def test_drop_condition_unknown_name():
    t = builtin("og")
    with pytest.raises(KeyError):
        t.drop_condition("no-such-condition")
