import pytest
from hypothesis import given, strategies as st

from jammedfan.census import generate
from jammedfan.fan import (
    FanComplex,
    InvalidComplexError,
    Profile,
    antipodal_involution,
    are_isomorphic,
    automorphisms,
    bipyramid_fan,
    canonical_code,
    cell_pair_count_identity,
    cube_face_fan,
    is_jammed,
    link,
    octant_fan,
    profile,
    require_valid,
    square_pyramid_fan,
    tetrahedral_fan,
    validate,
)

from conftest import relabel

NAMED = {
    "tetrahedral": (tetrahedral_fan, (4, 0, 6, 4), 24),
    "octant": (octant_fan, (0, 6, 12, 8), 48),
    "cube-face": (cube_face_fan, (8, 0, 12, 6), 48),
    "square-pyramid": (square_pyramid_fan, (4, 1, 8, 5), 8),
    "bipyramid": (bipyramid_fan, (2, 3, 9, 6), 12),
}


def pentagonal_bipyramid():
    return FanComplex(7, [(5, i, (i + 1) % 5) for i in range(5)] + [(6, (i + 1) % 5, i) for i in range(5)])


@pytest.mark.parametrize("name", NAMED)
def test_named_complexes_are_valid(name):
    make, prof, _ = NAMED[name]
    cx = make()
    assert validate(cx).ok
    assert profile(cx).as_tuple() == prof


@pytest.mark.parametrize("name", NAMED)
def test_automorphism_group_orders(name):
    make, _, order = NAMED[name]
    assert len(automorphisms(make())) == order


@pytest.mark.parametrize(
    "cells,ray_count,kind",
    [
        ([(0, 1)], 3, "cell length"),
        ([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 9)], 4, "ray index"),
        ([(0, 1, 1), (0, 1, 2), (0, 2, 3), (1, 2, 3)], 4, "repeated ray"),
        ([(0, 1, 2), (0, 3, 1), (0, 2, 3)], 4, "too few cells"),
        ([], 4, "no cells"),
    ],
)
def test_structural_violations(cells, ray_count, kind):
    assert kind in validate(FanComplex(ray_count, cells)).kinds()


def test_doubled_cells_break_edge_multiplicity():
    cx = FanComplex(4, list(tetrahedral_fan().cells) * 2)
    rep = validate(cx)
    assert "edge multiplicity" in rep.kinds()
    with pytest.raises(InvalidComplexError):
        require_valid(cx)


def test_two_disjoint_spheres_fail_euler():
    cells = list(tetrahedral_fan().cells) + [tuple(r + 4 for r in c) for c in tetrahedral_fan().cells]
    assert "euler" in validate(FanComplex(8, cells)).kinds()


def test_cube_with_open_face_is_invalid():
    cx = FanComplex(8, cube_face_fan().cells[:-1])
    rep = validate(cx)
    assert not rep.ok
    assert rep.kinds() & {"edge multiplicity", "euler"}


def test_profile_parse():
    assert Profile.parse("4,1,8,5") == Profile(4, 1, 8, 5)
    assert Profile(4, 1, 8, 5).rays == 5
    with pytest.raises(ValueError):
        Profile.parse("4,1,8")


def test_link_of_pyramid_apex():
    cx = square_pyramid_fan()
    lk = link(cx, 4)
    assert lk.valence == 4
    assert sorted(lk.cells_around) == [0, 1, 2, 3]
    # consecutive cells in the link share an edge through the apex
    cyc = lk.cells_around
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        assert len(cx.cell_sets[a] & cx.cell_sets[b]) == 2


def test_link_of_base_ray_has_valence_three():
    assert link(square_pyramid_fan(), 0).valence == 3


@given(st.data())
@pytest.mark.parametrize("name", NAMED)
def test_canonical_code_is_label_invariant(name, data):
    cx = NAMED[name][0]()
    rp = data.draw(st.permutations(range(cx.ray_count)))
    cp = data.draw(st.permutations(range(cx.cell_count)))
    rev = data.draw(st.booleans())
    other = relabel(cx, rp, cp, rev)
    assert canonical_code(other) == canonical_code(cx)
    assert are_isomorphic(other, cx)


def test_codes_separate_types():
    codes = {canonical_code(make()) for make, _, _ in NAMED.values()}
    assert len(codes) == len(NAMED)


def test_json_roundtrip():
    cx = square_pyramid_fan()
    assert FanComplex.from_json(cx.to_json()) == cx


def test_octant_involution_pairs_opposite_octants():
    inv = antipodal_involution(octant_fan())
    assert inv is not None
    assert inv.ray_map == (1, 0, 3, 2, 5, 4)
    cx = octant_fan()
    for k, j in enumerate(inv.cell_map):
        assert inv.cell_map[j] == k
        assert not cx.cell_sets[k] & cx.cell_sets[j]


def test_tetrahedral_fan_has_no_involution():
    assert antipodal_involution(tetrahedral_fan()) is None


@pytest.mark.parametrize("name", NAMED)
def test_named_complexes_are_jammed(name):
    cert = is_jammed(NAMED[name][0]())
    assert cert.jammed


def test_octant_certificate_counts():
    cert = is_jammed(octant_fan())
    # 12 edge-adjacent pairs, 12 pairs opposite at a ray, 4 antipodal pairs
    assert (len(cert.edge_pairs), len(cert.ray_pairs), len(cert.antipodal.cell_pairs())) == (12, 12, 4)


def test_valence_five_rejected():
    w = is_jammed(pentagonal_bipyramid())
    assert not w.jammed
    assert w.reason == "valence 5"
    assert w.ray in (5, 6)


def test_non_jammed_symmetric_profile_complex():
    entry = generate(Profile(8, 0, 12, 6))
    assert len(entry.complexes) == 2
    rejected = [cx for cx in entry.complexes.values() if not is_jammed(cx).jammed]
    assert len(rejected) == 1


@pytest.mark.parametrize("name", NAMED)
def test_cell_pair_count_identity(name):
    assert cell_pair_count_identity(NAMED[name][0]())


def test_two_constructions_of_prism_type_fan():
    from jammedfan.cells import canonical_config, hull3
    from jammedfan.geom import normal_fan

    by_hand = bipyramid_fan()
    from_prism = normal_fan(hull3(canonical_config("triangular-prism"))).complex
    assert canonical_code(by_hand) == canonical_code(from_prism)
    # six triangles, no quadrilaterals
    assert sorted(map(len, from_prism.cells)) == [3] * 6
