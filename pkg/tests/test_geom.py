from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from jammedfan import rational as q
from jammedfan.cells import canonical_config, hull3
from jammedfan.census import TYPE_TAGS, classify_jammed
from jammedfan.fan import canonical_code
from jammedfan.geom import (
    GeometricFan,
    GeometryError,
    is_jammed_geometric,
    negation_map,
    normal_fan,
    quotient,
    verify_complete,
    witness,
)


@st.composite
def unimodular(draw):
    """Products of elementary row operations and sign flips."""
    m = [[int(i == j) for j in range(3)] for i in range(3)]
    for i, j, k in draw(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-2, 2)), max_size=6)):
        if i != j:
            m[i] = [a + k * b for a, b in zip(m[i], m[j])]
    for i, flip in enumerate(draw(st.lists(st.booleans(), min_size=3, max_size=3))):
        if flip:
            m[i] = [-a for a in m[i]]
    return tuple(tuple(r) for r in m)


@pytest.mark.parametrize("tag", TYPE_TAGS)
def test_witness_is_complete_and_jammed(tag):
    w = witness(tag)
    assert verify_complete(w).ok
    assert is_jammed_geometric(w).jammed


def test_witness_codes_match_census():
    for t in classify_jammed():
        assert canonical_code(witness(t.tag).complex) == t.canonical_code


def test_unknown_witness():
    with pytest.raises(KeyError):
        witness("dodecahedron")


@pytest.mark.parametrize("tag", TYPE_TAGS)
def test_normal_fan_of_canonical_cell_matches_witness(tag):
    fan = normal_fan(hull3(canonical_config(tag)))
    assert verify_complete(fan).ok
    assert is_jammed_geometric(fan).jammed
    assert canonical_code(fan.complex) == canonical_code(witness(tag).complex)


@given(unimodular(), st.sampled_from(TYPE_TAGS))
def test_unimodular_invariance(m, tag):
    fan = witness(tag).transformed(m)
    assert verify_complete(fan).ok
    assert is_jammed_geometric(fan).jammed


@given(st.lists(st.fractions(min_value=Fraction(1, 20), max_value=20), min_size=8, max_size=8), st.sampled_from(TYPE_TAGS))
def test_positive_rescaling_invariance(scales, tag):
    w = witness(tag)
    fan = GeometricFan(tuple(q.scale(s, r) for s, r in zip(scales, w.rays)), w.complex)
    assert is_jammed_geometric(fan).jammed
    assert fan.normalized() == w.normalized()


def test_octant_with_deleted_ray_is_incomplete():
    w = witness("parallelepiped")
    cells = [c for c in w.complex.cells if 5 not in c]
    fan = GeometricFan.build(w.rays[:5], cells)
    diag = verify_complete(fan)
    assert not diag.ok
    assert any("edge multiplicity" in m for m in diag.messages)
    with pytest.raises(GeometryError):
        is_jammed_geometric(fan)


def test_octant_with_folded_ray_is_incomplete():
    w = witness("parallelepiped")
    fan = GeometricFan.build(list(w.rays[:5]) + [(1, 1, 1)], w.complex.cells)
    assert not verify_complete(fan).ok


def test_skewed_bipyramid_is_complete_but_not_jammed():
    w = witness("triangular-prism")
    fan = GeometricFan.build(list(w.rays[:4]) + [(1, 1, 2)], w.complex.cells)
    assert verify_complete(fan).ok
    cert = is_jammed_geometric(fan)
    assert not cert.jammed
    assert cert.messages


def test_valence4_ratios_for_prism_witness():
    cert = is_jammed_geometric(witness("triangular-prism"))
    # the three equator rays have valence 4 and a symmetric link
    assert sorted(cert.ray_pairs) == [0, 1, 2]
    assert all(lam > 0 and mu > 0 for lam, mu in cert.ray_pairs.values())


def test_negation_map_for_symmetric_witnesses():
    for tag in ("octahedron", "parallelepiped"):
        w = witness(tag)
        neg = negation_map(w)
        assert neg is not None
        assert all(q.neg(w.rays[r]) == w.rays[neg[r]] for r in range(len(w.rays)))
        assert is_jammed_geometric(w).negation == neg
    assert negation_map(witness("tetrahedron")) is None


def test_quotient_kills_the_ray():
    proj = quotient(q.vec(0, 2, 1))
    assert proj(q.vec(0, 2, 1)) == (0, 0)
    assert proj(q.vec(1, 0, 0)) != (0, 0)


def test_json_roundtrip_uses_rational_strings():
    w = GeometricFan(tuple(q.scale(Fraction(1, 3), r) for r in witness("tetrahedron").rays), witness("tetrahedron").complex)
    doc = w.to_json()
    assert doc["rays"][0] == ["-1/3", "0", "0"]
    assert GeometricFan.from_json(doc) == w


def test_zero_ray_rejected():
    with pytest.raises(GeometryError):
        GeometricFan.build([(0, 0, 0), (1, 0, 0), (0, 1, 0), (-1, -1, 0)], [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)])


@pytest.mark.parametrize("tag", TYPE_TAGS)
def test_negation_certificate_iff_involution(tag):
    from jammedfan.fan import antipodal_involution

    w = witness(tag)
    assert (is_jammed_geometric(w).negation is not None) == (antipodal_involution(w.complex) is not None)
