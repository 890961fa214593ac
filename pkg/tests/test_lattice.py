import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from jammedfan import rational as q
from jammedfan.cells import PointConfig, canonical_config, hull3, random_invertible, volume
from jammedfan.census import TYPE_TAGS
from jammedfan.lattice import (
    EliminationWitness,
    Lattice3,
    RankError,
    difference_body,
    eliminate_candidate,
    halflattice_candidates,
    hermite_normal_form,
    index_bound,
    index_bound_for,
    index_verdicts,
    span_lattice,
    standard_lattice,
    verify_witness,
)


def minors_gcd(rows):
    g = 0
    for tri in itertools.combinations(rows, 3):
        g = math.gcd(g, int(q.det(tuple(q.vec(r) for r in tri))))
    return g


@given(st.lists(st.tuples(*[st.integers(-6, 6)] * 3), min_size=3, max_size=6))
def test_hnf_index_equals_gcd_of_minors(rows):
    g = minors_gcd(rows)
    h = hermite_normal_form(rows)
    if g == 0:
        assert len(h) < 3
        return
    assert len(h) == 3
    assert all(h[i][j] == 0 for i in range(3) for j in range(i))
    assert all(h[i][i] > 0 for i in range(3))
    assert abs(q.det(tuple(q.vec(r) for r in h))) == g
    lat = Lattice3(tuple(tuple(Fraction(x) for x in r) for r in h))
    assert all(r in lat for r in rows)


def test_span_lattice_covolume_two():
    config = PointConfig([(0, 0, 0), (1, 1, 0), (1, -1, 0), (0, 0, 1)])
    lat = span_lattice(config)
    assert lat.covolume == 2
    assert (1, 0, 0) not in lat
    assert (2, 0, 0) in lat


def test_rank_deficient_span():
    with pytest.raises(RankError):
        span_lattice(PointConfig([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)]))


@pytest.mark.parametrize("tag", TYPE_TAGS)
def test_canonical_cells_generate_z3(tag):
    assert span_lattice(canonical_config(tag)).covolume == 1


def test_rogers_shephard_equality_for_simplex():
    poly = hull3(canonical_config("tetrahedron"))
    assert difference_body(poly).volume == 20 * volume(poly) == Fraction(10, 3)


def test_parallelepiped_difference_body():
    poly = hull3(canonical_config("parallelepiped"))
    assert difference_body(poly).volume == 8 * volume(poly) == 8


def test_prism_difference_body_from_product_formula():
    # (triangle - triangle) x [-1, 1]: hexagon of area 6 * 1/2, height 2
    poly = hull3(canonical_config("triangular-prism"))
    assert difference_body(poly).volume == 6 * Fraction(1, 2) * 2


def test_centrally_symmetric_octahedron_doubles():
    poly = hull3(canonical_config("octahedron"))
    assert difference_body(poly).volume == 8 * volume(poly)


@given(st.integers(0, 10**6), st.sampled_from(TYPE_TAGS))
def test_difference_body_is_symmetric_and_between_bounds(seed, tag):
    m = random_invertible(random.Random(seed))
    poly = hull3(canonical_config(tag).transformed(m))
    body = difference_body(poly)
    assert body.is_centrally_symmetric()
    assert 8 * volume(poly) <= body.volume <= 20 * volume(poly)


def test_index_bounds():
    bounds = {tag: index_bound(tag) for tag in TYPE_TAGS}
    assert bounds["parallelepiped"] == 1
    assert bounds["triangular-prism"] == Fraction(4, 3)
    assert bounds["tetrahedron"] == Fraction(12, 5)
    assert bounds["octahedron"] < 2
    assert bounds["quadrangular-pyramid"] < 2
    assert max(bounds.values()) <= Fraction(12, 5)


@given(st.integers(0, 10**6), st.sampled_from(TYPE_TAGS))
def test_index_bound_is_linearly_invariant(seed, tag):
    m = random_invertible(random.Random(seed))
    assert index_bound_for(canonical_config(tag).transformed(m)) == index_bound(tag)


def test_unknown_tag():
    with pytest.raises(KeyError):
        index_bound("cube")


def test_seven_candidates_all_eliminated():
    config = canonical_config("tetrahedron")
    base = span_lattice(config)
    cands = halflattice_candidates(base)
    assert len(cands) == 7
    assert len({c.parity for c in cands}) == 7
    for cand in cands:
        assert cand.coset_shift not in base
        assert q.scale(2, cand.coset_shift) in base
        w = eliminate_candidate(cand, config)
        assert verify_witness(w, cand, config)


def test_witness_for_half_e1():
    config = canonical_config("tetrahedron")
    cand = next(c for c in halflattice_candidates(standard_lattice()) if c.parity == (1, 0, 0))
    w = eliminate_candidate(cand, config)
    assert w.shift == q.vec(Fraction(1, 2), 0, 0)
    assert verify_witness(w, cand, config)


def test_tampered_witness_fails():
    config = canonical_config("tetrahedron")
    cand = halflattice_candidates(standard_lattice())[0]
    w = eliminate_candidate(cand, config)
    bad = EliminationWitness(w.parity, w.edge, w.midpoint, q.add(w.shift, q.vec(3, 3, 3)))
    assert not verify_witness(bad, cand, config)
    off_coset = EliminationWitness(w.parity, w.edge, w.midpoint, q.vec(0, 0, 0))
    assert not verify_witness(off_coset, cand, config)


def test_verdicts():
    verdicts = index_verdicts()
    assert set(verdicts) == set(TYPE_TAGS)
    assert all(v.index == 1 for v in verdicts.values())
    assert verdicts["tetrahedron"].method == "index 1 after elimination"
    assert len(verdicts["tetrahedron"].eliminations) == 7
    assert all(not verdicts[t].eliminations for t in TYPE_TAGS if t != "tetrahedron")


def test_lattice_coordinates():
    lat = Lattice3(((2, 0, 0), (0, 1, 0), (1, 0, 1)))
    assert lat.coords((3, 2, 1)) == (1, 2, 1)
    assert lat.combo((1, 2, 1)) == (3, 2, 1)
    assert (1, 0, 0) not in lat
