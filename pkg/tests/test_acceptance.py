"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or as a script.
"""

import json
import random
import sys
import time
from fractions import Fraction

import pytest

from jammedfan import delaunay3 as d3
from jammedfan.cells import brute_force_faces, canonical_complex, canonical_config, check_duality, hull3, random_instantiation, volume
from jammedfan.census import TYPE_TAGS, classify_jammed, jammed_2d, solve_profiles
from jammedfan.cli import main
from jammedfan.fan import canonical_code
from jammedfan.geom import is_jammed_geometric, verify_complete, witness
from jammedfan.lattice import difference_body, eliminate_candidate, halflattice_candidates, index_bound, index_verdicts, span_lattice, verify_witness

F_VECTORS = {
    "tetrahedron": (4, 6, 4),
    "octahedron": (6, 12, 8),
    "quadrangular-pyramid": (5, 8, 5),
    "triangular-prism": (6, 9, 5),
    "parallelepiped": (8, 12, 6),
}


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            sys.stdout.write(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}: {detail}\n")
        assert ok, detail

    return emit


def test_criterion_01_profiles(verdict):
    t0 = time.perf_counter()
    asym = {p.as_tuple() for p in solve_profiles(False).profiles}
    sym = {p.as_tuple() for p in solve_profiles(True).profiles}
    dt = time.perf_counter() - t0
    ok = asym == {(4, 0, 6, 4), (4, 1, 8, 5), (2, 3, 9, 6)} and sym == {(0, 6, 12, 8), (8, 0, 12, 6)} and dt < 1
    verdict(1, ok, f"asymmetric {sorted(asym)}, symmetric {sorted(sym)} in {dt:.3f}s (< 1s)")


def test_criterion_02_five_types(verdict):
    t0 = time.perf_counter()
    types = classify_jammed()
    dt = time.perf_counter() - t0
    asym = sum(not t.symmetric for t in types)
    ok = sorted(t.tag for t in types) == sorted(TYPE_TAGS) and len(types) == 5 and asym == 3 and dt < 60
    verdict(2, ok, f"{len(types)} types ({asym} asymmetric, {len(types) - asym} symmetric) in {dt:.2f}s (< 60s)")


def test_criterion_03_witnesses(verdict):
    codes = {t.tag: t.canonical_code for t in classify_jammed()}
    bad = []
    for tag in TYPE_TAGS:
        w = witness(tag)
        if not (verify_complete(w).ok and is_jammed_geometric(w).jammed and canonical_code(w.complex) == codes.get(tag)):
            bad.append(tag)
    verdict(3, not bad, "all five witnesses complete, jammed, code-matched" if not bad else f"failing: {bad}")


def test_criterion_04_jammed_2d(verdict):
    got = [n for n in range(3, 13) if jammed_2d(n)]
    verdict(4, got == [3, 4], f"jammed for n in {got} over 3..12")


def test_criterion_05_cell_duality(verdict):
    rng = random.Random(20260101)
    problems = []
    for tag in TYPE_TAGS:
        cx = canonical_complex(tag)
        config = canonical_config(tag)
        poly = hull3(config)
        if not check_duality(cx, config, poly).ok:
            problems.append(f"{tag}: canonical duality")
        if poly.f_vector != F_VECTORS[tag] or poly.faces() != brute_force_faces(config.points):
            problems.append(f"{tag}: face lattice {poly.f_vector}")
        for _ in range(20):
            _, cfg, p = random_instantiation(tag, rng)
            if not check_duality(cx, cfg, p).ok or p.faces() != brute_force_faces(cfg.points):
                problems.append(f"{tag}: random instantiation")
                break
    verdict(5, not problems, "canonical + 20 random instantiations per type, f-vectors match the oracle" if not problems else "; ".join(problems))


def test_criterion_06_index(verdict):
    b = {tag: index_bound(tag) for tag in TYPE_TAGS}
    ok = b["parallelepiped"] == 1 and b["triangular-prism"] == Fraction(4, 3) and b["tetrahedron"] == Fraction(12, 5)
    ok &= b["octahedron"] < 2 and b["quadrangular-pyramid"] < 2 and max(b.values()) <= Fraction(12, 5)
    config = canonical_config("tetrahedron")
    cands = halflattice_candidates(span_lattice(config))
    witnessed = sum(verify_witness(eliminate_candidate(c, config), c, config) for c in cands)
    ok &= len(cands) == 7 and witnessed == 7
    verdicts = index_verdicts()
    ok &= all(v.index == 1 for v in verdicts.values())
    shown = ", ".join(f"{t}={b[t]}" for t in TYPE_TAGS)
    verdict(6, ok, f"bounds {shown}; {witnessed}/7 half-lattices eliminated; index 1 for all types")


def test_criterion_07_difference_bodies(verdict):
    simplex = hull3(canonical_config("tetrahedron"))
    box = hull3(canonical_config("parallelepiped"))
    vs, vb = difference_body(simplex).volume, difference_body(box).volume
    ok = vs == 20 * volume(simplex) and vb == 8 * volume(box)
    verdict(7, ok, f"simplex {vs} = 20 x {volume(simplex)}, parallelepiped {vb} = 8 x {volume(box)}")


def test_criterion_08_harness(verdict):
    problems, times = [], []
    for name in ("identity", "fcc", "bcc", "a2+z"):
        t0 = time.perf_counter()
        res = d3.analyse(name, d3.NAMED_GRAMS[name])
        dt = time.perf_counter() - t0
        times.append(f"{name} {dt:.2f}s")
        if not res.ok or dt >= 10:
            problems.append(name)
        if any(c.type_tag not in TYPE_TAGS or not (c.duality_ok and c.lattice_ok) for c in res.cells):
            problems.append(f"{name}: cell checks")
        if name in ("fcc", "bcc") and res.midpoint is not True:
            problems.append(f"{name}: midpoints")
    curated = d3.survey(d3.curated_family())
    if not curated.ok or curated.types != sorted(TYPE_TAGS):
        problems.append(f"curated family types {curated.types}")
    verdict(8, not problems, f"{', '.join(times)}; curated family covers {len(curated.types)} types" if not problems else "; ".join(problems))


def test_criterion_09_partition(verdict):
    sums = {}
    for name, gram in d3.curated_family():
        res = d3.analyse(name, d3.GramMatrix(gram))
        # volumes are in lattice coordinates, where the covolume is 1
        sums[name] = sum((c.cell.multiplicity * c.volume for c in res.cells), Fraction(0))
    ok = all(s == 1 for s in sums.values())
    verdict(9, ok, ", ".join(f"{n}: {s}" for n, s in sums.items()))


def test_criterion_10_determinism(verdict, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    codes = (main(["report", "--out", str(a)]), main(["report", "--out", str(b)]))
    capsys.readouterr()
    same = (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    ok = same and codes == (0, 0) and json.loads((a / "report.json").read_text())["ok"]
    verdict(10, ok, f"two report runs byte-identical: {same}, exit codes {codes}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
