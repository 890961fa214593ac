"""The one-shot verification report (JSON + markdown)."""

from __future__ import annotations

import json
import random
from pathlib import Path

from . import rational as q
from .census import TYPE_TAGS, census, classify_jammed, jammed_2d, reduced_relation_holds, solve_profiles, profile_equations_hold
from .cells import canonical_complex, canonical_config, check_duality, hull3, random_instantiation
from .fan import canonical_code, cell_pair_count_identity, is_jammed
from .geom import is_jammed_geometric, verify_complete, witness
from .lattice import difference_body, index_verdicts
from . import delaunay3 as d3

EXPECTED_ASYMMETRIC = {(4, 0, 6, 4), (4, 1, 8, 5), (2, 3, 9, 6)}
EXPECTED_SYMMETRIC = {(0, 6, 12, 8), (8, 0, 12, 6)}
DUALITY_SAMPLES = 20
DUALITY_SEED = 20260101


def _profiles_section(symmetric: bool, expected: set) -> dict:
    sols = solve_profiles(symmetric)
    got = {p.as_tuple() for p in sols.profiles}
    eq_ok = all(profile_equations_hold(p, symmetric) for p in sols.profiles)
    # the asymmetric reduced relation only applies without the c/2 term
    reduced_ok = symmetric or all(reduced_relation_holds(p) for p in sols.profiles)
    return {
        "pass": got == expected and eq_ok and reduced_ok,
        "certificate": {"profiles": sorted(list(p) for p in got), "equations_hold": eq_ok, "reduced_relation_holds": reduced_ok},
    }


def _jammed_properties(types) -> dict:
    rows = []
    ok = True
    for t in types:
        cx = t.complex
        vals = sorted({cx.valence(r) for r in range(cx.ray_count)})
        cert = is_jammed(cx)
        row = {
            "type_tag": t.tag,
            "valences": vals,
            "edge_pairs": len(cert.edge_pairs),
            "valence4_pairs": len(cert.ray_pairs),
            "antipodal_pairs": len(cert.antipodal.cell_pairs()) if cert.antipodal else 0,
            "pair_count_identity": cell_pair_count_identity(cx),
        }
        ok &= set(vals) <= {3, 4} and row["pair_count_identity"]
        rows.append(row)
    two_d = {str(n): jammed_2d(n) for n in range(3, 13)}
    ok &= all(v == (int(n) in (3, 4)) for n, v in two_d.items())
    return {"pass": ok, "certificate": {"types": rows, "jammed_2d": two_d}}


def _five_types(entries, types) -> dict:
    tags = [t.tag for t in types]
    asym = sorted(t.tag for t in types if not t.symmetric)
    sym = sorted(t.tag for t in types if t.symmetric)
    census_rows = []
    for e in entries:
        census_rows.append({"profile": str(e.profile), "symmetric": e.symmetric, "complexes": len(e.complexes), "jammed": len(e.jammed)})
    witnesses = []
    ok = sorted(tags) == sorted(TYPE_TAGS) and len(asym) == 3 and len(sym) == 2
    for t in types:
        w = witness(t.tag)
        comp = verify_complete(w).ok
        jam = comp and is_jammed_geometric(w).jammed
        same = canonical_code(w.complex) == t.canonical_code
        ok &= comp and jam and same
        witnesses.append({"type_tag": t.tag, "complete": comp, "jammed": jam, "code_matches": same})
    return {
        "pass": ok,
        "certificate": {"types": [t.to_json() for t in types], "census": census_rows, "witnesses": witnesses, "asymmetric": asym, "symmetric": sym},
    }


def _duality_section() -> dict:
    rows = []
    ok = True
    rng = random.Random(DUALITY_SEED)
    for tag in TYPE_TAGS:
        cx = canonical_complex(tag)
        config = canonical_config(tag)
        poly = hull3(config)
        canon = check_duality(cx, config, poly).ok
        dim = q.affine_dimension(config.points)
        rand_ok = 0
        for _ in range(DUALITY_SAMPLES):
            _, cfg, p = random_instantiation(tag, rng)
            rand_ok += check_duality(cx, cfg, p).ok
        row_ok = canon and rand_ok == DUALITY_SAMPLES and dim == 3
        ok &= row_ok
        rows.append(
            {
                "type_tag": tag,
                "canonical": canon,
                "random_passed": rand_ok,
                "random_total": DUALITY_SAMPLES,
                "affine_dimension": dim,
                "f_vector": list(poly.f_vector),
                "points": [[q.fmt_rat(x) for x in p] for p in config.points],
            }
        )
    return {"pass": ok, "certificate": {"types": rows, "seed": DUALITY_SEED}}


def _index_section() -> dict:
    verdicts = index_verdicts()
    rows = {}
    ok = True
    for tag, v in verdicts.items():
        body = difference_body(hull3(canonical_config(tag)))
        doc = v.to_json()
        doc["difference_body_volume"] = q.fmt_rat(body.volume)
        rows[tag] = doc
        ok &= v.index == 1
    ok &= len(verdicts["tetrahedron"].eliminations) == 7
    return {"pass": ok, "certificate": rows}


def fan_figure(types) -> list:
    out = []
    for t in types:
        w = witness(t.tag)
        out.append(
            {
                "type_tag": t.tag,
                "profile": str(t.profile),
                "canonical_code": t.canonical_code,
                "rays": [list(map(int, q.primitive(r))) for r in w.rays],
                "cells": [list(c) for c in w.complex.cells],
            }
        )
    return out


def build_report(workers: int = 1) -> dict:
    entries = census()
    types = classify_jammed(entries)
    survey = d3.survey(d3.curated_family(), workers)
    sections = {
        "asymmetric_profiles": _profiles_section(False, EXPECTED_ASYMMETRIC),
        "symmetric_profiles": _profiles_section(True, EXPECTED_SYMMETRIC),
        "jammed_fan_properties": _jammed_properties(types),
        "five_types": _five_types(entries, types),
        "cell_duality": _duality_section(),
        "lattice_index_one": _index_section(),
        "fans_of_faces_are_jammed": {
            "pass": all(r.faces_jammed and r.error is None for r in survey.results),
            "certificate": {r.name: r.faces_jammed for r in survey.results},
        },
        "lattice_survey": {"pass": survey.ok and survey.types == sorted(TYPE_TAGS), "certificate": survey.to_json()},
    }
    return {
        "sections": sections,
        "fans": fan_figure(types),
        "ok": all(s["pass"] for s in sections.values()),
        "notes": [
            "The packing inequality behind the index bound is taken as input; only its numeric consequence is computed.",
            "Volumes in the lattice survey are in lattice coordinates, where the covolume is 1.",
        ],
    }


def markdown(report: dict) -> str:
    s = report["sections"]
    lines = ["# Verification report", ""]
    lines.append("| claim | pass |")
    lines.append("|---|---|")
    for k, v in s.items():
        lines.append(f"| {k} | {'yes' if v['pass'] else 'NO'} |")
    lines += ["", "## The five jammed fans", ""]
    lines.append("| type | profile (a3,a4,b,c) | symmetric | cell f-vector | index bound | witness rays |")
    lines.append("|---|---|---|---|---|---|")
    duality = {r["type_tag"]: r for r in s["cell_duality"]["certificate"]["types"]}
    sym = {t["type_tag"]: t["symmetric"] for t in s["five_types"]["certificate"]["types"]}
    for fan in report["fans"]:
        tag = fan["type_tag"]
        rays = " ".join("(" + ",".join(map(str, r)) + ")" for r in fan["rays"])
        bound = s["lattice_index_one"]["certificate"][tag]["bound"]
        fv = tuple(duality[tag]["f_vector"])
        lines.append(f"| {tag} | {fan['profile']} | {sym[tag]} | {fv} | {bound} | {rays} |")
    lines += ["", "Canonical codes:", ""]
    for fan in report["fans"]:
        lines.append(f"- {fan['type_tag']}: `{fan['canonical_code']}`")
    lines += ["", "## Lattice survey", ""]
    lines.append("| lattice | types | ok |")
    lines.append("|---|---|---|")
    for r in s["lattice_survey"]["certificate"]["lattices"]:
        lines.append(f"| {r['name']} | {', '.join(r['types'])} | {r['ok']} |")
    lines.append("")
    lines.append(f"Overall: {'PASS' if report['ok'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def write_report(report: dict, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "report.md").write_text(markdown(report), encoding="utf-8")
