"""Command-line entry point: ``jammedfan <command> ...``.

Every command writes canonical JSON (sorted keys, rationals as "p/q"
strings) and exits 0 exactly when all of its checks pass.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from pathlib import Path

from . import rational as q
from .census import TYPE_TAGS, classify_jammed, generate, solve_profiles
from .cells import canonical_complex, canonical_config, cell_report, check_duality, hull3, random_instantiation
from .fan import FanComplex, Profile, canonical_code, profile
from .geom import is_jammed_geometric, verify_complete, witness
from .lattice import eliminate_candidate, halflattice_candidates, span_lattice, verdict_for
from . import delaunay3 as d3

log = logging.getLogger("jammedfan")

THREADS_ENV = "JAMMEDFAN_THREADS"


class UsageError(Exception):
    pass


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


# --- commands -------------------------------------------------------------------


def cmd_profiles(args):
    sols = solve_profiles(args.symmetric)
    rows = [list(p.as_tuple()) for p in sols.sorted()]
    return {"symmetric": args.symmetric, "profiles": rows}, bool(rows)


def cmd_enumerate(args):
    try:
        p = Profile.parse(args.profile)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    entry = generate(p)
    tags = {t.canonical_code: t.tag for t in classify_jammed([entry])} if entry.jammed else {}
    rows = entry.rows()
    for r in rows:
        if r["canonical_code"] in tags:
            r["type_tag"] = tags[r["canonical_code"]]
    return rows, True


def cmd_classify(args):
    types = classify_jammed()
    rows = [t.to_json() for t in types]
    ok = sorted(t.tag for t in types) == sorted(TYPE_TAGS) and len(types) == 5
    return rows, ok


def _check_tag(tag):
    if tag not in TYPE_TAGS:
        raise UsageError(f"unknown type {tag!r}; expected one of {', '.join(TYPE_TAGS)}")


def witness_doc(tag):
    w = witness(tag)
    comp = verify_complete(w)
    jam = is_jammed_geometric(w) if comp else None
    doc = {
        "type_tag": tag,
        "fan": w.to_json(),
        "profile": str(profile(w.complex)),
        "canonical_code": canonical_code(w.complex),
        "complete": comp.ok,
        "jammed": bool(jam),
        "diagnostics": comp.messages + (jam.messages if jam else []),
    }
    if jam and jam.negation is not None:
        doc["negation"] = list(jam.negation)
    if jam:
        doc["valence4_ratios"] = {str(r): [q.fmt_rat(a), q.fmt_rat(b)] for r, (a, b) in sorted(jam.ray_pairs.items())}
    return doc


def cmd_witness(args):
    _check_tag(args.type)
    doc = witness_doc(args.type)
    return doc, doc["complete"] and doc["jammed"]


def cmd_cell(args):
    _check_tag(args.type)
    doc = cell_report(args.type)
    return doc, doc["duality"]["ok"]


def duality_doc(tag, samples, seed):
    cx = canonical_complex(tag)
    config = canonical_config(tag)
    poly = hull3(config)
    canon = check_duality(cx, config, poly)
    rng = random.Random(seed)
    runs = []
    for _ in range(samples):
        _, cfg, p = random_instantiation(tag, rng)
        rep = check_duality(cx, cfg, p)
        runs.append({"points": [[q.fmt_rat(x) for x in pt] for pt in cfg.points], "ok": rep.ok, "f_vector": list(p.f_vector)})
    ok = canon.ok and all(r["ok"] for r in runs)
    return {
        "type_tag": tag,
        "f_vector": list(poly.f_vector),
        "canonical_ok": canon.ok,
        "random": runs,
        "seed": seed,
        "ok": ok,
    }


def cmd_duality(args):
    _check_tag(args.type)
    doc = duality_doc(args.type, args.samples, args.seed)
    return doc, doc["ok"]


def cmd_index(args):
    _check_tag(args.type)
    v = verdict_for(args.type)
    verdict = v.method if v.method == "index 1 after elimination" else f"index {v.index} ({v.method})"
    doc = {"type_tag": args.type, **v.to_json(), "verdict": verdict}
    return doc, v.index == 1


def cmd_eliminate(args):
    config = canonical_config("tetrahedron")
    base = span_lattice(config)
    out = []
    for cand in halflattice_candidates(base):
        w = eliminate_candidate(cand, config)
        out.append(w.to_json())
    return {"base_covolume": q.fmt_rat(base.covolume), "candidates": out}, len(out) == 7


def _gram_from_file(path):
    doc = _read_json(path)
    try:
        return d3.GramMatrix.from_json(doc)
    except (q.RationalFormatError, d3.GramError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_delaunay(args):
    gram = _gram_from_file(args.gram)
    res = d3.analyse(Path(args.gram).stem, gram)
    return res.to_json(), res.ok


def cmd_survey(args):
    try:
        family = d3.load_gram_family(args.grams) if args.grams else d3.curated_family()
    except OSError as exc:
        raise UsageError(f"cannot read {args.grams}: {exc.strerror}") from None
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"{args.grams}: {exc}") from None
    rep = d3.survey(family, worker_count())
    if args.table:
        print(rep.table(), file=sys.stderr)
    return rep.to_json(), rep.ok


def cmd_code(args):
    doc = _read_json(args.fan)
    try:
        cx = FanComplex.from_json(doc)
        code = canonical_code(cx)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{args.fan}: {exc}") from None
    return code, True


def cmd_report(args):
    from .report import build_report, write_report

    report = build_report(workers=worker_count())
    write_report(report, Path(args.out))
    return {"out": str(args.out), "ok": report["ok"]}, report["ok"]


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jammedfan", description="Exact verification of the five coincidence types at codimension-3 faces.")
    p.add_argument("-o", "--output", help="write the JSON result here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("profiles", help="solve the counting equations")
    s.add_argument("--symmetric", action="store_true")
    s.set_defaults(func=cmd_profiles)

    s = sub.add_parser("enumerate", help="all complexes with a given profile")
    s.add_argument("--profile", required=True, help="a3,a4,b,c")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("classify", help="the jammed 3-D fans")
    s.set_defaults(func=cmd_classify)

    for name, func, helptext in (
        ("witness", cmd_witness, "stored geometric witness fan"),
        ("cell", cmd_cell, "associated cell report"),
        ("index", cmd_index, "lattice index verdict"),
    ):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--type", required=True, choices=TYPE_TAGS)
        s.set_defaults(func=func)

    s = sub.add_parser("duality", help="duality check, canonical and random instantiations")
    s.add_argument("--type", required=True, choices=TYPE_TAGS)
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_duality)

    s = sub.add_parser("eliminate-halflattices", help="witnesses against the 7 index-2 superlattices")
    s.set_defaults(func=cmd_eliminate)

    s = sub.add_parser("delaunay", help="analyse one Gram matrix")
    s.add_argument("--gram", required=True)
    s.set_defaults(func=cmd_delaunay)

    s = sub.add_parser("survey", help="analyse a family of Gram matrices")
    s.add_argument("--grams", help="JSON file; defaults to the curated family")
    s.add_argument("--table", action="store_true", help="also print a markdown table on stderr")
    s.set_defaults(func=cmd_survey)

    s = sub.add_parser("code", help="canonical code of a fan JSON document")
    s.add_argument("--fan", required=True)
    s.set_defaults(func=cmd_code)

    s = sub.add_parser("report", help="run everything and write report.json / report.md")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        result, ok = args.func(args)
    except UsageError as exc:
        print(f"jammedfan: error: {exc}", file=sys.stderr)
        return 2
    text = result + "\n" if isinstance(result, str) else dumps(result)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
