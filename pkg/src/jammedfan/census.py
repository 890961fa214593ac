"""Counting systems and isomorph-free generation of 3-D fan complexes.

Generation is graph-first: enumerate simple graphs with the target degree
sequence (untouched vertices of equal target degree are interchangeable, so
only the lowest-indexed ones are ever chosen), then every rotation system on
each graph, keeping those whose faces form a valid sphere complex with the
right cell count. Duplicates collapse under :func:`canonical_code`.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .fan import (
    FanComplex,
    Profile,
    antipodal_involution,
    canonical_code,
    is_jammed,
    validate,
)

log = logging.getLogger(__name__)

MAX_RAYS = 8
TYPE_TAGS = ("tetrahedron", "octahedron", "quadrangular-pyramid", "triangular-prism", "parallelepiped")


class ResourceGuardError(ValueError):
    pass


class ClassificationError(RuntimeError):
    pass


# --- counting ------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileSolutionSet:
    symmetric: bool
    profiles: frozenset

    def sorted(self) -> list:
        return sorted(self.profiles)


def profile_equations_hold(p: Profile, symmetric: bool) -> bool:
    """Edge count, Euler relation and the cell-pair count, all doubled to stay integral."""
    a3, a4, b, c = p.as_tuple()
    eq1 = 2 * b == 3 * a3 + 4 * a4
    eq2 = a3 + a4 - b + c == 2
    pairs2 = c * (c - 1)
    eq3 = pairs2 == 2 * (2 * a4 + b) + (c if symmetric else 0)
    return eq1 and eq2 and eq3


def solve_profiles(symmetric: bool = False, c_values: Optional[Iterable[int]] = None) -> ProfileSolutionSet:
    """Exhaustive integer search for admissible (a3, a4, b, c).

    Eliminating a4 and b leaves a3 = 8(c - 2) - c(c - 1) (asymmetric) or the
    analogue with c(c - 2); a3 >= 0 then caps c at 8, so the default range
    0..16 is comfortably exhaustive.
    """
    if c_values is None:
        c_values = range(0, 17)
    found = set()
    for c in c_values:
        if symmetric:
            if c % 2 or c < 6:
                continue
        elif c < 4:
            continue
        bound = 4 * c + 4
        for a3 in range(bound + 1):
            for a4 in range(bound + 1):
                if (3 * a3 + 4 * a4) % 2:
                    continue
                p = Profile(a3, a4, (3 * a3 + 4 * a4) // 2, c)
                if profile_equations_hold(p, symmetric):
                    found.add(p)
    return ProfileSolutionSet(symmetric, frozenset(found))


def reduced_relation_holds(p: Profile) -> bool:
    """c(c-1)/2 = 4(c-2) - a3/2, doubled."""
    return p.c * (p.c - 1) == 8 * (p.c - 2) - p.a3


# --- graph enumeration ----------------------------------------------------------


def _degree_graphs(degrees: list) -> Iterable[list]:
    """Simple graphs (as adjacency lists) realising ``degrees``, up to swaps of untouched vertices."""
    n = len(degrees)
    adj = [[] for _ in range(n)]

    def rec(i):
        if i == n:
            yield [list(a) for a in adj]
            return
        need = degrees[i] - len(adj[i])
        if need < 0:
            return
        cands = [j for j in range(i + 1, n) if len(adj[j]) < degrees[j]]
        for chosen in itertools.combinations(cands, need):
            if not _respects_interchangeability(chosen, cands, adj, degrees):
                continue
            for j in chosen:
                adj[i].append(j)
                adj[j].append(i)
            yield from rec(i + 1)
            for j in chosen:
                adj[i].pop()
                adj[j].pop()

    yield from rec(0)


def _respects_interchangeability(chosen, cands, adj, degrees) -> bool:
    chosen = set(chosen)
    untouched = [j for j in cands if not adj[j]]
    by_class = {}
    for j in untouched:
        by_class.setdefault(degrees[j], []).append(j)
    for group in by_class.values():
        picked = [j in chosen for j in group]
        # picked untouched vertices must form a prefix of their class
        if any(not a and b for a, b in zip(picked, picked[1:])):
            return False
    return True


def _faces(rot: dict) -> list:
    """Trace faces of a rotation system; ``rot[v]`` is v's cyclic neighbour list."""
    succ = {}
    for v, nbrs in rot.items():
        k = len(nbrs)
        for i, w in enumerate(nbrs):
            succ[(v, w)] = nbrs[(i + 1) % k]
    seen = set()
    faces = []
    for dart in succ:
        if dart in seen:
            continue
        face = []
        u, v = dart
        while (u, v) not in seen:
            seen.add((u, v))
            face.append(u)
            # next dart along the face: turn at v
            u, v = v, succ[(v, u)]
        faces.append(tuple(face))
    return faces


def _rotation_systems(adj: list) -> Iterable[dict]:
    per_vertex = []
    for v, nbrs in enumerate(adj):
        first, rest = nbrs[0], nbrs[1:]
        per_vertex.append([(first,) + p for p in itertools.permutations(rest)])
    for choice in itertools.product(*per_vertex):
        yield dict(enumerate(choice))


def _connected(adj: list) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(adj)


def complexes_with_profile(p: Profile) -> dict:
    """All valid complexes with profile ``p``, keyed by canonical code."""
    n = p.rays
    if n > MAX_RAYS:
        raise ResourceGuardError(f"profile {p} has {n} rays; enumeration supports at most {MAX_RAYS}")
    if n < 4 or p.c < 4:
        return {}
    degrees = [3] * p.a3 + [4] * p.a4
    if sum(degrees) != 2 * p.b:
        return {}
    found = {}
    for adj in _degree_graphs(degrees):
        if not _connected(adj):
            continue
        for rot in _rotation_systems(adj):
            faces = _faces(rot)
            if len(faces) != p.c:
                continue
            cx = FanComplex(n, faces)
            if not validate(cx).ok:
                continue
            code = canonical_code(cx)
            found.setdefault(code, cx)
    return found


# --- census --------------------------------------------------------------------


@dataclass
class CensusEntry:
    profile: Profile
    symmetric: bool
    complexes: dict  # canonical code -> FanComplex
    jammed: list = field(default_factory=list)  # canonical codes

    def rows(self) -> list:
        out = []
        for code in sorted(self.complexes):
            out.append({"profile": str(self.profile), "canonical_code": code, "jammed": code in self.jammed})
        return out


def generate(p: Profile, symmetric: Optional[bool] = None) -> CensusEntry:
    if symmetric is None:
        symmetric = p in solve_profiles(True).profiles
    complexes = complexes_with_profile(p)
    jammed = []
    for code, cx in sorted(complexes.items()):
        if symmetric and antipodal_involution(cx) is None:
            continue
        if is_jammed(cx).jammed:
            jammed.append(code)
    log.debug("profile %s: %d complexes, %d jammed", p, len(complexes), len(jammed))
    return CensusEntry(p, symmetric, complexes, jammed)


@dataclass(frozen=True)
class JammedType:
    tag: str
    profile: Profile
    symmetric: bool
    canonical_code: str
    complex: FanComplex

    def to_json(self) -> dict:
        return {
            "type_tag": self.tag,
            "profile": str(self.profile),
            "symmetric": self.symmetric,
            "canonical_code": self.canonical_code,
        }


def census() -> list:
    entries = []
    for symmetric in (False, True):
        for p in solve_profiles(symmetric).sorted():
            entries.append(generate(p, symmetric))
    return entries


def classify_jammed(entries: Optional[list] = None) -> list:
    """The full classification: every jammed survivor, tagged by its associated cell."""
    from .cells import cell_for_complex, tag_for_polytope
    from .geom import WITNESSES, witness

    if entries is None:
        entries = census()
    out = []
    for entry in entries:
        for code in entry.jammed:
            cx = entry.complexes[code]
            _, poly = cell_for_complex(cx)
            tag = tag_for_polytope(poly)
            if tag is None:
                raise ClassificationError(f"jammed survivor {code} has an unrecognised cell")
            if tag not in WITNESSES or canonical_code(witness(tag).complex) != code:
                raise ClassificationError(f"jammed survivor {code} ({tag}) has no matching geometric witness")
            out.append(JammedType(tag, entry.profile, entry.symmetric, code, cx))
    out.sort(key=lambda t: TYPE_TAGS.index(t.tag))
    return out


# --- two-dimensional fans -------------------------------------------------------


def jammed_2d(n: int) -> bool:
    """Whether a complete 2-D fan with ``n`` cyclically arranged cones can be jammed.

    Cones i and j share a ray iff they are cyclically adjacent. Every other
    pair meets only at the apex, so it must be swapped by the fan's central
    symmetry, which on a cycle is the half-turn i -> i + n/2.
    """
    if n < 3:
        raise ValueError("a complete 2-D fan needs at least 3 cones")
    apart = {frozenset((i, j)) for i, j in itertools.combinations(range(n), 2) if (j - i) % n not in (1, n - 1)}
    if not apart:
        return True
    if n % 2:
        return False
    half_turn = {frozenset((i, i + n // 2)) for i in range(n // 2)}
    return apart == half_turn
