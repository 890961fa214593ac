"""Lattices of associated cells and the half-lattice elimination argument."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import rational as q
from .cells import PointConfig, Polytope3, canonical_config, hull3, volume
from .census import TYPE_TAGS


class RankError(ValueError):
    pass


class EliminationError(RuntimeError):
    pass


def hermite_normal_form(rows) -> list:
    """Row-style HNF of an integer matrix; zero rows dropped.

    Upper triangular with positive pivots and entries above each pivot
    reduced into [0, pivot).
    """
    m = [list(map(int, r)) for r in rows if any(r)]
    ncols = len(rows[0]) if rows else 0
    r0 = 0
    for c in range(ncols):
        # gcd-reduce column c over rows r0.. by repeated Euclid
        while True:
            nz = [i for i in range(r0, len(m)) if m[i][c] != 0]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda i: abs(m[i][c]))
            for i in nz:
                if i != piv:
                    f = m[i][c] // m[piv][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[piv])]
        nz = [i for i in range(r0, len(m)) if m[i][c] != 0]
        if not nz:
            continue
        i = nz[0]
        m[r0], m[i] = m[i], m[r0]
        if m[r0][c] < 0:
            m[r0] = [-a for a in m[r0]]
        for k in range(r0):
            f = m[k][c] // m[r0][c]
            m[k] = [a - f * b for a, b in zip(m[k], m[r0])]
        r0 += 1
    return m[:r0]


@dataclass(frozen=True)
class Lattice3:
    basis: tuple  # three rational row vectors

    def __post_init__(self):
        b = tuple(q.vec(v) for v in self.basis)
        if len(b) != 3 or q.det(b) == 0:
            raise RankError("basis must be three independent vectors")
        object.__setattr__(self, "basis", b)

    @property
    def covolume(self) -> Fraction:
        return abs(q.det(self.basis))

    def coords(self, x) -> tuple:
        """Coordinates of ``x`` in the basis (rows)."""
        return q.solve3(q.transpose(self.basis), q.vec(x))

    def __contains__(self, x) -> bool:
        return all(c.denominator == 1 for c in self.coords(x))

    def combo(self, coeffs) -> tuple:
        acc = (Fraction(0),) * 3
        for c, b in zip(coeffs, self.basis):
            acc = q.add(acc, q.scale(Fraction(c), b))
        return acc

    @classmethod
    def generated_by(cls, vectors) -> "Lattice3":
        vs = [q.vec(v) for v in vectors]
        den = 1
        for v in vs:
            for x in v:
                den = lcm(den, x.denominator)
        ints = [[int(x * den) for x in v] for v in vs]
        h = hermite_normal_form(ints) if ints else []
        if len(h) < 3:
            raise RankError(f"vectors span rank {len(h)} < 3")
        return cls(tuple(tuple(Fraction(x, den) for x in r) for r in h))


def span_lattice(config: PointConfig) -> Lattice3:
    base = config.points[0]
    return Lattice3.generated_by([q.sub(p, base) for p in config.points[1:]])


def standard_lattice() -> Lattice3:
    return Lattice3(((1, 0, 0), (0, 1, 0), (0, 0, 1)))


@dataclass
class DifferenceBody:
    polytope: Polytope3

    @property
    def volume(self) -> Fraction:
        return volume(self.polytope)

    def is_centrally_symmetric(self) -> bool:
        pts = set(self.polytope.vertex_points())
        return all(q.neg(p) in pts for p in pts)


def difference_body(poly: Polytope3) -> DifferenceBody:
    verts = poly.vertex_points()
    if q.affine_dimension(verts) < 3:
        from .cells import DegenerateError

        raise DegenerateError("difference body of a degenerate polytope")
    diffs = sorted({q.sub(a, b) for a in verts for b in verts})
    body = DifferenceBody(hull3(diffs))
    if not body.is_centrally_symmetric():
        raise AssertionError("difference body is not centrally symmetric")
    return body


def index_bound_for(config: PointConfig) -> Fraction:
    """8 covol(Lambda(F)) / vol(D - D): an upper bound for the affine index."""
    lat = span_lattice(config)
    return 8 * lat.covolume / difference_body(hull3(config)).volume


def index_bound(type_tag: str) -> Fraction:
    if type_tag not in TYPE_TAGS:
        raise KeyError(f"unknown type tag {type_tag!r}")
    return index_bound_for(canonical_config(type_tag))


# --- half-lattice candidates ---------------------------------------------------


@dataclass(frozen=True)
class Superlattice:
    base: Lattice3
    parity: tuple  # epsilon in {0,1}^3, not all zero
    coset_shift: tuple

    def __contains__(self, x) -> bool:
        return x in self.base or q.sub(x, self.coset_shift) in self.base


def halflattice_candidates(base: Lattice3) -> list:
    out = []
    for eps in itertools.product((0, 1), repeat=3):
        if not any(eps):
            continue
        shift = q.scale(Fraction(1, 2), base.combo(eps))
        out.append(Superlattice(base, eps, shift))
    return out


@dataclass(frozen=True)
class EliminationWitness:
    parity: tuple
    edge: tuple  # two vertices of T = -conv(config)
    midpoint: tuple
    shift: tuple  # s in candidate \ base with midpoint in T + s

    def to_json(self) -> dict:
        f = lambda v: [q.fmt_rat(x) for x in v]
        return {"shift": f(self.shift), "edge": [f(self.edge[0]), f(self.edge[1])], "midpoint": f(self.midpoint), "parity": list(self.parity)}


def eliminate_candidate(candidate: Superlattice, config: PointConfig, reach: int = 2) -> EliminationWitness:
    """Find an edge midpoint of T = -conv(config) lying in a translate T + s, s in the new coset."""
    tet = hull3([q.neg(p) for p in config.points])
    verts = tet.vertex_points()
    if len(verts) != 4:
        raise ValueError("elimination is defined for tetrahedral cells")
    zs = sorted(itertools.product(range(-reach, reach + 1), repeat=3), key=lambda z: (sum(map(abs, z)), z))
    for a, b in itertools.combinations(verts, 2):
        mid = q.scale(Fraction(1, 2), q.add(a, b))
        for z in zs:
            s = q.add(candidate.coset_shift, candidate.base.combo(z))
            if tet.contains(q.sub(mid, s)):
                return EliminationWitness(candidate.parity, (a, b), mid, s)
    raise EliminationError(f"no witness for candidate {candidate.parity}")


def verify_witness(w: EliminationWitness, candidate: Superlattice, config: PointConfig) -> bool:
    """Re-check a witness from scratch by barycentric coordinates."""
    t = [q.neg(p) for p in config.points]
    edge_ok = w.edge[0] in t and w.edge[1] in t and w.midpoint == q.scale(Fraction(1, 2), q.add(*w.edge))
    coset_ok = w.shift in candidate and w.shift not in candidate.base
    x = q.sub(w.midpoint, w.shift)
    m = q.transpose([q.sub(t[i], t[0]) for i in (1, 2, 3)])
    lam = q.solve3(m, q.sub(x, t[0]))
    inside = all(c >= 0 for c in lam) and sum(lam) <= 1
    return edge_ok and coset_ok and inside


@dataclass
class IndexVerdict:
    type_tag: str
    bound: Fraction
    index: int
    eliminations: list

    @property
    def method(self) -> str:
        if self.bound < 2:
            return "bound below 2"
        return "index 1 after elimination"

    def to_json(self) -> dict:
        return {
            "bound": q.fmt_rat(self.bound),
            "index": self.index,
            "method": self.method,
            "eliminations": [e.to_json() for e in self.eliminations],
        }


def verdict_for(type_tag: str) -> IndexVerdict:
    config = canonical_config(type_tag)
    bound = index_bound_for(config)
    if bound < 2:
        return IndexVerdict(type_tag, bound, 1, [])
    if bound >= 3:
        raise EliminationError(f"{type_tag}: bound {bound} leaves index 2 or more open")
    base = span_lattice(config)
    wits = []
    for cand in halflattice_candidates(base):
        w = eliminate_candidate(cand, config)
        if not verify_witness(w, cand, config):
            raise EliminationError(f"witness for {cand.parity} fails re-verification")
        wits.append(w)
    return IndexVerdict(type_tag, bound, 1, wits)


def index_verdicts() -> dict:
    return {tag: verdict_for(tag) for tag in TYPE_TAGS}
