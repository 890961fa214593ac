"""Exact rational 3-D linear algebra.

Vectors are plain tuples of :class:`fractions.Fraction`; matrices are tuples
of row tuples. Nothing here ever touches a float.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence

Rat = Fraction
Vec3 = tuple  # tuple[Fraction, Fraction, Fraction]
Matrix3 = tuple  # tuple[Vec3, Vec3, Vec3]

_RAT_RE = re.compile(r"^\s*([+-]?\d+)(?:/(\d+))?\s*$")


class RationalFormatError(ValueError):
    pass


def parse_rat(value) -> Fraction:
    """Parse ``"p/q"`` (q > 0), ``"p"`` or a Python int into a Fraction.

    Floats and decimal strings are rejected on purpose.
    """
    if isinstance(value, bool):
        raise RationalFormatError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if not isinstance(value, str):
        raise RationalFormatError(f"not a rational: {value!r}")
    m = _RAT_RE.match(value)
    if m is None:
        raise RationalFormatError(f"malformed rational {value!r}; expected 'p/q'")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise RationalFormatError(f"zero denominator in {value!r}")
    return Fraction(num, den)


def fmt_rat(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def vec(*xs) -> Vec3:
    if len(xs) == 1 and not isinstance(xs[0], (int, Fraction)):
        xs = tuple(xs[0])
    return tuple(Fraction(x) for x in xs)


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def neg(a):
    return tuple(-x for x in a)


def scale(k, a):
    return tuple(k * x for x in a)


def dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def det3(a, b, c):
    return dot(a, cross(b, c))


def is_zero(a) -> bool:
    return all(x == 0 for x in a)


def matvec(m, v):
    return tuple(dot(row, v) for row in m)


def matmul(a, b):
    cols = list(zip(*b))
    return tuple(tuple(dot(row, col) for col in cols) for row in a)


def transpose(m):
    return tuple(tuple(r) for r in zip(*m))


def det(m) -> Fraction:
    return det3(m[0], m[1], m[2])


def inverse(m):
    d = det(m)
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    a, b, c = m
    # rows of the inverse are the columns of the adjugate
    cols = (cross(b, c), cross(c, a), cross(a, b))
    return tuple(tuple(cols[j][i] / d for j in range(3)) for i in range(3))


def solve3(m, rhs):
    """Solve ``m x = rhs`` exactly; raises ZeroDivisionError when singular."""
    return matvec(inverse(m), rhs)


def quad(g, v) -> Fraction:
    """Value of the quadratic form ``v^T g v``."""
    return dot(v, matvec(g, v))


def bilinear(g, u, v) -> Fraction:
    return dot(u, matvec(g, v))


def primitive(v) -> tuple[int, ...]:
    """Scale a nonzero rational vector by a positive factor to a primitive integer vector."""
    v = [Fraction(x) for x in v]
    if all(x == 0 for x in v):
        raise ValueError("zero vector has no primitive form")
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for k in ints:
        g = gcd(g, abs(k))
    return tuple(k // g for k in ints)


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def rref(rows: Sequence[Sequence[Fraction]]):
    """Reduced row echelon form. Returns ``(matrix, pivot_columns)``."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        lead = m[r][c]
        m[r] = [x / lead for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def affine_dimension(points: Iterable[Sequence[Fraction]]) -> int:
    pts = [tuple(Fraction(x) for x in p) for p in points]
    if not pts:
        return -1
    base = pts[0]
    return rank([sub(p, base) for p in pts[1:]]) if len(pts) > 1 else 0


def rat_sqrt_floor(x: Fraction) -> int:
    """Largest integer k >= 0 with k*k <= x (x >= 0)."""
    if x < 0:
        raise ValueError("negative argument")
    k = isqrt(x.numerator // x.denominator)
    while (k + 1) * (k + 1) <= x:
        k += 1
    return k
