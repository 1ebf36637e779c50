"""
Exact rational linear algebra on Fraction vectors and matrices.

Everything here is deterministic and free of rounding: inputs are coerced to
fractions.Fraction and every elimination is carried out over the rationals.
"""

import math
from fractions import Fraction
from numbers import Rational
from typing import List, Optional, Sequence, Tuple

from ..models.errors import ParseError

Vector = Tuple[Fraction, ...]


def to_fraction(value, field: str = "") -> Fraction:
    """Coerce ints, Fractions, 'p/q' strings and finite floats to Fraction"""
    if isinstance(value, bool):
        raise ParseError(f"booleans are not numbers: {value!r}", field)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ParseError(f"non-finite number {value!r}", field)
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"not a rational number: {value!r} ({e})", field)
    raise ParseError(f"unsupported number type {type(value).__name__}", field)


def to_vector(values: Sequence, field: str = "") -> Vector:
    return tuple(to_fraction(v, field) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def scale(c: Fraction, v: Sequence[Fraction]) -> Vector:
    return tuple(c * a for a in v)


def centroid(points: Sequence[Sequence[Fraction]]) -> Vector:
    count = len(points)
    dim = len(points[0])
    return tuple(sum((p[i] for p in points), Fraction(0)) / count for i in range(dim))


def _row_echelon(rows: Sequence[Sequence[Fraction]]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form; returns the matrix and its pivot columns"""
    matrix = [list(r) for r in rows]
    if not matrix:
        return matrix, []
    ncols = len(matrix[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(matrix)) if matrix[i][c] != 0), None)
        if pivot is None:
            continue
        matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
        lead = matrix[r][c]
        matrix[r] = [x / lead for x in matrix[r]]
        for i in range(len(matrix)):
            if i != r and matrix[i][c] != 0:
                factor = matrix[i][c]
                matrix[i] = [a - factor * b for a, b in zip(matrix[i], matrix[r])]
        pivots.append(c)
        r += 1
        if r == len(matrix):
            break
    return matrix, pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(_row_echelon(rows)[1])


def affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    """Dimension of the affine hull of a point set (-1 for the empty set)"""
    if not points:
        return -1
    base = points[0]
    return rank([sub(p, base) for p in points[1:]])


def nullspace_vector(rows: Sequence[Sequence[Fraction]], ncols: int) -> Optional[Vector]:
    """A nonzero vector orthogonal to every row, or None if the rows have full rank"""
    if not rows:
        return tuple(Fraction(1) if i == 0 else Fraction(0) for i in range(ncols))
    matrix, pivots = _row_echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    f = free[0]
    vec = [Fraction(0)] * ncols
    vec[f] = Fraction(1)
    for row, c in zip(matrix, pivots):
        vec[c] = -row[f]
    return tuple(vec)


def determinant(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination"""
    matrix = [list(r) for r in rows]
    size = len(matrix)
    det = Fraction(1)
    for c in range(size):
        pivot = next((i for i in range(c, size) if matrix[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            matrix[c], matrix[pivot] = matrix[pivot], matrix[c]
            det = -det
        lead = matrix[c][c]
        det *= lead
        for i in range(c + 1, size):
            if matrix[i][c] != 0:
                factor = matrix[i][c] / lead
                matrix[i] = [a - factor * b for a, b in zip(matrix[i], matrix[c])]
    return det


def primitive(vec: Sequence[Fraction]) -> Vector:
    """Scale a nonzero vector so its first nonzero entry has absolute value 1"""
    lead = next(x for x in vec if x != 0)
    return tuple(x / abs(lead) for x in vec)


def interpolate(nodes: Sequence[Fraction], values: Sequence[Fraction]) -> List[Fraction]:
    """Monomial coefficients (lowest degree first) of the interpolating polynomial"""
    size = len(nodes)
    coeffs = list(values)
    # Newton divided differences, in place
    for j in range(1, size):
        for i in range(size - 1, j - 1, -1):
            coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (nodes[i] - nodes[i - j])
    # expand the Newton form into monomials
    poly = [coeffs[-1]]
    for k in range(size - 2, -1, -1):
        shifted = [Fraction(0)] + poly
        for i, c in enumerate(poly):
            shifted[i] -= nodes[k] * c
        shifted[0] += coeffs[k]
        poly = shifted
    return poly


def polyval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    result = Fraction(0)
    for c in reversed(coeffs):
        result = result * x + c
    return result


def polyder(coeffs: Sequence[Fraction]) -> List[Fraction]:
    return [k * c for k, c in enumerate(coeffs)][1:] or [Fraction(0)]


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
