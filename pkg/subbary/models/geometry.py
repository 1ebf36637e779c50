from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from ..utils.exact import Vector, dot, format_rational, polyder, polyval, to_fraction, to_vector
from .errors import DomainError, ParseError

SIDE_GE = "ge"
SIDE_LE = "le"
SIDES = (SIDE_GE, SIDE_LE)


@dataclass(frozen=True)
class Facet:
    """Half-space {x : normal . x <= offset} supporting a facet of a body"""
    normal: Vector
    offset: Fraction
    vertex_ids: Tuple[int, ...]

    def slack(self, point: Vector) -> Fraction:
        return self.offset - dot(self.normal, point)


@dataclass(frozen=True)
class ConvexBody:
    """Full-dimensional polytope with exact rational data.

    Instances are produced by ConvexBodyKernel.build, which guarantees that
    every vertex is extreme, the facet list is complete and volume > 0.
    Volume and barycenter are computed once at construction.
    """
    dim: int
    vertices: Tuple[Vector, ...]
    facets: Tuple[Facet, ...]
    volume: Fraction
    barycenter: Vector

    def contains(self, point: Vector) -> bool:
        return all(f.slack(point) >= 0 for f in self.facets)

    def to_dict(self, exact: bool = True) -> Dict:
        fmt = format_rational if exact else (lambda x: float(x))
        return {
            "dim": self.dim,
            "vertices": [[fmt(x) for x in v] for v in self.vertices],
        }


@dataclass(frozen=True)
class Direction:
    """Linear functional p(x) = vector . x.

    Coordinate directions use 1-based axis indices. General vectors are not
    normalized for evaluation; `norm` gives the Euclidean length on demand.
    """
    vector: Vector
    axis: Optional[int] = None

    def __post_init__(self):
        if not self.vector or all(x == 0 for x in self.vector):
            raise DomainError("direction must be a nonzero vector")

    @classmethod
    def coordinate(cls, axis: int, dim: int) -> "Direction":
        if not 1 <= axis <= dim:
            raise DomainError(f"axis {axis} not in 1..{dim}")
        vec = tuple(Fraction(1) if i == axis - 1 else Fraction(0) for i in range(dim))
        return cls(vector=vec, axis=axis)

    @classmethod
    def from_values(cls, values) -> "Direction":
        return cls(vector=to_vector(values, "direction"))

    @classmethod
    def parse(cls, text: str, dim: int) -> "Direction":
        """'2' selects the second axis, '1,-1,0' a general vector"""
        text = str(text).strip()
        if "," not in text:
            try:
                return cls.coordinate(int(text), dim)
            except ValueError:
                raise ParseError(f"not an axis index: {text!r}", "direction")
        vec = cls.from_values(text.split(","))
        if len(vec.vector) != dim:
            raise ParseError(f"expected {dim} components, got {len(vec.vector)}", "direction")
        return vec

    @property
    def dim(self) -> int:
        return len(self.vector)

    @property
    def norm(self) -> float:
        return sum(float(x) ** 2 for x in self.vector) ** 0.5

    def __call__(self, point: Vector) -> Fraction:
        return dot(self.vector, point)


@dataclass(frozen=True)
class SliceSpec:
    """Half-space {p >= t} (side 'ge') or {p <= t} (side 'le')"""
    direction: Direction
    t: Fraction
    side: str = SIDE_GE

    def __post_init__(self):
        if self.side not in SIDES:
            raise DomainError(f"side must be one of {SIDES}, got {self.side!r}")
        object.__setattr__(self, "t", to_fraction(self.t, "t"))

    def signed_distance(self, point: Vector) -> Fraction:
        """Non-negative exactly on the kept side"""
        value = self.direction(point) - self.t
        return value if self.side == SIDE_GE else -value


@dataclass(frozen=True)
class SlicePiece:
    """Polynomials (in u = t - start) for one interval between vertex heights"""
    start: Fraction
    end: Fraction
    volume: Tuple[Fraction, ...]
    moment: Tuple[Fraction, ...]


@dataclass(frozen=True)
class SliceProfile:
    """Exact piecewise-polynomial t -> |K_{>=t}| and t -> int_{K_{>=t}} p"""
    direction: Direction
    lower: Fraction
    upper: Fraction
    total_volume: Fraction
    total_moment: Fraction
    pieces: Tuple[SlicePiece, ...] = field(default_factory=tuple)

    def _piece(self, t: Fraction) -> SlicePiece:
        for piece in self.pieces:
            if t <= piece.end:
                return piece
        return self.pieces[-1]

    def volume_ge(self, t) -> Fraction:
        t = to_fraction(t, "t")
        if t <= self.lower:
            return self.total_volume
        if t >= self.upper:
            return Fraction(0)
        piece = self._piece(t)
        return polyval(piece.volume, t - piece.start)

    def moment_ge(self, t) -> Fraction:
        t = to_fraction(t, "t")
        if t <= self.lower:
            return self.total_moment
        if t >= self.upper:
            return Fraction(0)
        piece = self._piece(t)
        return polyval(piece.moment, t - piece.start)

    def volume_le(self, t) -> Fraction:
        return self.total_volume - self.volume_ge(t)

    def moment_le(self, t) -> Fraction:
        return self.total_moment - self.moment_ge(t)

    def density(self, t) -> Fraction:
        """d/dt |K_{<=t}|, the (direction-scaled) cross-section volume at p = t"""
        t = to_fraction(t, "t")
        if t < self.lower or t > self.upper:
            return Fraction(0)
        piece = self.pieces[-1] if t >= self.upper else self._piece(t)
        if t == piece.end and piece is not self.pieces[-1]:
            piece = self.pieces[self.pieces.index(piece) + 1]
        return -polyval(polyder(piece.volume), t - piece.start)

    def mean_ge(self, t) -> Optional[Fraction]:
        """p(Bc K_{>=t}), or None for an empty slice"""
        volume = self.volume_ge(t)
        return self.moment_ge(t) / volume if volume > 0 else None

    def mean_le(self, t) -> Optional[Fraction]:
        volume = self.volume_le(t)
        return self.moment_le(t) / volume if volume > 0 else None
