"""
Convex Body Kernel
Exact polytope geometry: hull construction, volume, barycenter, half-space
clipping, sub-barycenters and volume quantiles
"""

import logging
import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..models.errors import DegenerateBody, DomainError, EmptyInput, EmptySlice, OutOfSupport
from ..models.geometry import (
    SIDE_GE,
    ConvexBody,
    Direction,
    Facet,
    SlicePiece,
    SliceProfile,
    SliceSpec,
)
from ..utils.exact import (
    Vector,
    add,
    centroid,
    determinant,
    dot,
    format_rational,
    interpolate,
    nullspace_vector,
    primitive,
    rank,
    scale,
    sub,
    to_fraction,
    to_vector,
)
from ..utils.numeric import format_number, hammer_factor

logger = logging.getLogger(__name__)


class MonteCarloEstimate(NamedTuple):
    estimate: float
    std_error: float


class HammerCheck(NamedTuple):
    """Both sub-barycenter inequalities at one threshold; None outside their t-range"""
    t: Fraction
    tau_ge: Fraction
    lhs_ge: Optional[float]
    rhs_ge: Optional[float]
    slack_ge: Optional[float]
    lhs_le: Optional[float]
    rhs_le: Optional[float]
    slack_le: Optional[float]


class NeumannHammerBounds(NamedTuple):
    lower: Fraction
    value: Fraction
    upper: Fraction


class ConvexBodyKernel:
    """Exact geometry over rational polytopes.

    All bodies are immutable; the kernel itself only holds a cache of slice
    profiles keyed by (body, direction).
    """

    def __init__(self, profile_cache_size: int = 256):
        self.slice_profile = lru_cache(maxsize=profile_cache_size)(self._slice_profile)

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    def build(self, points: Iterable[Sequence], dim: int) -> ConvexBody:
        """Convex hull of a point set, reduced to its extreme vertices"""
        try:
            if dim < 1:
                raise DomainError(f"dimension must be positive, got {dim}")
            pts = sorted({to_vector(p, "vertices") for p in points})
            if not pts:
                raise EmptyInput("no points supplied")
            bad = [p for p in pts if len(p) != dim]
            if bad:
                raise DegenerateBody(f"point {bad[0]} does not have {dim} coordinates")
            if len(pts) < dim + 1:
                raise DegenerateBody(f"{len(pts)} points cannot span R^{dim}")

            if dim == 1:
                vertices, facets = self._segment(pts)
            else:
                vertices, facets = self._hull(pts, dim)
            volume, barycenter = self._integrate(vertices, facets, dim)
            if volume <= 0:
                raise DegenerateBody("hull has zero volume")
            return ConvexBody(dim=dim, vertices=vertices, facets=facets,
                              volume=volume, barycenter=barycenter)
        except (EmptyInput, DegenerateBody, DomainError) as e:
            logger.error(f"Error building convex body: {str(e)}")
            raise

    def _segment(self, pts: List[Vector]) -> Tuple[Tuple[Vector, ...], Tuple[Facet, ...]]:
        lo, hi = pts[0], pts[-1]
        if lo == hi:
            raise DegenerateBody("all points coincide")
        facets = (
            Facet(normal=(Fraction(-1),), offset=-lo[0], vertex_ids=(0,)),
            Facet(normal=(Fraction(1),), offset=hi[0], vertex_ids=(1,)),
        )
        return (lo, hi), facets

    def _hull(self, pts: List[Vector], dim: int) -> Tuple[Tuple[Vector, ...], Tuple[Facet, ...]]:
        """Beneath-beyond hull; coplanar points are never treated as visible"""
        simplex = [0]
        diffs: List[Vector] = []
        for i in range(1, len(pts)):
            candidate = diffs + [sub(pts[i], pts[0])]
            if rank(candidate) > len(diffs):
                diffs = candidate
                simplex.append(i)
                if len(simplex) == dim + 1:
                    break
        if len(simplex) < dim + 1:
            raise DegenerateBody(f"affine hull has dimension {len(simplex) - 1} < {dim}")

        interior = centroid([pts[i] for i in simplex])

        def make_facet(ids: Tuple[int, ...]):
            base = pts[ids[0]]
            normal = nullspace_vector([sub(pts[i], base) for i in ids[1:]], dim)
            offset = dot(normal, base)
            if dot(normal, interior) > offset:
                normal, offset = scale(Fraction(-1), normal), -offset
            return ids, normal, offset

        surface = [make_facet(tuple(i for i in simplex if i != j)) for j in simplex]
        in_simplex = set(simplex)
        for i in range(len(pts)):
            if i in in_simplex:
                continue
            point = pts[i]
            visible = [f for f in surface if dot(f[1], point) > f[2]]
            if not visible:
                continue
            ridges = Counter(r for f in visible for r in combinations(f[0], dim - 1))
            horizon = [r for r, count in ridges.items() if count == 1]
            surface = [f for f in surface if dot(f[1], point) <= f[2]]
            surface.extend(make_facet(tuple(sorted(r + (i,)))) for r in horizon)

        planes: Dict[Tuple[Vector, Fraction], None] = {}
        for _, normal, offset in surface:
            lead = abs(next(x for x in normal if x != 0))
            planes[(primitive(normal), offset / lead)] = None

        used = sorted({i for ids, _, _ in surface for i in ids})
        vertices = []
        for i in used:
            normals = [n for n, off in planes if dot(n, pts[i]) == off]
            if len(normals) >= dim and rank(normals) == dim:
                vertices.append(pts[i])
        vertices.sort()

        facets = []
        for normal, offset in sorted(planes):
            ids = tuple(k for k, v in enumerate(vertices) if dot(normal, v) == offset)
            facets.append(Facet(normal=normal, offset=offset, vertex_ids=ids))
        return tuple(vertices), tuple(facets)

    def _triangulate(self, vertices: Sequence[Vector], facets: Sequence[Facet], dim: int) -> List[Tuple[int, ...]]:
        """Boundary triangulation: each facet fanned from its lexicographically smallest vertex"""
        facet_sets = [frozenset(f.vertex_ids) for f in facets]
        memo: Dict[FrozenSet[int], List[Tuple[int, ...]]] = {}

        def fan(face: FrozenSet[int], k: int) -> List[Tuple[int, ...]]:
            if k == 0:
                return [(min(face),)]
            if face in memo:
                return memo[face]
            apex = min(face)
            # the facets of a face are the maximal proper intersections with other facets
            candidates = {face & other for other in facet_sets} - {face}
            candidates = {g for g in candidates if len(g) >= k}
            subfaces = [g for g in candidates if not any(g < h for h in candidates)]
            simplices = []
            for g in sorted(subfaces, key=sorted):
                if apex in g:
                    continue
                simplices.extend((apex,) + s for s in fan(g, k - 1))
            memo[face] = simplices
            return simplices

        boundary = []
        for face in facet_sets:
            boundary.extend(fan(face, dim - 1))
        return boundary

    def _integrate(self, vertices, facets, dim) -> Tuple[Fraction, Vector]:
        """Exact volume and barycenter from the star triangulation about the vertex centroid"""
        apex = centroid(vertices)
        factorial = math.factorial(dim)
        volume = Fraction(0)
        moment = tuple(Fraction(0) for _ in range(dim))
        for simplex in self._triangulate(vertices, facets, dim):
            corners = [vertices[i] for i in simplex]
            piece = abs(determinant([sub(c, apex) for c in corners])) / factorial
            if piece == 0:
                continue
            tip = centroid(corners + [apex])
            volume += piece
            moment = add(moment, scale(piece, tip))
        if volume == 0:
            return volume, apex
        return volume, scale(1 / volume, moment)

    # ------------------------------------------------------------------
    # basic queries
    # ------------------------------------------------------------------

    def volume(self, body: ConvexBody) -> Fraction:
        return body.volume

    def barycenter(self, body: ConvexBody) -> Vector:
        return body.barycenter

    def simplex_volumes(self, body: ConvexBody) -> List[Fraction]:
        """Volumes of the star-triangulation simplices (they sum to the body volume)"""
        apex = centroid(body.vertices)
        factorial = math.factorial(body.dim)
        return [
            abs(determinant([sub(body.vertices[i], apex) for i in simplex])) / factorial
            for simplex in self._triangulate(body.vertices, body.facets, body.dim)
        ]

    def support(self, body: ConvexBody, direction: Direction) -> Tuple[Fraction, Fraction]:
        self._check_direction(body, direction)
        values = [direction(v) for v in body.vertices]
        return min(values), max(values)

    def _check_direction(self, body: ConvexBody, direction: Direction):
        if direction.dim != body.dim:
            raise DomainError(f"direction has {direction.dim} components, body lives in R^{body.dim}")

    # ------------------------------------------------------------------
    # slicing
    # ------------------------------------------------------------------

    def clip(self, body: ConvexBody, spec: SliceSpec) -> Optional[ConvexBody]:
        """Intersection with a half-space; None when the intersection has zero volume.

        The result is assembled from the body's own face lattice: kept vertices,
        one crossing point per cut edge, the surviving facets and the cutting
        hyperplane. No hull is recomputed.
        """
        self._check_direction(body, spec.direction)
        distances = [spec.signed_distance(v) for v in body.vertices]
        if all(d >= 0 for d in distances):
            return body
        if all(d <= 0 for d in distances):
            return None
        try:
            return self._cut(body, spec, distances)
        except DegenerateBody as e:
            logger.error(f"Error clipping convex body at t = {format_number(spec.t)}: {str(e)}")
            raise

    def _cut(self, body: ConvexBody, spec: SliceSpec, distances: List[Fraction]) -> ConvexBody:
        dim = body.dim
        incidence: List[set] = [set() for _ in body.vertices]
        for k, facet in enumerate(body.facets):
            for i in facet.vertex_ids:
                incidence[i].add(k)
        facet_sets = [frozenset(f.vertex_ids) for f in body.facets]
        everything = frozenset(range(len(body.vertices)))

        # new vertex -> indices of the original facets it lies on
        points: Dict[Vector, FrozenSet[int]] = {
            v: frozenset(incidence[i]) for i, (v, d) in enumerate(zip(body.vertices, distances)) if d >= 0
        }
        for i, j in combinations(range(len(body.vertices)), 2):
            du, dw = distances[i], distances[j]
            if du * dw >= 0:
                continue
            common = incidence[i] & incidence[j]
            if len(common) < dim - 1:
                continue
            # {i, j} is an edge iff it is the whole vertex set of the smallest face holding both
            if everything.intersection(*(facet_sets[k] for k in common)) != {i, j}:
                continue
            u, w = body.vertices[i], body.vertices[j]
            points[add(u, scale(du / (du - dw), sub(w, u)))] = frozenset(common)

        vertices = tuple(sorted(points))
        planes: List[Tuple[Vector, Fraction, Tuple[int, ...]]] = []
        for k, facet in enumerate(body.facets):
            # a facet survives iff one of its vertices is strictly on the kept side
            if any(distances[i] > 0 for i in facet.vertex_ids):
                ids = tuple(m for m, v in enumerate(vertices) if k in points[v])
                planes.append((facet.normal, facet.offset, ids))

        # {p >= t} is {-p <= -t}
        sign = Fraction(-1) if spec.side == SIDE_GE else Fraction(1)
        lead = abs(next(x for x in spec.direction.vector if x != 0))
        normal = primitive(scale(sign, spec.direction.vector))
        offset = sign * spec.t / lead
        planes.append((normal, offset, tuple(m for m, v in enumerate(vertices) if dot(normal, v) == offset)))

        facets = tuple(Facet(normal=n, offset=off, vertex_ids=ids) for n, off, ids in sorted(planes))
        volume, barycenter = self._integrate(vertices, facets, dim)
        if volume <= 0:
            raise DegenerateBody("clipped body has zero volume")
        return ConvexBody(dim=dim, vertices=vertices, facets=facets, volume=volume, barycenter=barycenter)

    def sub_barycenter(self, body: ConvexBody, spec: SliceSpec) -> Vector:
        piece = self.clip(body, spec)
        if piece is None:
            raise EmptySlice(f"slice {'>=' if spec.side == SIDE_GE else '<='} {spec.t} is empty")
        return piece.barycenter

    def _slice_profile(self, body: ConvexBody, direction: Direction) -> SliceProfile:
        """Interpolate |K_{>=t}| and its first moment on every interval between vertex heights"""
        lower, upper = self.support(body, direction)
        heights = sorted({direction(v) for v in body.vertices})
        cache: Dict[Fraction, Tuple[Fraction, Fraction]] = {}

        def sample(t: Fraction) -> Tuple[Fraction, Fraction]:
            if t not in cache:
                piece = self.clip(body, SliceSpec(direction, t, SIDE_GE))
                if piece is None:
                    cache[t] = (Fraction(0), Fraction(0))
                else:
                    cache[t] = (piece.volume, piece.volume * direction(piece.barycenter))
            return cache[t]

        pieces = []
        nodes_count = body.dim + 2
        for start, end in zip(heights, heights[1:]):
            width = end - start
            offsets = [width * j / (nodes_count - 1) for j in range(nodes_count)]
            samples = [sample(start + u) for u in offsets]
            pieces.append(SlicePiece(
                start=start,
                end=end,
                volume=tuple(interpolate(offsets, [s[0] for s in samples])),
                moment=tuple(interpolate(offsets, [s[1] for s in samples])),
            ))
        return SliceProfile(
            direction=direction,
            lower=lower,
            upper=upper,
            total_volume=body.volume,
            total_moment=body.volume * direction(body.barycenter),
            pieces=tuple(pieces),
        )

    def quantile_threshold(self, body: ConvexBody, direction: Direction, tau) -> Fraction:
        """The t with |K_{>=t}| = tau |K|, by bisection on exact slice volumes"""
        tau = to_fraction(tau, "tau")
        if not 0 <= tau <= 1:
            raise DomainError(f"tau must lie in [0, 1], got {float(tau)}")
        lower, upper = self.support(body, direction)
        if tau == 0:
            return upper
        if tau == 1:
            return lower

        profile = self.slice_profile(body, direction)
        target = tau * profile.total_volume
        piece = next(p for p in profile.pieces if profile.volume_ge(p.end) <= target)
        lo, hi = piece.start, piece.end
        if profile.volume_ge(lo) == target:
            return lo
        if profile.volume_ge(hi) == target:
            return hi

        tolerance = 1e-12 * float(upper - lower)
        while float(hi - lo) > tolerance:
            mid = Fraction((float(lo) + float(hi)) / 2)
            if not lo < mid < hi:
                break
            value = profile.volume_ge(mid)
            if value == target:
                return mid
            if value > target:
                lo = mid
            else:
                hi = mid
        return Fraction((float(lo) + float(hi)) / 2)

    # ------------------------------------------------------------------
    # inequalities
    # ------------------------------------------------------------------

    def generalized_hammer(self, body: ConvexBody, direction: Direction, t) -> HammerCheck:
        """Both sub-barycenter inequalities (upper-slice and lower-slice forms) at t"""
        t = to_fraction(t, "t")
        lower, upper = self.support(body, direction)
        if not lower <= t <= upper:
            raise OutOfSupport(format_number(t), format_number(lower), format_number(upper))
        profile = self.slice_profile(body, direction)
        n = body.dim
        mean = profile.total_moment / profile.total_volume
        tau_ge = profile.volume_ge(t) / profile.total_volume

        lhs_ge = rhs_ge = slack_ge = None
        if t < upper:
            lhs_ge = float((profile.mean_ge(t) - lower) / (mean - lower))
            rhs_ge = hammer_factor(tau_ge, n)
            slack_ge = lhs_ge - rhs_ge

        lhs_le = rhs_le = slack_le = None
        if t > lower:
            tau_le = 1 - tau_ge
            lhs_le = float((upper - profile.mean_le(t)) / (upper - mean))
            rhs_le = hammer_factor(tau_le, n)
            slack_le = lhs_le - rhs_le

        return HammerCheck(t, tau_ge, lhs_ge, rhs_ge, slack_ge, lhs_le, rhs_le, slack_le)

    def neumann_hammer_bounds(self, body: ConvexBody, direction: Direction) -> NeumannHammerBounds:
        """Classical bounds min + osc/(n+1) <= p(Bc K) <= min + n osc/(n+1), exactly"""
        lower, upper = self.support(body, direction)
        osc = upper - lower
        n = body.dim
        return NeumannHammerBounds(
            lower=lower + osc / (n + 1),
            value=direction(body.barycenter),
            upper=lower + n * osc / (n + 1),
        )

    # ------------------------------------------------------------------
    # oracles and reports
    # ------------------------------------------------------------------

    def mc_volume_oracle(self, body: ConvexBody, samples: int, seed: int,
                         chunk_size: int = 100_000) -> MonteCarloEstimate:
        """Hit-or-miss volume estimate over the bounding box"""
        if samples < 1:
            raise DomainError(f"samples must be positive, got {samples}")
        rng = np.random.default_rng(seed)
        verts = np.array([[float(x) for x in v] for v in body.vertices])
        lo, hi = verts.min(axis=0), verts.max(axis=0)
        normals = np.array([[float(x) for x in f.normal] for f in body.facets])
        offsets = np.array([float(f.offset) for f in body.facets])

        hits = 0
        remaining = samples
        while remaining > 0:
            size = min(chunk_size, remaining)
            draws = rng.uniform(lo, hi, size=(size, body.dim))
            inside = np.all(draws @ normals.T <= offsets + 1e-12, axis=1)
            hits += int(inside.sum())
            remaining -= size

        box = float(np.prod(hi - lo))
        fraction = hits / samples
        estimate = box * fraction
        std_error = box * math.sqrt(fraction * (1 - fraction) / samples)
        return MonteCarloEstimate(estimate, std_error)

    def slice_report(self, body: ConvexBody, spec: SliceSpec, exact: bool = False) -> Dict:
        """Volume, barycenter, slice volume, sub-barycenter and tau of one slice"""
        lower, upper = self.support(body, spec.direction)
        if not lower <= spec.t <= upper:
            raise OutOfSupport(format_number(spec.t), format_number(lower), format_number(upper))
        piece = self.clip(body, spec)
        if piece is None:
            raise EmptySlice(f"slice at t = {format_number(spec.t)} ({spec.side}) has zero volume")
        fraction = piece.volume / body.volume
        fmt = format_rational if exact else format_number
        return {
            "t": fmt(spec.t),
            "side": spec.side,
            "support": [fmt(lower), fmt(upper)],
            "volume": fmt(body.volume),
            "barycenter": [fmt(x) for x in body.barycenter],
            "slice": {
                "volume": fmt(piece.volume),
                "volume_fraction": fmt(fraction),
                "barycenter": [fmt(x) for x in piece.barycenter],
            },
            "sub_barycenter": [fmt(x) for x in piece.barycenter],
            # always the upper-slice fraction, whichever side was kept
            "tau": fmt(fraction if spec.side == SIDE_GE else 1 - fraction),
        }
