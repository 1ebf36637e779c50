"""
Profile Engine
Moments and Neumann-Hammer type inequalities for concave profiles on [0, T]
"""

import logging
import math
from bisect import bisect_left, bisect_right
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss

from ..models.errors import DimensionTooLow, DomainError, OutOfSupport
from ..models.geometry import ConvexBody, Direction
from ..models.profile import ConcaveProfile, InequalityCheck, MomentSet, ProofDiagnostics
from ..utils.exact import polyval
from ..utils.numeric import format_number, one_minus_pow
from .convex_body import ConvexBodyKernel

logger = logging.getLogger(__name__)

QUADRATURE_ORDER = 16
QUADRATURE_TOLERANCE = 1e-12
QUADRATURE_MAX_DEPTH = 60
DIAGNOSTIC_GRID = 1000
PROJECTION_WARNING = 1e-6
PIECE_CACHE_SIZE = 64

_GL_NODES, _GL_WEIGHTS = leggauss(QUADRATURE_ORDER)


def _pav_non_increasing(slopes: Sequence[float], widths: Sequence[float]) -> List[float]:
    """Width-weighted pool-adjacent-violators fit with non-increasing output"""
    blocks = []  # [mean, weight, count]
    for slope, width in zip(slopes, widths):
        blocks.append([slope, width, 1])
        while len(blocks) > 1 and blocks[-2][0] < blocks[-1][0]:
            mean_b, weight_b, count_b = blocks.pop()
            mean_a, weight_a, count_a = blocks[-1]
            total = weight_a + weight_b
            blocks[-1] = [(mean_a * weight_a + mean_b * weight_b) / total, total, count_a + count_b]
    fitted = []
    for mean, _, count in blocks:
        fitted.extend([mean] * count)
    return fitted


class _PieceTable(NamedTuple):
    """Per-piece integrands of one (profile, n, p); primitives are None for non-integer p"""
    starts: Tuple[float, ...]
    ends: Tuple[float, ...]
    bases: List[Polynomial]
    primitives: List[Optional[Tuple[float, ...]]]
    totals: Tuple[float, ...]


class ProfileEngine:
    """Integrals of s^p f(s)^(n-1) over sub-intervals of a concave profile.

    Integer powers are integrated exactly (expanded antiderivatives of the
    per-piece polynomial); non-integer powers use adaptive Gauss-Legendre.
    """

    def __init__(self, kernel: Optional[ConvexBodyKernel] = None):
        self.kernel = kernel or ConvexBodyKernel()
        self._piece_table = lru_cache(maxsize=PIECE_CACHE_SIZE)(self._build_piece_table)

    # ------------------------------------------------------------------
    # integration
    # ------------------------------------------------------------------

    def _gauss_legendre(self, func: Callable[[np.ndarray], np.ndarray], lo: float, hi: float) -> float:
        def rule(a: float, b: float) -> float:
            half = (b - a) / 2
            return half * float(np.dot(_GL_WEIGHTS, func((a + b) / 2 + half * _GL_NODES)))

        total = 0.0
        stack = [(lo, hi, rule(lo, hi), 0)]
        while stack:
            a, b, whole, depth = stack.pop()
            mid = (a + b) / 2
            left, right = rule(a, mid), rule(mid, b)
            refined = left + right
            if abs(refined - whole) <= QUADRATURE_TOLERANCE * max(1.0, abs(refined)) or depth >= QUADRATURE_MAX_DEPTH:
                total += refined
            else:
                stack.append((a, mid, left, depth + 1))
                stack.append((mid, b, right, depth + 1))
        return total

    def _build_piece_table(self, f: ConcaveProfile, n: int, p: float) -> _PieceTable:
        integer_power = float(p).is_integer()
        starts, ends, bases, primitives = [], [], [], []
        for start, end, value, slope in f.pieces:
            base = Polynomial([value, slope]) ** (n - 1)
            starts.append(start)
            ends.append(end)
            bases.append(base)
            if integer_power:
                antiderivative = (Polynomial([start, 1.0]) ** int(p) * base).integ()
                primitives.append(tuple(float(c) for c in antiderivative.coef))
            else:
                primitives.append(None)
        table = _PieceTable(tuple(starts), tuple(ends), bases, primitives, ())
        totals = tuple(self._piece_integral(table, p, i, a, b) for i, (a, b) in enumerate(zip(starts, ends)))
        return table._replace(totals=totals)

    def _piece_integral(self, table: _PieceTable, p: float, i: int, a: float, b: float) -> float:
        start, end = table.starts[i], table.ends[i]
        if table.totals and a <= start and b >= end:
            return table.totals[i]
        primitive = table.primitives[i]
        if primitive is not None:
            return float(polyval(primitive, b - start) - polyval(primitive, a - start))
        base = table.bases[i]
        return self._gauss_legendre(lambda s: s ** p * base(s - start), a, b)

    def _integral(self, f: ConcaveProfile, n: int, p: float, lo: float, hi: float) -> float:
        """Integral of s^p f(s)^(n-1) over [lo, hi]"""
        if hi <= lo:
            return 0.0
        table = self._piece_table(f, n, p)
        # pieces meeting (lo, hi) are first..last; only the two end pieces can be partial
        first = bisect_right(table.ends, lo)
        last = bisect_left(table.starts, hi) - 1
        if first > last:
            return 0.0
        if first == last:
            return self._piece_integral(table, p, first, max(lo, table.starts[first]), min(hi, table.ends[first]))
        total = self._piece_integral(table, p, first, max(lo, table.starts[first]), table.ends[first])
        total += math.fsum(table.totals[first + 1:last])
        total += self._piece_integral(table, p, last, table.starts[last], min(hi, table.ends[last]))
        return total

    def _check_args(self, f: ConcaveProfile, n: int, t: float) -> float:
        if int(n) != n or n < 1:
            raise DomainError(f"dimension must be a positive integer, got {n}")
        t = float(t)
        if not 0.0 <= t <= f.T:
            raise OutOfSupport(format_number(t), "0", format_number(f.T))
        return t

    # ------------------------------------------------------------------
    # moments and inequalities
    # ------------------------------------------------------------------

    def moments(self, f: ConcaveProfile, n: int, t: float) -> MomentSet:
        """Volumes and partial barycenters of the measure f^(n-1) ds split at t"""
        t = self._check_args(f, n, t)
        V_le = self._integral(f, n, 0, 0.0, t)
        V_ge = self._integral(f, n, 0, t, f.T)
        M_le = self._integral(f, n, 1, 0.0, t)
        M_ge = self._integral(f, n, 1, t, f.T)
        return MomentSet(
            t=t,
            V_le=V_le,
            V_ge=V_ge,
            b_le=M_le / V_le if V_le > 0 else None,
            b_ge=M_ge / V_ge if V_ge > 0 else None,
            tau_ge=V_ge / (V_le + V_ge),
        )

    def _weighted_check(self, f: ConcaveProfile, n: int, p: float, t: float) -> InequalityCheck:
        tau = self.moments(f, n, t).tau_ge
        lhs = self._integral(f, n, p, t, f.T) / self._integral(f, n, p, 0.0, f.T)
        rhs = one_minus_pow(tau, (n + p) / n)
        return InequalityCheck(lhs=lhs, rhs=rhs, slack=lhs - rhs, t=t, n=n, p=p)

    def check_functional_nh(self, f: ConcaveProfile, n: int, t: float) -> InequalityCheck:
        """int_t^T s f^(n-1) / int_0^T s f^(n-1) >= 1 - (1 - tau)^((n+1)/n)"""
        t = self._check_args(f, n, t)
        return self._weighted_check(f, n, 1, t)

    def check_weighted_nh(self, f: ConcaveProfile, n: int, p: float, t: float) -> InequalityCheck:
        """Same inequality with weight s^p and exponent (n+p)/n"""
        t = self._check_args(f, n, t)
        p = float(p)
        if not math.isfinite(p) or p < 0:
            raise DomainError(f"weight exponent p must be a finite number >= 0, got {p}")
        return self._weighted_check(f, n, p, t)

    def check_dual_nh(self, f: ConcaveProfile, n: int, t: float) -> InequalityCheck:
        """Reflected form: the functional inequality for s -> f(T - s) at T - t"""
        t = self._check_args(f, n, t)
        T = f.T
        V_le = self._integral(f, n, 0, 0.0, t)
        V_total = self._integral(f, n, 0, 0.0, T)
        M_le = self._integral(f, n, 1, 0.0, t)
        M_total = self._integral(f, n, 1, 0.0, T)
        lhs = (T * V_le - M_le) / (T * V_total - M_total)
        rhs = one_minus_pow(V_le / V_total, (n + 1) / n)
        return InequalityCheck(lhs=lhs, rhs=rhs, slack=lhs - rhs, t=t, n=n, p=1.0)

    def proof_diagnostics(self, f: ConcaveProfile, n: int, t: float) -> ProofDiagnostics:
        """min (F - f) on [0, T] and the rescaled threshold (1 - tau)^(-1/n) t"""
        t = self._check_args(f, n, t)
        if t == 0.0:
            raise DomainError("proof diagnostics need t > 0 (tau = 1 leaves the rescaled profile undefined)")
        tau = self.moments(f, n, t).tau_ge
        shrink = (1.0 - tau) ** (1.0 / n)
        grid = np.linspace(0.0, f.T, DIAGNOSTIC_GRID)
        knots, values = np.array(f.breakpoints), np.array(f.values)
        rescaled = np.interp(shrink * grid, knots, values) / shrink
        gap = float(np.min(rescaled - np.interp(grid, knots, values)))
        return ProofDiagnostics(F_minus_f_min=gap, scaled_t=t / shrink, T=f.T, tau=tau)

    # ------------------------------------------------------------------
    # constructions
    # ------------------------------------------------------------------

    def reflect(self, f: ConcaveProfile) -> ConcaveProfile:
        breakpoints = [0.0] + [f.T - s for s in reversed(f.breakpoints[1:-1])] + [f.T]
        return ConcaveProfile(T=f.T, breakpoints=tuple(breakpoints), values=tuple(reversed(f.values)))

    def body_to_profile(self, body: ConvexBody, direction: Direction, grid: int = 256) -> ConcaveProfile:
        """Radial profile s -> |cross-section at min p + s|^(1/(n-1)) of a polytope"""
        try:
            n = body.dim
            if n < 2:
                raise DimensionTooLow("body_to_profile needs dimension >= 2")
            if grid < 1:
                raise DomainError(f"grid must be positive, got {grid}")
            lower, upper = self.kernel.support(body, direction)
            osc = upper - lower
            slices = self.kernel.slice_profile(body, direction)

            heights = {lower + osc * Fraction(k, grid) for k in range(grid + 1)}
            heights.update(direction(v) for v in body.vertices)
            nodes: List[float] = []
            values: List[float] = []
            for height in sorted(heights):
                s = float(height - lower)
                if nodes and s <= nodes[-1]:
                    continue
                nodes.append(s)
                values.append(float(slices.density(height)) ** (1.0 / (n - 1)))

            widths = np.diff(nodes)
            slopes = np.diff(values) / widths
            fitted = _pav_non_increasing(list(slopes), list(widths))
            projected = [values[0]]
            for slope, width in zip(fitted, widths):
                projected.append(projected[-1] + slope * width)
            moved = max(abs(a - b) for a, b in zip(projected, values))
            if moved > PROJECTION_WARNING:
                logger.warning(f"Concave projection moved a profile value by {moved:.3g}")
            projected = [max(0.0, v) for v in projected]

            return ConcaveProfile.from_points(nodes, projected)
        except DomainError as e:
            logger.error(f"Error building profile from body: {str(e)}")
            raise
