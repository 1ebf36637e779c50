"""
Property Verifier
Randomized suites that evaluate every inequality and identity of the library
on generated bodies, profiles and Okounkov bodies and record their slacks
"""

import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ..models.errors import DegenerateBody, DomainError, GenerationExhausted
from ..models.geometry import SIDE_GE, SIDE_LE, ConvexBody, Direction, SliceSpec
from ..models.invariants import ValuationRecord
from ..models.profile import ConcaveProfile
from ..models.suite import SUITES, SuiteConfig, SuiteResult
from ..utils.exact import add, scale
from ..utils.numeric import EXACT_TOLERANCE, hammer_factor
from .convex_body import ConvexBodyKernel
from .invariants import InvariantCalculator
from .profile_engine import ProfileEngine

logger = logging.getLogger(__name__)

GRID_DENOMINATOR = 2 ** 16
STRUCTURED_PROBABILITY = 0.2
STRUCTURED_KINDS = ("simplex", "cube", "cross-polytope", "clipped-simplex")
MAX_RETRIES = 100
ENDPOINT_BAND = Fraction(1, 10 ** 6)
LIMIT_TOLERANCE = 1e-4
MASS_BALANCE_TOLERANCE = 1e-10


def _digest(*parts) -> str:
    text = json.dumps(parts, sort_keys=True, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _exact(holds: bool) -> float:
    """Slack of an exact identity: 0 when it holds, -1 otherwise"""
    return 0.0 if holds else -1.0


def _run_instance(payload) -> SuiteResult:
    suite, config, index = payload
    return PropertyVerifier().run_instance(suite, config, index)


class PropertyVerifier:
    """Generators plus one instance runner per suite.

    Every instance draws from its own generator seeded with
    (seed, suite id, instance index), so a run is reproducible regardless of
    how instances are spread over workers.
    """

    def __init__(self, kernel: Optional[ConvexBodyKernel] = None):
        self.kernel = kernel or ConvexBodyKernel()
        self.engine = ProfileEngine(self.kernel)
        self.calculator = InvariantCalculator(self.kernel)
        self._runners: Dict[str, Callable[[SuiteConfig, int, np.random.Generator], SuiteResult]] = {
            "gen-hammer": self._gen_hammer,
            "functional-nh": self._functional_nh,
            "weighted-nh": self._weighted_nh,
            "fujita-1": self._fujita_first,
            "fujita-2": self._fujita_second,
            "classical-nh-limits": self._classical_limits,
            "mass-balance": self._mass_balance,
            "mc-oracle": self._mc_oracle,
            "quantile-curve": self._quantile_curve,
        }

    # ------------------------------------------------------------------
    # generators
    # ------------------------------------------------------------------

    @staticmethod
    def rng(seed: int, suite: str, index: int) -> np.random.Generator:
        return np.random.default_rng([seed, SUITES.index(suite), index])

    def _dyadic_points(self, rng: np.random.Generator, count: int, n: int) -> List[List[Fraction]]:
        raw = rng.integers(0, GRID_DENOMINATOR + 1, size=(count, n))
        return [[Fraction(int(x), GRID_DENOMINATOR) for x in row] for row in raw]

    def _random_hull(self, rng: np.random.Generator, n: int, v_count: int) -> ConvexBody:
        for attempt in range(MAX_RETRIES):
            try:
                return self.kernel.build(self._dyadic_points(rng, v_count, n), n)
            except DegenerateBody:
                logger.warning(f"Degenerate draw in R^{n} (attempt {attempt + 1}), retrying")
        raise GenerationExhausted(f"no full-dimensional hull of {v_count} points in R^{n} after {MAX_RETRIES} draws")

    def random_direction(self, rng: np.random.Generator, n: int) -> Direction:
        """A coordinate axis half of the time, otherwise a small integer vector"""
        if rng.random() < 0.5:
            return Direction.coordinate(int(rng.integers(1, n + 1)), n)
        while True:
            values = rng.integers(-4, 5, size=n)
            if np.any(values != 0):
                return Direction.from_values([int(x) for x in values])

    def structured_body(self, kind: str, n: int, rng: Optional[np.random.Generator] = None) -> ConvexBody:
        zero = [0] * n
        units = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
        if kind == "simplex":
            return self.kernel.build([zero] + units, n)
        if kind == "cube":
            corners = [[(mask >> i) & 1 for i in range(n)] for mask in range(2 ** n)]
            return self.kernel.build(corners, n)
        if kind == "cross-polytope":
            return self.kernel.build(units + [[-x for x in u] for u in units], n)
        if kind == "clipped-simplex":
            rng = rng if rng is not None else np.random.default_rng(0)
            simplex = self._random_hull(rng, n, n + 1)
            direction = self.random_direction(rng, n)
            return self.kernel.clip(simplex, SliceSpec(direction, direction(simplex.barycenter), SIDE_GE))
        raise DomainError(f"unknown structured body {kind!r}; expected one of {STRUCTURED_KINDS}")

    def gen_body(self, rng: np.random.Generator, n: int, v_count: int) -> ConvexBody:
        """Random dyadic hull, or a structured body with probability 0.2"""
        if v_count < n + 1:
            raise DomainError(f"need at least {n + 1} vertices in R^{n}, got {v_count}")
        if rng.random() < STRUCTURED_PROBABILITY:
            kind = STRUCTURED_KINDS[int(rng.integers(len(STRUCTURED_KINDS)))]
            return self.structured_body(kind, n, rng)
        return self._random_hull(rng, n, v_count)

    def gen_okounkov_body(self, rng: np.random.Generator, n: int, v_count: int, translate: bool = False) -> ConvexBody:
        """Positive-orthant polytope, shifted along e_1 when `translate` is set (sigma > 0)"""
        body = self._random_hull(rng, n, max(v_count, n + 1))
        if not translate:
            return body
        shift = Fraction(int(rng.integers(1, GRID_DENOMINATOR + 1)), GRID_DENOMINATOR)
        moved = [(v[0] + shift,) + tuple(v[1:]) for v in body.vertices]
        return self.kernel.build(moved, n)

    def gen_profile(self, rng: np.random.Generator, pieces: int) -> ConcaveProfile:
        """Piecewise-linear profile with sorted (non-increasing) slopes, shifted to be non-negative"""
        T = float(rng.uniform(0.5, 4.0))
        inner = sorted({float(x) for x in rng.uniform(0.0, T, size=max(pieces - 1, 0))} - {0.0, T})
        breakpoints = [0.0] + inner + [T]
        slopes = sorted(rng.normal(size=len(breakpoints) - 1), reverse=True)
        values = [0.0]
        for slope, width in zip(slopes, np.diff(breakpoints)):
            values.append(values[-1] + float(slope) * float(width))
        floor = min(values)
        lift = float(rng.uniform(0.0, 1.0)) if rng.random() < 0.5 else 0.0
        values = [v - floor + lift for v in values]
        if max(values) <= 0.0:
            values = [1.0] * len(values)
        return ConcaveProfile(T=T, breakpoints=tuple(breakpoints), values=tuple(values))

    # ------------------------------------------------------------------
    # shared instance helpers
    # ------------------------------------------------------------------

    def _body_instance(self, config: SuiteConfig, index: int, rng: np.random.Generator):
        n = config.dims[index % len(config.dims)]
        low = max(config.vertices_per_body[0], n + 1)
        high = max(config.vertices_per_body[1], low)
        body = self.gen_body(rng, n, int(rng.integers(low, high + 1)))
        return body, self.random_direction(rng, n)

    def _okounkov_instance(self, config: SuiteConfig, index: int, rng: np.random.Generator) -> ValuationRecord:
        n = config.dims[index % len(config.dims)]
        low = max(config.vertices_per_body[0], n + 1)
        high = max(config.vertices_per_body[1], low)
        body = self.gen_okounkov_body(rng, n, int(rng.integers(low, high + 1)), translate=index % 3 == 2)
        return ValuationRecord(name=f"v{index}", A=1.0, body=body)

    def _t_grid(self, lower: Fraction, upper: Fraction, points: int) -> List[Fraction]:
        """Grid on [min + band, max - band] (relative band 1e-6)"""
        osc = upper - lower
        if points == 1:
            return [lower + osc / 2]
        span = 1 - 2 * ENDPOINT_BAND
        return [lower + osc * (ENDPOINT_BAND + span * Fraction(k, points - 1)) for k in range(points)]

    def _profile_for(self, rng: np.random.Generator, index: int) -> ConcaveProfile:
        if index == 0:
            return ConcaveProfile.constant(T=1.0, value=1.0)
        return self.gen_profile(rng, int(rng.integers(1, 8)))

    # ------------------------------------------------------------------
    # suites
    # ------------------------------------------------------------------

    def _gen_hammer(self, config: SuiteConfig, index: int, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult("gen-hammer")
        body, direction = self._body_instance(config, index, rng)
        key = _digest("gen-hammer", config.seed, index, body.to_dict(), list(map(str, direction.vector)))
        lower, upper = self.kernel.support(body, direction)
        grid = self._t_grid(lower, upper, config.t_grid)
        for t in grid:
            check = self.kernel.generalized_hammer(body, direction, t)
            result.record("gen-hammer.ge", check.slack_ge, key, config.tolerance)
            result.record("gen-hammer.le", check.slack_le, key, config.tolerance)

        # cross-section (n-1)-th roots are concave along the grid
        n = body.dim
        slices = self.kernel.slice_profile(body, direction)
        roots = [float(slices.density(t)) ** (1.0 / (n - 1)) for t in grid]
        for left, middle, right in zip(roots, roots[1:], roots[2:]):
            result.record("gen-hammer.brunn-minkowski", middle - (left + right) / 2, key, config.tolerance)
        return result

    def _classical_limits(self, config: SuiteConfig, index: int, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult("classical-nh-limits")
        body, direction = self._body_instance(config, index, rng)
        key = _digest("classical-nh-limits", config.seed, index, body.to_dict(), list(map(str, direction.vector)))
        n = body.dim
        bounds = self.kernel.neumann_hammer_bounds(body, direction)
        # exact comparison, tolerance 0
        result.record("classical-nh.lower", float(bounds.value - bounds.lower), key, 0.0)
        result.record("classical-nh.upper", float(bounds.upper - bounds.value), key, 0.0)

        lower, upper = self.kernel.support(body, direction)
        osc = upper - lower
        slices = self.kernel.slice_profile(body, direction)
        classical = n / (n + 1) * float(osc) + LIMIT_TOLERANCE

        top = upper - ENDPOINT_BAND * osc
        tau_ge = slices.volume_ge(top) / slices.total_volume
        implied = float(slices.mean_ge(top) - lower) / hammer_factor(tau_ge, n)
        result.record("classical-nh.limit-upper", classical - implied, key, config.tolerance)

        bottom = lower + ENDPOINT_BAND * osc
        tau_le = slices.volume_le(bottom) / slices.total_volume
        implied = float(upper - slices.mean_le(bottom)) / hammer_factor(tau_le, n)
        result.record("classical-nh.limit-lower", classical - implied, key, config.tolerance)
        return result

    def _mass_balance(self, config: SuiteConfig, index: int, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult("mass-balance")
        body, direction = self._body_instance(config, index, rng)
        key = _digest("mass-balance", config.seed, index, body.to_dict(), list(map(str, direction.vector)))
        triangulated = sum(self.kernel.simplex_volumes(body))
        result.record("mass-balance.triangulation", _exact(triangulated == body.volume), key, 0.0)
        lower, upper = self.kernel.support(body, direction)
        thresholds = max(1, config.t_grid // 8)
        whole = scale(body.volume, body.barycenter)
        for k in range(1, thresholds + 1):
            t = lower + (upper - lower) * Fraction(k, thresholds + 1)
            up = self.kernel.clip(body, SliceSpec(direction, t, SIDE_GE))
            down = self.kernel.clip(body, SliceSpec(direction, t, SIDE_LE))
            result.record("mass-balance.volume", _exact(up.volume + down.volume == body.volume), key, 0.0)
            moments = add(scale(up.volume, up.barycenter), scale(down.volume, down.barycenter))
            result.record("mass-balance.barycenter", _exact(moments == whole), key, 0.0)
        return result

    def _mc_oracle(self, config: SuiteConfig, index: int, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult("mc-oracle")
        body, _ = self._body_instance(config, index, rng)
        key = _digest("mc-oracle", config.seed, index, body.to_dict())
        seed = int(rng.integers(0, 2 ** 32))
        estimate = self.kernel.mc_volume_oracle(body, config.mc_samples, seed)
        error = abs(estimate.estimate - float(body.volume))
        result.record("mc-oracle.4-sigma", 4 * estimate.std_error - error, key, config.tolerance)
        return result

    def _functional_nh(self, config: SuiteConfig, index: int, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult("functional-nh")
        f = self._profile_for(rng, index)
        key = _digest("functional-nh", config.seed, index, f.to_dict())
        ts = [f.T * k / (config.profile_t_grid - 1) for k in range(config.profile_t_grid)] \
            if config.profile_t_grid > 1 else [f.T / 2]
        constant = len(set(f.values)) == 1
        for n in config.profile_dims:
            total = self.engine.moments(f, n, 0.0)
            for t in ts:
                check = self.engine.check_functional_nh(f, n, t)
                result.record("functional-nh", check.slack, key, config.tolerance)
                result.record("functional-nh.dual", self.engine.check_dual_nh(f, n, t).slack, key, config.tolerance)
                if constant and n == 1:
                    result.record("functional-nh.equality", -abs(check.slack), key, EXACT_TOLERANCE)

                m = self.engine.moments(f, n, t)
                first_moment = (m.V_le * (m.b_le or 0.0)) + (m.V_ge * (m.b_ge or 0.0))
                drift = abs(first_moment - total.V_ge * total.b_ge) / max(1.0, abs(total.V_ge * total.b_ge))
                result.record("functional-nh.mass-balance", -drift, key, MASS_BALANCE_TOLERANCE)

                if t > 0.0:
                    diagnostics = self.engine.proof_diagnostics(f, n, t)
                    result.record("functional-nh.F-f", diagnostics.F_minus_f_min, key, config.tolerance)
                    result.record("functional-nh.scaled-t", diagnostics.T - diagnostics.scaled_t, key, config.tolerance)
        return result

    def _weighted_nh(self, config: SuiteConfig, index: int, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult("weighted-nh")
        f = self._profile_for(rng, index)
        key = _digest("weighted-nh", config.seed, index, f.to_dict())
        ts = [f.T * k / (config.profile_t_grid - 1) for k in range(config.profile_t_grid)] \
            if config.profile_t_grid > 1 else [f.T / 2]
        for n in config.profile_dims:
            for t in ts:
                for p in config.weights:
                    check = self.engine.check_weighted_nh(f, n, p, t)
                    result.record("weighted-nh", check.slack, key, config.tolerance)
                    if p == 0.0:
                        result.record("weighted-nh.p0-equality", -abs(check.slack), key, EXACT_TOLERANCE)
                    if p == 1.0:
                        plain = self.engine.check_functional_nh(f, n, t)
                        result.record("weighted-nh.p1-consistency", -abs(check.slack - plain.slack), key, 1e-10)
        return result

    def _tau_grid(self, points: int) -> List[float]:
        return [k / (points - 1) for k in range(points)] if points > 1 else [0.5]

    def _fujita_first(self, config: SuiteConfig, index: int, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult("fujita-1")
        v = self._okounkov_instance(config, index, rng)
        key = _digest("fujita-1", config.seed, index, v.body.to_dict())
        for tau in self._tau_grid(config.tau_grid):
            slack = self.calculator.check_fujita_first(v, tau)
            result.record("fujita-1", slack, key, config.tolerance)
            if tau == 1.0:
                result.record("fujita-1.tau1-equality", -abs(slack), key, EXACT_TOLERANCE)
        return result

    def _fujita_second(self, config: SuiteConfig, index: int, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult("fujita-2")
        v = self._okounkov_instance(config, index, rng)
        key = _digest("fujita-2", config.seed, index, v.body.to_dict())
        for tau in self._tau_grid(config.tau_grid):
            check = self.calculator.check_fujita_second(v, tau)
            result.record("fujita-2.interpolation", check.slack1, key, config.tolerance)
            result.record("fujita-2.corollary", check.slack2, key, config.tolerance)
            result.record("fujita-2.ratio", check.slack3, key, config.tolerance)
            result.record("fujita-2.classical", check.classical, key, config.tolerance)
            if tau in (0.0, 1.0):
                result.record("fujita-2.endpoint-equality", -abs(check.slack1), key, EXACT_TOLERANCE)
        return result

    def _quantile_curve(self, config: SuiteConfig, index: int, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult("quantile-curve")
        v = self._okounkov_instance(config, index, rng)
        key = _digest("quantile-curve", config.seed, index, v.body.to_dict())
        curve = self.calculator.quantile_curve(v, self._tau_grid(config.curve_tau_grid))
        for a, b in zip(curve.samples, curve.samples[1:]):
            result.record("quantile-curve.Q-non-increasing", a.t - b.t, key, config.tolerance)
            result.record("quantile-curve.S-non-increasing", a.s_tau - b.s_tau, key, config.tolerance)
            result.record("quantile-curve.tauS-non-decreasing", b.tau * b.s_tau - a.tau * a.s_tau,
                          key, config.tolerance)
        return result

    # ------------------------------------------------------------------
    # runner
    # ------------------------------------------------------------------

    def instance_count(self, config: SuiteConfig, suite: str) -> int:
        if suite in ("functional-nh", "weighted-nh"):
            return config.profiles
        if suite in ("fujita-1", "fujita-2", "quantile-curve"):
            return config.okounkov_bodies
        if suite == "mc-oracle":
            return config.mc_bodies
        return config.bodies

    def run_instance(self, suite: str, config: SuiteConfig, index: int) -> SuiteResult:
        return self._runners[suite](config, index, self.rng(config.seed, suite, index))

    def _run_one(self, config: SuiteConfig, suite: str) -> SuiteResult:
        payloads = [(suite, config, i) for i in range(self.instance_count(config, suite))]
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                chunk = max(1, len(payloads) // (4 * config.workers))
                partials = list(pool.map(_run_instance, payloads, chunksize=chunk))
        else:
            partials = [self.run_instance(*payload) for payload in payloads]
        merged = SuiteResult(suite)
        for partial in partials:
            merged.merge(partial)
        return merged

    def run_suite(self, config: SuiteConfig, which: str = "all") -> SuiteResult:
        """Run one named suite (or every suite) and aggregate slacks and violations"""
        suites: Sequence[str] = SUITES if which == "all" else (which,)
        unknown = [s for s in suites if s not in SUITES]
        if unknown:
            raise DomainError(f"unknown suite {unknown[0]!r}; expected one of {SUITES + ('all',)}")

        started = time.perf_counter()
        total = SuiteResult(which)
        for suite in suites:
            partial = self._run_one(config, suite)
            logger.info(f"Suite {suite}: {partial.checks_run} checks, {len(partial.violations)} violations")
            total.merge(partial)
        total.runtime = time.perf_counter() - started
        if total.passed:
            logger.info(f"✅ {which}: {total.checks_run} checks passed in {total.runtime:.1f}s")
        else:
            logger.warning(f"{which}: {len(total.violations)} violations out of {total.checks_run} checks")
        return total
