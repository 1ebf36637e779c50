"""
Invariant Calculator
Quantile sub-barycenters S_tau of Okounkov bodies and the stability invariants
built from them, together with the comparison inequalities between them
"""

import logging
import math
from fractions import Fraction
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from ..models.errors import DomainError, EmptyCandidates, UndefinedRatio
from ..models.geometry import Direction
from ..models.invariants import (
    DiscreteCandidate,
    JumpingData,
    QuantileCurve,
    QuantileSample,
    StabilityReport,
    ValuationRecord,
    classify,
)
from ..utils.exact import to_fraction
from ..utils.numeric import EXACT_TOLERANCE, hammer_factor, one_minus_pow
from .convex_body import ConvexBodyKernel

logger = logging.getLogger(__name__)


class RatioMinimum(NamedTuple):
    """Minimum of A/S over candidates; an upper bound for the true infimum"""
    value: float
    argmin: str
    skipped: Tuple[str, ...] = ()


class FujitaSecondCheck(NamedTuple):
    slack1: float
    slack2: float
    slack3: float
    classical: float


def threshold(tau: float, n: int) -> float:
    """n/(n+1) at tau = 0, tau / (1 - (1 - tau)^((n+1)/n)) otherwise"""
    return 1.0 / hammer_factor(tau, n)


def weak_threshold(tau: float, n: int) -> float:
    return n / (n + 1 - float(tau) ** (1.0 / n))


def fujita_second_ratio(tau: float, n: int) -> float:
    """(1 - tau^(1/n)) / (1/tau - tau^(1/n)); 0 at tau = 0 and 1/(n+1) at tau = 1"""
    tau = float(tau)
    if tau <= 0.0:
        return 0.0
    if tau >= 1.0:
        return 1.0 / (n + 1)
    log_tau = math.log(tau)
    return -math.expm1(log_tau / n) / (math.expm1(-log_tau) - math.expm1(log_tau / n))


def _check_tau(tau) -> float:
    tau = float(tau)
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"tau must lie in [0, 1], got {tau}")
    return tau


class InvariantCalculator:
    """Candidate-based stability invariants over Okounkov bodies.

    The valuation's vanishing order is the first coordinate of its body, so
    every quantity here slices along e_1.
    """

    def __init__(self, kernel: Optional[ConvexBodyKernel] = None):
        self.kernel = kernel or ConvexBodyKernel()

    def _dimension(self, v: ValuationRecord, n: Optional[int]) -> int:
        if n is None:
            return v.n
        if n != v.n:
            raise DomainError(f"{v.name}: Okounkov body lives in R^{v.n}, not R^{n}")
        return n

    # ------------------------------------------------------------------
    # S_tau and friends
    # ------------------------------------------------------------------

    def sigma(self, v: ValuationRecord) -> float:
        return v.sigma

    def s0(self, v: ValuationRecord) -> float:
        return v.s0

    def _quantile(self, v: ValuationRecord, tau: float) -> Tuple[Fraction, Fraction]:
        """(Q_v(tau), p_1(Bc of the upper slice)) before scaling"""
        direction = Direction.coordinate(1, v.n)
        t = self.kernel.quantile_threshold(v.body, direction, to_fraction(tau, "tau"))
        if tau == 0.0:
            return t, t
        return t, self.kernel.slice_profile(v.body, direction).mean_ge(t)

    def s_tau(self, v: ValuationRecord, tau: float, n: Optional[int] = None) -> float:
        """C * p_1(Bc Delta_{>= Q_v(tau)}); S_0 is the maximal vanishing order"""
        self._dimension(v, n)
        tau = _check_tau(tau)
        if tau == 0.0:
            return v.s0
        return v.scale * float(self._quantile(v, tau)[1])

    def quantile_curve(self, v: ValuationRecord, taus: Iterable[float]) -> QuantileCurve:
        samples = []
        for tau in sorted({_check_tau(x) for x in taus}):
            t, mean = self._quantile(v, tau)
            samples.append(QuantileSample(tau, v.scale * float(t), v.scale * float(mean)))
        return QuantileCurve(valuation=v.name, n=v.n, samples=tuple(samples))

    # ------------------------------------------------------------------
    # deltas
    # ------------------------------------------------------------------

    def _minimize(self, candidates: Sequence, denominator: Callable, label: str) -> RatioMinimum:
        try:
            if not candidates:
                raise EmptyCandidates(f"{label}: no candidate valuations supplied")
            best: Optional[Tuple[float, str]] = None
            skipped: List[str] = []
            for candidate in candidates:
                S = denominator(candidate)
                if S <= 0:
                    logger.warning(f"Skipping candidate {candidate.name}: {label} denominator is {S}")
                    skipped.append(candidate.name)
                    continue
                ratio = candidate.A / S
                if best is None or ratio < best[0]:
                    best = (ratio, candidate.name)
            if best is None:
                raise UndefinedRatio(f"{label}: every candidate has a vanishing denominator")
            return RatioMinimum(best[0], best[1], tuple(skipped))
        except (EmptyCandidates, UndefinedRatio) as e:
            logger.error(f"Error computing {label}: {str(e)}")
            raise

    def delta_tau(self, candidates: Sequence[ValuationRecord], tau: float, n: Optional[int] = None) -> RatioMinimum:
        """min A / S_tau over the candidates"""
        tau = _check_tau(tau)
        return self._minimize(candidates, lambda v: self.s_tau(v, tau, n), "delta_tau")

    def delta_tilde_tau(self, candidates: Sequence[ValuationRecord], tau: float,
                        n: Optional[int] = None) -> RatioMinimum:
        """min A / (S_tau + correction(tau) sigma); the correction is 1/n at tau = 0"""
        tau = _check_tau(tau)

        def denominator(v: ValuationRecord) -> float:
            dim = self._dimension(v, n)
            if tau == 0.0:
                return v.s0 + v.sigma / dim
            correction = (1.0 - tau) / tau * one_minus_pow(tau, 1.0 / dim)
            return self.s_tau(v, tau) + correction * v.sigma

        return self._minimize(candidates, denominator, "delta_tilde_tau")

    def alpha_tilde(self, candidates: Sequence[ValuationRecord], n: Optional[int] = None) -> RatioMinimum:
        return self.delta_tilde_tau(candidates, 0.0, n)

    def discrete_s_tilde(self, data: JumpingData, m: int, n: int) -> float:
        """(1/(km)) sum of the m smallest j + ((d_k - m)/m)(1 - (1 - m/d_k)^(1/n)) j_max / k"""
        if not 1 <= m <= data.d_k:
            raise DomainError(f"m must lie in [1, {data.d_k}], got {m}")
        head = sum(data.j[:m]) / (data.k * m)
        tail = (data.d_k - m) / m * one_minus_pow(m / data.d_k, 1.0 / n) * data.j[-1] / data.k
        return head + tail

    def discrete_delta_tilde(self, candidates: Sequence[DiscreteCandidate], m: int, n: int) -> RatioMinimum:
        return self._minimize(candidates, lambda c: self.discrete_s_tilde(c.data, m, n), "discrete_delta_tilde")

    # ------------------------------------------------------------------
    # thresholds and reports
    # ------------------------------------------------------------------

    def threshold(self, tau: float, n: int) -> float:
        return threshold(_check_tau(tau), n)

    def weak_threshold(self, tau: float, n: int) -> float:
        return weak_threshold(_check_tau(tau), n)

    def delta_lower_bound(self, candidates: Sequence[ValuationRecord], tau: float, n: int) -> float:
        """delta_tilde_tau / threshold(tau, n): the bound on delta the criterion yields"""
        return self.delta_tilde_tau(candidates, tau, n).value / self.threshold(tau, n)

    def stability_report(self, candidates: Sequence[ValuationRecord], tau: float, n: int) -> StabilityReport:
        tau = _check_tau(tau)
        tilde = self.delta_tilde_tau(candidates, tau, n)
        plain = self.delta_tau(candidates, tau, n)
        bound = self.threshold(tau, n)
        weak = self.weak_threshold(tau, n)
        return StabilityReport(
            tau=tau,
            n=n,
            delta_tau=plain.value,
            delta_tilde_tau=tilde.value,
            threshold=bound,
            weak_threshold=weak,
            verdict=classify(tilde.value, bound, EXACT_TOLERANCE),
            weak_verdict=classify(tilde.value, weak, EXACT_TOLERANCE),
            argmin=tilde.argmin,
            delta_lower_bound=tilde.value / bound,
            skipped=tilde.skipped,
        )

    # ------------------------------------------------------------------
    # comparison inequalities
    # ------------------------------------------------------------------

    def check_fujita_first(self, v: ValuationRecord, tau: float, n: Optional[int] = None) -> float:
        """Slack of S_tau >= (1/tau)(1 - (1-tau)^((n+1)/n))(S_1 - sigma) + sigma"""
        n = self._dimension(v, n)
        tau = _check_tau(tau)
        s1, sigma = self.s_tau(v, 1.0), v.sigma
        if tau == 0.0:
            return v.s0 - ((n + 1) / n * s1 - sigma / n)
        return self.s_tau(v, tau) - (hammer_factor(tau, n) * (s1 - sigma) + sigma)

    def check_fujita_second(self, v: ValuationRecord, tau: float, n: Optional[int] = None) -> FujitaSecondCheck:
        """Slacks of the interpolation inequality, its consequences, and the classical bound"""
        n = self._dimension(v, n)
        tau = _check_tau(tau)
        s0, s1, sigma = v.s0, self.s_tau(v, 1.0), v.sigma
        root = tau ** (1.0 / n)
        return FujitaSecondCheck(
            slack1=self.s_tau(v, tau) - ((1.0 - root) * s0 + root * s1),
            slack2=s1 - (s0 / (n + 1) + n * sigma / (n + 1)),
            slack3=s1 - fujita_second_ratio(tau, n) * s0,
            classical=s1 - s0 / (n + 1),
        )

    def fujita_second_ratio(self, tau: float, n: int) -> float:
        return fujita_second_ratio(_check_tau(tau), n)
