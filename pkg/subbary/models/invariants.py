from dataclasses import asdict, dataclass, field
from typing import Dict, List, NamedTuple, Tuple

from .errors import DomainError, InvalidValuation
from .geometry import ConvexBody

STABLE = "stable-criterion-met"
SEMISTABLE = "semistable-criterion-met"
INCONCLUSIVE = "inconclusive"
VERDICTS = (STABLE, SEMISTABLE, INCONCLUSIVE)


@dataclass(frozen=True)
class ValuationRecord:
    """Named valuation C * ord_F with log discrepancy A and Okounkov body.

    The first coordinate of `body` records the vanishing order, so sigma and
    S_0 are C times its minimum and maximum.
    """
    name: str
    A: float
    body: ConvexBody
    scale: float = 1.0
    allow_nonpositive_A: bool = False

    def __post_init__(self):
        object.__setattr__(self, "A", float(self.A))
        object.__setattr__(self, "scale", float(self.scale))
        if not self.name:
            raise InvalidValuation("valuation name must be non-empty")
        if self.A <= 0 and not self.allow_nonpositive_A:
            raise InvalidValuation(f"{self.name}: log discrepancy A must be positive, got {self.A}")
        if self.scale <= 0:
            raise InvalidValuation(f"{self.name}: scale must be positive, got {self.scale}")
        if min(v[0] for v in self.body.vertices) < 0:
            raise InvalidValuation(f"{self.name}: Okounkov body leaves the half-space x_1 >= 0")

    @property
    def sigma(self) -> float:
        return self.scale * float(min(v[0] for v in self.body.vertices))

    @property
    def s0(self) -> float:
        return self.scale * float(max(v[0] for v in self.body.vertices))

    @property
    def n(self) -> int:
        return self.body.dim

    def rescaled(self, scale: float) -> "ValuationRecord":
        """Same divisor with a different scaling constant: A scales along"""
        factor = float(scale) / self.scale
        return ValuationRecord(name=self.name, A=self.A * factor, body=self.body,
                               scale=float(scale), allow_nonpositive_A=self.allow_nonpositive_A)


class QuantileSample(NamedTuple):
    tau: float
    t: float
    s_tau: float


class LipschitzEstimate(NamedTuple):
    constant: float
    max_jump: float


@dataclass(frozen=True)
class QuantileCurve:
    """Sampled tau -> (Q_v(tau), S_tau(v)) for one valuation"""
    valuation: str
    n: int
    samples: Tuple[QuantileSample, ...]

    def __post_init__(self):
        taus = [s.tau for s in self.samples]
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise DomainError("quantile curve needs strictly increasing tau values")

    def violations(self, tolerance: float = 1e-9) -> List[str]:
        """Monotonicity failures: Q and S_tau non-increasing, tau * S_tau non-decreasing"""
        found = []
        for a, b in zip(self.samples, self.samples[1:]):
            where = f"tau {a.tau:.6g} -> {b.tau:.6g}"
            if b.t > a.t + tolerance:
                found.append(f"{self.valuation}: quantile increases on {where}")
            if b.s_tau > a.s_tau + tolerance:
                found.append(f"{self.valuation}: S_tau increases on {where}")
            if b.tau * b.s_tau < a.tau * a.s_tau - tolerance:
                found.append(f"{self.valuation}: tau*S_tau decreases on {where}")
        return found

    def lipschitz(self) -> LipschitzEstimate:
        constant = jump = 0.0
        for a, b in zip(self.samples, self.samples[1:]):
            change = abs(b.s_tau - a.s_tau)
            jump = max(jump, change)
            constant = max(constant, change / (b.tau - a.tau))
        return LipschitzEstimate(constant, jump)

    def rows(self) -> List[Dict]:
        return [s._asdict() for s in self.samples]


@dataclass(frozen=True)
class JumpingData:
    """Jumping numbers j_{k,1} <= ... <= j_{k,d_k} of the sections of kL"""
    k: int
    d_k: int
    j: Tuple[float, ...]

    def __post_init__(self):
        if self.k < 1 or self.d_k < 1:
            raise InvalidValuation(f"k and d_k must be positive, got k={self.k}, d_k={self.d_k}")
        if len(self.j) != self.d_k:
            raise InvalidValuation(f"expected d_k = {self.d_k} jumping numbers, got {len(self.j)}")
        values = tuple(sorted(float(x) for x in self.j))
        if values[0] < 0:
            raise InvalidValuation(f"jumping numbers must be non-negative, got {values[0]}")
        object.__setattr__(self, "j", values)


@dataclass(frozen=True)
class DiscreteCandidate:
    name: str
    A: float
    data: JumpingData


@dataclass(frozen=True)
class StabilityReport:
    """Candidate-based criterion at one tau.

    Every delta here is a minimum over the supplied candidates, hence an
    upper bound for the true infimum over all valuations.
    """
    tau: float
    n: int
    delta_tau: float
    delta_tilde_tau: float
    threshold: float
    weak_threshold: float
    verdict: str
    weak_verdict: str
    argmin: str
    delta_lower_bound: float
    skipped: Tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["skipped"] = list(self.skipped)
        return data


def classify(value: float, threshold: float, tolerance: float = 1e-12) -> str:
    """One-directional verdict: clearing the threshold is evidence, failing it is not"""
    if value > threshold + tolerance:
        return STABLE
    if value >= threshold - tolerance:
        return SEMISTABLE
    return INCONCLUSIVE
