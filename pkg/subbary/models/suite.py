import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Dict, List, NamedTuple, Tuple

from .errors import InvalidConfig

SUITES = (
    "gen-hammer",
    "functional-nh",
    "weighted-nh",
    "fujita-1",
    "fujita-2",
    "classical-nh-limits",
    "mass-balance",
    "mc-oracle",
    "quantile-curve",
)


@dataclass(frozen=True)
class SuiteConfig:
    """Sizes and seeds of a randomized verification run"""
    seed: int = 42
    bodies: int = 500
    dims: Tuple[int, ...] = (2, 3, 4, 5)
    vertices_per_body: Tuple[int, int] = (4, 12)
    t_grid: int = 32
    profiles: int = 500
    profile_dims: Tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    profile_t_grid: int = 64
    weights: Tuple[float, ...] = (0.0, 0.5, 1.0, 2.0)
    okounkov_bodies: int = 300
    tau_grid: int = 64
    curve_tau_grid: int = 256
    mc_bodies: int = 50
    mc_samples: int = 100_000
    tolerance: float = 1e-9
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "profile_dims", tuple(self.profile_dims))
        object.__setattr__(self, "weights", tuple(float(p) for p in self.weights))
        object.__setattr__(self, "vertices_per_body", tuple(self.vertices_per_body))
        counts = {
            "bodies": self.bodies, "t_grid": self.t_grid, "profiles": self.profiles,
            "profile_t_grid": self.profile_t_grid, "okounkov_bodies": self.okounkov_bodies,
            "tau_grid": self.tau_grid, "curve_tau_grid": self.curve_tau_grid,
            "mc_bodies": self.mc_bodies, "mc_samples": self.mc_samples, "workers": self.workers,
        }
        for name, value in counts.items():
            if value < 1:
                raise InvalidConfig(f"{name} must be positive, got {value}")
        if not self.dims or not set(self.dims) <= set(range(2, 9)):
            raise InvalidConfig(f"body dimensions must lie in 2..8, got {self.dims}")
        if not self.profile_dims or not set(self.profile_dims) <= set(range(1, 9)):
            raise InvalidConfig(f"profile dimensions must lie in 1..8, got {self.profile_dims}")
        low, high = self.vertices_per_body
        if low < 1 or high < low:
            raise InvalidConfig(f"vertices_per_body must be a range low <= high, got {self.vertices_per_body}")
        if any(p < 0 for p in self.weights):
            raise InvalidConfig(f"weights must be non-negative, got {self.weights}")
        if self.tolerance < 0:
            raise InvalidConfig(f"tolerance must be non-negative, got {self.tolerance}")

    def to_dict(self) -> Dict:
        return asdict(self)


class Violation(NamedTuple):
    check: str
    inputs_digest: str
    slack: float


@dataclass
class SuiteResult:
    """Outcome of one suite run; violations are data, never exceptions"""
    suite: str
    checks_run: int = 0
    violations: List[Violation] = field(default_factory=list)
    min_slack: Dict[str, float] = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, check: str, slack: float, inputs_digest: str, tolerance: float):
        self.checks_run += 1
        if check not in self.min_slack or slack < self.min_slack[check]:
            self.min_slack[check] = slack
        if slack < -tolerance:
            self.violations.append(Violation(check, inputs_digest, slack))

    def merge(self, other: "SuiteResult"):
        self.checks_run += other.checks_run
        self.violations.extend(other.violations)
        for check, slack in other.min_slack.items():
            if check not in self.min_slack or slack < self.min_slack[check]:
                self.min_slack[check] = slack

    def digest(self) -> str:
        """SHA-256 of the canonical JSON of everything except the runtime"""
        payload = {
            "suite": self.suite,
            "checks_run": self.checks_run,
            "violations": [list(v) for v in self.violations],
            "min_slack": self.min_slack,
        }
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def to_dict(self, include_meta: bool = True) -> Dict:
        data = {
            "suite": self.suite,
            "checks_run": self.checks_run,
            "violations": [v._asdict() for v in self.violations],
            "min_slack": dict(sorted(self.min_slack.items())),
            "digest": self.digest(),
        }
        if include_meta:
            data["runtime"] = self.runtime
        return data
