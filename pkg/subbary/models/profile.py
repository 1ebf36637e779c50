from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from .errors import InvalidProfile

CONCAVITY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ConcaveProfile:
    """Piecewise-linear concave f: [0, T] -> R>=0 given by its breakpoints"""
    T: float
    breakpoints: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "breakpoints", tuple(float(s) for s in self.breakpoints))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        s, v = self.breakpoints, self.values

        if self.T <= 0:
            raise InvalidProfile(f"T must be positive, got {self.T}")
        if len(s) < 2 or len(s) != len(v):
            raise InvalidProfile("need at least two breakpoints and one value per breakpoint")
        if s[0] != 0.0:
            raise InvalidProfile(f"first breakpoint must be 0, got {s[0]}", 0)
        if s[-1] != self.T:
            raise InvalidProfile(f"last breakpoint must equal T = {self.T}, got {s[-1]}", len(s) - 1)
        for i in range(1, len(s)):
            if s[i] <= s[i - 1]:
                raise InvalidProfile("breakpoints must be strictly increasing", i)
        for i, value in enumerate(v):
            if value < 0:
                raise InvalidProfile(f"negative value {value}", i)
        if not any(value > 0 for value in v):
            raise InvalidProfile("profile is identically zero")
        # concave iff every interior value lies on or above the chord of its neighbours
        slopes = self.slopes
        for i in range(1, len(s) - 1):
            weight = (s[i] - s[i - 1]) / (s[i + 1] - s[i - 1])
            chord = v[i - 1] + weight * (v[i + 1] - v[i - 1])
            if v[i] < chord - CONCAVITY_TOLERANCE * max(1.0, abs(v[i - 1]), abs(v[i + 1])):
                raise InvalidProfile(
                    f"slope increases from {slopes[i - 1]:.6g} to {slopes[i]:.6g} (not concave)", i)

    @classmethod
    def from_points(cls, breakpoints: Sequence[float], values: Sequence[float]) -> "ConcaveProfile":
        return cls(T=breakpoints[-1], breakpoints=tuple(breakpoints), values=tuple(values))

    @classmethod
    def constant(cls, T: float = 1.0, value: float = 1.0) -> "ConcaveProfile":
        return cls(T=T, breakpoints=(0.0, T), values=(value, value))

    @property
    def slopes(self) -> Tuple[float, ...]:
        s, v = self.breakpoints, self.values
        return tuple((v[i + 1] - v[i]) / (s[i + 1] - s[i]) for i in range(len(s) - 1))

    @property
    def pieces(self):
        """(start, end, value at start, slope) per linear piece"""
        s, v = self.breakpoints, self.values
        return [(s[i], s[i + 1], v[i], (v[i + 1] - v[i]) / (s[i + 1] - s[i])) for i in range(len(s) - 1)]

    def __call__(self, x: float) -> float:
        if x <= 0:
            return self.values[0]
        if x >= self.T:
            return self.values[-1]
        for start, end, value, slope in self.pieces:
            if x <= end:
                return value + slope * (x - start)
        return self.values[-1]

    def to_dict(self) -> Dict:
        return {"T": self.T, "breakpoints": list(self.breakpoints), "values": list(self.values)}


@dataclass(frozen=True)
class MomentSet:
    """Split of the profile mass at t"""
    t: float
    V_le: float
    V_ge: float
    b_le: Optional[float]
    b_ge: Optional[float]
    tau_ge: float

    @property
    def V_total(self) -> float:
        return self.V_le + self.V_ge


@dataclass(frozen=True)
class InequalityCheck:
    """One evaluated inequality lhs >= rhs"""
    lhs: float
    rhs: float
    slack: float
    t: float = 0.0
    n: int = 1
    p: float = 1.0

    def to_dict(self) -> Dict:
        return {"n": self.n, "p": self.p, "t": self.t, "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack}


@dataclass(frozen=True)
class ProofDiagnostics:
    """Intermediate quantities of the functional inequality's proof"""
    F_minus_f_min: float
    scaled_t: float
    T: float
    tau: float
