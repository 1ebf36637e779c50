"""
Eckardt Example
Closed-form quantile curves for ord_E on the cubic surface with an Eckardt
point, checked against the generic polytope pipeline
"""

import logging
import math
from typing import Dict, List, NamedTuple, Optional

import numpy as np

from ..models.errors import DomainError
from ..models.geometry import ConvexBody
from ..models.invariants import ValuationRecord
from ..utils.numeric import format_number
from ..utils.serialization import render_table
from .convex_body import ConvexBodyKernel
from .invariants import InvariantCalculator, threshold

logger = logging.getLogger(__name__)

A = 2.0
SIGMA = 0.0
S0 = 3.0
DIMENSION = 2
BRANCH_TAU = 2.0 / 3.0
TAU_FLOOR = 1e-6
QUADRILATERAL = [(0, 0), (1, 1), (3, 0), (1, -1)]
FIGURE_COLUMNS = ["tau", "ratio", "threshold", "margin"]


class StabilityMargin(NamedTuple):
    min_margin: float
    argmin_tau: float


class EckardtExample:
    """ord_E with A = 2, sigma = 0, S_0 = 3 on a surface (n = 2).

    Its Okounkov body is realised by the quadrilateral (0,0), (1,1), (3,0),
    (1,-1): the slice {x_1 >= t} has area 3 - t^2 on [0,1] and (3-t)^2/2 on
    [1,3], so the total mass is 3.
    """

    def __init__(self, kernel: Optional[ConvexBodyKernel] = None):
        self.kernel = kernel or ConvexBodyKernel()
        self.calculator = InvariantCalculator(self.kernel)
        self._body: Optional[ConvexBody] = None

    @property
    def body(self) -> ConvexBody:
        if self._body is None:
            self._body = self.kernel.build(QUADRILATERAL, DIMENSION)
        return self._body

    def eck_valuation(self) -> ValuationRecord:
        return ValuationRecord(name="ord_E", A=A, body=self.body)

    # ------------------------------------------------------------------
    # closed forms
    # ------------------------------------------------------------------

    def eck_t_of_tau(self, tau: float) -> float:
        if tau < BRANCH_TAU:
            return 3.0 - math.sqrt(6.0 * tau)
        return math.sqrt(3.0 * (1.0 - tau))

    def eck_tau_of_t(self, t: float) -> float:
        if t <= 1.0:
            return 1.0 - t * t / 3.0
        return (3.0 - t) ** 2 / 6.0

    def eck_slice_volume(self, t: float) -> float:
        return S0 * self.eck_tau_of_t(t)

    def eck_tau_s_tau(self, t: float) -> float:
        """tau * S_tau as a function of the threshold t"""
        if t <= 1.0:
            return 4.0 / 3.0 - 2.0 * t ** 3 / 9.0
        return (3.0 - t) ** 2 * (2.0 * t + 3.0) / 18.0

    def _s_near(self, tau: float) -> float:
        return 3.0 - 2.0 / 3.0 * math.sqrt(6.0 * tau)

    def _s_far(self, tau: float) -> float:
        return 2.0 / (3.0 * tau) * (2.0 - math.sqrt(3.0) * (1.0 - tau) ** 1.5)

    def eck_s_tau(self, tau: float) -> float:
        return self._s_near(tau) if tau < BRANCH_TAU else self._s_far(tau)

    def eck_ratio(self, tau: float) -> float:
        """A / S_tau; equals alpha = 2/3 at tau = 0"""
        return A / self.eck_s_tau(tau)

    # ------------------------------------------------------------------
    # checks
    # ------------------------------------------------------------------

    def _tau_grid(self, grid: int) -> List[float]:
        taus = {k / grid for k in range(1, grid + 1)}
        taus.update({TAU_FLOOR, BRANCH_TAU, 1.0})
        return sorted(taus)

    def eck_verify_stability(self, grid: int = 10_000) -> StabilityMargin:
        """Smallest gap between A/S_tau and threshold(tau, 2) on (0, 1]"""
        if grid < 2:
            raise DomainError(f"grid must be at least 2, got {grid}")
        best = StabilityMargin(math.inf, math.nan)
        for tau in self._tau_grid(grid):
            margin = self.eck_ratio(tau) - threshold(tau, DIMENSION)
            if margin < best.min_margin:
                best = StabilityMargin(margin, tau)
        logger.info(f"Eckardt stability margin {best.min_margin:.3g} at tau = {best.argmin_tau:.6g}")
        return best

    def eck_cross_validate(self, grid: int = 1000) -> float:
        """Max |generic S_tau - closed form| over tau = k/grid, k = 0..grid"""
        if grid < 2:
            raise DomainError(f"grid must be at least 2, got {grid}")
        valuation = self.eck_valuation()
        worst = 0.0
        for k in range(grid + 1):
            tau = k / grid
            generic = self.calculator.s_tau(valuation, tau, DIMENSION)
            worst = max(worst, abs(generic - self.eck_s_tau(tau)))
        logger.info(f"✅ Eckardt cross-validation over {grid + 1} points: max error {worst:.3g}")
        return worst

    def eck_taylor_certificate(self, grid: int = 10_000) -> float:
        """Smallest gap in the chain bounding (1 - tau)^(3/2) on (0, 2/3).

        (1-tau)^(3/2) < 1 - 3tau/2 + (3 sqrt3/8) tau^2 < 1 - 3tau/2 + (sqrt6/3) tau^2
        <= 1 - 3tau/2 + (sqrt6/3) tau^(3/2); the last bound is exactly
        A/S_tau > threshold(tau, 2) on the first branch.
        """
        taus = BRANCH_TAU * np.arange(1, grid + 1) / (grid + 1)
        base = 1.0 - 1.5 * taus
        exact = (1.0 - taus) ** 1.5
        lagrange = base + 3.0 * math.sqrt(3.0) / 8.0 * taus ** 2
        widened = base + math.sqrt(6.0) / 3.0 * taus ** 2
        final = base + math.sqrt(6.0) / 3.0 * taus ** 1.5
        gaps = np.minimum(np.minimum(lagrange - exact, widened - lagrange), final - widened)
        return float(gaps.min())

    # ------------------------------------------------------------------
    # output
    # ------------------------------------------------------------------

    def eck_curve_rows(self, samples: int) -> List[Dict[str, str]]:
        if samples < 2:
            raise DomainError(f"samples must be at least 2, got {samples}")
        rows = []
        for tau in np.linspace(TAU_FLOOR, 1.0, samples):
            tau = float(tau)
            ratio = self.eck_ratio(tau)
            bound = threshold(tau, DIMENSION)
            rows.append({
                "tau": format_number(tau),
                "ratio": format_number(ratio),
                "threshold": format_number(bound),
                "margin": format_number(ratio - bound),
            })
        return rows

    def eck_emit_curve(self, samples: int, fmt: str = "csv") -> str:
        """The graph of A/S_tau with its lower bound, as CSV or JSON text"""
        return render_table(self.eck_curve_rows(samples), FIGURE_COLUMNS, fmt)

    def eck_summary(self, grid: int = 1000) -> Dict[str, str]:
        margin = self.eck_verify_stability(max(grid, 2))
        return {
            "alpha": format_number(self.eck_ratio(0.0)),
            "ratio_at_1": format_number(self.eck_ratio(1.0)),
            "s_tau_at_2_3_first_branch": format_number(self._s_near(BRANCH_TAU)),
            "s_tau_at_2_3_second_branch": format_number(self._s_far(BRANCH_TAU)),
            "t_of_1_6": format_number(self.eck_t_of_tau(1.0 / 6.0)),
            "min_margin": format_number(margin.min_margin),
            "argmin_tau": format_number(margin.argmin_tau),
            "cross_validation_error": format_number(self.eck_cross_validate(grid)),
            "taylor_certificate_gap": format_number(self.eck_taylor_certificate(grid)),
        }
