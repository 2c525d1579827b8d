"""Gap probability and smallest-eigenvalue density at finite matrix size.

The probability E_p(t) that the interval (0, t) holds no eigenvalue, and the
density P_p(t) = -dE_p/dt of the smallest eigenvalue, are assembled from a
Pfaffian of derivative kernel entries times a Tricomi-function prefactor.
Every power of t carried by the kernel entries is split off analytically and
recombined with the prefactor in the log domain, so the Pfaffian argument
stays O(1) and the assembly remains stable from t -> 0 up to the far tail
and from p = 1 into the thousands.

The same code path serves every topology index: at k = 0 the Pfaffian is
empty and the assembly collapses, through a Kummer transform of the
prefactor, to the classical closed forms, which this module also provides
verbatim (closed_form_k0, closed_form_k1) as independent cross-checks.

`tabulate` evaluates any of the five supported quantities on a grid and
returns a validated DistributionCurve ready for serialization.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .kernels import border_column, kernel_matrix
from .microscopic import gap_micro, micro_density, smallest_micro
from .pfaffian import AntisymmetricMatrix, pfaffian
from .specfun import LogScaled, log_sum, tricomi_u

__all__ = [
    "FiniteSpec",
    "DistributionCurve",
    "gap_finite",
    "smallest_finite",
    "closed_form_k0",
    "closed_form_k1",
    "tabulate",
]

logger = logging.getLogger(__name__)

GAP_QUANTITIES = ("gap", "gap_micro")
DENSITY_QUANTITIES = ("smallest", "smallest_micro", "density")
FINITE_QUANTITIES = ("gap", "smallest")

# Numerical slack for curve invariants: values are accurate to ~1e-10
# relative, so violations beyond this are structural, not rounding.
_CURVE_TOL = 1e-9


@dataclass(frozen=True)
class FiniteSpec:
    """Matrix dimensions and spectral point of one finite-size evaluation."""

    p: int
    """Number of eigenvalues, at least 1."""

    k: int
    """Half the topology index: nu = 2k, non-negative."""

    t: float
    """Spectral point, non-negative."""

    def __post_init__(self) -> None:
        assert self.p >= 1, f"p must be at least 1, got {self.p}"
        assert self.k >= 0, f"k must be non-negative, got {self.k}"
        assert math.isfinite(self.t) and self.t >= 0.0, \
            f"t must be finite and non-negative, got {self.t}"

    @property
    def nu(self) -> int:
        """Topology index nu = 2k."""
        return 2 * self.k


@dataclass(frozen=True)
class DistributionCurve:
    """A validated table of one distribution quantity over a grid.

    Gap-type curves must stay within [0, 1] and be non-increasing, with the
    value 1 at abscissa zero when the grid includes it; density-type curves
    must be non-negative.  Violations beyond rounding slack raise at
    construction, so a curve object is safe to serialize as-is.
    """

    quantity: str
    """One of gap, smallest, gap_micro, smallest_micro, density."""

    p: int | None
    """Matrix size for finite-size quantities, None in the limit."""

    k: int
    """Half the topology index: nu = 2k."""

    abscissae: tuple[float, ...]
    """Strictly increasing grid of spectral points."""

    values: tuple[float, ...]
    """Quantity values matching the grid pointwise."""

    def __post_init__(self) -> None:
        if self.quantity not in GAP_QUANTITIES + DENSITY_QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if self.quantity in FINITE_QUANTITIES:
            if self.p is None or self.p < 1:
                raise ValueError(f"{self.quantity} requires p >= 1")
        elif self.p is not None:
            raise ValueError(f"{self.quantity} is a limit curve, p must be None")
        assert self.k >= 0, f"k must be non-negative, got {self.k}"
        if len(self.abscissae) != len(self.values) or not self.abscissae:
            raise ValueError("grid and values must be non-empty and equal length")
        pairs = zip(self.abscissae[:-1], self.abscissae[1:])
        if not all(lo < hi for lo, hi in pairs):
            raise ValueError("abscissae must be strictly increasing")
        if self.quantity in GAP_QUANTITIES:
            self._check_gap_invariants()
        else:
            self._check_density_invariants()

    def _check_gap_invariants(self) -> None:
        if self.abscissae[0] < 0.0:
            raise ValueError("gap abscissae must be non-negative")
        for x, v in zip(self.abscissae, self.values):
            if not -_CURVE_TOL <= v <= 1.0 + _CURVE_TOL:
                raise ValueError(f"gap value {v} outside [0, 1] at t={x}")
        for i in range(len(self.values) - 1):
            if self.values[i + 1] > self.values[i] + _CURVE_TOL:
                raise ValueError(
                    f"gap values increase at t={self.abscissae[i + 1]}")
        if self.abscissae[0] == 0.0 and abs(self.values[0] - 1.0) > _CURVE_TOL:
            raise ValueError(f"gap value at 0 must be 1, got {self.values[0]}")

    def _check_density_invariants(self) -> None:
        if self.abscissae[0] <= 0.0:
            raise ValueError("density abscissae must be positive")
        for x, v in zip(self.abscissae, self.values):
            if v < -_CURVE_TOL:
                raise ValueError(f"density value {v} negative at t={x}")

    @property
    def regime(self) -> str:
        """Evaluation regime: finite, microscopic, or density."""
        if self.quantity in FINITE_QUANTITIES:
            return "finite"
        if self.quantity == "density":
            return "density"
        return "microscopic"

    @property
    def nu(self) -> int:
        """Topology index nu = 2k."""
        return 2 * self.k


def _ln_gap_constant(p: int, k: int) -> float:
    """Log of the combinatorial constant in the gap probability assembly."""
    lnp = math.log(p)
    total = 0.0
    for j in range(k):
        total += (j + 1) * math.log(4.0) + gammaln(2 * j + 1) \
            + gammaln(p + j + 2) + (j - 1) * lnp \
            - gammaln(j + 1) - gammaln(p + 2 * j + 1)
    total += -0.5 * math.log(math.pi) + gammaln(p + 1) + gammaln((p + 1) / 2) \
        - gammaln(p + k + 1)
    if k % 2 == 0:
        total += -(k / 2) * math.log(2.0) + 1.5 * k * lnp \
            - gammaln((p + k + 1) / 2)
    else:
        total += -((k + 3) / 2) * math.log(2.0) + (3 * k - 1) / 2 * lnp \
            - gammaln((p + k) / 2)
    return total


def _ln_density_constant(p: int, k: int) -> float:
    """Log of the combinatorial constant in the smallest-eigenvalue assembly."""
    lnp = math.log(p)
    total = 0.0
    for j in range(k):
        total += (j + 1) * math.log(4.0) + gammaln(2 * j + 1) \
            + gammaln(p + j + 2) + (j - 1) * lnp \
            - gammaln(j + 1) - gammaln(p + 2 * j + 1)
    total += -0.5 * math.log(math.pi) + gammaln(p + 1) + gammaln((p + 1) / 2) \
        - gammaln(p + k + 1)
    if k % 2 == 0:
        total += -((k + 5) / 2) * math.log(2.0) + (3 * k - 1) / 2 * lnp \
            - gammaln((p + k) / 2)
    else:
        total += -((k + 6) / 2) * math.log(2.0) + 1.5 * k * lnp \
            - gammaln((p + k + 1) / 2)
    return total


def _pfaffian_factor(gamma: int, l: int, t: float, k: int,
                     bordered: bool) -> tuple[float, float]:
    """Pfaffian of the t-balanced kernel block and its stripped power of t.

    Returns (pf, w) such that the Pfaffian of the raw kernel block equals
    pf * t^w.  At k = 0 the matrix is empty and the Pfaffian is 1.
    """
    if k == 0:
        return pfaffian(AntisymmetricMatrix(data=np.zeros((0, 0)))), 0.0
    stripped = kernel_matrix(gamma, l, t, k)
    if not bordered:
        pf = pfaffian(AntisymmetricMatrix(data=stripped))
        return pf, k * (gamma + 0.5) + k * (k - 1) / 2.0
    border = border_column(gamma, l, t, k)
    data = np.zeros((k + 1, k + 1))
    data[:k, :k] = stripped
    data[:k, k] = border
    data[k, :k] = -border
    pf = pfaffian(AntisymmetricMatrix(data=data))
    return pf, k * (gamma + 0.5) + k * (k - 1) / 2.0 + gamma - 0.5


def gap_finite(spec: FiniteSpec) -> float:
    """Probability that (0, t) holds no eigenvalue at size p, topology 2k."""
    p, k, t = spec.p, spec.k, spec.t
    if t == 0.0:
        return 1.0
    even = k % 2 == 0
    if even:
        l, a_half, power, bordered = p + k, (p + k + 1) / 2, 0.5 - k * k / 2.0, False
    else:
        l, a_half, power, bordered = p + k + 1, (p + k) / 2, 1.0 - k * k / 2.0, True
    pf, tpow = _pfaffian_factor(0, l, t, k, bordered)
    ln_pre = _ln_gap_constant(p, k) + gammaln(a_half) - 0.5 * p * t \
        + power * math.log(4.0 * p * t) + tpow * math.log(t) \
        - math.log(2.0 * math.sqrt(2.0 * p))
    value = tricomi_u(a_half, 1.5, 0.5 * t) * LogScaled.from_value(pf)
    return value.scaled(ln_pre).value


def smallest_finite(spec: FiniteSpec) -> float:
    """Density of the smallest eigenvalue in t, at size p and topology 2k."""
    p, k, t = spec.p, spec.k, spec.t
    if t <= 0.0:
        raise ValueError(f"the density needs t > 0, got {t}")
    if p == 1 and k >= 2 and k % 2 == 0:
        # The kernel draws on polynomial orders up to k, which a single
        # eigenvalue supplies only for k <= 1 or for the bordered odd path.
        raise ValueError(f"the density at p=1 needs k odd or k <= 1, got k={k}")
    even = k % 2 == 0
    if even:
        l, a_half, power, bordered = p + k - 1, (p + k + 2) / 2, 1.0 - k * k / 2.0, False
    else:
        l, a_half, power, bordered = p + k, (p + k + 1) / 2, 0.5 - k * k / 2.0, True
    pf, tpow = _pfaffian_factor(1, l, t, k, bordered)
    ln_pre = _ln_density_constant(p, k) + gammaln(a_half) - 0.5 * p * t \
        + power * math.log(4.0 * p * t) + tpow * math.log(t) \
        - math.log(2.0) - 1.5 * math.log(2.0 * p) + math.log(4.0 * p)
    value = tricomi_u(a_half, 2.5, 0.5 * t) * LogScaled.from_value(pf)
    return value.scaled(ln_pre).value


def closed_form_k0(p: int, t: float) -> float:
    """Smallest-eigenvalue density at nu = 0 in its classical closed form.

    P(t) = p! / (2^(p-1/2) Gamma(p/2)) t^(-1/2) e^(-pt/2) U((p-1)/2, -1/2, t/2)
    """
    assert p >= 2, f"the closed form needs p >= 2, got {p}"
    if t <= 0.0:
        raise ValueError(f"the density needs t > 0, got {t}")
    ln_pre = gammaln(p + 1) - (p - 0.5) * math.log(2.0) - gammaln(p / 2) \
        - 0.5 * p * t - 0.5 * math.log(t)
    return tricomi_u((p - 1) / 2, -0.5, 0.5 * t).scaled(ln_pre).value


def closed_form_k1(p: int, t: float) -> float:
    """Smallest-eigenvalue density at nu = 2 in its classical closed form.

    P(t) = Gamma((p+1)/2)/sqrt(2 pi) sqrt(t) e^(-pt/2)
           [U((p-1)/2, -1/2, t/2) L_{p-1}^(2)(-t)
            + (t/2) U((p+1)/2, 1/2, t/2) L_{p-2}^(3)(-t)]
    """
    assert p >= 2, f"the closed form needs p >= 2, got {p}"
    if t <= 0.0:
        raise ValueError(f"the density needs t > 0, got {t}")
    first = tricomi_u((p - 1) / 2, -0.5, 0.5 * t) \
        * LogScaled.from_value(float(eval_genlaguerre(p - 1, 2, -t)))
    second = (tricomi_u((p + 1) / 2, 0.5, 0.5 * t)
              * LogScaled.from_value(float(eval_genlaguerre(p - 2, 3, -t)))
              ).scaled(math.log(0.5 * t))
    ln_pre = gammaln((p + 1) / 2) - 0.5 * math.log(2.0 * math.pi) \
        + 0.5 * math.log(t) - 0.5 * p * t
    return log_sum([first, second]).scaled(ln_pre).value


def _point_evaluator(quantity: str, p: int | None, k: int):
    if quantity in FINITE_QUANTITIES:
        if p is None:
            raise ValueError(f"{quantity} requires a matrix size p")
        if quantity == "gap":
            return lambda t: gap_finite(FiniteSpec(p=p, k=k, t=t))
        return lambda t: smallest_finite(FiniteSpec(p=p, k=k, t=t))
    if p is not None:
        raise ValueError(f"{quantity} is a limit quantity, p must be None")
    if quantity == "gap_micro":
        return lambda u: gap_micro(k, u)
    if quantity == "smallest_micro":
        return lambda u: smallest_micro(k, u)
    if quantity == "density":
        return lambda u: micro_density(2 * k, u)
    raise ValueError(f"unknown quantity {quantity!r}")


def tabulate(quantity: str, k: int, grid: Sequence[float],
             p: int | None = None, workers: int | None = None) -> DistributionCurve:
    """Evaluate one quantity over a grid into a validated curve.

    The grid must be strictly increasing, non-negative for gap quantities
    and strictly positive for densities.  With `workers` greater than 1 the
    points are evaluated in a thread pool; results keep grid order either
    way.  A failure at any single point is re-raised as a RuntimeError
    naming the offending abscissa.
    """
    abscissae = tuple(float(x) for x in grid)
    if not abscissae:
        raise ValueError("grid must not be empty")
    if not all(lo < hi for lo, hi in zip(abscissae[:-1], abscissae[1:])):
        raise ValueError("grid must be strictly increasing")
    low = abscissae[0]
    if quantity in GAP_QUANTITIES:
        if low < 0.0:
            raise ValueError(f"gap grid must be non-negative, got {low}")
    elif low <= 0.0:
        raise ValueError(f"density grid must be positive, got {low}")
    point = _point_evaluator(quantity, p, k)

    def evaluate(x: float) -> float:
        try:
            return point(x)
        except Exception as exc:
            raise RuntimeError(
                f"{quantity} evaluation failed at abscissa {x!r}: {exc}") from exc

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = tuple(pool.map(evaluate, abscissae))
    else:
        values = tuple(evaluate(x) for x in abscissae)
    logger.debug("tabulated %s at %d points", quantity, len(abscissae))
    return DistributionCurve(quantity=quantity, p=p, k=k,
                             abscissae=abscissae, values=values)
