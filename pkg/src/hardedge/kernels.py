"""Kernel matrices entering the Pfaffian eigenvalue formulas.

Two families of quantities are built from the skew-orthogonal polynomials of
the shifted Laguerre weight.  The two-point kernel

    K_l(xa, xb) = sum_j [R_{2j+1}(xa) R_{2j}(xb) - R_{2j+1}(xb) R_{2j}(xa)] / r_j

pairs polynomial couples up to degree l-1 (the hatted set when l is odd), and
the antisymmetric derivative matrix

    Xi_ab = (-1)^(a+b) t^(2 gamma + a + b + 1) *
            sum_j [d^a R_{2j+1} d^b R_{2j} - d^b R_{2j+1} d^a R_{2j}](-t) / r_j

collects its mixed derivatives at the left spectral edge, together with a
border column xi_a of single derivatives.  Gap probabilities and smallest
eigenvalue densities are Pfaffians of small matrices with these entries.

Two independent evaluation routes are kept side by side.  The reference route
(xi_big, kernel_sum) works term by term on the polynomial combinations in
log-scaled arithmetic.  The bulk route (kernel_matrix, border_column) expands
everything over standard Laguerre values L_n^(mu)(-t), which are positive and
satisfy a benign forward recurrence, so matrices remain accurate for
polynomial counts in the hundreds where factorial-laden expressions overflow.
The closed Christoffel-Darboux form (kernel_cd) provides a third route for
even l that bypasses the polynomial sum entirely.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .sop import (
    WeightParams,
    partition_z_t,
    sop_even,
    sop_moment,
    sop_norm,
    sop_odd,
)
from .specfun import LogScaled, laguerre_monic, log_sum, tricomi_u

__all__ = [
    "KernelSpec",
    "xi_big",
    "xi_small",
    "kernel_sum",
    "kernel_cd",
    "kernel_matrix",
    "border_column",
]

logger = logging.getLogger(__name__)

# The forward Laguerre recurrence at argument -t grows like e^(2 sqrt(n t));
# beyond this product the values leave the double range.
_RECURRENCE_ENVELOPE = 1.2e5


@dataclass(frozen=True)
class KernelSpec:
    """Weight power, polynomial count, and shift of one kernel family."""

    gamma: int
    """Weight power: 0 for gap-probability matrices, 1 for density ones."""

    l: int
    """Number of polynomials paired by the kernel; odd counts switch the sum
    to the hatted polynomial set."""

    t: float
    """Positive shift of the weight; derivative entries are taken at -t."""

    parity: str = field(init=False)
    """'even' or 'odd', derived from l."""

    def __post_init__(self) -> None:
        assert self.gamma >= 0, f"gamma must be non-negative, got {self.gamma}"
        assert self.l >= 2, f"need at least two polynomials, got l={self.l}"
        assert self.t > 0.0, f"t must be positive, got {self.t}"
        object.__setattr__(self, "parity",
                           "even" if self.l % 2 == 0 else "odd")

    @property
    def weight_params(self) -> WeightParams:
        """Weight parameters shared with the polynomial constructors."""
        return WeightParams(gamma=self.gamma, t=self.t)


def _u_quotient(a_num: float, b_num: float, a_den: float, b_den: float,
                t: float) -> float:
    """Ratio U(a_num, b_num, t/2) / U(a_den, b_den, t/2)."""
    return (tricomi_u(a_num, b_num, t / 2.0)
            / tricomi_u(a_den, b_den, t / 2.0)).value


def _rho_coef(j: int, gamma: int, t: float) -> float:
    return _u_quotient(j + gamma + 0.5, gamma + 0.5,
                       j + gamma + 0.5, gamma + 1.5, t)


def _sigma_coef(j: int, gamma: int, t: float) -> float:
    return _u_quotient(j + gamma + 0.5, gamma - 0.5,
                       j + gamma + 0.5, gamma + 1.5, t)


def _rho_tilde(gamma: int, l: int, t: float) -> float:
    """Coefficient mixing the two border terms, a half-integer-index cousin
    of the even-polynomial coefficient."""
    return _u_quotient(gamma + (l - 1) / 2.0, gamma + 0.5,
                       gamma + (l - 1) / 2.0, gamma + 1.5, t)


def _sigma_tilde(gamma: int, l: int, t: float) -> float:
    return _u_quotient(gamma + (l - 1) / 2.0, gamma - 0.5,
                       gamma + (l - 1) / 2.0, gamma + 1.5, t)


# --------------------------------------------------------------------------
# reference route: log-scaled sums over polynomial couples


def _bilinear_sum(spec: KernelSpec, first: tuple[int, float],
                  second: tuple[int, float]) -> LogScaled:
    """Antisymmetrized pair sum with (order, point) slots.

    Evaluates sum_j [O_j(first) E_j(second) - O_j(second) E_j(first)] / r_j
    where O_j, E_j are the odd/even polynomials of the family (hatted when l
    is odd) and each slot applies derivative_scaled(order, point).
    """
    params = spec.weight_params
    hatted = spec.parity == "odd"
    if hatted:
        top_index = spec.l - 1
        top = sop_even(top_index // 2, params)
        m_top = sop_moment(top_index, params)
        top_first = top.derivative_scaled(*first)
        top_second = top.derivative_scaled(*second)
    j_max = (spec.l - 3) // 2 if hatted else (spec.l - 2) // 2
    values: list[LogScaled] = []
    for j in range(j_max + 1):
        odd = sop_odd(j, params)
        even = sop_even(j, params)
        r_j = sop_norm(j, params)
        if hatted:
            c_odd = sop_moment(2 * j + 1, params) / m_top
            c_even = sop_moment(2 * j, params) / m_top
            o_1 = log_sum([odd.derivative_scaled(*first), -(c_odd * top_first)])
            o_2 = log_sum([odd.derivative_scaled(*second), -(c_odd * top_second)])
            e_1 = log_sum([even.derivative_scaled(*first), -(c_even * top_first)])
            e_2 = log_sum([even.derivative_scaled(*second), -(c_even * top_second)])
        else:
            o_1 = odd.derivative_scaled(*first)
            o_2 = odd.derivative_scaled(*second)
            e_1 = even.derivative_scaled(*first)
            e_2 = even.derivative_scaled(*second)
        values.append(o_1 * e_2 / r_j)
        values.append(-(o_2 * e_1 / r_j))
    return log_sum(values)


def xi_big(a: int, b: int, spec: KernelSpec) -> float:
    """Derivative kernel entry Xi_ab^(gamma, l)(t).

    Reference route: the polynomial pair sum in log-scaled arithmetic.
    Exact for every admissible order but factorial-laden; kernel_matrix
    builds the same entries factorial-free for bulk work.
    """
    assert 0 <= a <= spec.l - 2, f"order a={a} outside 0..{spec.l - 2}"
    assert 0 <= b <= spec.l - 2, f"order b={b} outside 0..{spec.l - 2}"
    total = _bilinear_sum(spec, (a, -spec.t), (b, -spec.t))
    sign = -1.0 if (a + b) % 2 else 1.0
    power = (2 * spec.gamma + a + b + 1) * math.log(spec.t)
    return sign * total.scaled(power).value


def kernel_sum(xa: float, xb: float, spec: KernelSpec) -> float:
    """Two-point kernel K_l(xa, xb) by the direct polynomial pair sum."""
    return _bilinear_sum(spec, (0, xa), (0, xb)).value


# --------------------------------------------------------------------------
# bulk route: positive Laguerre values by forward recurrence


def _phi_rows(n_max: int, mus: list[int], t: float) -> dict[int, np.ndarray]:
    """Tables of standard Laguerre values L_n^(mu)(-t) for n = 0..n_max.

    All values are positive and the three-term recurrence at negative
    argument has positive coefficients throughout, so the tables carry no
    cancellation.
    """
    rows: dict[int, np.ndarray] = {}
    for mu in mus:
        row = np.empty(max(n_max + 1, 2))
        row[0] = 1.0
        row[1] = mu + 1.0 + t
        for n in range(1, n_max):
            row[n + 1] = ((2.0 * n + mu + 1.0 + t) * row[n]
                          - (n + mu) * row[n - 1]) / (n + 1.0)
        rows[mu] = row[:n_max + 1]
    return rows


def _check_envelope(l: int, t: float) -> None:
    if l * t > _RECURRENCE_ENVELOPE:
        raise ValueError(
            f"l * t = {l * t:.3g} exceeds the stable range {_RECURRENCE_ENVELOPE:.3g} "
            "of the Laguerre forward recurrence")


def kernel_matrix(gamma: int, l: int, t: float, size: int) -> np.ndarray:
    """Power-stripped derivative kernel matrix M, antisymmetric size x size.

    The full entries factor as Xi_ab = t^(2 gamma + a + b + 1) * M_ab; the
    stripped matrix stays O(1) down to t -> 0, so callers can keep the exact
    power in a log-domain prefactor.  Entries are assembled from positive
    Laguerre values, with the scaled polynomial norms folded in through
    gamma-function differences instead of raw factorials.
    """
    assert size >= 1, f"size must be positive, got {size}"
    assert size <= l - 1, f"orders 0..{size - 1} exceed the bound l-2={l - 2}"
    spec = KernelSpec(gamma=gamma, l=l, t=t)
    _check_envelope(l, t)
    hatted = spec.parity == "odd"
    j_max = (l - 3) // 2 if hatted else (l - 2) // 2
    phi = _phi_rows(l, list(range(2 * gamma, 2 * gamma + size + 1)), t)

    def pget(n: int, mu: int) -> float:
        return phi[mu][n] if n >= 0 else 0.0

    rho = [0.0] * (j_max + 1)
    sig = [0.0] * (j_max + 1)
    for j in range(1, j_max + 1):
        rho[j] = _rho_coef(j, gamma, t)
        sig[j] = _sigma_coef(j, gamma, t)

    def a_coef(j: int, a: int) -> float:
        return (pget(2 * j - a, 2 * gamma + a)
                + rho[j] * pget(2 * j - 1 - a, 2 * gamma + a + 1))

    def b_coef(j: int, a: int) -> float:
        if j == 0:
            return pget(1 - a, 2 * gamma + a)
        mid = (rho[j] + 2 * j * rho[j] ** 2 - 2 * (j + 1) * sig[j]) / (2 * j + 1)
        return (pget(2 * j + 1 - a, 2 * gamma + a)
                - 2.0 * (gamma + j) / (2 * j + 1) * pget(2 * j - 1 - a, 2 * gamma + a)
                + mid * pget(2 * j - 1 - a, 2 * gamma + a + 1)
                + 2.0 * j * rho[j] / (2 * j + 1) * pget(2 * j - a, 2 * gamma + a + 1)
                - 2.0 * (gamma + j) * rho[j] / (2 * j + 1)
                * pget(2 * j - 2 - a, 2 * gamma + a + 1))

    even_vals = np.empty((j_max + 1, size))
    odd_vals = np.empty((j_max + 1, size))
    norm_w = np.empty(j_max + 1)
    for j in range(j_max + 1):
        u_j = _u_quotient(j + 1.0, 0.5 - gamma, float(j), 0.5 - gamma, t)
        norm_w[j] = math.exp(gammaln(2 * j + 2) - gammaln(2 * j + 2 * gamma + 2)) \
            / (2.0 * u_j)
        for a in range(size):
            even_vals[j, a] = a_coef(j, a)
            odd_vals[j, a] = b_coef(j, a)

    weighted = norm_w[:, None] * even_vals
    matrix = odd_vals.T @ weighted
    matrix = matrix.T - matrix

    if hatted:
        big_k = (l - 1) // 2
        rho_top = _rho_coef(big_k, gamma, t)
        top_vals = np.array([
            pget(2 * big_k - a, 2 * gamma + a)
            + rho_top * pget(2 * big_k - 1 - a, 2 * gamma + a + 1)
            for a in range(size)])
        half = 0.5 - gamma

        def v_of(j: int) -> float:
            return _u_quotient(j + 0.5, half, float(j), half, t)

        def moment_even_scaled(j: int) -> float:
            return 2.0 ** (0.5 - gamma) * math.exp(
                gammaln(j + 1.5) - gammaln(j + gamma + 1.5)) * v_of(j)

        def odd_over_even(j: int) -> float:
            return t * ((j + 0.5) * _u_quotient(j + 1.5, half + 1.0, j + 0.5, half, t)
                        - j * _u_quotient(j + 1.0, half + 1.0, float(j), half, t))

        mu_top = moment_even_scaled(big_k)
        ln_border = gammaln(2 * big_k + 2) - gammaln(2 * big_k + 2 * gamma + 2) \
            - math.log(mu_top)
        border_scale = math.exp(ln_border)
        even_w = np.empty(j_max + 1)
        odd_w = np.empty(j_max + 1)
        for j in range(j_max + 1):
            u_j = _u_quotient(j + 1.0, 0.5 - gamma, float(j), 0.5 - gamma, t)
            mu_e = moment_even_scaled(j)
            even_w[j] = border_scale * mu_e / (2.0 * u_j)
            odd_w[j] = even_w[j] * odd_over_even(j) / (2 * j + 1)
        mixed = odd_vals.T @ even_w + even_vals.T @ odd_w
        matrix += np.outer(mixed, top_vals) - np.outer(top_vals, mixed)

    return matrix


def border_column(gamma: int, l: int, t: float, size: int) -> np.ndarray:
    """Power-stripped border entries beta with xi_a = t^(2 gamma + a) beta_a.

    Each entry is a sum of two positive Laguerre values, so the column is
    strictly positive and cancellation-free at every admissible order.
    """
    assert size >= 1, f"size must be positive, got {size}"
    assert size <= l - 1, f"orders 0..{size - 1} exceed the bound l-2={l - 2}"
    assert t > 0.0, f"t must be positive, got {t}"
    _check_envelope(l, t)
    rho_t = _rho_tilde(gamma, l, t)
    phi = _phi_rows(l, list(range(2 * gamma, 2 * gamma + size + 1)), t)
    out = np.empty(size)
    for a in range(size):
        value = phi[2 * gamma + a][l - a - 2]
        if l - a - 3 >= 0:
            value += rho_t * phi[2 * gamma + a + 1][l - a - 3]
        out[a] = value
    return out


def xi_small(a: int, spec: KernelSpec) -> float:
    """Border entry xi_a^(gamma, l)(t), strictly positive."""
    assert 0 <= a <= spec.l - 2, f"order a={a} outside 0..{spec.l - 2}"
    beta = border_column(spec.gamma, spec.l, spec.t, a + 1)[a]
    return spec.t ** (2 * spec.gamma + a) * beta


# --------------------------------------------------------------------------
# closed route: Christoffel-Darboux form for even l


def _difference_terms(terms: list[tuple[int, int, int, int, float]]
                      ) -> list[tuple[int, int, int, int, float]]:
    """Apply (d_a - d_b) to a sum of products M_m^(mu)(xa) M_n^(nu)(xb)."""
    out: list[tuple[int, int, int, int, float]] = []
    for (m, mu_m, n, mu_n, c) in terms:
        if m >= 1:
            out.append((m - 1, mu_m + 1, n, mu_n, c * m))
        if n >= 1:
            out.append((m, mu_m, n - 1, mu_n + 1, -c * n))
    return out


def _evaluate_terms(terms: list[tuple[int, int, int, int, float]],
                    xa: float, xb: float) -> LogScaled:
    values = []
    for (m, mu_m, n, mu_n, c) in terms:
        if c == 0.0:
            continue
        product = laguerre_monic(m, mu_m, xa) * laguerre_monic(n, mu_n, xb)
        values.append(product * LogScaled.from_value(c))
    return log_sum(values)


def kernel_cd(xa: float, xb: float, gamma: int, l: int, t: float) -> float:
    """Two-point kernel K_l(xa, xb) by the Christoffel-Darboux route.

    For even l the polynomial pair sum telescopes into second divided
    differences of one bilinear combination of degree-l monic Laguerre
    polynomials with a partition-function ratio in front.  The divided
    difference degenerates at coincident points, which is rejected, and it
    cancels catastrophically in a shrinking neighborhood of coincidence, so
    keep the arguments well separated.
    """
    if l < 4 or l % 2:
        raise ValueError(f"the closed form needs even l >= 4, got l={l}")
    if xa == xb:
        raise ValueError("coincident arguments degenerate the divided difference")
    assert t > 0.0, f"t must be positive, got {t}"
    rho_t = _rho_tilde(gamma, l, t)
    sig_t = _sigma_tilde(gamma, l, t)
    base: list[tuple[int, int, int, int, float]] = [
        (l, 2 * gamma - 2, l, 2 * gamma - 2, 1.0),
        (l - 1, 2 * gamma - 1, l, 2 * gamma - 2, -rho_t * l),
        (l, 2 * gamma - 2, l - 1, 2 * gamma - 1, -rho_t * l),
        (l - 1, 2 * gamma - 1, l - 1, 2 * gamma - 1, sig_t * l * l),
    ]
    first = _difference_terms(base)
    second = _difference_terms(first)
    delta = LogScaled.from_value(xa - xb)
    inner = log_sum([
        _evaluate_terms(second, xa, xb) / delta,
        -(_evaluate_terms(first, xa, xb) / (delta * delta)).scaled(math.log(2.0)),
    ])
    z_ratio = partition_z_t(l - 2, gamma, t) / partition_z_t(l, gamma, t)
    return (z_ratio * inner).value
