"""Al-Salam--Chihara type polynomials by three-term recurrence, and the
logarithmic grids x_k(alpha) on which the difference operator acts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .qcore import HypergeometricSpec, QParams, check_q, phi_series, qpoch_finite


@dataclass(frozen=True)
class GridPoint:
    k: int
    x: float
    alpha: float
    q: float

    @property
    def exp_minus_y(self) -> float:
        """e^{-y} = alpha q^k, where x = sinh y."""
        return self.alpha * self.q**self.k


@dataclass(frozen=True)
class PolynomialFamily:
    kind: str  # asc_general | sym_asc | qinv_hermite
    parameters: tuple
    q: float

    def __post_init__(self):
        if self.kind not in ("asc_general", "sym_asc", "qinv_hermite"):
            raise DomainError(f"unknown polynomial family {self.kind!r}")
        check_q(self.q)

    def __call__(self, n: int, x):
        if self.kind == "asc_general":
            a, b = self.parameters
            return asc_poly(n, x, a, b, self.q)
        if self.kind == "sym_asc":
            return sym_asc(n, x, self.parameters[0], self.q)
        return qinv_hermite(n, x, self.q)


def grid_x(alpha: float, q: float, k):
    """x_k(alpha) = (1/(alpha q^k) - alpha q^k)/2; k may be a numpy array."""
    e = alpha * q**k
    return 0.5 * (1.0 / e - e)


def grid_point(alpha: float, q: float, k: int) -> GridPoint:
    if alpha == 0:
        raise DomainError("alpha must be nonzero")
    check_q(q)
    return GridPoint(k, grid_x(alpha, q, k), alpha, q)


def asc_poly(n: int, u: complex, a: complex, b: complex, q: float) -> complex:
    """P_n(u; a, b | q^{-1}) by its three-term recurrence (base q^{-1})."""
    if n < 0:
        raise DomainError("degree must be >= 0")
    if u == 0:
        raise DomainError("u must be nonzero")
    check_q(q)
    s = u + 1.0 / u
    prev, cur = 0.0, 1.0
    for k in range(n):
        qk = q ** (-k)
        prev, cur = cur, (s - (a + b) * qk) * cur - (1 - qk) * (1 - a * b * q * qk) * prev
    return cur


def asc_poly_series(n: int, u: complex, a: complex, b: complex, q: float,
                    form: str = "2phi1") -> complex:
    """P_n(u; a, b | q^{-1}) from one of its terminating base-q series forms.

    ``form`` is ``3phi1``, ``3phi2`` or ``2phi1``.  Used as a cross-check of
    :func:`asc_poly`.
    """
    if n < 0:
        raise DomainError("degree must be >= 0")
    qn = q ** (-n)
    gauss = q ** (n * (n - 1) // 2)
    if form == "3phi1":
        pre = (-b) ** n * qpoch_finite(1 / (a * b), q, n) / gauss
        spec = HypergeometricSpec.phi([qn, 1 / (a * u), u / a], [1 / (a * b)], q)
        z = a * q**n / b
    elif form == "3phi2":
        pre = (-a * b * u) ** n * qpoch_finite(1 / (a * b), q, n) / gauss
        spec = HypergeometricSpec.phi([qn, 1 / (a * u), 1 / (b * u)], [1 / (a * b), 0], q)
        z = q
    elif form == "2phi1":
        pre = (-b) ** n * qpoch_finite(u / b, q, n) / gauss
        spec = HypergeometricSpec.phi([qn, 1 / (a * u)], [b * q ** (1 - n) / u], q)
        z = a * q / u
    else:
        raise DomainError(f"unknown series form {form!r}")
    return pre * phi_series(spec, z).value


def sym_asc(n: int, x, beta: float, q: float):
    """h_n^{(beta)}(x|q); x may be a numpy array."""
    if n < 0:
        raise DomainError("degree must be >= 0")
    if beta < 0:
        raise DomainError("beta must be >= 0")
    check_q(q)
    prev, cur = 0.0 * x, 1.0 + 0.0 * x
    for k in range(n):
        c = q ** (-k) * (1 - q**k) * (1 + beta * q ** (1 - k))
        prev, cur = cur, 2 * x * cur - c * prev
    return cur


def sym_asc_scaled(n: int, x: float, beta: float, q: float) -> tuple[float, float]:
    """(m, e) with h_n^{(beta)}(x|q) = m exp(e), for degrees where h_n overflows.

    The recurrence is renormalized whenever the current value leaves [1e-100, 1e100].
    """
    if n < 0:
        raise DomainError("degree must be >= 0")
    if beta < 0:
        raise DomainError("beta must be >= 0")
    check_q(q)
    prev, cur, e = 0.0, 1.0, 0.0
    lq = math.log(q)
    for k in range(n):
        # c_k = q^{-k}(1-q^k)(1+beta q^{1-k}) = (1-q^k)(q^{-k} + beta q^{1-2k})
        c = (1 - q**k) * (math.exp(-k * lq) + beta * math.exp((1 - 2 * k) * lq))
        prev, cur = cur, 2 * x * cur - c * prev
        a = abs(cur)
        if a > 1e100 or (0 < a < 1e-100):
            f = math.log(a)
            prev, cur, e = prev / a, cur / a, e + f
    return cur, e


def sym_asc_all(n_max: int, x, beta: float, q: float) -> list:
    """[h_0^{(beta)}(x), ..., h_{n_max}^{(beta)}(x)] in one recurrence pass."""
    if n_max < 0:
        raise DomainError("degree must be >= 0")
    out = [1.0 + 0.0 * x]
    prev = 0.0 * x
    for k in range(n_max):
        c = q ** (-k) * (1 - q**k) * (1 + beta * q ** (1 - k))
        prev, cur = out[-1], 2 * x * out[-1] - c * prev
        out.append(cur)
    return out


def qinv_hermite(n: int, x, q: float):
    """Continuous q^{-1}-Hermite polynomial h_n(x|q)."""
    return sym_asc(n, x, 0.0, q)


def sym_asc_Q(n: int, y: float, beta: float, q: float):
    """Q_n(y; beta|q) = h_n^{(beta)}(sinh y|q)."""
    return sym_asc(n, math.sinh(y), beta, q)


@dataclass(frozen=True)
class DiffeqReport:
    n: int
    window: int
    max_abs_residual: float
    max_rel_residual: float


def verify_diffeq(n: int, params: QParams, window: int) -> DiffeqReport:
    """Check the second-order q-difference equation of Q_n on the grid.

    With e^{-y} = alpha q^l, the shifts y + ln q and y - ln q land on the grid
    points l - 1 and l + 1.
    """
    if window < 1:
        raise DomainError("window must be >= 1")
    q, alpha, beta = params.q, params.alpha, params.beta

    def Q(l):
        return sym_asc(n, grid_x(alpha, q, l), beta, q)

    worst = 0.0
    worst_rel = 0.0
    for l in range(-window, window + 1):
        e2 = (alpha * q**l) ** 2  # e^{-2y}
        down = (1 + beta * e2) / ((1 + e2) * (1 + e2 / q))
        up = (1 + beta / e2) / ((1 + 1 / e2) * (1 + 1 / (e2 * q)))
        mid = Q(l)
        lhs = q**n * mid
        rhs = down * (Q(l - 1) - mid) + mid + up * (Q(l + 1) - mid)
        res = abs(lhs - rhs)
        scale = max(abs(lhs), abs(down * Q(l - 1)), abs(up * Q(l + 1)), abs(mid), 1.0)
        worst = max(worst, res)
        worst_rel = max(worst_rel, res / scale)
    return DiffeqReport(n, window, worst, worst_rel)
