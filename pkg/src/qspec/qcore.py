"""q-series primitives: q-Pochhammer symbols, the rescaled theta function,
unilateral r-phi-s and bilateral r-psi-r series.

Everything works in double-precision complex arithmetic.  Infinite products and
series are truncated by explicit tail bounds and report those bounds through
:class:`SeriesResult`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import DomainError, NoConvergence, PoleError

DEFAULT_TOL = 1e-13

_EPS = 2.220446049250313e-16
# a factor 1 - a q^k below this (relative) is treated as an exact zero
_ZERO_FACTOR = 16 * _EPS


def check_q(q: float) -> None:
    if not (0.0 < q < 1.0):
        raise DomainError(f"q must lie in (0, 1), got {q!r}")


@dataclass(frozen=True)
class QParams:
    """The parameter triple (q, alpha, beta) of the operator L(alpha, beta)."""

    q: float
    alpha: float
    beta: float

    def __post_init__(self):
        check_q(self.q)
        if self.alpha == 0 or not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be finite and nonzero, got {self.alpha!r}")
        if not (self.beta >= 0.0) or not math.isfinite(self.beta):
            raise DomainError(f"beta must be finite and >= 0, got {self.beta!r}")

    def replace(self, **changes) -> "QParams":
        return replace(self, **changes)

    def canonical(self) -> "QParams":
        """Representative with alpha in (q, 1] having the same grid Z(alpha)."""
        a = self.alpha if self.alpha > 0 else -1.0 / self.alpha
        t = math.log(a) / math.log(self.q)
        a = a * self.q ** (-math.floor(t))
        # rounding can leave a just outside (q, 1]
        if a > 1.0:
            a *= self.q
        elif a <= self.q:
            a /= self.q
        return replace(self, alpha=a)

    @property
    def dual_beta(self) -> float:
        """The involution beta -> 1/(beta q^2)."""
        if self.beta == 0:
            raise DomainError("beta -> 1/(beta q^2) is undefined for beta = 0")
        return 1.0 / (self.beta * self.q * self.q)


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    terms_used: int
    tail_estimate: float
    converged: bool
    abs_sum: float = math.nan  # sum of |terms|, for scaling zero-valued sums

    def __complex__(self):
        return complex(self.value)


@dataclass(frozen=True)
class HypergeometricSpec:
    """Parameters of a basic hypergeometric series.

    ``gr_factor_power`` is the exponent of ``(-1)^k q^(k choose 2)`` in the
    k-th term.  Use :meth:`phi` or :meth:`psi` to get the standard value for
    a unilateral or bilateral series.
    """

    upper: tuple
    lower: tuple
    q: float
    gr_factor_power: int = field(default=None)

    def __post_init__(self):
        check_q(self.q)
        object.__setattr__(self, "upper", tuple(complex(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(complex(b) for b in self.lower))
        if self.gr_factor_power is None:
            object.__setattr__(self, "gr_factor_power", len(self.lower) + 1 - len(self.upper))

    @classmethod
    def phi(cls, upper: Sequence, lower: Sequence, q: float) -> "HypergeometricSpec":
        return cls(tuple(upper), tuple(lower), q, len(lower) + 1 - len(upper))

    @classmethod
    def psi(cls, upper: Sequence, lower: Sequence, q: float) -> "HypergeometricSpec":
        return cls(tuple(upper), tuple(lower), q, len(lower) - len(upper))


def _is_zero_factor(f: complex, scale: float) -> bool:
    return abs(f) <= _ZERO_FACTOR * max(1.0, scale)


def qpoch_finite(a: complex, q: float, n: int) -> complex:
    """(a;q)_n for any integer n.

    For negative n, (a;q)_n = 1 / prod_{k=1}^{-n} (1 - a q^{-k}).
    """
    check_q(q)
    if n >= 0:
        p = 1.0
        for k in range(n):
            p *= 1.0 - a * q**k
        return p
    p = 1.0
    for k in range(1, -n + 1):
        f = 1.0 - a * q ** (-k)
        if _is_zero_factor(f, abs(a) * q ** (-k)):
            raise PoleError(f"(a;q)_{n} has a pole: a q^-{k} = 1 for a={a!r}")
        p *= f
    return 1.0 / p


def _inf_terms(absa: float, q: float, tol: float) -> int:
    # smallest K with |a| q^(K+1) / (1-q) < tol
    if absa == 0:
        return 0
    x = tol * (1.0 - q) / absa
    if x >= 1.0:
        return 0
    return max(0, math.ceil(math.log(x) / math.log(q) - 1.0 + 1e-12))


def qpoch_inf(a: complex, q: float, tol: float = DEFAULT_TOL) -> SeriesResult:
    """(a;q)_inf truncated once the dropped factors are provably below ``tol``."""
    check_q(q)
    if tol <= 0:
        raise DomainError("tol must be positive")
    K = _inf_terms(abs(a), q, tol)
    p = 1.0
    for k in range(K + 1):
        p *= 1.0 - a * q**k
    rest = abs(a) * q ** (K + 1) / (1.0 - q)
    tail = abs(p) * math.expm1(rest)
    return SeriesResult(p, K + 1, tail, tail <= tol * max(1.0, abs(p)))


def qpinf(a: complex, q: float, tol: float = DEFAULT_TOL) -> complex:
    """Value of (a;q)_inf (shorthand for ``qpoch_inf(...).value``)."""
    return qpoch_inf(a, q, tol).value


def qpinf_many(args: Sequence, q: float, tol: float = DEFAULT_TOL) -> complex:
    """(a_1, ..., a_r; q)_inf."""
    p = 1.0
    for a in args:
        p *= qpinf(a, q, tol)
    return p


def log_qpoch(a: complex, q: float, n: int) -> complex:
    """Complex logarithm of (a;q)_n (any branch; meant for exp())."""
    s = 0j
    if n >= 0:
        for k in range(n):
            s += cmath.log(1.0 - a * q**k)
        return s
    for k in range(1, -n + 1):
        f = 1.0 - a * q ** (-k)
        if f == 0:
            raise PoleError(f"(a;q)_{n} has a pole for a={a!r}")
        s -= cmath.log(f)
    return s


def log_qpoch_inf(a: complex, q: float, tol: float = DEFAULT_TOL) -> complex:
    """Complex logarithm of (a;q)_inf."""
    K = _inf_terms(abs(a), q, tol)
    s = 0j
    for k in range(K + 1):
        f = 1.0 - a * q**k
        if f == 0:
            return complex(-math.inf, 0.0)
        s += cmath.log(f)
    return s


def theta(z: complex, q: float, tol: float = DEFAULT_TOL) -> complex:
    """Rescaled Jacobi theta function (z, q/z; q)_inf."""
    check_q(q)
    if z == 0:
        raise DomainError("theta(z) is undefined at z = 0")
    return qpinf(z, q, tol) * qpinf(q / z, q, tol)


def _tail(t_abs: float, r: float) -> float:
    return math.inf if r >= 1.0 else t_abs * r / (1.0 - r)


def phi_series(spec: HypergeometricSpec, z: complex, tol: float = DEFAULT_TOL,
               max_terms: int = 20000) -> SeriesResult:
    """Sum a unilateral basic hypergeometric series r-phi-s at argument z."""
    q, p = spec.q, spec.gr_factor_power
    t = 1.0 + 0j
    s = 1.0 + 0j
    r = 0.0
    for k in range(max_terms):
        qk = q**k
        num = 1.0 + 0j
        for a in spec.upper:
            f = 1.0 - a * qk
            if _is_zero_factor(f, abs(a) * qk):
                return SeriesResult(s, k + 1, 0.0, True)
            num *= f
        den = 1.0 - q * qk
        for b in spec.lower:
            f = 1.0 - b * qk
            if _is_zero_factor(f, abs(b) * qk):
                raise PoleError(f"lower parameter {b!r} hits q^-{k}")
            den *= f
        ratio = num / den * z
        if p:
            ratio *= (-qk) ** p
        t = t * ratio
        s += t
        r = abs(ratio)
        if t == 0:
            return SeriesResult(s, k + 2, 0.0, True)
        bound = max(r, abs(z)) if p == 0 else r
        tail = _tail(abs(t), bound)
        if tail <= tol * max(1.0, abs(s)):
            return SeriesResult(s, k + 2, tail, True)
    if r >= 1.0:
        raise NoConvergence(f"series terms still growing after {max_terms} terms")
    return SeriesResult(s, max_terms + 1, _tail(abs(t), r), False)


def _bilateral_side(spec, z, tol, max_terms, negative):
    q, p = spec.q, spec.gr_factor_power
    t = 1.0 + 0j
    s = 0j
    a_s = 0.0
    r = 0.0
    nup = 1.0
    for a in spec.upper:
        nup *= abs(a)
    nlo = 1.0
    for b in spec.lower:
        nlo *= abs(b)
    if negative:
        lim = math.inf if nup == 0 else nlo / (nup * abs(z))
    else:
        lim = abs(z)
    for j in range(max_terms):
        if not negative:
            qk = q**j
            num = 1.0 + 0j
            for a in spec.upper:
                f = 1.0 - a * qk
                if _is_zero_factor(f, abs(a) * qk):
                    return s, a_s, j, 0.0, True
                num *= f
            den = 1.0 + 0j
            for b in spec.lower:
                f = 1.0 - b * qk
                if _is_zero_factor(f, abs(b) * qk):
                    raise PoleError(f"lower parameter {b!r} hits q^-{j}")
                den *= f
            ratio = num / den * z
            if p:
                ratio *= (-qk) ** p
        else:
            # t_{k-1} / t_k with k = -j
            try:
                qk = q ** (-j - 1)
            except OverflowError:
                raise NoConvergence("negative side of bilateral series does not decay") from None
            num = 1.0 + 0j
            for b in spec.lower:
                f = 1.0 - b * qk
                if _is_zero_factor(f, abs(b) * qk):
                    return s, a_s, j, 0.0, True
                num *= f
            den = 1.0 + 0j
            for a in spec.upper:
                f = 1.0 - a * qk
                if _is_zero_factor(f, abs(a) * qk):
                    raise PoleError(f"upper parameter {a!r} hits q^{j + 1}")
                den *= f
            ratio = num / den / z
            if p:
                ratio *= (-qk) ** (-p)
        t = t * ratio
        s += t
        a_s += abs(t)
        r = abs(ratio)
        if t == 0:
            return s, a_s, j + 1, 0.0, True
        if not math.isfinite(abs(t)):
            raise NoConvergence("bilateral terms overflow")
        tail = _tail(abs(t), max(r, lim) if p == 0 else r)
        if tail <= 0.5 * tol:
            return s, a_s, j + 1, tail, True
    if r >= 1.0:
        raise NoConvergence(f"bilateral terms still growing after {max_terms} terms")
    return s, a_s, max_terms, _tail(abs(t), r), False


def bilateral_psi(spec: HypergeometricSpec, z: complex, tol: float = DEFAULT_TOL,
                  max_terms: int = 20000) -> SeriesResult:
    """Sum a bilateral series over k in Z.

    Term k is prod (a_i;q)_k / prod (b_j;q)_k z^k ((-1)^k q^(k choose 2))^p,
    with negative-index Pochhammer symbols as in :func:`qpoch_finite`.  Each
    side is truncated independently; ``tol`` is an absolute tail tolerance
    scaled by max(1, |sum|).
    """
    if z == 0:
        raise DomainError("bilateral series needs z != 0")
    pos, apos, npos, tpos, cpos = _bilateral_side(spec, z, tol, max_terms, negative=False)
    neg, aneg, nneg, tneg, cneg = _bilateral_side(spec, z, tol, max_terms, negative=True)
    value = 1.0 + pos + neg
    tail = tpos + tneg
    converged = cpos and cneg and tail <= tol * max(1.0, abs(value))
    return SeriesResult(value, 1 + npos + nneg, tail, converged, 1.0 + apos + aneg)
