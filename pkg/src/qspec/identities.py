"""Numerical verification of contiguous relations, the generating function of
h_n^{(beta)} and the bilateral summation formulas that follow from the
orthogonality relations.

Every check returns an :class:`IdentityReport`.  ``sample_reports`` draws
parameter points from fixed pole-free boxes with a seeded generator, and
``tolerance_stable`` re-runs a check with half the series tolerance.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NoConvergence, PoleError
from .measures import _mixed_weights, build_measure, window_half_width
from .polyrec import grid_x, sym_asc_all
from .qcore import (DEFAULT_TOL, HypergeometricSpec, QParams, bilateral_psi, phi_series,
                    qpinf, qpinf_many, theta)


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    parameter_point: dict
    lhs: complex
    rhs: complex
    abs_residual: float
    rel_residual: float
    scale: float = field(default=math.nan)

    def passed(self, threshold: float) -> bool:
        return self.rel_residual < threshold

    def as_row(self) -> dict:
        row = {"identity_id": self.identity_id}
        for k, v in self.parameter_point.items():
            row[k] = v
        row.update(lhs=self.lhs, rhs=self.rhs, abs_residual=self.abs_residual,
                   rel_residual=self.rel_residual)
        return row


def _report(identity_id, point, lhs, rhs, scale=None) -> IdentityReport:
    lhs, rhs = complex(lhs), complex(rhs)
    err = abs(lhs - rhs)
    if scale is None:
        scale = max(abs(lhs), abs(rhs), 1.0)
    return IdentityReport(identity_id, dict(point), lhs, rhs, err, err / scale, scale)


def _phi21(a, b, c, z, q, tol):
    return phi_series(HypergeometricSpec.phi([a, b], [c], q), z, tol).value


# ---------------------------------------------------------------------------
# contiguous relations

def contiguous_3term(a, b, c, z, q: float, tol: float = DEFAULT_TOL) -> IdentityReport:
    """Three-term relation between 2phi1(a,b;c;z) and its (aq^{+-1}, bq^{+-1}; cq^{+-2}) shifts."""
    for bad in (c, q * c):
        if abs(1 - bad) == 0:
            raise DomainError("c and qc must differ from 1")
    if c in (q, q * q):
        raise DomainError("c must differ from q and q^2")
    psi = _phi21(a, b, c, z, q, tol)
    psi_p = _phi21(a * q, b * q, c * q * q, z, q, tol)
    psi_m = _phi21(a / q, b / q, c / (q * q), z, q, tol)
    mid = ((c - a) * (c - b) / ((1 - c) * (q - c)) * z
           + (q - a) * (q - b) / ((q * q - c) * (q - c)) * z * q + (1 - z))
    up = (c - a) * (c - b) * (1 - a) * (1 - b) / ((1 - c) ** 2 * (1 - q * c) * (q - c)) * z * z
    terms = (psi_m, mid * psi, up * psi_p)
    scale = max(sum(abs(t) for t in terms), 1.0)
    return _report("contiguous_3term", dict(a=a, b=b, c=c, z=z, q=q),
                   psi_m + up * psi_p, mid * psi, scale)


def contiguous_shift(a, b, z, q: float, tol: float = DEFAULT_TOL) -> IdentityReport:
    """Relation between 2phi1(a,b;-q;z), 2phi1(aq,b/q;-q;z) and 2phi1(a/q,bq;-q;z)."""
    if a == b or b == a * q or a == b * q:
        raise DomainError("need a != b, b != aq, a != bq")
    f = _phi21(a, b, -q, z, q, tol)
    fp = _phi21(a * q, b / q, -q, z, q, tol)
    fm = _phi21(a / q, b * q, -q, z, q, tol)
    lhs = (q * (1 + q) * (a * b - q) / ((a * q - b) * (a - b * q)) + z) * f
    cp = q * (1 - a) * (b + q) / ((a - b) * (b - a * q))
    cm = q * (1 - b) * (a + q) / ((b - a) * (a - b * q))
    scale = max(abs(lhs) + abs(cp * fp) + abs(cm * fm), 1.0)
    return _report("contiguous_shift", dict(a=a, b=b, z=z, q=q), lhs, cp * fp + cm * fm, scale)


# ---------------------------------------------------------------------------
# generating function and the two summation formulas

def genfun_product(t, y: float, beta: float, q: float, tol: float = DEFAULT_TOL) -> complex:
    """(t e^{-y}, -t e^{y}; q)_inf / (-t^2 beta; q^2)_inf."""
    return (qpinf(t * math.exp(-y), q, tol) * qpinf(-t * math.exp(y), q, tol)
            / qpinf(-t * t * beta, q * q, tol))


def generating_function(t, y: float, beta: float, q: float, n_max: int = 40,
                        tol: float = DEFAULT_TOL) -> IdentityReport:
    """sum_{n<=n_max} h_n^{(beta)}(sinh y) q^{n(n-1)/2} t^n/(q;q)_n against the product."""
    if beta > 0 and abs(t) >= 1 / math.sqrt(beta):
        raise DomainError("need |t| < 1/sqrt(beta)")
    # g_n = q^{n(n-1)/2} h_n satisfies
    # g_{n+1} = 2x q^n g_n - (1-q^n)(q^{n-1}+beta) g_{n-1},
    # which avoids the overflow of h_n against the underflow of q^{n(n-1)/2}
    x = math.sinh(y)
    prev, g = 0.0, 1.0
    s = 0j
    poch = 1.0
    for n in range(n_max + 1):
        if n:
            poch *= 1 - q**n
        s += g * t**n / poch
        prev, g = g, 2 * x * q**n * g - (1 - q**n) * (q ** (n - 1) + beta) * prev
    return _report("generating_function", dict(t=t, y=y, beta=beta, q=q, n_max=n_max),
                   s, genfun_product(t, y, beta, q, tol))


def _bailey_spec(alpha, beta, t1, t2, q):
    sb = math.sqrt(beta)
    upper = [1j * alpha * q, -1j * alpha * q, 1j * alpha / sb, -1j * alpha / sb,
             -alpha * q / t1, -alpha * q / t2]
    lower = [1j * alpha, -1j * alpha, 1j * alpha * sb * q, -1j * alpha * sb * q,
             t1 * alpha, t2 * alpha]
    return HypergeometricSpec.psi(upper, lower, q), t1 * t2 * beta / q


def bailey_product(alpha, beta, t1, t2, q: float, tol: float = DEFAULT_TOL) -> complex:
    sb = math.sqrt(beta)
    num = qpinf_many([1j * t1 * sb, -1j * t1 * sb, 1j * t2 * sb, -1j * t2 * sb,
                      -t1 * t2 / q, -alpha**2 * q, -q / alpha**2, -beta * q, q], q, tol)
    den = qpinf_many([t1 * alpha, t2 * alpha, -t1 / alpha, -t2 / alpha, t1 * t2 * beta / q,
                      1j * alpha * sb * q, -1j * alpha * sb * q, 1j * sb * q / alpha,
                      -1j * sb * q / alpha], q, tol)
    return num / den


def bailey_special(alpha, beta, t1, t2, q: float, tol: float = DEFAULT_TOL) -> IdentityReport:
    """The bilateral 6psi6 with argument t1 t2 beta / q against its product value."""
    if beta <= 0:
        raise DomainError("beta must be > 0")
    if t1 == 0 or t2 == 0:
        raise DomainError("t1, t2 must be nonzero")
    spec, z = _bailey_spec(alpha, beta, t1, t2, q)
    lhs = bilateral_psi(spec, z, tol).value
    return _report("bailey_6psi6", dict(alpha=alpha, beta=beta, t1=t1, t2=t2, q=q),
                   lhs, bailey_product(alpha, beta, t1, t2, q, tol))


def psi4_special(alpha, t1, t2, q: float, tol: float = DEFAULT_TOL) -> IdentityReport:
    """The bilateral 4psi4 with argument -t1 t2 / q^2, which sums to zero."""
    if t1 == 0 or t2 == 0:
        raise DomainError("t1, t2 must be nonzero")
    spec = HypergeometricSpec.psi(
        [1j * alpha * q, -1j * alpha * q, -alpha * q / t1, -alpha * q / t2],
        [1j * alpha, -1j * alpha, alpha * t1, alpha * t2], q)
    res = bilateral_psi(spec, -t1 * t2 / (q * q), tol)
    return _report("psi4_zero", dict(alpha=alpha, t1=t1, t2=t2, q=q), res.value, 0.0, res.abs_sum)


def summation_from_orthogonality(params: QParams, t1: float, t2: float, n_max: int = 12,
                                 m_max: int = 12, tol: float = DEFAULT_TOL) -> list:
    """Rebuild the 6psi6 and 4psi4 sums from the orthogonality relations.

    Both generating functions are expanded to degree n_max / m_max, the
    polynomial Gram matrices are summed against the coefficients, and the
    result is divided by the l = 0 summand to give the normalised bilateral
    sum.  Returns the 6psi6 report (against the product side) and, for
    beta > 0, the mixed-relation report (against zero).
    """
    q, alpha, beta = params.q, params.alpha, params.beta
    deg = max(n_max, m_max)

    def coeffs(t, n):
        c, poch = [], 1.0
        for k in range(n + 1):
            if k:
                poch *= 1 - q**k
            c.append(q ** (k * (k - 1) / 2) * t**k / poch)
        return np.array(c)

    c1, c2 = coeffs(t1, n_max), coeffs(t2, m_max)
    mu = build_measure(params, tol, degree=2 * deg)
    hs = sym_asc_all(deg, mu.support_x, beta, q)
    G = mu.gram(hs)
    double = float(c1 @ G[: n_max + 1, : m_max + 1] @ c2)
    x0 = grid_x(alpha, q, 0)
    y0 = math.asinh(x0)
    w0 = mu.weights[list(mu.ls).index(0)]
    lead = w0 * genfun_product(t1, y0, beta, q, tol) * genfun_product(t2, y0, beta, q, tol)
    point = dict(alpha=alpha, beta=beta, t1=t1, t2=t2, q=q, n_max=n_max, m_max=m_max)
    reports = [_report("orthogonality_double_sum", point, double / lead,
                       bailey_product(alpha, beta, t1, t2, q, tol))]
    if beta > 0:
        L = window_half_width(q, tol, 2 * deg)
        ls = np.arange(-L, L + 1)
        x = grid_x(alpha, q, ls.astype(float))
        mw = _mixed_weights(params, ls)
        r = np.sqrt(np.abs(mw))
        Hn = np.array([r * h for h in sym_asc_all(n_max, x, beta, q)])
        Hm = np.array([r * np.sign(mw) * h for h in sym_asc_all(m_max, x, params.dual_beta, q)])
        M = Hn @ Hm.T
        mixed = float(c1 @ M @ c2)
        scale = float(np.abs(c1) @ np.abs(Hn) @ np.abs(Hm).T @ np.abs(c2))
        reports.append(_report("mixed_double_sum", point, mixed, 0.0, scale))
    return reports


# ---------------------------------------------------------------------------
# transformation and theta checks

def heine_check(a, b, c, z, q: float, tol: float = DEFAULT_TOL) -> IdentityReport:
    """2phi1(a,b;c;z) = (b, az; q)_inf/(c, z; q)_inf 2phi1(c/b, z; az; b)."""
    lhs = _phi21(a, b, c, z, q, tol)
    pref = qpinf_many([b, a * z], q, tol) / qpinf_many([c, z], q, tol)
    rhs = pref * _phi21(c / b, z, a * z, b, q, tol)
    return _report("heine", dict(a=a, b=b, c=c, z=z, q=q), lhs, rhs)


def theta_check(z, l: int, q: float, tol: float = DEFAULT_TOL) -> IdentityReport:
    """theta(z q^l) = (-z)^{-l} q^{-l(l-1)/2} theta(z)."""
    lhs = theta(z * q**l, q, tol)
    rhs = (-z) ** (-l) * q ** (-l * (l - 1) / 2) * theta(z, q, tol)
    return _report("theta_quasi_periodicity", dict(z=z, l=l, q=q), lhs, rhs)


# ---------------------------------------------------------------------------
# sampling and stability

def _far(x, ys, gap):
    return all(abs(x - y) > gap for y in ys)


def _draw(identity_id: str, rng: np.random.Generator) -> dict:
    u = rng.uniform
    if identity_id == "contiguous_3term":
        while True:
            q = u(0.3, 0.7)
            c = u(0.1, 0.9)
            if _far(c, [q, q * q, 1 / q], 0.05):
                return dict(a=u(0.1, 0.6), b=u(-0.6, 0.6), c=c, z=u(-0.6, 0.6), q=q)
    if identity_id == "contiguous_shift":
        while True:
            q = u(0.3, 0.7)
            a, b = u(0.1, 0.9), u(0.1, 0.9)
            if _far(a, [b, b * q], 0.05) and _far(b, [a * q], 0.05):
                return dict(a=complex(a, u(-0.3, 0.3)), b=b, z=u(-0.5, 0.5), q=q)
    if identity_id == "generating_function":
        # the series converges geometrically with ratio |t| sqrt(beta)
        beta = u(0.0, 2.0)
        t_max = min(0.6, 0.4 / math.sqrt(beta)) if beta > 0 else 0.6
        return dict(t=u(0.05, t_max), y=u(-1.0, 1.0), beta=beta, q=u(0.3, 0.7))
    if identity_id == "bailey_6psi6":
        return dict(alpha=u(0.6, 1.2), beta=u(0.2, 1.5), t1=u(0.1, 0.4), t2=u(0.1, 0.4), q=u(0.4, 0.7))
    if identity_id == "psi4_zero":
        q = u(0.4, 0.7)
        return dict(alpha=u(0.6, 1.2), t1=u(0.1, 0.4), t2=u(0.1, 0.4), q=q)
    if identity_id == "heine":
        return dict(a=u(-0.8, 0.8), b=u(-0.8, 0.8), c=u(-0.8, 0.8), z=u(-0.8, 0.8), q=u(0.3, 0.7))
    if identity_id == "theta_quasi_periodicity":
        r, ph = u(0.3, 3.0), u(0, 2 * math.pi)
        return dict(z=cmath.rect(r, ph), l=int(rng.integers(-5, 6)), q=u(0.3, 0.7))
    raise DomainError(f"unknown identity {identity_id!r}")


CHECKS = {
    "contiguous_3term": contiguous_3term,
    "contiguous_shift": contiguous_shift,
    "generating_function": generating_function,
    "bailey_6psi6": bailey_special,
    "psi4_zero": psi4_special,
    "heine": heine_check,
    "theta_quasi_periodicity": theta_check,
}


def run_check(identity_id: str, point: dict, tol: float = DEFAULT_TOL) -> IdentityReport:
    return CHECKS[identity_id](**point, tol=tol)


def sample_reports(identity_id: str, count: int = 5, seed: int = 0,
                   tol: float = DEFAULT_TOL) -> list:
    """Reports at ``count`` points drawn from the identity's parameter box.

    Points where a series fails to converge or hits a pole are redrawn.
    """
    rng = np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count:
            raise NoConvergence(f"could not draw {count} admissible points for {identity_id}")
        point = _draw(identity_id, rng)
        try:
            out.append(run_check(identity_id, point, tol))
        except (NoConvergence, PoleError, DomainError):
            continue
    return out


ROUNDING_FLOOR = 1e-12


def tolerance_stable(report: IdentityReport, tol: float = DEFAULT_TOL, rel: float = 1e-2) -> bool:
    """Re-run at tol/2; the residual must move by at most ``rel`` of itself.

    Residuals that stay below ROUNDING_FLOOR on both runs are pure rounding
    noise, which reshuffles whenever an extra term is summed; they count as
    stable.
    """
    again = run_check(report.identity_id, report.parameter_point, tol / 2)
    r1, r2 = report.rel_residual, again.rel_residual
    if max(r1, r2) <= ROUNDING_FLOOR:
        return True
    return abs(r1 - r2) <= rel * max(r1, r2)
