"""Discrete orthogonality measures on the grid Z(alpha), eigenvector norms,
the complement functions completing the polynomials to an orthogonal basis,
the beta = 0 (N-extremal) and beta = 1/q special cases, and the dual
orthogonality of the eigenvectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eigenfun import _log_beta_poch, _log_poch_inf_plus, _log_poch_plus, eigenvector_entries
from .errors import DomainError
from .operator import coeff_a, coeff_b, truncate
from .polyrec import GridPoint, grid_x, sym_asc, sym_asc_all
from .qcore import DEFAULT_TOL, QParams, qpinf, qpinf_many, qpoch_finite

WINDOW_MARGIN = 10


def window_half_width(q: float, tol: float = DEFAULT_TOL, degree: int = 0) -> int:
    """ceil(sqrt(log tol / log q)) + margin, widened by 2 per polynomial degree.

    The summands carry q^{l^2}-type factors; a product of polynomials of
    total degree d grows like q^{-d|l|}, which the extra 2d absorbs.
    """
    return math.ceil(math.sqrt(math.log(tol) / math.log(q))) + WINDOW_MARGIN + 2 * degree


def _log_weight(l: int, params: QParams) -> float:
    """log of (-a^2/b;q^2)_l/(-a^2 b q^2;q^2)_l alpha^{2l} beta^l (1+alpha^2 q^{2l}) q^{l^2}."""
    q, alpha, beta = params.q, params.alpha, params.beta
    a2 = alpha * alpha
    return (_log_beta_poch(l, alpha, beta, q) - _log_poch_plus(a2 * beta * q * q, q * q, l)
            + l * math.log(a2) + math.log1p(a2 * q ** (2 * l)) + l * l * math.log(q))


def total_mass(params: QParams, tol: float = DEFAULT_TOL) -> float:
    """(-a^2, -q/a^2, -b q, q; q)_inf / (-a^2 b q^2, -b q^2/a^2; q^2)_inf."""
    q, alpha, beta = params.q, params.alpha, params.beta
    a2 = alpha * alpha
    num = qpinf_many([-a2, -q / a2, -beta * q, q], q, tol)
    den = qpinf_many([-a2 * beta * q * q, -beta * q * q / a2], q * q, tol)
    return float((num / den).real)


def or_norm(n: int, params: QParams, tol: float = DEFAULT_TOL) -> float:
    """Right side of the orthogonality relation for h_n^{(beta)}:
    beta^n (-1/beta, q; q)_n q^{-n^2} times the total mass."""
    q, beta = params.q, params.beta
    prod = 1.0
    for k in range(n):
        prod *= (beta + q**k) * (1 - q ** (k + 1))
    return prod * q ** (-n * n) * total_mass(params, tol)


@dataclass(frozen=True)
class DiscreteMeasure:
    params: QParams
    ls: np.ndarray
    weights: np.ndarray
    total_mass: float
    tol: float = DEFAULT_TOL
    support_x: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.support_x is None:
            object.__setattr__(self, "support_x", grid_x(self.params.alpha, self.params.q, self.ls.astype(float)))

    @property
    def support(self) -> list:
        return [GridPoint(int(l), float(x), self.params.alpha, self.params.q)
                for l, x in zip(self.ls, self.support_x)]

    @property
    def masses(self) -> np.ndarray:
        """Probability masses (weights over the closed-form total)."""
        return self.weights / self.total_mass

    @property
    def window_sum(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, values) -> float:
        return float(np.sum(self.weights * np.asarray(values)))

    def gram(self, functions) -> np.ndarray:
        # scale each function by sqrt(weight) first: the functions grow
        # geometrically at the window edge where the weights underflow
        r = np.sqrt(self.weights)
        F = np.array([r * np.asarray(f, dtype=float) for f in functions])
        return F @ F.T


def build_measure(params: QParams, tol: float = DEFAULT_TOL, degree: int = 0) -> DiscreteMeasure:
    """lambda_alpha^{(beta)} on a window wide enough for polynomials of
    total degree ``degree`` (beta = 0 gives the N-extremal measure)."""
    L = window_half_width(params.q, tol, degree)
    ls = np.arange(-L, L + 1)
    logw = np.array([_log_weight(int(l), params) for l in ls])
    w = np.exp(logw)
    return DiscreteMeasure(params, ls, w, total_mass(params, tol), tol)


def nextremal_hermite(alpha: float, q: float, tol: float = DEFAULT_TOL, degree: int = 0) -> DiscreteMeasure:
    """lambda_alpha^{(0)}: masses alpha^{4l}(1+alpha^2 q^{2l}) q^{l(2l-1)} at x_l(alpha)."""
    return build_measure(QParams(q, alpha, 0.0), tol, degree)


def nextremal_norm(n: int, alpha: float, q: float, tol: float = DEFAULT_TOL) -> float:
    """(q;q)_n q^{-n(n+1)/2} (-alpha^2, -q/alpha^2, q; q)_inf."""
    return (qpoch_finite(q, q, n) * q ** (-n * (n + 1) / 2)
            * qpinf_many([-alpha * alpha, -q / (alpha * alpha), q], q, tol)).real


def log_norm_psi_sq(n: int, eigen_sign: int, params: QParams, tol: float = DEFAULT_TOL) -> float:
    """log ||psi(q^n)||^2, or log ||psi(-beta q^{n+1})||^2 (beta -> 1/(beta q^2))."""
    if eigen_sign < 0:
        if params.beta <= 0:
            raise DomainError("negative eigenvalues need beta > 0")
        params = params.replace(beta=params.dual_beta)
    q, alpha, beta = params.q, params.alpha, params.beta
    a2 = alpha * alpha
    s = (n + 1) * math.log(a2) - n * n * math.log(q)
    for k in range(n):
        s += math.log(beta + q**k) + math.log1p(-q ** (k + 1))
    num = qpinf_many([-1 / a2, -beta * q, q], q, tol) * qpinf(-a2 * beta * q * q, q * q, tol)
    den = qpinf(-a2 * q, q, tol) * qpinf(-beta * q * q / a2, q * q, tol)
    return s + math.log((num / den).real)


def norm_psi_sq(n: int, eigen_sign: int, params: QParams, tol: float = DEFAULT_TOL) -> float:
    """||psi(q^n)||^2, or ||psi(-beta q^{n+1})||^2 (same formula with beta -> 1/(beta q^2))."""
    return math.exp(log_norm_psi_sq(n, eigen_sign, params, tol))


@dataclass(frozen=True)
class OrthogonalityResidual:
    n: int
    m: int
    value: float
    expected: float
    residual: float


def check_orthogonality(n: int, m: int, params: QParams, tol: float = DEFAULT_TOL) -> OrthogonalityResidual:
    """sum_l weight_l h_n h_m against delta_{nm} times the closed norm.

    The residual is scaled by sqrt(norm_n norm_m).
    """
    mu = build_measure(params, tol, degree=n + m)
    hn = sym_asc(n, mu.support_x, params.beta, params.q)
    hm = sym_asc(m, mu.support_x, params.beta, params.q)
    s = mu.integrate(hn * hm)
    Nn, Nm = or_norm(n, params, tol), or_norm(m, params, tol)
    expected = Nn if n == m else 0.0
    return OrthogonalityResidual(n, m, s, expected, abs(s - expected) / math.sqrt(Nn * Nm))


def _mixed_weights(params: QParams, ls: np.ndarray) -> np.ndarray:
    q, alpha = params.q, params.alpha
    a2 = alpha * alpha
    sign = np.where(ls % 2 == 0, 1.0, -1.0)
    logs = ls * math.log(a2) + np.log1p(a2 * q ** (2.0 * ls)) + ls * (ls - 1.0) * math.log(q)
    return sign * np.exp(logs)


@dataclass(frozen=True)
class ZeroSumResidual:
    value: float
    abs_sum: float
    residual: float


def check_mixed_orthogonality(n: int, m: int, params: QParams, tol: float = DEFAULT_TOL) -> ZeroSumResidual:
    """sum_l (-1)^l alpha^{2l}(1+alpha^2 q^{2l}) q^{l(l-1)} h_n^{(beta)} h_m^{(1/(beta q^2))} = 0."""
    if params.beta <= 0:
        raise DomainError("mixed orthogonality needs beta > 0")
    L = window_half_width(params.q, tol, n + m)
    ls = np.arange(-L, L + 1)
    x = grid_x(params.alpha, params.q, ls.astype(float))
    terms = (_mixed_weights(params, ls) * sym_asc(n, x, params.beta, params.q)
             * sym_asc(m, x, params.dual_beta, params.q))
    s = float(np.sum(terms))
    a = float(np.sum(np.abs(terms)))
    return ZeroSumResidual(s, a, abs(s) / a)


def moment_identity(k: int, params: QParams, tol: float = DEFAULT_TOL) -> ZeroSumResidual:
    """sum_l (-1)^l alpha^{2l}(1+alpha^2 q^{2l}) q^{l(l-1)} x_l^k = 0."""
    L = window_half_width(params.q, tol, k)
    ls = np.arange(-L, L + 1)
    x = grid_x(params.alpha, params.q, ls.astype(float))
    terms = _mixed_weights(params, ls) * x**k
    s = float(np.sum(terms))
    a = float(np.sum(np.abs(terms)))
    return ZeroSumResidual(s, a, abs(s) / a)


# ---------------------------------------------------------------------------
# complement of the polynomials

def complement_factor(l, params: QParams) -> np.ndarray:
    """(-1)^l beta^{-l} q^{-l} (-a^2 b q^2; q^2)_l / (-a^2/b; q^2)_l on the grid."""
    q, alpha, beta = params.q, params.alpha, params.beta
    if beta <= 0:
        raise DomainError("the complement functions need beta > 0")
    ls = np.atleast_1d(np.asarray(l, dtype=int))
    a2 = alpha * alpha
    out = np.empty(ls.shape)
    for i, k in np.ndenumerate(ls):
        k = int(k)
        lg = _log_poch_plus(a2 * beta * q * q, q * q, k) - _log_beta_poch(k, alpha, beta, q) - k * math.log(q)
        out[i] = (-1.0 if k % 2 else 1.0) * math.exp(lg)
    return out if np.ndim(l) else float(out[0])


@dataclass(frozen=True)
class ComplementFunction:
    """Grid values of the m-th complement function on Z(alpha)."""
    beta: float
    q: float
    m: int
    ls: np.ndarray
    values: np.ndarray


def complement_function(m: int, params: QParams, ls) -> ComplementFunction:
    ls = np.asarray(ls, dtype=int)
    return ComplementFunction(params.beta, params.q, m, ls, complement_basis_value(m, ls, params))


def complement_basis_value(m: int, l, params: QParams):
    """Grid value of Phi^{(beta)} h_m^{(1/(beta q^2))} at x_l(alpha), up to an
    l-independent constant."""
    x = grid_x(params.alpha, params.q, np.asarray(l, dtype=float))
    return complement_factor(l, params) * sym_asc(m, x, params.dual_beta, params.q)


def complement_continuous(y: float, beta: float, q: float, tol: float = DEFAULT_TOL) -> complex:
    """Phi^{(beta)}(sinh y) = (-e^{-2y}/beta; q^2)_inf / (-e^{-2y} beta q^2; q^2)_inf
    * exp(-y s), s = (i pi - log beta)/log q - 1."""
    if beta <= 0:
        raise DomainError("the complement functions need beta > 0")
    e2 = math.exp(-2 * y)
    s = complex(-math.log(beta), math.pi) / math.log(q) - 1
    ratio = qpinf(-e2 / beta, q * q, tol) / qpinf(-e2 * beta * q * q, q * q, tol)
    return ratio * np.exp(-y * s)


@dataclass(frozen=True)
class GramReport:
    labels: list
    gram: np.ndarray
    max_offdiag_scaled: float
    diagonal: np.ndarray


def basis_gram(params: QParams, n_max: int = 6, m_max: int = 6, tol: float = DEFAULT_TOL) -> GramReport:
    """Gram matrix of {h_n^{(beta)}}_{n<=n_max} and {complement_m}_{m<=m_max}
    under lambda_alpha^{(beta)}; off-diagonals scaled by sqrt(G_ii G_jj)."""
    mu = build_measure(params, tol, degree=2 * max(n_max, m_max) + 2)
    funcs, labels = [], []
    x = mu.support_x
    for n, h in enumerate(sym_asc_all(n_max, x, params.beta, params.q)):
        funcs.append(h)
        labels.append(f"h{n}")
    cf = complement_factor(mu.ls, params)
    for m, h in enumerate(sym_asc_all(m_max, x, params.dual_beta, params.q)):
        funcs.append(cf * h)
        labels.append(f"c{m}")
    G = mu.gram(funcs)
    d = np.diag(G).copy()
    S = G / np.sqrt(np.outer(np.abs(d), np.abs(d)))
    off = S - np.diag(np.diag(S))
    return GramReport(labels, G, float(np.max(np.abs(off))), d)


def complement_projection(params: QParams, n_max: int = 12, tol: float = DEFAULT_TOL) -> float:
    """max_n |<complement_0, h_n>| / (||complement_0|| ||h_n||) for n <= n_max."""
    mu = build_measure(params, tol, degree=n_max + 2)
    funcs = [complement_factor(mu.ls, params)] + sym_asc_all(n_max, mu.support_x, params.beta, params.q)
    G = mu.gram(funcs)
    d = np.sqrt(np.diag(G))
    return float(np.max(np.abs(G[0, 1:]) / (d[0] * d[1:])))


# ---------------------------------------------------------------------------
# beta = 1/q

@dataclass(frozen=True)
class SplitReport:
    diag_max: float
    sign_relation: float
    sum_relation: float
    diff_relation: float
    even_or: float
    odd_or: float
    even_block: float
    odd_block: float
    eigen_pairing: float

    def ok(self, block_tol: float = 1e-12, rel_tol: float = 1e-9) -> bool:
        return (self.diag_max == 0.0 and self.even_block < block_tol and self.odd_block < block_tol
                and max(self.sign_relation, self.sum_relation, self.diff_relation,
                        self.even_or, self.odd_or, self.eigen_pairing) < rel_tol)


def _block_errors(alpha: float, q: float, N: int):
    T = truncate(QParams(q, alpha, 1.0 / q), N).dense()
    T2 = T @ T
    idx = np.arange(-N, N + 1)
    ev = np.nonzero(idx % 2 == 0)[0]
    od = np.nonzero(idx % 2 != 0)[0]
    # drop the rows next to the window edge, where truncation cuts L^2
    E = T2[np.ix_(ev, ev)][1:-1, 1:-1]
    O = T2[np.ix_(od, od)][1:-1, 1:-1]
    ke = idx[ev][1:-1] // 2
    ko = (idx[od][1:-1] - 1) // 2
    Pe = QParams(q * q, alpha, 0.0)
    Po = QParams(q * q, alpha * q, 0.0)
    Ee = np.diag(coeff_b(ke, Pe)) + np.diag(coeff_a(ke[:-1], Pe), 1) + np.diag(coeff_a(ke[:-1], Pe), -1)
    Oe = np.diag(coeff_b(ko, Po)) + np.diag(coeff_a(ko[:-1], Po), 1) + np.diag(coeff_a(ko[:-1], Po), -1)
    return float(np.max(np.abs(E - Ee))), float(np.max(np.abs(O - Oe)))


def beta_1q_split(alpha: float, q: float, n_max: int = 4, N: int = 20, tol: float = DEFAULT_TOL) -> SplitReport:
    """Check the beta = 1/q reduction to two base-q^2 N-extremal problems."""
    from .operator import eig

    P = QParams(q, alpha, 1.0 / q)
    ls = np.arange(-8, 9)
    diag_max = float(np.max(np.abs(coeff_b(np.arange(-N, N + 1), P))))
    sign_rel = sum_rel = diff_rel = 0.0
    Pe = QParams(q * q, alpha, 0.0)
    Po = QParams(q * q, alpha * q, 0.0)
    for n in range(n_max + 1):
        plus = eigenvector_entries(n, +1, P, ls)
        minus = eigenvector_entries(n, -1, P, ls)
        alt = np.where(ls % 2 == 0, 1.0, -1.0)
        scale = np.max(np.abs(plus))
        sign_rel = max(sign_rel, float(np.max(np.abs(plus - alt * minus))) / scale)
        ev = ls[ls % 2 == 0]
        od = ls[ls % 2 != 0]
        s = (plus + minus)[ls % 2 == 0]
        d = (plus - minus)[ls % 2 != 0]
        s_ref = 2 * eigenvector_entries(n, +1, Pe, ev // 2)
        d_ref = 2 * alpha * q ** (-n) / (1 + alpha * alpha * q * q) * eigenvector_entries(n, +1, Po, (od - 1) // 2)
        sum_rel = max(sum_rel, float(np.max(np.abs(s - s_ref))) / scale)
        diff_rel = max(diff_rel, float(np.max(np.abs(d - d_ref))) / scale)
    # orthogonality: (OR + mixed)/2 on even l, (OR - mixed)/2 on odd l
    L = window_half_width(q, tol, 2 * n_max)
    lw = np.arange(-L, L + 1)
    x = grid_x(alpha, q, lw.astype(float))
    a2 = alpha * alpha
    base = np.exp(lw * math.log(a2) + np.log1p(a2 * q ** (2.0 * lw)) + lw * (lw - 1.0) * math.log(q))
    even_or = odd_or = 0.0
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            hh = sym_asc(n, x, 1 / q, q) * sym_asc(m, x, 1 / q, q)
            ev_sum = float(np.sum((base * hh)[lw % 2 == 0]))
            od_sum = float(np.sum((base * hh)[lw % 2 != 0]))
            ref_e = nextremal_norm(n, alpha, q * q, tol) if n == m else 0.0
            ref_o = a2 * nextremal_norm(n, alpha * q, q * q, tol) if n == m else 0.0
            sc_e = math.sqrt(nextremal_norm(n, alpha, q * q, tol) * nextremal_norm(m, alpha, q * q, tol))
            sc_o = a2 * math.sqrt(nextremal_norm(n, alpha * q, q * q, tol) * nextremal_norm(m, alpha * q, q * q, tol))
            even_or = max(even_or, abs(ev_sum - ref_e) / sc_e)
            odd_or = max(odd_or, abs(od_sum - ref_o) / sc_o)
    eb, ob = _block_errors(alpha, q, N)
    # squared spectrum: q^{2n} twice
    spec = eig(truncate(P, max(N, 40)), vectors=False).eigenvalues
    sq = np.sort(spec**2)[::-1]
    pairing = 0.0
    for n in range(6):
        pairing = max(pairing, abs(sq[2 * n] - q ** (2 * n)), abs(sq[2 * n + 1] - q ** (2 * n)))
    return SplitReport(diag_max, sign_rel, sum_rel, diff_rel, even_or, odd_or, eb, ob, pairing)


# ---------------------------------------------------------------------------
# dual orthogonality and the continuous weight

@dataclass(frozen=True)
class DualResidual:
    k: int
    l: int
    value: float
    residual: float
    tail_estimate: float


def dual_decay_rate(params: QParams) -> float:
    """Ratio of consecutive summands of the dual orthogonality sum.

    These are the spectral masses of e_k near the accumulation point 0;
    they decay like q^n for beta > 0 and like q^{n/2} for beta = 0.
    """
    return params.q if params.beta > 0 else math.sqrt(params.q)


def dual_n_max(params: QParams, target: float = 1e-12) -> int:
    """Smallest n_max whose geometric tail bound is below ``target``."""
    r = dual_decay_rate(params)
    return math.ceil(math.log(target * (1 - r)) / math.log(r)) + 5


def dual_orthogonality(k: int, l: int, params: QParams, n_max: int = 25, tol: float = DEFAULT_TOL) -> DualResidual:
    """sum_n psi_k psi_l/||psi||^2 over both eigenvalue branches minus delta_{kl}."""
    ls = np.array([k, l])
    total = 0.0
    recent = []
    signs = (+1, -1) if params.beta > 0 else (+1,)
    for n in range(n_max + 1):
        term = 0.0
        for s in signs:
            v = eigenvector_entries(n, s, params, ls, 0.5 * log_norm_psi_sq(n, s, params, tol))
            term += v[0] * v[1]
        total += term
        recent = (recent + [abs(term)])[-2:]
    # bound the tail geometrically with the decay rate of the summands
    r = dual_decay_rate(params)
    tail = sum(recent) * r / (1 - r)
    expected = 1.0 if k == l else 0.0
    return DualResidual(k, l, total, abs(total - expected), tail)


@dataclass(frozen=True)
class WeightReport:
    ls: np.ndarray
    constants: np.ndarray
    spread: float
    grid_formula: float


def _log_w_continuous(y: float, beta: float, q: float) -> float:
    # log of 1/(-e^{2y}/beta, -e^{-2y}/beta; q^2)_inf
    s = 0.0
    for c in (math.exp(2 * y) / beta, math.exp(-2 * y) / beta):
        k = 0
        while True:
            t = c * q ** (2 * k)
            if t < 1e-18:
                s -= t / (1 - q * q)
                break
            s -= math.log1p(t)
            k += 1
    return s


def weight_function_check(params: QParams, ls=range(-5, 6)) -> WeightReport:
    """mass_l / (w(x_l) sqrt(x_l^2+1)) is constant in l; also compares the
    grid evaluation of w against its printed product form."""
    q, alpha, beta = params.q, params.alpha, params.beta
    if beta <= 0:
        raise DomainError("the continuous weight needs beta > 0")
    a2 = alpha * alpha
    ls = np.asarray(list(ls))
    const = []
    worst_grid = 0.0
    tail = _log_poch_inf_plus(1 / (a2 * beta), q * q) + _log_poch_inf_plus(a2 / beta, q * q)
    for l in ls:
        l = int(l)
        y = -math.log(alpha * q**l)
        lw = _log_w_continuous(y, beta, q)
        x = math.sinh(y)
        const.append(math.exp(_log_weight(l, params) - lw - 0.5 * math.log1p(x * x)))
        grid = (_log_beta_poch(l, alpha, beta, q) - _log_poch_plus(a2 * beta * q * q, q * q, l)
                + l * math.log(a2) + l * (l + 1) * math.log(q) - tail)
        worst_grid = max(worst_grid, abs(math.expm1(grid - lw)))
    const = np.array(const)
    return WeightReport(ls, const, float(np.max(np.abs(const / const[0] - 1))), worst_grid)

