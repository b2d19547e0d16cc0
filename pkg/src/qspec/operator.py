"""The doubly infinite Jacobi operator L(alpha, beta) on l^2(Z).

L e_l = a_l e_{l+1} + b_l e_l + a_{l-1} e_{l-1}.  This module provides the
coefficients, the unitary symmetries, the operator-norm bound, Dirichlet
truncation to the window l = -N..N and an implicit-shift QL eigensolver for
the resulting symmetric tridiagonal matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .qcore import DEFAULT_TOL, QParams

MAX_HALF_WIDTH = 4000


def _a_direct(l, alpha, beta, q):
    # stable for l >= 0 (q^l <= 1)
    e = alpha * alpha * q ** (2.0 * l)
    rad = (beta + e) * (1 + beta * e * q * q) / ((1 + e) * (1 + e * q * q))
    return alpha * q ** (l + 0.5) / (1 + e * q) * np.sqrt(rad)


def _b_direct(l, alpha, beta, q):
    e = alpha * alpha * q ** (2.0 * l)
    return e * (1 + q) * (1 - beta * q) / q / ((1 + e * q) * (1 + e / q))


def coeff_a(l, params: QParams):
    """Off-diagonal a_l.  Accepts an integer or an integer array.

    Negative l is evaluated through a_l(alpha) = a_{-l-1}(1/alpha) so that no
    power q^l with l < 0 is formed.
    """
    q, alpha, beta = params.q, params.alpha, params.beta
    l = np.asarray(l)
    out = np.where(l >= 0,
                   _a_direct(np.maximum(l, 0), alpha, beta, q),
                   _a_direct(np.maximum(-l - 1, 0), 1.0 / alpha, beta, q))
    return float(out) if out.ndim == 0 else out


def coeff_b(l, params: QParams, check: bool = False):
    """Diagonal b_l in the simplified single-fraction form.

    With ``check=True`` the value is compared against the three-term form
    (absolute agreement to 1e-13, the scale of the cancelling terms).
    """
    q, alpha, beta = params.q, params.alpha, params.beta
    l = np.asarray(l)
    out = np.where(l >= 0,
                   _b_direct(np.maximum(l, 0), alpha, beta, q),
                   _b_direct(np.maximum(-l, 0), 1.0 / alpha, beta, q))
    if check:
        ref = coeff_b_three_term(l, params)
        if not np.all(np.abs(out - ref) <= 1e-13 * np.maximum(1.0, np.abs(ref))):
            raise AssertionError("diagonal coefficient forms disagree")
    return float(out) if out.ndim == 0 else out


def coeff_b_three_term(l, params: QParams):
    """b_l as one minus the two neighbour-weight fractions (unsimplified)."""
    q, alpha, beta = params.q, params.alpha, params.beta
    l = np.asarray(l, dtype=float)
    e = alpha * alpha * q ** (2 * l)
    f = 1.0 / e
    out = (1 - (1 + beta * e) / ((1 + e) * (1 + e / q))
           - (1 + beta * f) / ((1 + f) * (1 + f / q)))
    return float(out) if out.ndim == 0 else out


def rescaling_weights(params: QParams, ls) -> np.ndarray:
    """Positive weights h_l with h_0 = 1 turning the grid operator symmetric.

    delta_l = h_l e_l, with h_{l+1}^2/h_l^2 the ratio that makes the
    neighbour coefficients symmetric.  Defined for beta > 0.
    """
    q, alpha, beta = params.q, params.alpha, params.beta
    if beta <= 0:
        raise DomainError("rescaling weights need beta > 0")

    def log_ratio(l):
        e = alpha * alpha * q ** (2 * l)
        return math.log(alpha * alpha * q ** (2 * l + 1)) + math.log(
            (beta + e) * (1 + e * q * q) / ((1 + e) * (1 + beta * e * q * q)))

    ls = np.asarray(ls, dtype=int)
    out = np.empty(ls.shape)
    for i, l in np.ndenumerate(ls):
        s = 0.0
        if l > 0:
            for j in range(l):
                s += log_ratio(j)
        else:
            for j in range(l, 0):
                s -= log_ratio(j)
        out[i] = math.exp(0.5 * s)
    return out


def auto_half_width(params: QParams, tol: float = DEFAULT_TOL) -> int:
    """Smallest N with max(|a_{+-N}|, |b_{+-N}|) < tol / q."""
    thresh = tol / params.q
    for N in range(1, MAX_HALF_WIDTH + 1):
        edge = max(abs(coeff_a(N, params)), abs(coeff_a(-N, params)),
                   abs(coeff_b(N, params)), abs(coeff_b(-N, params)))
        if edge < thresh:
            return N
    raise DomainError("coefficients do not decay within the half-width budget")


def norm_bound(params: QParams, tol: float = DEFAULT_TOL) -> float:
    """2 sup|a_l| + 2 sup|b_l|; the suprema are attained well inside the
    auto half-width window, outside of which every coefficient is below tol."""
    N = auto_half_width(params, tol)
    ls = np.arange(-N, N + 1)
    return 2 * float(np.max(np.abs(coeff_a(ls, params)))) + 2 * float(np.max(np.abs(coeff_b(ls, params))))


@dataclass(frozen=True)
class TruncatedOperator:
    params: QParams
    half_width: int
    diag: np.ndarray      # b_l, l = -N..N
    offdiag: np.ndarray   # a_l, l = -N..N-1

    @property
    def dim(self) -> int:
        return 2 * self.half_width + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.half_width, self.half_width + 1)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out


def truncate(params: QParams, N: int) -> TruncatedOperator:
    if N < 1:
        raise DomainError("half-width must be >= 1")
    ls = np.arange(-N, N + 1)
    diag = np.asarray(coeff_b(ls, params), dtype=float)
    off = np.asarray(coeff_a(ls[:-1], params), dtype=float)
    diag.setflags(write=False)
    off.setflags(write=False)
    return TruncatedOperator(params, N, diag, off)


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray        # descending
    eigenvectors: np.ndarray | None  # columns, orthonormal
    half_width: int

    def residuals(self, T: TruncatedOperator) -> np.ndarray:
        V = self.eigenvectors
        return np.array([np.linalg.norm(T.matvec(V[:, j]) - lam * V[:, j])
                         for j, lam in enumerate(self.eigenvalues)])


def tridiagonal_ql(diag, offdiag, vectors: bool = True, max_iter: int = 60):
    """Eigenpairs of a symmetric tridiagonal matrix by implicit-shift QL.

    Returns (eigenvalues, eigenvector matrix or None), unsorted.  Rotations are
    accumulated into the identity when ``vectors`` is set.
    """
    d = np.array(diag, dtype=float)
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = offdiag
    Zt = np.eye(n) if vectors else None  # rows are eigenvectors
    # absolute deflation floor: the graded tails would otherwise stall the
    # iteration chasing relative accuracy on eigenvalues far below eps*||T||
    floor = 2.2e-16 * (np.max(np.abs(d), initial=0.0) + 2 * np.max(np.abs(e), initial=0.0))
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 2.2e-16 * dd or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                raise ConvergenceError(f"eigenvalue {l} did not converge in {max_iter} QL sweeps")
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if vectors:
                    zi = Zt[i].copy()
                    Zt[i] = c * zi - s * Zt[i + 1]
                    Zt[i + 1] = s * zi + c * Zt[i + 1]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, (Zt.T if vectors else None)


def eig(T: TruncatedOperator, vectors: bool = True) -> SpectralDecomposition:
    """Full eigendecomposition of a truncation, eigenvalues descending."""
    vals, vecs = tridiagonal_ql(T.diag, T.offdiag, vectors=vectors)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    if vectors:
        vecs = vecs[:, order]
    return SpectralDecomposition(vals, vecs, T.half_width)


def exact_spectrum(params: QParams, levels: int):
    """(positive levels q^n, negative levels -beta q^{n+1}) for n < levels."""
    n = np.arange(levels)
    pos = params.q**n
    neg = -params.beta * params.q ** (n + 1) if params.beta > 0 else np.zeros(0)
    return pos, neg


@dataclass(frozen=True)
class DecayReport:
    half_width: int
    singular_values: np.ndarray
    ratios: np.ndarray       # s_n / q^{n/2}
    sup_ratio: float


def singular_decay(params: QParams, N: int) -> DecayReport:
    """s_n = |eigenvalues| sorted descending; sup of s_n/q^{n/2} over n <= 2N/3."""
    spec = eig(truncate(params, N), vectors=False)
    s = np.sort(np.abs(spec.eigenvalues))[::-1]
    n_max = (2 * N) // 3
    s = s[: n_max + 1]
    ratios = s / params.q ** (np.arange(s.size) / 2.0)
    return DecayReport(N, s, ratios, float(np.max(ratios)))


def apply_symmetry(which: str, params: QParams, v: np.ndarray):
    """Apply U, U2 or V to a vector on the centred window l = -N..N.

    U : e_l -> (-1)^l e_l with beta -> 1/(beta q^2)   (L -> -q beta L)
    U2: e_l -> (-1)^l e_l with alpha -> -alpha
    V : e_l -> e_{-l} with alpha -> 1/alpha
    """
    v = np.asarray(v)
    if v.ndim != 1 or v.size % 2 == 0:
        raise DomainError("vector must have odd length 2N+1")
    N = v.size // 2
    sign = np.where(np.arange(-N, N + 1) % 2 == 0, 1.0, -1.0)
    if which == "U":
        return sign * v, params.replace(beta=params.dual_beta)
    if which == "U2":
        return sign * v, params.replace(alpha=-params.alpha)
    if which == "V":
        return v[::-1].copy(), params.replace(alpha=1.0 / params.alpha)
    raise DomainError(f"unknown symmetry {which!r}")
