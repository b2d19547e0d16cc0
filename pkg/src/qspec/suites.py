"""Named verification suites.  Each returns a list of (IdentityReport, threshold)
pairs; a suite passes when every rel_residual is below its threshold.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .eigenfun import wronskian_closed, wronskian_numeric
from .errors import DomainError
from .identities import _report, sample_reports
from .identities import (bailey_special, contiguous_3term, contiguous_shift, generating_function,
                         psi4_special, tolerance_stable)
from .measures import (basis_gram, beta_1q_split, check_mixed_orthogonality, check_orthogonality,
                       dual_n_max, dual_orthogonality, moment_identity, or_norm)
from .operator import truncate
from .polyrec import verify_diffeq
from .qcore import DEFAULT_TOL, QParams

SUITES = ("wronskian", "orthogonality", "mixed", "basis", "dual", "contiguous", "bailey",
          "psi4", "genfun", "symmetries", "split-beta-1q", "diffeq")

SAMPLED = {
    "contiguous": (("contiguous_3term", 1e-9), ("contiguous_shift", 1e-9)),
    "bailey": (("bailey_6psi6", 1e-9),),
    "psi4": (("psi4_zero", 1e-10),),
    "genfun": (("generating_function", 1e-9),),
}


def wronskian_suite(params: QParams, seed: int = 0, count: int = 20, tol: float = DEFAULT_TOL):
    """Numeric Wronskian at random z in 1.1 <= |z| <= 3 against the closed form,
    and its l-independence over l = -3..3."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < 2 * count:
        z = cmath.rect(rng.uniform(1.1, 3.0), rng.uniform(0, 2 * math.pi))
        closed = wronskian_closed(z, params.q, params.beta, tol)
        if abs(closed) < 1e-6 * abs(z):
            continue  # too close to a zero of the Wronskian
        vals = [wronskian_numeric(l, z, params, tol) for l in range(-3, 4)]
        point = dict(z=z, q=params.q, alpha=params.alpha, beta=params.beta)
        out.append((_report("wronskian_closed", point, vals[3], closed), 1e-10))
        spread = max(abs(v - vals[3]) for v in vals)
        out.append((_report("wronskian_l_independence", point, vals[3] + spread, vals[3]), 1e-10))
    return out


def _or_reports(params: QParams, n_max: int, tol: float):
    out = []
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            r = check_orthogonality(n, m, params, tol)
            scale = math.sqrt(or_norm(n, params, tol) * or_norm(m, params, tol))
            point = dict(n=n, m=m, q=params.q, alpha=params.alpha, beta=params.beta)
            out.append((_report("orthogonality", point, r.value, r.expected, scale), 1e-10))
    return out


def orthogonality_suite(params: QParams, n_max: int = 8, tol: float = DEFAULT_TOL):
    out = _or_reports(params, n_max, tol)
    if params.beta > 0:
        out += _or_reports(params.replace(beta=params.dual_beta), n_max, tol)
    return out


def mixed_suite(params: QParams, n_max: int = 6, tol: float = DEFAULT_TOL):
    if params.beta <= 0:
        raise DomainError("the mixed relation needs beta > 0")
    out = []
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            r = check_mixed_orthogonality(n, m, params, tol)
            point = dict(n=n, m=m, q=params.q, alpha=params.alpha, beta=params.beta)
            out.append((_report("mixed_orthogonality", point, r.value, 0.0, r.abs_sum), 1e-10))
    for k in range(7):
        r = moment_identity(k, params, tol)
        point = dict(k=k, q=params.q, alpha=params.alpha, beta=params.beta)
        out.append((_report("moment_identity", point, r.value, 0.0, r.abs_sum), 1e-11))
    return out


def basis_suite(params: QParams, size: int = 6, tol: float = DEFAULT_TOL):
    g = basis_gram(params, size, size, tol)
    point = dict(q=params.q, alpha=params.alpha, beta=params.beta, size=size)
    out = [(_report("basis_gram_offdiag", point, g.max_offdiag_scaled, 0.0, 1.0), 1e-9)]
    # positivity: report the smallest diagonal entry relative to the largest
    dmin = float(np.min(g.diagonal) / np.max(np.abs(g.diagonal)))
    out.append((_report("basis_gram_diag_positive", point, 0.0 if dmin > 0 else 1.0, 0.0, 1.0), 0.5))
    return out


def dual_suite(params: QParams, n_max: int | None = None, tol: float = DEFAULT_TOL):
    if n_max is None:
        n_max = dual_n_max(params)
    out = []
    for k in range(-2, 3):
        for l in range(-2, 3):
            r = dual_orthogonality(k, l, params, n_max, tol)
            point = dict(k=k, l=l, n_max=n_max, q=params.q, alpha=params.alpha, beta=params.beta)
            out.append((_report("dual_orthogonality", point, r.value, 1.0 if k == l else 0.0, 1.0), 1e-9))
    return out


def symmetry_suite(params: QParams, half_width: int = 20):
    q, alpha, beta = params.q, params.alpha, params.beta
    T = truncate(params, half_width).dense()
    idx = np.arange(-half_width, half_width + 1)
    U = np.diag(np.where(idx % 2 == 0, 1.0, -1.0))
    V = np.eye(idx.size)[::-1]
    UTU = U @ T @ U
    pairs = [("symmetry_U2", UTU, truncate(params.replace(alpha=-alpha), half_width).dense()),
             ("symmetry_V", V @ T @ V, truncate(params.replace(alpha=1 / alpha), half_width).dense())]
    if beta > 0:
        dual = truncate(params.replace(beta=params.dual_beta), half_width).dense()
        pairs.insert(0, ("symmetry_U", UTU, -q * beta * dual))
    point = dict(q=q, alpha=alpha, beta=beta, half_width=half_width)
    return [(_report(name, point, float(np.max(np.abs(A - B))), 0.0, 1.0), 1e-13) for name, A, B in pairs]


def split_suite(params: QParams, tol: float = DEFAULT_TOL):
    r = beta_1q_split(params.alpha, params.q, N=20, tol=tol)
    point = dict(q=params.q, alpha=params.alpha, beta=1 / params.q)
    rows = [("split_diagonal_zero", r.diag_max, 1e-15), ("split_sign_relation", r.sign_relation, 1e-9),
            ("split_sum_relation", r.sum_relation, 1e-9), ("split_difference_relation", r.diff_relation, 1e-9),
            ("split_even_orthogonality", r.even_or, 1e-9), ("split_odd_orthogonality", r.odd_or, 1e-9),
            ("split_even_block", r.even_block, 1e-12), ("split_odd_block", r.odd_block, 1e-12),
            ("split_eigenvalue_pairing", r.eigen_pairing, 1e-9)]
    return [(_report(name, point, v, 0.0, 1.0), thr) for name, v, thr in rows]


def diffeq_suite(params: QParams, n_max: int = 8, window: int = 10):
    out = []
    for n in range(n_max + 1):
        r = verify_diffeq(n, params, window)
        point = dict(n=n, window=window, q=params.q, alpha=params.alpha, beta=params.beta)
        out.append((_report("diffeq_scaled_residual", point, r.max_rel_residual, 0.0, 1.0), 1e-12))
    return out


def _sampled_one(args):
    identity_id, count, seed, tol = args
    reports = sample_reports(identity_id, count, seed, tol)
    return [(r, tolerance_stable(r, tol)) for r in reports]


def sampled_suite(name: str, seed: int = 0, count: int = 5, tol: float = DEFAULT_TOL, jobs: int = 1):
    """Sampled identity points plus a tolerance-halving stability row per point."""
    tasks = [(iid, count, seed, tol) for iid, _ in SAMPLED[name]]
    thresholds = dict(SAMPLED[name])
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_sampled_one, tasks))
    else:
        results = [_sampled_one(t) for t in tasks]
    out = []
    for rows in results:
        for r, stable in rows:
            out.append((r, thresholds[r.identity_id]))
            out.append((_report(r.identity_id + "_tol_halving", r.parameter_point,
                                0.0 if stable else 1.0, 0.0, 1.0), 0.5))
    return out


def fixed_points(name: str, tol: float = DEFAULT_TOL):
    """The documented example points of each sampled identity."""
    if name == "contiguous":
        return [(contiguous_3term(0.2, 0.3, 0.7, 0.4, 0.5, tol), 1e-11),
                (contiguous_shift(0.2, 0.5, 0.3, 0.5, tol), 1e-11),
                (contiguous_shift(0.4j, 0.7, 0.2, 0.6, tol), 1e-11)]
    if name == "bailey":
        return [(bailey_special(1.0, 0.5, 0.3, 0.4, 0.5, tol), 1e-9),
                (bailey_special(0.9, 1.0, 0.2, 0.25, 0.6, tol), 1e-9)]
    if name == "psi4":
        return [(psi4_special(1.0, 0.3, 0.4, 0.5, tol), 1e-10),
                (psi4_special(0.8, 0.2, 0.5, 0.7, tol), 1e-10)]
    if name == "genfun":
        return [(generating_function(0.3, 0.2, 0.5, 0.5, 40, tol), 1e-10)]
    return []


def run_suite(name: str, params: QParams, tol: float = DEFAULT_TOL, seed: int = 0,
              jobs: int = 1, half_width: int | None = None, n_max: int | None = None):
    if name == "wronskian":
        return wronskian_suite(params, seed, tol=tol)
    if name == "orthogonality":
        return orthogonality_suite(params, tol=tol)
    if name == "mixed":
        return mixed_suite(params, tol=tol)
    if name == "basis":
        return basis_suite(params, tol=tol)
    if name == "dual":
        return dual_suite(params, n_max, tol)
    if name == "symmetries":
        return symmetry_suite(params, half_width or 20)
    if name == "split-beta-1q":
        return split_suite(params, tol)
    if name == "diffeq":
        return diffeq_suite(params)
    if name in SAMPLED:
        return fixed_points(name, tol) + sampled_suite(name, seed, tol=tol, jobs=jobs)
    raise DomainError(f"unknown suite {name!r}")
