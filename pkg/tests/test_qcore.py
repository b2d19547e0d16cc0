import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from frozen_values import PHI21_02_03_07_04_Q05, QPOCH_INF, THETA_1p3_0p4I_Q0p5
from qspec.errors import DomainError, NoConvergence, PoleError
from qspec.qcore import (HypergeometricSpec, QParams, bilateral_psi, log_qpoch, phi_series,
                         qpinf, qpinf_many, qpoch_finite, qpoch_inf, theta)

qs = st.floats(0.05, 0.95)


@pytest.mark.parametrize("a,q,ref", QPOCH_INF)
def test_qpoch_inf_matches_oracle(a, q, ref):
    r = qpoch_inf(a, q, 1e-15)
    assert r.converged
    assert abs(r.value - ref) <= 1e-13 * abs(ref)


def test_qpoch_finite_zero_and_negative_index():
    assert qpoch_finite(0.3, 0.5, 0) == 1.0
    assert qpoch_finite(0.5**-2, 0.5, 5) == 0.0  # 1 - q^{-2} q^2 = 0
    # (a;q)_{-n} (a q^{-n}; q)_n = 1
    a, q = 0.7, 0.6
    assert abs(qpoch_finite(a, q, -3) * qpoch_finite(a * q**-3, q, 3) - 1) < 1e-14


def test_qpoch_finite_pole():
    with pytest.raises(PoleError):
        qpoch_finite(0.25, 0.5, -3)  # 1 - a q^{-2} = 0


@given(a=st.floats(-0.9, 0.9), q=qs, n=st.integers(0, 30))
def test_finite_times_shifted_tail_is_infinite(a, q, n):
    # (a;q)_inf = (a;q)_n (a q^n; q)_inf
    lhs = qpinf(a, q, 1e-15)
    rhs = qpoch_finite(a, q, n) * qpinf(a * q**n, q, 1e-15)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_qpoch_inf_tail_bound_is_honest():
    r = qpoch_inf(0.9, 0.95, 1e-6)
    exact = qpoch_inf(0.9, 0.95, 1e-16).value
    assert abs(r.value - exact) <= r.tail_estimate + 1e-15


def test_theta_oracle_and_quasi_periodicity():
    z, q = 1.3 + 0.4j, 0.5
    assert abs(theta(z, q) - THETA_1p3_0p4I_Q0p5) < 1e-14
    for l in range(-4, 5):
        lhs = theta(z * q**l, q)
        rhs = (-z) ** (-l) * q ** (-l * (l - 1) / 2) * theta(z, q)
        assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


def test_theta_zero_argument():
    with pytest.raises(DomainError):
        theta(0, 0.5)


def test_phi21_oracle():
    spec = HypergeometricSpec.phi([0.2, 0.3], [0.7], 0.5)
    r = phi_series(spec, 0.4, 1e-15)
    assert r.converged
    assert abs(r.value - PHI21_02_03_07_04_Q05) < 1e-14 * PHI21_02_03_07_04_Q05


@given(a=st.floats(-0.9, 0.9), z=st.floats(-0.9, 0.9), q=qs)
@settings(max_examples=60)
def test_q_binomial_theorem(a, z, q):
    spec = HypergeometricSpec.phi([a], [], q)
    lhs = phi_series(spec, z, 1e-15).value
    rhs = qpinf(a * z, q, 1e-15) / qpinf(z, q, 1e-15)
    # bound on sum |term_k|; alternating sums near q = 1 cancel heavily
    scale = qpinf(-abs(a * z), q).real / qpinf(abs(z), q).real
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_terminating_series_is_exact():
    # q-Chu-Vandermonde: 2phi1(q^-n, b; c; q, q) = (c/b;q)_n / (c;q)_n b^n
    q, b, c, n = 0.5, 0.3, 0.8, 6
    spec = HypergeometricSpec.phi([q**-n, b], [c], q)
    lhs = phi_series(spec, q).value
    rhs = qpoch_finite(c / b, q, n) / qpoch_finite(c, q, n) * b**n
    # the alternating terms cancel heavily; compare on the scale of the terms
    terms = [abs(qpoch_finite(q**-n, q, k) * qpoch_finite(b, q, k)
                 / (qpoch_finite(c, q, k) * qpoch_finite(q, q, k))) * q**k for k in range(n + 1)]
    assert abs(lhs - rhs) < 1e-15 * sum(terms)


def test_lower_parameter_pole():
    with pytest.raises(PoleError):
        phi_series(HypergeometricSpec.phi([0.3], [4.0], 0.5), 0.2)  # 1 - 4 q^2 = 0


def test_gr_factor_power_defaults():
    assert HypergeometricSpec.phi([1, 2], [3], 0.5).gr_factor_power == 0
    assert HypergeometricSpec.phi([], [3], 0.5).gr_factor_power == 2
    assert HypergeometricSpec.psi([1, 2], [3, 4], 0.5).gr_factor_power == 0


@pytest.mark.parametrize("a,b,z,q", [(0.7, 0.3, 0.5, 0.5), (0.9, 0.2 + 0.1j, 0.4 - 0.3j, 0.6),
                                     (-0.8, 0.4, 0.9, 0.3)])
def test_ramanujan_1psi1(a, b, z, q):
    # converges for |b/a| < |z| < 1
    spec = HypergeometricSpec.psi([a], [b], q)
    lhs = bilateral_psi(spec, z, 1e-15).value
    rhs = (qpinf_many([q, b / a, a * z, q / (a * z)], q, 1e-16)
           / qpinf_many([b, q / a, z, b / (a * z)], q, 1e-16))
    assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


def test_bilateral_divergent_side():
    with pytest.raises(NoConvergence):
        bilateral_psi(HypergeometricSpec.psi([0.3], [0.7], 0.5), 5.0)


def test_log_qpoch_roundtrip():
    a, q = -0.4 + 0.3j, 0.7
    assert abs(cmath.exp(log_qpoch(a, q, 7)) - qpoch_finite(a, q, 7)) < 1e-14
    assert abs(cmath.exp(log_qpoch(a, q, -4)) - qpoch_finite(a, q, -4)) < 1e-13


@pytest.mark.parametrize("bad", [dict(q=1.0, alpha=1, beta=0), dict(q=0.5, alpha=0, beta=0),
                                 dict(q=0.5, alpha=1, beta=-1), dict(q=0.5, alpha=math.inf, beta=1)])
def test_qparams_validation(bad):
    with pytest.raises(DomainError):
        QParams(**bad)


@given(alpha=st.floats(0.01, 100), q=qs)
def test_canonical_alpha_in_fundamental_interval(alpha, q):
    for a in (alpha, -alpha):
        c = QParams(q, a, 0.5).canonical()
        assert q < c.alpha <= 1.0
        # the grid point e^{-y} = c.alpha q^k for some integer k
        target = alpha if a > 0 else 1 / alpha
        k = math.log(target / c.alpha) / math.log(q)
        assert abs(k - round(k)) < 1e-8


def test_dual_beta_involution():
    p = QParams(0.5, 1.0, 0.3)
    assert abs(p.replace(beta=p.dual_beta).dual_beta - 0.3) < 1e-15
    with pytest.raises(DomainError):
        QParams(0.5, 1.0, 0.0).dual_beta
