import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lrdest import asympvar as av
from lrdest.core import InadmissibleError, trigamma
from lrdest.wavelet import daubechies

DB2, DB4 = daubechies(2), daubechies(4)


# ---------------------------------------------------------------- Fourier side

def test_phi_tau_values():
    assert av.phi_tau(0) == pytest.approx(1.0, abs=1e-12)
    assert av.phi_tau(1) == pytest.approx(1.5, abs=1e-12)
    assert av.phi_tau(2) == pytest.approx(35 / 18, abs=1e-12)
    assert av.phi_tau(5) == pytest.approx(2.9094, abs=1e-4)
    fact = math.factorial
    assert av.phi_tau(3) == pytest.approx(fact(12) * fact(3) ** 4 / fact(6) ** 4, rel=1e-12)


def test_sigma2_exact_for_untapered():
    assert av.sigma2_pool(1, 0).value == pytest.approx(math.pi ** 2 / 6, abs=1e-14)
    assert 3 * av.sigma2_pool(3, 0).value == pytest.approx(1.1848, abs=5e-5)


def test_sigma2_table_entry():
    e = av.sigma2_pool(4, 5)
    assert e.reps >= 1_000_000 and 0 < e.stderr < 2e-3
    assert e.value == pytest.approx(0.6200, abs=5 * e.stderr)


def test_sigma2_simulation_against_trigamma():
    # untapered pooling has the exact answer trigamma(p); the simulator must find it
    e = av.simulate_sigma2_pool(2, 0, reps=40_000, seed=3)
    assert abs(e.value - trigamma(2)) < 4 * e.stderr
    with pytest.raises(ValueError):
        av.simulate_sigma2_pool(2, 1, reps=100)


# ------------------------------------------------------------------ Shannon

def test_shannon_closed_form():
    assert av.v_shannon(1.4, 5) == pytest.approx(0.4949, abs=5e-4)
    assert av.v_shannon(0, av.INF) == pytest.approx(1 / (8 * math.log(2) ** 2), abs=1e-12)
    assert av.v_shannon(0, av.INF) == pytest.approx(0.2602, abs=1e-4)


def test_g_power_limit():
    assert av.g_power(-1.0) == pytest.approx(math.log(2), abs=1e-14)
    assert av.g_power(-1.0 + 1e-7) == pytest.approx(av.g_power(-1.0), abs=1e-6)
    assert av.g_power(0.0) == pytest.approx(math.pi, abs=1e-14)


def test_shannon_integrals():
    for d in (-0.2, 0.0, 0.7):
        I = av.I_vector(d, 4, None)
        assert I[0] == pytest.approx(2 * av.g_power(-4 * d), rel=1e-3)
        assert np.all(np.abs(I[1:]) < 1e-10 * I[0])
        S = av.sigma_matrix(d, 4, None)
        assert np.all(S[~np.eye(5, dtype=bool)] == pytest.approx(0.0, abs=1e-10 * S[0, 0]))
    assert av.K_psi(0.0, None) == pytest.approx(2 * math.pi, abs=1e-12)


# ------------------------------------------------------------------ psi-hat

def test_haar_fourier_modulus():
    xi = np.linspace(-8 * math.pi, 8 * math.pi, 2001)
    xi = xi[xi != 0]
    got = np.abs(av.psi_hat(daubechies(1), xi))
    ref = np.abs(np.sin(xi / 4) ** 2 / (xi / 4))
    np.testing.assert_allclose(got, ref, atol=1e-6)


@pytest.mark.parametrize("M", [2, 4, 6])
def test_psi_hat_unit_energy(M):
    t = av.psi_hat_table(daubechies(M))
    energy = t.resolution * np.sum(np.abs(t.values) ** 2) / (2 * math.pi)
    assert energy == pytest.approx(1.0, abs=1e-4)


def test_psi_hat_vanishing_order():
    t = av.psi_hat_table(DB4)
    xi = t.grid[(t.grid > 0) & (t.grid < 10 * t.grid[t.grid > 0].min())]  # smallest decade of the table
    v = np.abs(av.psi_hat(DB4, xi))
    slope = np.polyfit(np.log(xi), np.log(v), 1)[0]
    assert slope >= 3.9
    assert abs(av.psi_hat(DB4, np.array([1e-3]))[0]) <= 1e-10


# ------------------------------------------------------------ wavelet side

@pytest.mark.parametrize("w", [DB2, DB4])
def test_K_at_zero_is_energy(w):
    assert av.K_psi(0.0, w) == pytest.approx(2 * math.pi, rel=1e-4)


def test_K_outside_window_raises():
    with pytest.raises(InadmissibleError) as err:
        av.K_psi(5.0, DB2)
    assert err.value.interval is not None


def test_admissibility_interval():
    with pytest.raises(InadmissibleError) as err:
        av.v_av(10.0, 5, DB2)
    lo, hi = err.value.interval
    assert hi == 2.0 and lo == pytest.approx(0.5 - 1.34)


@pytest.mark.parametrize("d", [0.0, 0.4, 1.4])
@pytest.mark.parametrize("ell", [3, 5, 7])
def test_v_av_equals_quadratic_form(d, ell):
    S = av.sigma_matrix(d, ell, DB2)
    w = av.av_weights(ell)
    assert av.v_av(d, ell, DB2) == pytest.approx(float(w @ S @ w), abs=1e-8)
    assert av.lww_lrw_av_equality_check(d, ell, DB2)


@pytest.mark.parametrize("d", [-0.5, 0.0, 1.0, 2.0])
def test_sigma_symmetric_positive_definite(d):
    S = av.sigma_matrix(d, 7, DB4)
    assert np.array_equal(S, S.T)
    assert np.linalg.eigvalsh(S).min() > 0


def test_v_opt_non_increasing_in_ell():
    vals = [av.v_opt(0.4, ell, DB2) for ell in range(1, 10)]
    assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("d", [-0.8, -0.3, 0.0, 0.5, 1.0, 1.5, 2.0])
def test_v_opt_dominates_v_av(d):
    assert av.v_opt(d, 7, DB2) <= av.v_av(d, 7, DB2) + 1e-9
    assert av.v_opt(d, 7, DB2) > 0


@settings(max_examples=8, deadline=None)
@given(st.floats(-0.8, 2.0))
def test_variances_positive_on_admissible_range(d):
    r = av.variance_report(d, 4, DB2)
    assert r.v_av > 0 and r.v_opt > 0 and r.v_shannon > 0
    assert np.all(np.isfinite(r.sigma_matrix))


def test_av_weights_constraints():
    for ell in (1, 3, 8):
        w = av.av_weights(ell)
        assert abs(w.sum()) < 1e-12
        assert 2 * math.log(2) * (np.arange(ell + 1) @ w) == pytest.approx(1.0, abs=1e-12)
    assert av.eta_kappa(av.INF) == (1.0, 2.0)


def test_frozen_values_db2():
    # regression values of this implementation (default quadrature)
    assert av.v_av(1.4, 5, DB2) == pytest.approx(0.584694, abs=2e-6)
    assert av.v_opt(1.4, 5, DB2) == pytest.approx(0.569677, abs=2e-6)


def test_quadrature_convergence():
    fine = av.DEFAULT_QUAD.refined()
    for d in (0.0, 0.4):
        assert av.K_psi(d, DB4, fine) == pytest.approx(av.K_psi(d, DB4), rel=1e-4)
    assert av.v_av(0.4, 3, DB2, fine) == pytest.approx(av.v_av(0.4, 3, DB2), rel=1e-4)
    assert av.I_u(0.4, 2, DB2, fine) == pytest.approx(av.I_u(0.4, 2, DB2), rel=1e-4)


@pytest.mark.parametrize("d", [-0.3, 0.4, 1.0])
def test_large_M_approaches_shannon(d):
    target = av.v_shannon(d, av.INF)
    gaps = [abs(av.v_av(d, av.INF, daubechies(M)) - target) for M in (2, 4, 6, 8)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_covariance_series_parseval():
    for u in (0, 2):
        cov = av.wavelet_covariances(0.3, u, DB2)
        assert np.sum(cov ** 2) / (2 * math.pi) == pytest.approx(av.I_u(0.3, u, DB2), rel=1e-6)
