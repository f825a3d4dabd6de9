import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xyecho import (
    CentralSpinParams,
    ChainParams,
    NumericalError,
    ParameterError,
    berry_phase_finite,
    berry_phase_thermodynamic,
    berry_phase_xx_closed_form,
    dbeta_dlambda,
    df_thermodynamic,
    effective_energies,
    f_thermodynamic,
    find_pseudocritical,
    scaling_fit,
)
from xyecho.berry import berry_phase_from_f, golden_section_max
from xyecho.spectrum import f_function

FIG3 = CentralSpinParams(mu=0.1, nu=2.0, g=0.5)


@pytest.mark.parametrize("lam", [0.3, 1.0, 1.7])
def test_decoupled_spin(lam):
    cs = CentralSpinParams(mu=0.3, nu=1.5, g=0.0)
    res = berry_phase_finite(ChainParams(0.7, lam, 40), cs)
    assert res.beta == pytest.approx(math.pi * (1 + 0.3 / math.hypot(0.3, 1.5)), rel=1e-15)
    assert res.dbeta_dlambda == 0.0
    assert dbeta_dlambda(ChainParams(0.7, lam, 40), cs) == 0.0


def test_equatorial_loop():
    res = berry_phase_finite(ChainParams(1.0, 0.4, 20), CentralSpinParams(0.0, 1.0, 0.0))
    assert res.beta == math.pi


def test_xx_plateau_value():
    expected = math.pi * (1 + 1.1 / math.sqrt(1.1**2 + 4))
    assert berry_phase_thermodynamic(0.0, 1.3, FIG3).beta == pytest.approx(expected, rel=1e-15)
    assert berry_phase_xx_closed_form(2.0, FIG3) == pytest.approx(expected, rel=1e-15)
    # finite chain: f = 1/2 exactly once every g-branch energy is positive
    res = berry_phase_finite(ChainParams(0.0, 1.2, 40), FIG3, delta=0.05)
    assert res.f_value == 0.5
    assert res.beta == berry_phase_from_f(FIG3, 0.5)


def test_degenerate_effective_field():
    cs = CentralSpinParams(mu=-2.0, nu=0.0, g=1.0)
    with pytest.raises(NumericalError, match="Berry phase undefined"):
        berry_phase_finite(ChainParams(0.0, 2.0, 10), cs, delta=0.0)


def test_thermodynamic_f_reference_values():
    assert abs(f_thermodynamic(1.0, 0.0)) < 1e-10
    assert f_thermodynamic(0.0, 1.0) == 0.5
    assert f_thermodynamic(0.0, -3.0) == -0.5
    with pytest.raises(ParameterError):
        f_thermodynamic(-0.1, 0.5)


@pytest.mark.parametrize("gamma,lam", [(1.0, 0.5), (1.0, 1.2), (0.5, 0.9), (0.7, -0.4)])
def test_thermodynamic_f_matches_large_chain(gamma, lam):
    assert abs(f_function(ChainParams(gamma, lam, 20000)) - f_thermodynamic(gamma, lam)) < 1e-3


@pytest.mark.parametrize("lam", [0.2, 0.5, 0.9])
def test_small_gamma_approaches_xx(lam):
    assert abs(f_thermodynamic(1e-6, lam) - (0.5 - math.acos(lam) / math.pi)) < 1e-3
    assert df_thermodynamic(1e-6, lam) == pytest.approx(1 / (math.pi * math.sqrt(1 - lam**2)), rel=1e-3)


def test_ising_f_derivative_diverges_at_criticality():
    assert df_thermodynamic(1.0, 1.0) == math.inf
    assert df_thermodynamic(1.0, 0.999) > df_thermodynamic(1.0, 0.99) > df_thermodynamic(1.0, 0.9)


def test_xx_one_sided_derivative():
    with pytest.raises(NumericalError, match="one-sided"):
        df_thermodynamic(0.0, 1.0)
    assert df_thermodynamic(0.0, 1.0, side="left") == math.inf
    assert df_thermodynamic(0.0, 1.0, side="right") == 0.0
    res = berry_phase_thermodynamic(0.0, 1.0, FIG3)
    assert "one_sided_derivative" in res.flags


def test_thermodynamic_derivative_consistent_with_f():
    h = 1e-5
    for gamma, lam in [(1.0, 0.6), (0.5, 1.4), (0.3, 0.8)]:
        fd = (f_thermodynamic(gamma, lam + h) - f_thermodynamic(gamma, lam - h)) / (2 * h)
        assert df_thermodynamic(gamma, lam) == pytest.approx(fd, rel=1e-5)


def test_analytic_matches_finite_difference():
    chain = ChainParams(1.0, 0.8, 200)
    a = dbeta_dlambda(chain, FIG3)
    fd = dbeta_dlambda(chain, FIG3, method="finite_difference")
    assert abs(a - fd) / abs(a) < 1e-6
    with pytest.raises(ParameterError):
        dbeta_dlambda(chain, FIG3, method="spline")


def test_degenerate_mode_is_flagged():
    # gamma = 0 and lam + 1 + delta = 0 puts the g-branch boundary mode at zero energy
    chain = ChainParams(0.0, -1.25, 8)
    res = berry_phase_finite(chain, FIG3, delta=0.25)
    assert "degenerate_mode" in res.flags and math.isnan(res.dbeta_dlambda)
    with pytest.raises(NumericalError, match="derivative singular"):
        dbeta_dlambda(chain, FIG3, delta=0.25)


def test_peak_sharpens_with_size():
    def height(n):
        lam = find_pseudocritical(ChainParams(1.0, 0.5, n), FIG3)
        return dbeta_dlambda(ChainParams(1.0, lam, n), FIG3)

    assert height(101) > height(31)


def test_pseudocritical_points_move_toward_criticality():
    small = find_pseudocritical(ChainParams(1.0, 0.5, 15), FIG3)
    large = find_pseudocritical(ChainParams(1.0, 0.5, 501), FIG3)
    assert small < large < 1


def test_large_chain_surrogate():
    lam_m = find_pseudocritical(ChainParams(1.0, 1.0, 100_000), FIG3, bracket=(0.9, 1.1), n_grid=50)
    assert abs(lam_m - 1) < 1e-2


def test_decoupled_peak_not_bracketed():
    with pytest.raises(NumericalError, match="peak not bracketed"):
        find_pseudocritical(ChainParams(1.0, 0.5, 51), CentralSpinParams(0.1, 2.0, 0.0))


def test_bad_brackets():
    with pytest.raises(ParameterError):
        find_pseudocritical(ChainParams(1.0, 0.5, 51), FIG3, bracket=(1.0, 0.5))
    with pytest.raises(ParameterError):
        find_pseudocritical(ChainParams(1.0, 0.5, 51), FIG3, target="g")


def test_golden_section():
    assert golden_section_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, 1e-9) == pytest.approx(0.3, abs=1e-8)


def test_scaling_fit_validation():
    with pytest.raises(ParameterError):
        scaling_fit([51, 101, 101, 251], FIG3, 1.0)
    with pytest.raises(ParameterError):
        scaling_fit([51, 101, 251], FIG3, 1.0)


def test_scaling_fit_parallel_matches_serial():
    sizes = [21, 41, 81, 161]
    serial = scaling_fit(sizes, FIG3, 1.0, target="df")
    parallel = scaling_fit(sizes, FIG3, 1.0, target="df", max_workers=4)
    assert serial.peak_positions == parallel.peak_positions
    assert serial.exponent == parallel.exponent
    assert serial.reference_exponent == 1.803


def test_effective_energies():
    assert effective_energies(ChainParams(1.0, 0.5, 20), CentralSpinParams(0.6, 0.8, 0.0)) == (-0.5, 0.5)
    e_g, e_e = effective_energies(ChainParams(1.0, 0.5, 20), CentralSpinParams(0.0, 3.0, 0.0))
    assert (e_g, e_e) == (-1.5, 1.5)
    chain = ChainParams(0.8, 0.7, 30)
    res = berry_phase_finite(chain, FIG3)
    _, e_e = effective_energies(chain, FIG3)
    # cos of the effective tilt from beta, sin from nu / 2E
    cos_t = res.beta / math.pi - 1
    assert math.hypot(cos_t, FIG3.nu / (2 * e_e)) == pytest.approx(1.0, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(-2, 3), st.sampled_from([10, 31, 100]),
       st.floats(-1, 1), st.floats(0.01, 2), st.floats(0, 1))
def test_beta_in_range(gamma, lam, n, mu, nu, g):
    beta = berry_phase_finite(ChainParams(gamma, lam, n), CentralSpinParams(mu, nu, g)).beta
    assert 0 <= beta <= 2 * math.pi


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 1), st.sampled_from([10, 40, 101]), st.floats(0.01, 1))
def test_beta_monotone_in_lambda(gamma, n, g):
    cs = CentralSpinParams(0.1, 2.0, g)
    betas = [berry_phase_finite(ChainParams(gamma, lam, n), cs).beta for lam in np.linspace(0, 2, 81)]
    assert all(b >= a for a, b in zip(betas, betas[1:]))


def test_multi_step_profile():
    n, delta = 10, 0.05
    lams = np.arange(1, 12000) * 1e-4
    betas = np.array([berry_phase_finite(ChainParams(0.0, x, n), FIG3, delta=delta).beta for x in lams])
    jumps = lams[1:][np.diff(betas) != 0]
    expected = [math.cos(2 * math.pi * k / n) - delta for k in range(1, n // 2)]
    expected = sorted(x for x in expected if 0 < x < 1.2)
    assert len(jumps) == len(expected)
    for got, want in zip(sorted(jumps), expected):
        assert abs(got - want) <= 1e-4
