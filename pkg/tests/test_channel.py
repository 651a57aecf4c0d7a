"""Channel sampler statistics, effective channel, and slot SNR."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrisac.channel import (
    ChannelRealization,
    calibrate_for_snr,
    cascade_terms,
    effective_channel,
    path_gain,
    rician_amplitude_mean,
    sample_channels,
    slot_snr,
)
from qrisac.codebook import RisProfile
from qrisac.numerics import seeded_stream
from qrisac.scenario import ScenarioConfig, ValidationError, build_scenario


def small_real(m=4, h_dir=1.0 + 0j, g_in=None, g_out=None):
    g_in = np.ones(m, dtype=complex) if g_in is None else np.asarray(g_in, dtype=complex)
    g_out = np.ones(m, dtype=complex) if g_out is None else np.asarray(g_out, dtype=complex)
    return ChannelRealization(
        h_dir_u=h_dir, h_dir_e=0.1 + 0j, g_in=g_in, g_out_u=g_out, g_out_e=g_out,
        clutter_gains=np.zeros(0, dtype=complex), clutter_delays=np.zeros(0, dtype=np.int64),
        sigma_sq=1.0,
    )


def test_sampler_deterministic_and_shapes():
    cfg = ScenarioConfig()
    geo = build_scenario(cfg, seeded_stream(1, 0))
    r1 = sample_channels(geo, cfg, seeded_stream(2, 0))
    r2 = sample_channels(geo, cfg, seeded_stream(2, 0))
    assert r1.h_dir_u == r2.h_dir_u
    np.testing.assert_array_equal(r1.g_in, r2.g_in)
    assert r1.g_in.shape == (256,)
    assert r1.clutter_gains.shape == (400,)
    assert np.all(r1.clutter_delays < cfg.delay_bins)


def test_sampler_no_clutter():
    cfg = ScenarioConfig(k_clutter=0)
    geo = build_scenario(cfg, seeded_stream(1, 0))
    r = sample_channels(geo, cfg, seeded_stream(2, 0))
    assert r.clutter_gains.size == 0


def test_direct_path_mean_matches_pathloss_formula():
    # mean |h_dir|^2 over 1e4 draws ~ path-loss formula within 2%
    cfg = ScenarioConfig(n_uav=1)
    geo = build_scenario(cfg, seeded_stream(3, 0))
    lam = 299792458.0 / cfg.carrier_freq
    d = float(np.linalg.norm(geo.uav_positions[0] - geo.x_gnb))
    expected = path_gain(d, cfg.pathloss_exp_los, lam)
    rng = seeded_stream(3, 1)
    draws = np.array([abs(sample_channels(geo, cfg, rng).h_dir_u) ** 2 for _ in range(10_000)])
    assert np.mean(draws) == pytest.approx(expected, rel=0.02)


def test_eve_rayleigh_variance_within_3_sigma():
    cfg = ScenarioConfig(n_uav=1)
    geo = build_scenario(cfg, seeded_stream(4, 0))
    lam = 299792458.0 / cfg.carrier_freq
    d = float(np.linalg.norm(geo.eve_position - geo.x_gnb))
    expected = path_gain(d, cfg.pathloss_exp_nlos, lam) * 10 ** (cfg.eve_offset_db / 10)
    rng = seeded_stream(4, 1)
    n = 10_000
    draws = np.array([abs(sample_channels(geo, cfg, rng).h_dir_e) ** 2 for _ in range(n)])
    # |h|^2 is exponential: sd of the mean = expected / sqrt(n)
    assert abs(np.mean(draws) - expected) < 3 * expected / math.sqrt(n)


def test_rician_amplitude_mean_against_mc():
    k = 10 ** (8.0 / 10.0)
    rng = seeded_stream(5, 0)
    los = math.sqrt(k / (k + 1))
    sig = math.sqrt(1 / (2 * (k + 1)))
    h = los + sig * (rng.standard_normal(200_000) + 1j * rng.standard_normal(200_000))
    assert rician_amplitude_mean(k) == pytest.approx(float(np.mean(np.abs(h))), abs=3e-4)


def test_effective_channel_no_cascade():
    real = small_real(g_in=np.zeros(4))
    prof = RisProfile.from_indices([0, 1, 2, 3], 2)
    assert effective_channel(real, prof, "user") == pytest.approx(real.h_dir_u)


def cmath_exp(theta):
    return complex(math.cos(theta), math.sin(theta))


def test_effective_channel_single_element_alignment():
    real = small_real(m=1, h_dir=2.0 * cmath_exp(0.7), g_in=[cmath_exp(0.2)], g_out=[0.5 * cmath_exp(-0.4)])
    # phase aligning the cascade term with h_dir gives |h| = |h_dir| + |t|
    t = np.conj(real.g_out_u[0]) * real.g_in[0]
    phi = (0.7 - np.angle(t)) % (2 * np.pi)
    h = real.h_dir_u + t * np.exp(1j * phi)
    assert abs(h) == pytest.approx(abs(real.h_dir_u) + abs(t), rel=1e-12)


def test_effective_channel_matches_term_expansion():
    rng = seeded_stream(6, 0)
    m = 4
    real = small_real(
        m=m,
        h_dir=complex(rng.standard_normal(), rng.standard_normal()),
        g_in=rng.standard_normal(m) + 1j * rng.standard_normal(m),
        g_out=rng.standard_normal(m) + 1j * rng.standard_normal(m),
    )
    prof = RisProfile.from_indices([0, 1, 2, 3], 2)
    expected = real.h_dir_u
    for i in range(m):
        expected += np.conj(real.g_out_u[i]) * np.exp(1j * prof.phases[i]) * real.g_in[i]
    assert effective_channel(real, prof, "user") == pytest.approx(expected, rel=1e-12)


def test_effective_channel_length_mismatch():
    real = small_real(m=4)
    with pytest.raises(ValidationError):
        effective_channel(real, RisProfile.from_indices([0, 1], 2), "user")


def test_effective_channel_linear_in_g_in():
    rng = seeded_stream(7, 0)
    m = 6
    g_in = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    real1 = small_real(m=m, h_dir=0j, g_in=g_in)
    real2 = small_real(m=m, h_dir=0j, g_in=2.5 * g_in)
    prof = RisProfile.from_indices([1] * m, 2)
    assert effective_channel(real2, prof, "user") == pytest.approx(2.5 * effective_channel(real1, prof, "user"))


def test_slot_snr_properties():
    cfg = ScenarioConfig(m_elements=4)
    real = small_real(m=4)
    prof = RisProfile.from_indices([0] * 4, cfg.b_phi)
    rho = slot_snr(real, prof, cfg, "user")
    assert rho > 0
    # zero effective channel -> zero SNR
    zero = small_real(m=4, h_dir=0j, g_in=np.zeros(4))
    assert slot_snr(zero, prof, cfg, "user") == 0.0
    # doubling P_c doubles rho
    cfg2 = cfg.replace(p_c=cfg.p_c / 2, p_s=cfg.p_s)
    assert rho == pytest.approx(2 * slot_snr(real, prof, cfg2, "user") * (cfg.p_c / (2 * (cfg.p_c / 2))), rel=1e-12)
    assert slot_snr(real, prof, cfg2, "user") == pytest.approx(rho * cfg2.p_c / cfg.p_c, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(scale=st.floats(min_value=0.1, max_value=10.0), seed=st.integers(min_value=0, max_value=999))
def test_slot_snr_scale_covariance(scale, seed):
    cfg = ScenarioConfig(m_elements=4)
    rng = seeded_stream(seed, 0)
    g_in = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    g_out = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    h_d = complex(rng.standard_normal(), rng.standard_normal())
    base = small_real(m=4, h_dir=h_d, g_in=g_in, g_out=g_out)
    scaled = small_real(m=4, h_dir=h_d * scale, g_in=g_in, g_out=g_out * scale)
    prof = RisProfile.from_indices([2] * 4, cfg.b_phi)
    r1 = slot_snr(base, prof, cfg, "user")
    r2 = slot_snr(scaled, prof, cfg, "user")
    assert r2 == pytest.approx(scale**2 * r1, rel=1e-9)


def test_unit_modulus_reflection():
    prof = RisProfile.from_indices(list(range(8)), 3)
    assert np.allclose(np.abs(prof.phasors), 1.0, atol=1e-15)


def test_calibration_hits_median_snr():
    cfg = ScenarioConfig()
    target_db = 10.0
    calib = calibrate_for_snr(cfg, target_db)
    rng = seeded_stream(8, 0)
    rhos = []
    for _ in range(4000):
        real = sample_channels(None, cfg, rng, calibration=calib)
        rhos.append(cfg.p_c * abs(real.h_dir_u) ** 2 / cfg.noise_power)
    med_db = 10 * math.log10(float(np.median(rhos)))
    assert med_db == pytest.approx(target_db, abs=0.3)
