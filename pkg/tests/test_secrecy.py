"""Secrecy capacity, rate, compliance, and the per-scheme sweep."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrisac.scenario import ScenarioConfig, ValidationError
from qrisac.scene_auth import AdversaryModel
from qrisac.secrecy import SecrecyReport, rate, scheme_snrs, secrecy_capacity, secrecy_sweep
from qrisac.schemes import SCHEMES
from qrisac.channel import calibrate_for_snr, sample_channels
from qrisac.numerics import seeded_stream


def test_secrecy_capacity_trivial_cases():
    assert secrecy_capacity(1.0, 1.0, 0.0, 1.0) == 0.0
    assert secrecy_capacity(3.0, 1.0, 0.0, 1.0) == pytest.approx(1.0)   # log2(4) - log2(2)
    assert secrecy_capacity(1.0, 3.0, 0.0, 1.0) == 0.0                  # clamped


def test_rate_formula():
    assert rate(0.0, 0.3, 1e6) == 0.0
    assert rate(10 ** (10 / 10), 0.05, 100e6) == pytest.approx(0.95 * 1e8 * math.log2(11), rel=1e-12)
    # tau -> 1 sends the rate to zero
    assert rate(5.0, 0.999, 1e6) == pytest.approx(0.001 * 1e6 * math.log2(6), rel=1e-9)


def test_rate_decreasing_in_tau():
    vals = [rate(5.0, t, 1e6) for t in (0.1, 0.3, 0.6, 0.9)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@settings(max_examples=50, deadline=None)
@given(
    rho_u=st.floats(min_value=0, max_value=1e4),
    rho_e=st.floats(min_value=0, max_value=1e4),
    tau=st.floats(min_value=0, max_value=0.99),
    bw=st.floats(min_value=1.0, max_value=1e9),
)
def test_secrecy_capacity_properties(rho_u, rho_e, tau, bw):
    c = secrecy_capacity(rho_u, rho_e, tau, bw)
    assert c >= 0.0
    # non-decreasing in rho_u, non-increasing in rho_e
    assert secrecy_capacity(rho_u * 2 + 1, rho_e, tau, bw) >= c - 1e-9
    assert secrecy_capacity(rho_u, rho_e * 2 + 1, tau, bw) <= c + 1e-9
    # linear in bandwidth, scales by (1 - tau)
    assert secrecy_capacity(rho_u, rho_e, tau, 2 * bw) == pytest.approx(2 * c, rel=1e-9, abs=1e-12)
    assert secrecy_capacity(rho_u, rho_e, 0.0, bw) * (1 - tau) == pytest.approx(c, rel=1e-9, abs=1e-12)


def test_secrecy_report_compliance_gate():
    rep = SecrecyReport.evaluate(rho_u=3.0, rho_e=1.0, tau=0.0, bandwidth=1.0, r=0.5)
    assert rep.compliant
    rep2 = SecrecyReport.evaluate(rho_u=3.0, rho_e=1.0, tau=0.0, bandwidth=1.0, r=1.5)
    assert not rep2.compliant
    with pytest.raises(ValidationError):
        SecrecyReport(rho_u=1.0, rho_e=1.0, c_s=1.0, r=2.0, compliant=True)


def test_scheme_snrs_no_ris_uses_direct_only():
    cfg = ScenarioConfig()
    calib = calibrate_for_snr(cfg, 10.0)
    real = sample_channels(None, cfg, seeded_stream(1, 0), calibration=calib)
    rho_u, rho_e = scheme_snrs(real, SCHEMES["B0"], cfg)
    assert rho_u == pytest.approx(cfg.p_c * abs(real.h_dir_u) ** 2 / cfg.noise_power)
    assert rho_e == pytest.approx(cfg.p_c * abs(real.h_dir_e) ** 2 / cfg.noise_power)


def test_scheme_snrs_secret_codes_suppress_eve_cascade():
    cfg = ScenarioConfig()
    calib = calibrate_for_snr(cfg, 10.0)
    rng = seeded_stream(2, 0)
    boost_public, boost_secret = [], []
    for _ in range(200):
        real = sample_channels(None, cfg, rng, calibration=calib)
        _, rho_e_pub = scheme_snrs(real, SCHEMES["B2"], cfg)
        _, rho_e_sec = scheme_snrs(real, SCHEMES["QRTM"], cfg)
        rho_e_dir = cfg.p_c * abs(real.h_dir_e) ** 2 / cfg.noise_power
        boost_public.append(rho_e_pub / rho_e_dir)
        boost_secret.append(rho_e_sec / rho_e_dir)
    assert np.mean(boost_public) > 2.0          # eve exploits the known profile
    assert abs(np.mean(boost_secret) - 1.0) < 0.1  # guessing leaves ~the direct path


def test_sweep_trial_floor():
    cfg = ScenarioConfig()
    with pytest.raises(ValidationError):
        secrecy_sweep(cfg, "QRTM", [10.0], trials=10)


def test_sweep_ordering_and_magnitude_at_10db():
    cfg = ScenarioConfig()
    means = {}
    for sid in ["B0", "B1", "B2", "QRTM"]:
        means[sid] = secrecy_sweep(cfg, sid, [10.0], trials=2000, seed=17)[0]["mean_cs_bps_hz"]
    assert means["QRTM"] >= means["B2"] >= means["B1"] >= means["B0"]
    assert means["QRTM"] >= 1.5


def test_retention_under_quantum_adversaries():
    cfg = ScenarioConfig()
    a1 = AdversaryModel.for_class("A1_classical", cfg)
    a2 = AdversaryModel.for_class("A2_hndl", cfg)
    a3 = AdversaryModel.for_class("A3_quantum_aided", cfg).with_knowledge("learned")
    base = secrecy_sweep(cfg, "QRTM", [10.0], trials=1500, seed=19, adversary=a1)[0]["mean_cs_bps_hz"]
    hndl = secrecy_sweep(cfg, "QRTM", [10.0], trials=1500, seed=19, adversary=a2)[0]["mean_cs_bps_hz"]
    qaided = secrecy_sweep(cfg, "QRTM", [10.0], trials=1500, seed=19, adversary=a3)[0]["mean_cs_bps_hz"]
    assert hndl / base == pytest.approx(1.0, abs=1e-12)  # storage attacks change nothing today
    assert qaided / base >= 0.90


def test_sweep_rows_schema():
    cfg = ScenarioConfig()
    rows = secrecy_sweep(cfg, "B0", [0.0, 10.0], trials=1000, seed=23)
    assert [r["snr_db"] for r in rows] == [0.0, 10.0]
    for r in rows:
        assert set(r) == {"scheme", "snr_db", "mean_cs_bps_hz", "stderr", "trials", "seed"}
        assert r["trials"] == 1000 and r["seed"] == 23
