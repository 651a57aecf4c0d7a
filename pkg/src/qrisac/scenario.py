"""Experiment parameterization, corridor geometry, and node placement.

ScenarioConfig is the single source of truth for every configuration constant;
all power values are converted to watts once, at construction. Geometry is
drawn deterministically from (config, seed).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["ScenarioConfig", "Geometry", "ValidationError", "build_scenario", "slot_timing", "dbm_to_watt"]


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


class ValidationError(ValueError):
    """Config or input rejected; carries the list of violated invariants."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class ScenarioConfig:
    """Full experiment parameterization. Defaults follow the standard mid-band
    urban-canyon setup: 10 GHz carrier, 100 MHz bandwidth, a 256-element
    3-bit RIS, 64 code slots per 1 ms CPI, 30 dBm power budget.
    """

    carrier_freq: float = 10e9          # Hz
    bandwidth_b: float = 100e6          # Hz
    m_elements: int = 256               # RIS element count
    b_phi: int = 3                      # phase bits per element
    m_code: int = 64                    # slots per CPI
    t_cpi: float = 1e-3                 # s
    s_max: int | None = None            # max per-slot element switches (None -> M/4)
    d_min: int = 2                      # min dwell slots per active code
    t_min: float = 1e-6                 # min dwell seconds
    eta: float = 0.5                    # usable slot fraction for RIS updates
    t_sw: float = 1e-6                  # RIS switching seconds
    t_bus: float = 50e-9                # bus serialization seconds per tile update
    n_upd: int | None = None            # updated tiles per slot (None -> m_code)
    p_max_dbm: float = 30.0             # transmit budget, dBm
    p_c: float = 0.8                    # communication power, watts
    p_s: float = 0.2                    # sensing power, watts
    n_0: float = 4.0e-21                # noise PSD, W/Hz (~ -174 dBm/Hz)
    tau: float = 0.05                   # sensing fraction
    n_uav: int = 8
    uav_altitude_range: tuple[float, float] = (80.0, 120.0)
    k_clutter: int = 400
    spoofer_jitter: int = 2             # max |timing error| in samples
    trials: int = 10_000
    master_seed: int = 20251

    # Codebook / channel calibration knobs (documented defaults; all are
    # modelling choices, see README).
    codebook_size: int = 64
    clutter_cnr_db: float = 0.0         # total clutter-to-noise power ratio
    delay_bins: int = 256               # clutter delay window, in bins
    user_cascade_gain_db: float = 9.0   # aligned-profile power gain over user direct path
    eve_cascade_gain_db: float = 4.0    # eavesdropper exploitable cascade power over her direct path
    eve_offset_db: float = 0.0          # eavesdropper direct median SNR offset vs user
    static_panel_gain: float = 0.15     # sensing power factor of a statically deployed panel
    static_user_coherence: float = 0.25 # deployment-time beam alignment toward the corridor
    static_eve_gain: float = 0.05       # street-level spillover of the static beam
    sensing_lambda0_ref: float = 110.0  # median GLRT non-centrality at tau_ref
    sensing_lambda0_dir: float = 0.5    # code-free direct-echo non-centrality floor
    tau_ref: float = 0.05
    rician_k_db: float = 8.0
    pathloss_exp_los: float = 2.2
    pathloss_exp_nlos: float = 3.0
    mimicry_gain: float = 0.8           # generative spoof per-slot coherence factor
    jitter_acf_width: float = 0.7       # waveform autocorrelation width, samples

    # Energy model constants (joules)
    energy_per_switch: float = 5e-9
    energy_pqc: float = 1e-6

    # Control-plane suite constants (public parameter-sheet sizes of the
    # emulated suites; overridable).
    kem_ciphertext_bytes: int = 1088
    kem_shared_secret_bytes: int = 32
    sig_bytes: int = 666
    commit_header_bytes: int = 45
    crypto_compute_s: float = 100e-6
    control_bus_rate_bps: float = 100e6

    def __post_init__(self) -> None:
        if self.s_max is None:
            object.__setattr__(self, "s_max", max(1, self.m_elements // 4))
        if self.n_upd is None:
            object.__setattr__(self, "n_upd", self.m_code)
        violations = self.validate()
        if violations:
            raise ValidationError(violations)

    @property
    def p_max(self) -> float:
        """Transmit budget in watts (converted once from dBm)."""
        return dbm_to_watt(self.p_max_dbm)

    @property
    def t_slot(self) -> float:
        return self.t_cpi / self.m_code

    @property
    def noise_power(self) -> float:
        return self.n_0 * self.bandwidth_b

    @property
    def n_phases(self) -> int:
        return 1 << self.b_phi

    def validate(self) -> list[str]:
        """Return the list of violated invariants (empty when valid)."""
        v: list[str] = []
        if self.m_elements < 1:
            v.append(f"m_elements must be >= 1, got {self.m_elements}")
        if self.b_phi not in (1, 2, 3, 4):
            v.append(f"b_phi must be one of 1..4, got {self.b_phi}")
        if self.m_code < 1:
            v.append(f"m_code must be >= 1, got {self.m_code}")
        if self.t_cpi <= 0:
            v.append(f"t_cpi must be positive, got {self.t_cpi}")
        if not (0 < self.tau < 1):
            v.append(f"tau must lie in (0,1), got {self.tau}")
        if not (0 < self.eta <= 1):
            v.append(f"eta must lie in (0,1], got {self.eta}")
        if self.s_max < 0 or self.s_max > self.m_elements:
            v.append(f"(S): s_max must lie in [0, m_elements], got {self.s_max}")
        if self.d_min < 1:
            v.append(f"(D1): d_min must be >= 1, got {self.d_min}")
        if self.m_code >= 1 and self.t_cpi > 0 and self.d_min * self.t_cpi / self.m_code < self.t_min:
            v.append(
                f"(D2): d_min*t_slot = {self.d_min * self.t_cpi / self.m_code:.3e} s "
                f"is below t_min = {self.t_min:.3e} s"
            )
        if self.p_c < 0 or self.p_s < 0:
            v.append(f"powers must be non-negative, got p_c={self.p_c}, p_s={self.p_s}")
        elif self.p_c + self.p_s > self.p_max * (1 + 1e-9):
            v.append(
                f"power budget: p_c + p_s = {self.p_c + self.p_s:.4f} W exceeds "
                f"p_max = {self.p_max:.4f} W ({self.p_max_dbm} dBm)"
            )
        if self.k_clutter < 0:
            v.append(f"k_clutter must be >= 0, got {self.k_clutter}")
        if self.n_uav < 0:
            v.append(f"n_uav must be >= 0, got {self.n_uav}")
        lo, hi = self.uav_altitude_range
        if not (0 < lo <= hi):
            v.append(f"uav_altitude_range must satisfy 0 < lo <= hi, got {self.uav_altitude_range}")
        if self.codebook_size < 1:
            v.append(f"codebook_size must be >= 1, got {self.codebook_size}")
        if self.codebook_size > 2 ** (self.b_phi * min(self.m_elements, 64)):
            v.append("codebook_size exceeds the profile alphabet size")
        if self.trials < 1:
            v.append(f"trials must be >= 1, got {self.trials}")
        if self.spoofer_jitter < 0:
            v.append(f"spoofer_jitter must be >= 0, got {self.spoofer_jitter}")
        if self.delay_bins < 1:
            v.append(f"delay_bins must be >= 1, got {self.delay_bins}")
        return v

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    # -- external file format (JSON mirroring field names exactly) --

    def to_json(self) -> str:
        d = dataclasses.asdict(self)
        d["uav_altitude_range"] = list(self.uav_altitude_range)
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        data = json.loads(text)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError([f"unknown config key: {k}" for k in unknown])
        if "uav_altitude_range" in data:
            data["uav_altitude_range"] = tuple(data["uav_altitude_range"])
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "ScenarioConfig":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class Geometry:
    """Node placement for one scenario draw. Positions are 3-vectors in meters."""

    x_gnb: np.ndarray
    x_leo: np.ndarray
    ris_positions: np.ndarray       # (M, 3) rooftop facade plane
    uav_positions: np.ndarray       # (n_uav, 3)
    eve_position: np.ndarray
    corridor_bounds: np.ndarray     # (2, 3) axis-aligned box [min; max]

    def __post_init__(self) -> None:
        lo, hi = self.corridor_bounds
        inside = np.all((self.uav_positions >= lo) & (self.uav_positions <= hi))
        if self.uav_positions.size and not inside:
            raise ValidationError(["UAV positions must lie inside corridor bounds"])


# Corridor: a 500 m street canyon. x runs along the street, y across it,
# z is altitude. These extents are fixed modelling constants.
_CORRIDOR_X = (0.0, 500.0)
_CORRIDOR_Y = (-20.0, 20.0)


def build_scenario(config: ScenarioConfig, rng: np.random.Generator) -> Geometry:
    """Deterministic geometry draw: UAVs uniform along the corridor at configured
    altitudes, RIS elements on a rooftop facade grid, a single static
    eavesdropper at street level offset laterally from the corridor centerline.
    """
    violations = config.validate()
    if violations:
        raise ValidationError(violations)

    alt_lo, alt_hi = config.uav_altitude_range
    bounds = np.array(
        [[_CORRIDOR_X[0], _CORRIDOR_Y[0], alt_lo], [_CORRIDOR_X[1], _CORRIDOR_Y[1], alt_hi]]
    )

    n = config.n_uav
    uav = np.empty((n, 3))
    if n:
        uav[:, 0] = rng.uniform(*_CORRIDOR_X, size=n)
        uav[:, 1] = rng.uniform(*_CORRIDOR_Y, size=n)
        uav[:, 2] = rng.uniform(alt_lo, alt_hi, size=n)

    # RIS panel: sqrt(M) x sqrt(M)-ish grid at half-wavelength spacing on the
    # y = -25 facade, centered at 50 m height.
    wavelength = 299792458.0 / config.carrier_freq
    spacing = wavelength / 2.0
    n_cols = max(1, int(math.isqrt(config.m_elements)))
    n_rows = -(-config.m_elements // n_cols)
    idx = np.arange(config.m_elements)
    col = idx % n_cols
    row = idx // n_cols
    ris = np.empty((config.m_elements, 3))
    ris[:, 0] = 250.0 + (col - (n_cols - 1) / 2.0) * spacing
    ris[:, 1] = -25.0
    ris[:, 2] = 50.0 + (row - (n_rows - 1) / 2.0) * spacing

    eve_lateral = rng.uniform(5.0, 30.0)
    eve = np.array([rng.uniform(*_CORRIDOR_X), eve_lateral, 1.5])

    return Geometry(
        x_gnb=np.array([0.0, 30.0, 25.0]),
        x_leo=np.array([250.0, 0.0, 550e3]),
        ris_positions=ris,
        uav_positions=uav,
        eve_position=eve,
        corridor_bounds=bounds,
    )


def slot_timing(config: ScenarioConfig) -> tuple[float, bool, float]:
    """Per-slot RIS update budget: (t_slot, feasible, budget_used).

    Feasible iff t_sw + n_upd * t_bus <= eta * t_slot.
    """
    t_slot = config.t_cpi / config.m_code
    budget_used = config.t_sw + config.n_upd * config.t_bus
    return t_slot, budget_used <= config.eta * t_slot, budget_used
