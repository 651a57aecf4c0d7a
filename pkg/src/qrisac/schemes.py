"""Scheme ladder B0..B3 and QRTM: which protections each baseline carries.

B0  plain ISAC: no RIS coding, no PQC.
B1  RIS present but no cryptographic control; without a protected control
    plane the panel runs a fixed default profile (static, trivially public).
B2  PQC-secured control with exploitable (non-secret) RIS codes: dynamic
    optimized profiles, schedule published in cleartext.
B3  PQC + secret per-CPI RIS codes, but no scene authentication: sensing
    falls back to run-noncoherent combining instead of the auth-grade
    coherent GLRT stack.
QRTM  B3 plus GLRT scene authentication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .scenario import ScenarioConfig, ValidationError

__all__ = ["SchemeSpec", "SCHEMES", "SCHEME_ORDER", "get_scheme", "SensingPolicy", "sensing_policy"]


@dataclass(frozen=True)
class SchemeSpec:
    id: str
    ris_enabled: bool
    codes_secret: bool
    pqc_enabled: bool
    scene_auth_enabled: bool

    @property
    def index(self) -> int:
        return SCHEME_ORDER.index(self.id)

    @property
    def dynamic_codes(self) -> bool:
        """Per-CPI code hopping requires an authenticated control plane."""
        return self.ris_enabled and self.pqc_enabled

    @property
    def static_ris(self) -> bool:
        return self.ris_enabled and not self.pqc_enabled

    @property
    def optimized_profile(self) -> bool:
        """Whether the data-plane profile is steered for the user each CPI."""
        return self.dynamic_codes

    def eve_code_exploitation(self, codebook_size: int, learned_fraction: float = 0.0) -> float:
        """Fraction of the cascade the eavesdropper can coherently exploit.

        Known codes (public or static) let her matched-combine the full
        cascade; secret codes reduce her to per-slot guessing plus whatever
        fraction her inference recovered.
        """
        if not self.ris_enabled:
            return 0.0
        if not self.codes_secret:
            return 1.0
        f = min(max(learned_fraction, 0.0), 1.0)
        return f + (1.0 - f) / codebook_size


SCHEME_ORDER = ("B0", "B1", "B2", "B3", "QRTM")

SCHEMES: dict[str, SchemeSpec] = {
    "B0": SchemeSpec("B0", ris_enabled=False, codes_secret=False, pqc_enabled=False, scene_auth_enabled=False),
    "B1": SchemeSpec("B1", ris_enabled=True, codes_secret=False, pqc_enabled=False, scene_auth_enabled=False),
    "B2": SchemeSpec("B2", ris_enabled=True, codes_secret=False, pqc_enabled=True, scene_auth_enabled=False),
    "B3": SchemeSpec("B3", ris_enabled=True, codes_secret=True, pqc_enabled=True, scene_auth_enabled=False),
    "QRTM": SchemeSpec("QRTM", ris_enabled=True, codes_secret=True, pqc_enabled=True, scene_auth_enabled=True),
}


def get_scheme(scheme_id: str) -> SchemeSpec:
    try:
        return SCHEMES[scheme_id]
    except KeyError:
        raise ValidationError([f"unknown scheme {scheme_id!r}; expected one of {SCHEME_ORDER}"]) from None


@dataclass(frozen=True)
class SensingPolicy:
    """How a scheme's sensing chain processes echoes and what attacks it faces."""

    receiver: Literal["coded", "plain"]
    cascade_scale: float          # amplitude factor on the RIS cascade (0 = no RIS)
    hopping: bool                 # fresh pseudorandom schedule per CPI
    attack: Literal["synthesis", "replay"]


def sensing_policy(scheme: SchemeSpec, config: ScenarioConfig) -> SensingPolicy:
    """Sensing-side behavior per scheme.

    Static or code-free scenes face amplitude-true replay (the strongest
    attack available there); code-hopping scenes force the adversary into
    per-slot synthesis. An unmanaged static panel reflects with the
    configured residual gain.
    """
    if not scheme.ris_enabled:
        return SensingPolicy(receiver="plain", cascade_scale=0.0, hopping=False, attack="replay")
    if scheme.static_ris:
        return SensingPolicy(
            receiver="plain",
            cascade_scale=math.sqrt(config.static_panel_gain),
            hopping=False,
            attack="replay",
        )
    return SensingPolicy(receiver="coded", cascade_scale=1.0, hopping=True, attack="synthesis")
