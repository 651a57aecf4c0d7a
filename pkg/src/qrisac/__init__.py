"""Monte Carlo simulator for quantum-resilient RIS-assisted ISAC in UAV corridors.

Subsystems: statistical primitives (numerics), scenario configuration and
geometry, a simplified urban-canyon channel sampler, quantized RIS codebooks
and constrained slot schedules, code-matched scene authentication with exact
GLRT performance forms, physical-layer secrecy metrics, a PQC-emulating
control plane, a Secure ISAC Utility optimizer, and the experiment harness
that reproduces the comparative study.
"""

from .scenario import Geometry, ScenarioConfig, ValidationError, build_scenario, slot_timing

__all__ = ["ScenarioConfig", "Geometry", "ValidationError", "build_scenario", "slot_timing"]
__version__ = "0.1.0"
