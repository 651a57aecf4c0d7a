"""Quantized RIS profiles, codebooks, and per-CPI slot schedules.

Constraint vocabulary used throughout (and in violation reports):
  (Q)  every element phase lies on the B_phi-bit alphabet;
  (S)  at most s_max element-level phase changes between adjacent slots;
  (D1) every dwell run spans at least d_min slots;
  (D2) every dwell run lasts at least t_min seconds;
  (T)  per-slot RIS update timing fits the eta * t_slot budget.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .scenario import ScenarioConfig, ValidationError, slot_timing

__all__ = [
    "RisProfile",
    "Codebook",
    "CodeSchedule",
    "InfeasibleScheduleError",
    "validate_schedule",
    "min_change_sequencing",
    "schedule_from_seed",
]


class InfeasibleScheduleError(ValueError):
    """Raised when a profile sequence cannot be scheduled within the CPI."""


@dataclass(frozen=True)
class RisProfile:
    """Phase-index vector; element m reflects with phase 2*pi*idx[m]/2^b_phi."""

    phase_idx: tuple[int, ...]
    b_phi: int

    @classmethod
    def from_indices(cls, indices, b_phi: int) -> "RisProfile":
        idx = tuple(int(i) for i in indices)
        n = 1 << b_phi
        bad = [i for i in idx if not (0 <= i < n)]
        if bad:
            raise ValidationError([f"(Q): phase index {bad[0]} outside [0, {n}) for b_phi={b_phi}"])
        return cls(idx, b_phi)

    def __len__(self) -> int:
        return len(self.phase_idx)

    @cached_property
    def indices(self) -> np.ndarray:
        return np.asarray(self.phase_idx, dtype=np.int64)

    @cached_property
    def phases(self) -> np.ndarray:
        return 2.0 * np.pi * self.indices / (1 << self.b_phi)

    @cached_property
    def phasors(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    def hamming(self, other: "RisProfile") -> int:
        if len(other) != len(self):
            raise ValidationError([f"profile length mismatch: {len(self)} vs {len(other)}"])
        return int(np.count_nonzero(self.indices != other.indices))


@dataclass(frozen=True)
class Codebook:
    """Ordered set of distinct profiles the scheduler draws from."""

    profiles: tuple[RisProfile, ...]

    def __post_init__(self) -> None:
        if not self.profiles:
            raise ValidationError(["codebook must contain at least one profile"])
        seen = set()
        for p in self.profiles:
            if p.phase_idx in seen:
                raise ValidationError(["codebook contains duplicate profiles"])
            seen.add(p.phase_idx)

    def __len__(self) -> int:
        return len(self.profiles)

    @cached_property
    def phasor_matrix(self) -> np.ndarray:
        """(L, m_elements) unit phasors, one row per profile."""
        return np.stack([p.phasors for p in self.profiles])

    @classmethod
    def random(cls, n_profiles: int, m_elements: int, b_phi: int, rng: np.random.Generator) -> "Codebook":
        """Pseudorandom quantized profiles, deduplicated."""
        out: list[RisProfile] = []
        seen: set[tuple[int, ...]] = set()
        n_phases = 1 << b_phi
        while len(out) < n_profiles:
            idx = tuple(int(i) for i in rng.integers(0, n_phases, size=m_elements))
            if idx in seen:
                continue
            seen.add(idx)
            out.append(RisProfile(idx, b_phi))
        return cls(tuple(out))

    def with_profile(self, profile: RisProfile) -> "Codebook":
        """Codebook extended by one profile (no-op if already present)."""
        if profile.phase_idx in {p.phase_idx for p in self.profiles}:
            return self
        return Codebook(self.profiles + (profile,))


@dataclass(frozen=True)
class CodeSchedule:
    """Per-CPI slot sequence: a profile table plus one table reference per slot.

    Morph intermediates inserted by the sequencer live in the table alongside
    codebook targets, so every slot has a concrete profile.
    """

    profiles: tuple[RisProfile, ...]
    slots: tuple[int, ...]                      # profile table ref per slot
    codebook_refs: tuple[int, ...]              # table refs that are codebook members

    def __post_init__(self) -> None:
        if any(not (0 <= s < len(self.profiles)) for s in self.slots):
            raise ValidationError(["schedule slot references a missing profile"])

    @property
    def m_code(self) -> int:
        return len(self.slots)

    def profile_at(self, slot: int) -> RisProfile:
        return self.profiles[self.slots[slot]]

    @cached_property
    def slot_phase_indices(self) -> np.ndarray:
        """(m_code, m_elements) phase-index matrix."""
        return np.stack([self.profiles[s].indices for s in self.slots])

    @cached_property
    def slot_phasors(self) -> np.ndarray:
        b = self.profiles[0].b_phi
        return np.exp(2j * np.pi * self.slot_phase_indices / (1 << b))

    @cached_property
    def runs(self) -> tuple[tuple[int, int, int], ...]:
        """Run-length encoding: (start_slot, length, profile_ref) per dwell run."""
        out: list[tuple[int, int, int]] = []
        start = 0
        for i in range(1, len(self.slots) + 1):
            if i == len(self.slots) or self.slots[i] != self.slots[start]:
                out.append((start, i - start, self.slots[start]))
                start = i
        return tuple(out)

    @cached_property
    def transition_hamming(self) -> np.ndarray:
        """Element-level switch count entering each slot (0 for slot 0)."""
        idx = self.slot_phase_indices
        out = np.zeros(len(self.slots), dtype=np.int64)
        if len(self.slots) > 1:
            out[1:] = np.count_nonzero(idx[1:] != idx[:-1], axis=1)
        return out

    def to_text(self) -> str:
        """Line-oriented audit format: slot index, profile ref, Hamming delta."""
        lines = [f"# qrisac-schedule v1 m_code={self.m_code} profiles={len(self.profiles)}"]
        deltas = self.transition_hamming
        lines += [f"{i} {ref} {deltas[i]}" for i, ref in enumerate(self.slots)]
        return "\n".join(lines) + "\n"


def validate_schedule(schedule: CodeSchedule, config: ScenarioConfig) -> list[str]:
    """All violated constraints with slot indices; empty list means ok."""
    violations: list[str] = []
    n_phases = config.n_phases

    if schedule.m_code != config.m_code:
        violations.append(f"schedule length {schedule.m_code} != m_code {config.m_code}")
    for ref, prof in enumerate(schedule.profiles):
        if len(prof) != config.m_elements:
            violations.append(f"(Q): profile {ref} has {len(prof)} elements, expected {config.m_elements}")
        elif prof.b_phi != config.b_phi or int(prof.indices.max(initial=0)) >= n_phases:
            violations.append(f"(Q): profile {ref} is not on the {config.b_phi}-bit alphabet")

    deltas = schedule.transition_hamming
    for slot in np.nonzero(deltas > config.s_max)[0]:
        violations.append(f"(S): transition into slot {slot} switches {deltas[slot]} elements > s_max={config.s_max}")

    t_slot = config.t_cpi / config.m_code
    for start, length, _ref in schedule.runs:
        if length < config.d_min:
            violations.append(f"(D1): run at slot {start} dwells {length} slots < d_min={config.d_min}")
        if length * t_slot < config.t_min:
            violations.append(
                f"(D2): run at slot {start} dwells {length * t_slot:.3e} s < t_min={config.t_min:.3e} s"
            )

    _, feasible, budget = slot_timing(config)
    if not feasible:
        violations.append(
            f"(T): per-slot update budget {budget:.3e} s exceeds eta*t_slot={config.eta * t_slot:.3e} s"
        )
    return violations


def _morph_order(diff: np.ndarray, order_key: bytes | None, transition: int) -> list[int]:
    """Element visit order for one morph: ascending by default; with a key, a
    keyed pseudorandom permutation so morph structure is not shared across
    independently scheduled CPIs (a fixed order would let a replayed CPI
    correlate with a fresh one through common intermediate prefixes)."""
    if order_key is None:
        return list(diff)
    ranks = np.frombuffer(
        hashlib.shake_256(order_key + transition.to_bytes(4, "big")).digest(4 * len(diff)),
        dtype=">u4",
    )
    return [int(diff[i]) for i in np.lexsort((diff, ranks))]


def _morph_steps(
    src: RisProfile, dst: RisProfile, s_max: int,
    order_key: bytes | None = None, transition: int = 0,
) -> list[RisProfile]:
    """Intermediate profiles from src toward dst, each step changing at most
    s_max elements along a minimal-Hamming path. Returns intermediates only
    (dst excluded)."""
    diff = np.nonzero(src.indices != dst.indices)[0]
    if len(diff) <= s_max:
        return []
    if s_max == 0:
        raise InfeasibleScheduleError(
            f"transition with Hamming distance {len(diff)} impossible under s_max=0"
        )
    steps: list[RisProfile] = []
    cur = np.array(src.indices)
    remaining = _morph_order(diff, order_key, transition)
    while len(remaining) > s_max:
        take, remaining = remaining[:s_max], remaining[s_max:]
        cur[take] = dst.indices[take]
        steps.append(RisProfile(tuple(int(i) for i in cur), src.b_phi))
    return steps


def min_change_sequencing(
    profiles: list[RisProfile], config: ScenarioConfig, order_key: bytes | None = None
) -> CodeSchedule:
    """Schedule an ordered profile list into exactly m_code slots under (S), (D1), (D2).

    Transitions wider than s_max are decomposed into minimal-Hamming morph
    steps (ascending element order, or a keyed permutation when order_key is
    given); every run (target or intermediate) dwells at least d_min slots and
    t_min seconds; leftover slots extend target dwells round-robin. A raw
    sequence that already fits is returned unchanged.
    """
    if not profiles:
        raise ValidationError(["profile list must be non-empty"])
    t_slot = config.t_cpi / config.m_code
    min_dwell = max(config.d_min, math.ceil(config.t_min / t_slot))

    # Fast path: the raw sequence itself, one slot per entry, already valid.
    if len(profiles) == config.m_code:
        table: list[RisProfile] = []
        refs: list[int] = []
        for p in profiles:
            if p not in table:
                table.append(p)
            refs.append(table.index(p))
        raw = CodeSchedule(tuple(table), tuple(refs), tuple(range(len(table))))
        if not [v for v in validate_schedule(raw, config) if v.startswith(("(S)", "(D1)", "(D2)"))]:
            return raw

    # Expand targets with morph intermediates, then assign dwells.
    table = []
    codebook_refs: list[int] = []

    def ref_of(p: RisProfile, is_target: bool) -> int:
        for i, q in enumerate(table):
            if q.phase_idx == p.phase_idx:
                if is_target and i not in codebook_refs:
                    codebook_refs.append(i)
                return i
        table.append(p)
        if is_target:
            codebook_refs.append(len(table) - 1)
        return len(table) - 1

    entries: list[tuple[int, bool]] = [(ref_of(profiles[0], True), True)]
    for j, (prev, nxt) in enumerate(zip(profiles, profiles[1:])):
        for inter in _morph_steps(prev, nxt, config.s_max, order_key, j):
            entries.append((ref_of(inter, False), False))
        entries.append((ref_of(nxt, True), True))

    # Merge adjacent duplicates (repeated targets extend one run).
    merged: list[tuple[int, bool]] = []
    dwells: list[int] = []
    for ref, is_target in entries:
        if merged and merged[-1][0] == ref:
            dwells[-1] += min_dwell
            merged[-1] = (ref, merged[-1][1] or is_target)
        else:
            merged.append((ref, is_target))
            dwells.append(min_dwell)

    total = sum(dwells)
    if total > config.m_code:
        raise InfeasibleScheduleError(
            f"sequence needs {total} slots ({len(merged)} runs at dwell >= {min_dwell}) "
            f"but the CPI has m_code={config.m_code}"
        )

    # Pad remaining slots onto target runs round-robin (lowest run index first).
    spare = config.m_code - total
    target_positions = [i for i, (_r, is_t) in enumerate(merged) if is_t] or list(range(len(merged)))
    i = 0
    while spare > 0:
        dwells[target_positions[i % len(target_positions)]] += 1
        spare -= 1
        i += 1

    slots: list[int] = []
    for (ref, _is_t), d in zip(merged, dwells):
        slots.extend([ref] * d)
    return CodeSchedule(tuple(table), tuple(slots), tuple(sorted(codebook_refs)))


def schedule_from_seed(
    seed: bytes, codebook: Codebook, config: ScenarioConfig, cpi_index: int = 0
) -> CodeSchedule:
    """Deterministic pseudorandom schedule from a keyed expansion of the seed.

    A SHAKE-256 stream keyed by (seed, cpi_index) selects codebook targets;
    targets are appended while the morph-and-dwell budget still fits the CPI,
    then min_change_sequencing lays out the slots.
    """
    if len(seed) < 32:
        raise ValidationError([f"schedule seed must be >= 32 bytes, got {len(seed)}"])
    t_slot = config.t_cpi / config.m_code
    min_dwell = max(config.d_min, math.ceil(config.t_min / t_slot))

    xof = hashlib.shake_256(seed + int(cpi_index).to_bytes(8, "big"))
    max_draws = max(1, config.m_code)
    words = np.frombuffer(xof.digest(4 * max_draws), dtype=">u4")

    targets: list[RisProfile] = []
    used = 0
    for w in words:
        cand = codebook.profiles[int(w) % len(codebook)]
        if targets:
            dist = targets[-1].hamming(cand)
            if dist == 0:
                extra = min_dwell
            else:
                n_inter = max(0, math.ceil(dist / config.s_max) - 1) if config.s_max else 0
                if config.s_max == 0 and dist > 0:
                    continue
                extra = (n_inter + 1) * min_dwell
        else:
            extra = min_dwell
        if used + extra > config.m_code:
            break
        targets.append(cand)
        used += extra
    if not targets:
        targets = [codebook.profiles[int(words[0]) % len(codebook)]]
    return min_change_sequencing(targets, config, order_key=xof.digest(32))
