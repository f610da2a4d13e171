"""Unit-cell voltage response: effective permittivity, phase shift, insertion loss, inversion.

Two implementation variants are modeled:

* ``phased_array`` — a reflectively terminated transmission-line phase shifter of
  length ``l_ps`` (mm); phase accumulates over the two-way propagation,
  theta(v) = 2 * (2*pi*f/c) * l_ps * (sqrt(eps_eff(v)) - sqrt(eps_perp)).
* ``reflect_array`` — a resonant cavity cell; phase response is the normalized
  saturation curve scaled to ``max_phase_reflect`` and to the anisotropy still
  available at the operating temperature.

The bias saturation curve S(V) is 0 below the threshold voltage and
(1 - exp(-(V - v_th)/v_slope)) / (1 - exp(-(v_max - v_th)/v_slope)) above it,
i.e. exactly 0 at the threshold and exactly 1 at v_max.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .constants import SPEED_OF_LIGHT
from .materials import (
    LcMixture,
    TemperatureModel,
    delta_epsilon,
    delta_epsilon_at_temperature,
)

REFLECT_ARRAY = "reflect_array"
PHASED_ARRAY = "phased_array"

TWO_PI = 2.0 * math.pi

# Paper-anchored defaults for the phased-array insertion loss: 4.5 dB for the
# line length giving a full 360 deg cycle at 28 GHz.
ANCHOR_LOSS_DB = 4.5
ANCHOR_FREQUENCY_GHZ = 28.0
REFLECT_LOSS_DEFAULT_DB = 8.0
REFLECT_LOSS_RANGE_DB = (6.0, 10.0)

PHASE_TOLERANCE = 1e-9  # rad, voltage_for_phase convergence
_BISECTION_STEPS = 64


class PhaseUnreachableError(ValueError):
    """Target phase exceeds the tuning range at the queried temperature/frequency."""


class InsertionLossRangeWarning(UserWarning):
    """Configured reflect-array loss lies outside the expected 6..10 dB band."""


@dataclass(frozen=True)
class UnitCellDesign:
    """Geometry and bias-curve parameters of one RIS element."""

    kind: str                  # "reflect_array" | "phased_array"
    d_lc: float                # LC layer thickness, um
    design_frequency: float = ANCHOR_FREQUENCY_GHZ  # GHz, sizing frequency
    l_ps: float | None = None  # phase-shifter length, mm (phased_array only)
    v_threshold: float = 1.0   # V
    v_mid: float = 3.0         # V
    v_max: float = 10.0        # V
    v_slope: float = 2.0       # V
    insertion_loss_anchor_db: float | None = None   # PA: dB at anchor length; RA: configured dB
    insertion_loss_anchor_lps: float | None = None  # mm (phased_array only)
    max_phase_reflect: float = TWO_PI               # rad (reflect_array only)

    def __post_init__(self) -> None:
        if self.kind not in (REFLECT_ARRAY, PHASED_ARRAY):
            raise ValueError(f"kind must be {REFLECT_ARRAY!r} or {PHASED_ARRAY!r}, got {self.kind!r}")
        if self.d_lc <= 0.0:
            raise ValueError(f"d_lc must be positive, got {self.d_lc}")
        if self.design_frequency <= 0.0:
            raise ValueError(f"design_frequency must be positive, got {self.design_frequency}")
        if not 0.0 <= self.v_threshold < self.v_mid < self.v_max:
            raise ValueError(
                f"need 0 <= v_threshold < v_mid < v_max, got "
                f"({self.v_threshold}, {self.v_mid}, {self.v_max})"
            )
        if self.v_slope <= 0.0:
            raise ValueError(f"v_slope must be positive, got {self.v_slope}")
        if self.kind == PHASED_ARRAY:
            if self.l_ps is None or self.l_ps <= 0.0:
                raise ValueError("phased_array design requires l_ps > 0 (mm)")
            if self.insertion_loss_anchor_db is None:
                object.__setattr__(self, "insertion_loss_anchor_db", ANCHOR_LOSS_DB)
        else:
            if not 0.0 < self.max_phase_reflect <= TWO_PI:
                raise ValueError(
                    f"max_phase_reflect must lie in (0, 2*pi], got {self.max_phase_reflect}"
                )
            if self.insertion_loss_anchor_db is None:
                object.__setattr__(self, "insertion_loss_anchor_db", REFLECT_LOSS_DEFAULT_DB)
        if self.insertion_loss_anchor_db < 0.0:
            raise ValueError(f"insertion loss must be >= 0 dB, got {self.insertion_loss_anchor_db}")
        if self.insertion_loss_anchor_lps is not None and self.insertion_loss_anchor_lps <= 0.0:
            raise ValueError("insertion_loss_anchor_lps must be positive (mm)")


def saturation(design: UnitCellDesign, v):
    """Normalized tuning curve S(V) in [0, 1]; accepts scalars or arrays."""
    arr = np.asarray(v, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > design.v_max):
        raise ValueError(f"voltage out of range [0, {design.v_max}] V")
    denom = 1.0 - math.exp(-(design.v_max - design.v_threshold) / design.v_slope)
    with np.errstate(over="ignore"):
        rise = (1.0 - np.exp(-(arr - design.v_threshold) / design.v_slope)) / denom
    out = np.where(arr <= design.v_threshold, 0.0, rise)
    if np.ndim(v) == 0:
        return float(out)
    return out


def _anisotropy_scale(mix: LcMixture, temperature: float, tmodel: TemperatureModel) -> float:
    """delta_eps(T) / delta_eps(T_ref); 0 for a degenerate mixture."""
    contrast = delta_epsilon(mix)
    if contrast == 0.0:
        return 0.0
    return delta_epsilon_at_temperature(mix, temperature, tmodel) / contrast


def effective_permittivity(mix: LcMixture, v, temperature: float,
                           design: UnitCellDesign, tmodel: TemperatureModel):
    """eps_perp + delta_eps(T) * S(v): relaxed permittivity at v=0, saturated at v_max."""
    contrast = delta_epsilon_at_temperature(mix, temperature, tmodel)
    return mix.eps_perp + contrast * saturation(design, v)


def phase_shift(design: UnitCellDesign, mix: LcMixture, v, temperature: float,
                frequency: float, tmodel: TemperatureModel):
    """Reflection phase in radians at bias v; 0 in the relaxed state."""
    if frequency <= 0.0:
        raise ValueError(f"frequency must be positive, got {frequency} GHz")
    sat = saturation(design, v)
    if design.kind == PHASED_ARRAY:
        contrast = delta_epsilon_at_temperature(mix, temperature, tmodel)
        eps_eff = mix.eps_perp + contrast * np.asarray(sat)
        k0 = TWO_PI * frequency * 1e9 / SPEED_OF_LIGHT
        factor = 2.0 * k0 * 1e-3 * (np.sqrt(eps_eff) - math.sqrt(mix.eps_perp))
        out = design.l_ps * factor
    else:
        out = design.max_phase_reflect * _anisotropy_scale(mix, temperature, tmodel) * np.asarray(sat)
    if np.ndim(v) == 0:
        return float(out)
    return out


def max_phase_shift(design: UnitCellDesign, mix: LcMixture, temperature: float,
                    frequency: float, tmodel: TemperatureModel) -> float:
    """Tuning range: phase shift at v_max. Shrinks towards 0 at the clearing point."""
    return phase_shift(design, mix, design.v_max, temperature, frequency, tmodel)


def insertion_loss(design: UnitCellDesign) -> float:
    """Per-element insertion loss in dB (state-independent in this model)."""
    if design.kind == REFLECT_ARRAY:
        low, high = REFLECT_LOSS_RANGE_DB
        if not low <= design.insertion_loss_anchor_db <= high:
            warnings.warn(
                f"reflect-array insertion loss {design.insertion_loss_anchor_db} dB is outside "
                f"the expected {low}..{high} dB band",
                InsertionLossRangeWarning,
                stacklevel=2,
            )
        return design.insertion_loss_anchor_db
    if design.insertion_loss_anchor_lps is None:
        raise ValueError(
            "phased_array insertion loss needs an anchor length; construct the design with "
            "full_cycle_design() or set insertion_loss_anchor_lps"
        )
    return design.insertion_loss_anchor_db * (design.l_ps / design.insertion_loss_anchor_lps)


def amplitude_factor(design: UnitCellDesign) -> float:
    """Linear reflection amplitude 10**(-L_ins/20)."""
    return 10.0 ** (-insertion_loss(design) / 20.0)


def lps_for_full_cycle(mix: LcMixture, frequency: float, temperature: float,
                       tmodel: TemperatureModel) -> float:
    """Phase-shifter length (mm) giving a full 2*pi cycle at (frequency GHz, temperature)."""
    contrast = delta_epsilon_at_temperature(mix, temperature, tmodel)
    if contrast <= 0.0:
        raise ValueError(
            f"{mix.name} has no tunability at {temperature} degC (at or above the clearing point)"
        )
    droot = math.sqrt(mix.eps_perp + contrast) - math.sqrt(mix.eps_perp)
    return SPEED_OF_LIGHT / (2.0 * frequency * 1e9 * droot) * 1e3


def full_cycle_design(mix: LcMixture, *, frequency: float = ANCHOR_FREQUENCY_GHZ,
                      temperature: float | None = None,
                      tmodel: TemperatureModel | None = None,
                      d_lc: float = 4.6, **kwargs) -> UnitCellDesign:
    """Phased-array design sized for full 360 deg tunability at (frequency, temperature).

    The insertion-loss anchor is pinned to 4.5 dB at the full-cycle length for
    28 GHz and the reference temperature, so designs sized for hotter operation
    or lower frequency come out longer and lossier.
    """
    tmodel = tmodel or TemperatureModel()
    if temperature is None:
        temperature = tmodel.reference_temperature
    l_ps = lps_for_full_cycle(mix, frequency, temperature, tmodel)
    anchor_lps = lps_for_full_cycle(mix, ANCHOR_FREQUENCY_GHZ,
                                    tmodel.reference_temperature, tmodel)
    return UnitCellDesign(
        kind=PHASED_ARRAY,
        d_lc=d_lc,
        design_frequency=frequency,
        l_ps=l_ps,
        insertion_loss_anchor_db=kwargs.pop("insertion_loss_anchor_db", ANCHOR_LOSS_DB),
        insertion_loss_anchor_lps=anchor_lps,
        **kwargs,
    )


def with_l_ps(design: UnitCellDesign, l_ps: float) -> UnitCellDesign:
    """Copy of a phased-array design with a different line length (anchor unchanged)."""
    if design.kind != PHASED_ARRAY:
        raise ValueError("l_ps applies to phased_array designs only")
    return replace(design, l_ps=l_ps)


def voltages_for_phases(design: UnitCellDesign, mix: LcMixture, temperature: float,
                        frequency: float, tmodel: TemperatureModel, targets) -> np.ndarray:
    """Element-wise inverse of the phase curve by bisection; |phase(v) - target| <= 1e-9 rad."""
    targets = np.asarray(targets, dtype=float)
    available = max_phase_shift(design, mix, temperature, frequency, tmodel)
    if np.any(targets < -PHASE_TOLERANCE):
        raise ValueError("target phases must be non-negative")
    slack = 1e-12 * max(1.0, available)
    if np.any(targets > available + slack):
        worst = float(np.max(targets))
        raise PhaseUnreachableError(
            f"target phase {worst:.6f} rad exceeds the available range "
            f"{available:.6f} rad at {temperature} degC / {frequency} GHz"
        )
    clipped = np.clip(targets, 0.0, available)
    lo = np.zeros_like(clipped)
    hi = np.full_like(clipped, design.v_max)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        below = phase_shift(design, mix, mid, temperature, frequency, tmodel) < clipped
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    volts = 0.5 * (lo + hi)
    volts = np.where(clipped <= 0.0, 0.0, volts)
    volts = np.where(clipped >= available, design.v_max, volts)
    return volts


def voltage_for_phase(design: UnitCellDesign, mix: LcMixture, temperature: float,
                      frequency: float, tmodel: TemperatureModel, target_phase: float) -> float:
    """Bias voltage realizing `target_phase`; 0 on the below-threshold plateau."""
    return float(voltages_for_phases(design, mix, temperature, frequency, tmodel,
                                     np.asarray(target_phase, dtype=float)))
