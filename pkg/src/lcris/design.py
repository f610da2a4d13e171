"""Phase-profile designers: specular, narrow steering, quadratic wide beams.

Profiles are produced unwrapped (as designed); `wrap_to_range` reduces them
modulo 2*pi and clips whatever the unit cell cannot reach at the operating
temperature/frequency, reporting the affected share of elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .farfield import (
    ArrayGeometry,
    Direction,
    direction_cosines,
    half_power_width_from_cut,
    nrcs_points,
)
from .materials import LcMixture, TemperatureModel
from .unitcell import TWO_PI, UnitCellDesign, max_phase_shift, phase_shift, voltages_for_phases

WIDTH_TOLERANCE_DEG = 0.25
MAX_CALIBRATION_ITERATIONS = 50


@dataclass(frozen=True)
class PhaseProfile:
    """Per-element phase design in radians."""

    phases: np.ndarray
    wrapped: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "phases", np.asarray(self.phases, dtype=float))


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of fitting a profile into the available tuning range."""

    feasible: bool
    max_required_phase: float  # rad, after modulo-2*pi reduction
    available_phase: float     # rad, tuning range at the queried (T, f)
    clipped_fraction: float


def specular_profile(geom: ArrayGeometry) -> PhaseProfile:
    """All-zero phases: plain mirror reflection."""
    return PhaseProfile(np.zeros(geom.shape), wrapped=True)


def steering_profile(geom: ArrayGeometry, incident: Direction, target: Direction) -> PhaseProfile:
    """Linear profile compensating the path difference from `incident` into `target`."""
    k = geom.wavenumber
    x = geom.x_positions()
    y = geom.y_positions()
    psi = -k * (x[:, None] * (target.u + incident.u) + y[None, :] * (target.v + incident.v))
    return PhaseProfile(psi, wrapped=False)


def cut_beamwidth(geom: ArrayGeometry, phases: np.ndarray, incident: Direction,
                  target: Direction, request_deg: float, step_deg: float = 0.05) -> float:
    """Mean half-power width (deg) of fine phi/theta cuts through the target.

    Continuous-angle counterpart of `half_power_beamwidth` (same crossing and
    ripple-bridging rules, finer sampling); the cut span widens automatically
    when the half-power region reaches its edge.
    """
    amplitudes = np.ones(geom.shape)
    span = min(90.0, max(4.0, 1.5 * request_deg + 4.0))
    step = max(step_deg, request_deg / 400.0)
    while True:
        widths = []
        truncated = False
        for axis in ("phi", "theta"):
            center = target.phi_deg if axis == "phi" else target.theta_deg
            angles = np.arange(max(-90.0, center - span),
                               min(90.0, center + span) + 0.5 * step, step)
            if axis == "phi":
                u, v = direction_cosines(angles, np.full_like(angles, target.theta_deg))
            else:
                u, v = direction_cosines(np.full_like(angles, target.phi_deg), angles)
            vals = nrcs_points(geom, phases, amplitudes, incident, u, v)
            width, trunc = half_power_width_from_cut(angles, vals)
            widths.append(width)
            truncated = truncated or trunc
        if truncated and span < 90.0:
            span = min(90.0, span * 2.0)
            continue
        return 0.5 * (widths[0] + widths[1])


def quadratic_profile(geom: ArrayGeometry, incident: Direction, target: Direction,
                      beamwidth_deg: float,
                      width_tolerance_deg: float = WIDTH_TOLERANCE_DEG) -> PhaseProfile:
    """Steering profile plus a quadratic defocus term widening the beam.

    The defocus coefficient g = k/(2F) (virtual focal length F) starts from
    F = D/beta and is calibrated by bisection against the measured half-power
    width until it is within the tolerance of the request. The sampled width
    makes small jumps where ripple shoulders cross the half-power line, so the
    loop keeps the best candidate seen and, if needed, bisects the straddling
    pair of evaluations to land inside a narrow in-tolerance window.
    """
    if beamwidth_deg <= 0.0:
        raise ValueError(f"beamwidth request must be positive, got {beamwidth_deg}")
    base = steering_profile(geom, incident, target).phases
    x = geom.x_positions()
    y = geom.y_positions()
    r2 = x[:, None] ** 2 + y[None, :] ** 2
    k = geom.wavenumber

    best = {"err": math.inf, "g": 0.0}
    evaluations: list[tuple[float, float]] = []

    def width_of(g: float) -> float:
        width = cut_beamwidth(geom, base + g * r2, incident, target, beamwidth_deg)
        err = abs(width - beamwidth_deg)
        evaluations.append((g, width))
        if err < best["err"]:
            best["err"] = err
            best["g"] = g
        return width

    def done() -> bool:
        return best["err"] <= width_tolerance_deg

    flat_width = width_of(0.0)
    if beamwidth_deg < flat_width - width_tolerance_deg:
        raise ValueError(
            f"requested width {beamwidth_deg} deg is below the diffraction-limited width "
            f"{flat_width:.3f} deg of this aperture"
        )
    if abs(flat_width - beamwidth_deg) <= width_tolerance_deg:
        return PhaseProfile(base, wrapped=False)

    aperture = geom.n_rows * geom.spacing
    g_hi = k * math.radians(beamwidth_deg) / (2.0 * aperture)
    g_lo = 0.0
    for _ in range(30):
        if width_of(g_hi) >= beamwidth_deg:
            break
        g_lo = g_hi
        g_hi *= 2.0
    else:
        raise RuntimeError("could not bracket the requested beamwidth")

    for _ in range(MAX_CALIBRATION_ITERATIONS):
        if done():
            break
        g = 0.5 * (g_lo + g_hi)
        if width_of(g) < beamwidth_deg:
            g_lo = g
        else:
            g_hi = g

    if not done():
        # home in on the jump: bisect between the closest straddling evaluations
        under = max((gw for gw in evaluations if gw[1] < beamwidth_deg),
                    key=lambda gw: gw[1], default=None)
        over = min((gw for gw in evaluations if gw[1] >= beamwidth_deg),
                   key=lambda gw: gw[1], default=None)
        if under is not None and over is not None:
            a, b = under[0], over[0]
            for _ in range(MAX_CALIBRATION_ITERATIONS):
                if done() or abs(b - a) <= 1e-9 * max(abs(a), abs(b)):
                    break
                g = 0.5 * (a + b)
                if width_of(g) < beamwidth_deg:
                    a = g
                else:
                    b = g
    if done():
        return PhaseProfile(base + best["g"] * r2, wrapped=False)
    raise RuntimeError(
        f"beamwidth calibration did not reach {beamwidth_deg} deg "
        f"+/- {width_tolerance_deg} deg (best miss {best['err']:.3f} deg)"
    )


def wrap_to_range(profile: PhaseProfile, available: float) -> tuple[PhaseProfile, FeasibilityReport]:
    """Reduce modulo 2*pi, then clip values above the available tuning range.

    available >= 2*pi never clips; available == 0 clips everything to the
    relaxed state (the saturated-shifter behaviour).
    """
    if available < 0.0:
        raise ValueError(f"available phase range must be >= 0, got {available}")
    wrapped = np.mod(profile.phases, TWO_PI)
    max_required = float(np.max(wrapped)) if wrapped.size else 0.0
    if available >= TWO_PI:
        report = FeasibilityReport(True, max_required, float(available), 0.0)
        return PhaseProfile(wrapped, wrapped=True), report
    over = wrapped > available
    clipped_fraction = float(np.mean(over)) if wrapped.size else 0.0
    out = np.where(over, available, wrapped)
    report = FeasibilityReport(clipped_fraction == 0.0, max_required,
                               float(available), clipped_fraction)
    return PhaseProfile(out, wrapped=True), report


def quantize(profile: PhaseProfile, bits: int) -> PhaseProfile:
    """Snap each phase to the nearest of 2**bits uniform levels in [0, 2*pi); ties go down."""
    if not profile.wrapped:
        raise ValueError("quantize requires a wrapped profile")
    if bits < 1:
        raise ValueError(f"bits must be >= 1, got {bits}")
    n_levels = 2 ** bits
    step = TWO_PI / n_levels
    scaled = profile.phases / step
    nearest = np.floor(scaled + 0.5)
    halfway = (scaled - np.floor(scaled)) == 0.5
    nearest = np.where(halfway, np.floor(scaled), nearest)
    return PhaseProfile((nearest.astype(int) % n_levels) * step, wrapped=True)


def temperature_aware_voltages(profile: PhaseProfile, design: UnitCellDesign, mix: LcMixture,
                               temperature: float, frequency: float, tmodel: TemperatureModel
                               ) -> tuple[np.ndarray, FeasibilityReport]:
    """Bias voltages realizing a wrapped profile at the given operating point.

    The profile is first fitted into the tuning range available at
    (temperature, frequency); clipping shows up in the report and in the
    realized phases.
    """
    if not profile.wrapped:
        raise ValueError("temperature_aware_voltages requires a wrapped profile")
    available = max_phase_shift(design, mix, temperature, frequency, tmodel)
    fitted, report = wrap_to_range(profile, available)
    volts = voltages_for_phases(design, mix, temperature, frequency, tmodel, fitted.phases)
    return volts, report


def realized_phases(volts: np.ndarray, design: UnitCellDesign, mix: LcMixture,
                    temperature: float, frequency: float, tmodel: TemperatureModel) -> np.ndarray:
    """Phases the unit cells actually produce for a voltage matrix."""
    return np.asarray(phase_shift(design, mix, volts, temperature, frequency, tmodel))
