"""Scenario driver: transition simulation, transient metrics, file export, sweeps.

Timeline semantics: the first schedule entry is the initial, fully settled
configuration. Every later entry retargets the surface at its switch time, and
the scenario's snapshot times are offsets from each retarget. A single-entry
schedule simply observes its settled beam at the same offsets.

Every phase matrix that reaches a pattern went through the unit-cell voltage
round-trip (profile -> voltages at the operating temperature -> realized
phases), so tuning-range shortfalls always show up in the patterns.
"""

from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__ as _version
from .design import (
    FeasibilityReport,
    PhaseProfile,
    quadratic_profile,
    realized_phases,
    temperature_aware_voltages,
    wrap_to_range,
)
from .dynamics import PhaseField, advance, phase_field, retarget, snapshot_phases
from .farfield import (
    AngularGrid,
    Direction,
    Pattern,
    nrcs_map,
    peak,
    value_at,
    write_pattern_csv,
)
from .materials import lookup_mixture, response_time
from .scenario import Scenario, ScheduleEntry
from .unitcell import (
    PHASED_ARRAY,
    TWO_PI,
    amplitude_factor,
    insertion_loss,
    max_phase_shift,
    with_l_ps,
)

STEADY_STATE_TAU_MULTIPLE = 10.0
CONVERGENCE_LEVEL = 0.9

SWEEP_AXES = ("lps", "dlc", "temperature", "mixture")


@dataclass(frozen=True)
class AngularCap:
    """Cone of directions within `radius_deg` of a center direction."""

    center: Direction
    radius_deg: float


@dataclass(frozen=True)
class TransientMetrics:
    """Figures of merit for one (or an aggregate of) beam transition(s)."""

    convergence_time_s: float          # nan when not converged
    converged: bool
    peak_transient_interference: float  # max NRCS outside the target caps
    integrated_interference: float      # NRCS * seconds, trapezoidal


@dataclass(frozen=True)
class WindowResult:
    """Everything observed during one transition window."""

    entry_index: int
    switch_time_s: float
    old_target: Direction
    new_target: Direction
    offsets_s: tuple[float, ...]
    patterns: list[Pattern]
    snapshot_phases: list[np.ndarray]
    steady_pattern: Pattern
    caps: tuple[AngularCap, ...]
    metrics: TransientMetrics


@dataclass(frozen=True)
class RunResult:
    """Output of `run`: patterns in chronological order plus metrics and provenance."""

    windows: list[WindowResult]
    patterns: list[Pattern]
    metrics: TransientMetrics
    profiles: list[PhaseProfile]
    feasibility: list[FeasibilityReport]
    realized: list[np.ndarray]
    insertion_loss_db: float
    amplitude: float


def _pattern_unit_vectors(pattern: Pattern):
    if isinstance(pattern.grid, AngularGrid):
        u, v = pattern.grid.mesh_uv()
    else:
        u, v = pattern.grid.mesh_uv()
    w2 = np.clip(1.0 - u * u - v * v, 0.0, None)
    return u, v, np.sqrt(w2)


def masked_interference_max(pattern: Pattern, caps) -> float:
    """Largest NRCS over valid grid points outside all exclusion caps."""
    u, v, w = _pattern_unit_vectors(pattern)
    keep = np.array(pattern.valid)
    for cap in caps:
        cu, cv, cw = cap.center.unit_vector()
        cos_sep = np.clip(u * cu + v * cv + w * cw, -1.0, 1.0)
        keep &= np.degrees(np.arccos(cos_sep)) > cap.radius_deg
    if not np.any(keep):
        raise ValueError("exclusion masks cover the entire visible region")
    return float(np.max(pattern.values[keep]))


def transient_metrics(patterns, offsets_s, new_target: Direction, caps,
                      steady_pattern: Pattern) -> TransientMetrics:
    """Metrics over one transition window.

    convergence = first snapshot offset where the NRCS at the new target
    reaches 90% of its steady-state value (from `steady_pattern`);
    interference = NRCS outside the caps around the old and new targets.
    """
    offsets = [float(t) for t in offsets_s]
    if len(patterns) != len(offsets):
        raise ValueError("patterns and snapshot offsets must align")
    steady_value = value_at(steady_pattern, new_target)
    target_values = [value_at(p, new_target) for p in patterns]
    masked = [masked_interference_max(p, caps) for p in patterns]

    convergence = math.nan
    for offset, val in zip(offsets, target_values):
        if val >= CONVERGENCE_LEVEL * steady_value:
            convergence = offset
            break
    converged = not math.isnan(convergence)
    peak_interference = max(masked) if masked else 0.0
    integrated = float(np.trapezoid(masked, offsets)) if len(masked) > 1 else 0.0
    return TransientMetrics(convergence, converged, peak_interference, integrated)


def _aggregate_metrics(windows: list[WindowResult]) -> TransientMetrics:
    if not windows:
        return TransientMetrics(math.nan, False, 0.0, 0.0)
    converged = all(w.metrics.converged for w in windows)
    convergence = max((w.metrics.convergence_time_s for w in windows),
                      default=math.nan) if converged else math.nan
    return TransientMetrics(
        convergence_time_s=convergence,
        converged=converged,
        peak_transient_interference=max(w.metrics.peak_transient_interference
                                        for w in windows),
        integrated_interference=sum(w.metrics.integrated_interference for w in windows),
    )


def _thread_count() -> int:
    raw = os.environ.get("LCRIS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _realize_schedule(scenario: Scenario):
    """Design each schedule entry's beam and close the loop through the unit cell."""
    profiles, reports, realized = [], [], []
    for entry in scenario.schedule:
        profile = quadratic_profile(scenario.geometry, scenario.incident,
                                    entry.target, entry.beamwidth_deg)
        wrapped, _ = wrap_to_range(profile, TWO_PI)
        volts, report = temperature_aware_voltages(
            wrapped, scenario.unitcell, scenario.mixture,
            scenario.temperature_c, scenario.frequency_ghz, scenario.tmodel)
        phases = realized_phases(volts, scenario.unitcell, scenario.mixture,
                                 scenario.temperature_c, scenario.frequency_ghz,
                                 scenario.tmodel)
        profiles.append(profile)
        reports.append(report)
        realized.append(phases)
    return profiles, reports, realized


def _simulate_window(scenario: Scenario, field: PhaseField, entry_index: int,
                     old_entry: ScheduleEntry, new_entry: ScheduleEntry,
                     amplitudes: np.ndarray, grid: AngularGrid) -> WindowResult:
    offsets = scenario.snapshot_times_s
    phases_list = snapshot_phases(field, offsets, scenario.transient)

    def snapshot_pattern(item):
        offset, phases = item
        return nrcs_map(scenario.geometry, phases, amplitudes, scenario.incident,
                        grid=grid, method="fft", fft_size=scenario.fft_size,
                        time_s=offset)

    items = list(zip(offsets, phases_list))
    threads = _thread_count()
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            patterns = list(pool.map(snapshot_pattern, items))
    else:
        patterns = [snapshot_pattern(item) for item in items]

    steady_offset = max([STEADY_STATE_TAU_MULTIPLE * scenario.transient.tau_off_90,
                         *offsets])
    steady_phases = snapshot_phases(field, [steady_offset], scenario.transient)[0]
    steady_pattern = nrcs_map(scenario.geometry, steady_phases, amplitudes,
                              scenario.incident, grid=grid, method="fft",
                              fft_size=scenario.fft_size, time_s=steady_offset)

    caps = (
        AngularCap(old_entry.target,
                   scenario.mask_radius_beamwidths * old_entry.beamwidth_deg),
        AngularCap(new_entry.target,
                   scenario.mask_radius_beamwidths * new_entry.beamwidth_deg),
    )
    metrics = transient_metrics(patterns, offsets, new_entry.target, caps, steady_pattern)
    return WindowResult(
        entry_index=entry_index, switch_time_s=new_entry.switch_time_s,
        old_target=old_entry.target, new_target=new_entry.target,
        offsets_s=tuple(offsets), patterns=patterns, snapshot_phases=phases_list,
        steady_pattern=steady_pattern, caps=caps, metrics=metrics,
    )


def run(scenario: Scenario) -> RunResult:
    """Simulate the scenario: design, voltage round-trip, transitions, patterns, metrics."""
    profiles, reports, realized = _realize_schedule(scenario)
    amplitude = amplitude_factor(scenario.unitcell)
    amplitudes = np.full(scenario.geometry.shape, amplitude)
    grid = AngularGrid.default(scenario.grid_step_deg)

    windows: list[WindowResult] = []
    field = phase_field(realized[0])
    if len(scenario.schedule) == 1:
        windows.append(_simulate_window(scenario, field, 0, scenario.schedule[0],
                                        scenario.schedule[0], amplitudes, grid))
    else:
        elapsed_to = scenario.schedule[0].switch_time_s
        for index in range(1, len(scenario.schedule)):
            entry = scenario.schedule[index]
            field = advance(field, entry.switch_time_s - elapsed_to, scenario.transient)
            elapsed_to = entry.switch_time_s
            field = retarget(field, realized[index])
            windows.append(_simulate_window(scenario, field, index,
                                            scenario.schedule[index - 1], entry,
                                            amplitudes, grid))

    patterns = [p for w in windows for p in w.patterns]
    return RunResult(
        windows=windows, patterns=patterns, metrics=_aggregate_metrics(windows),
        profiles=profiles, feasibility=reports, realized=realized,
        insertion_loss_db=insertion_loss(scenario.unitcell), amplitude=amplitude,
    )


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.9g}"
    return str(value)


def export(result: RunResult, out_dir, scenario_path=None) -> list[Path]:
    """Write one CSV per snapshot plus metrics and manifest files.

    Re-running on identical input produces byte-identical files (no wall-clock
    anywhere in the outputs).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for window in result.windows:
        for pattern in window.patterns:
            name = f"pattern_w{window.entry_index:02d}_t{pattern.time_s:.6f}s.csv"
            path = out_dir / name
            write_pattern_csv(pattern, path)
            written.append(path)

    lines = []
    m = result.metrics
    lines.append(f"convergence_time_s = {_format(m.convergence_time_s)}")
    lines.append(f"converged = {_format(m.converged)}")
    lines.append(f"peak_transient_interference = {_format(m.peak_transient_interference)}")
    lines.append(f"integrated_interference = {_format(m.integrated_interference)}")
    lines.append(f"insertion_loss_db = {_format(result.insertion_loss_db)}")
    lines.append(f"element_amplitude = {_format(result.amplitude)}")
    lines.append(f"peak_nrcs_cap_lossy = {_format(result.amplitude ** 2)}")
    lines.append("peak_nrcs_cap_lossless = 1")
    for window in result.windows:
        prefix = f"window.{window.entry_index}"
        wm = window.metrics
        lines.append(f"{prefix}.switch_time_s = {_format(window.switch_time_s)}")
        lines.append(f"{prefix}.old_target_deg = {_format(window.old_target.phi_deg)}, "
                     f"{_format(window.old_target.theta_deg)}")
        lines.append(f"{prefix}.new_target_deg = {_format(window.new_target.phi_deg)}, "
                     f"{_format(window.new_target.theta_deg)}")
        lines.append(f"{prefix}.convergence_time_s = {_format(wm.convergence_time_s)}")
        lines.append(f"{prefix}.converged = {_format(wm.converged)}")
        lines.append(f"{prefix}.peak_transient_interference = "
                     f"{_format(wm.peak_transient_interference)}")
        lines.append(f"{prefix}.integrated_interference = "
                     f"{_format(wm.integrated_interference)}")
    for index, report in enumerate(result.feasibility):
        prefix = f"entry.{index}"
        lines.append(f"{prefix}.feasible = {_format(report.feasible)}")
        lines.append(f"{prefix}.clipped_fraction = {_format(report.clipped_fraction)}")
        lines.append(f"{prefix}.available_phase_rad = {_format(report.available_phase)}")
    metrics_path = out_dir / "metrics.txt"
    metrics_path.write_text("\n".join(lines) + "\n")
    written.append(metrics_path)

    manifest = [f"lcris_version = {_version}"]
    if scenario_path is not None:
        scenario_path = Path(scenario_path)
        digest = hashlib.sha256(scenario_path.read_bytes()).hexdigest()
        manifest.append(f"scenario = {scenario_path.name}")
        manifest.append(f"scenario_sha256 = {digest}")
    manifest.append(f"n_patterns = {len(result.patterns)}")
    for path in written:
        if path.name != "metrics.txt":
            manifest.append(f"output = {path.name}")
    manifest.append("output = metrics.txt")
    manifest_path = out_dir / "manifest.txt"
    manifest_path.write_text("\n".join(manifest) + "\n")
    written.append(manifest_path)
    return written


@dataclass(frozen=True)
class SweepRow:
    """One operating point of a tradeoff sweep."""

    value: float | str
    delta_theta_max_rad: float
    insertion_loss_db: float
    tau_off_s: float
    peak_nrcs: float
    feasible: bool


def sweep(scenario: Scenario, axis: str, values) -> list[SweepRow]:
    """Tradeoff table along one design axis: lps (mm), dlc (um), temperature (degC), mixture."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {', '.join(SWEEP_AXES)}, got {axis!r}")
    if axis == "lps" and scenario.unitcell.kind != PHASED_ARRAY:
        raise ValueError("the lps axis applies to phased_array designs only")

    entry = scenario.schedule[0]
    profile = quadratic_profile(scenario.geometry, scenario.incident,
                                entry.target, entry.beamwidth_deg)
    wrapped, _ = wrap_to_range(profile, TWO_PI)
    amplitudes_shape = scenario.geometry.shape

    rows: list[SweepRow] = []
    for value in values:
        design = scenario.unitcell
        mixture = scenario.mixture
        temperature = scenario.temperature_c
        if axis == "lps":
            if float(value) <= 0.0:
                raise ValueError(f"invalid lps value {value!r} (mm, must be > 0)")
            design = with_l_ps(design, float(value))
        elif axis == "dlc":
            if float(value) <= 0.0:
                raise ValueError(f"invalid dlc value {value!r} (um, must be > 0)")
            design = replace(design, d_lc=float(value))
        elif axis == "temperature":
            temperature = float(value)
        else:
            mixture = lookup_mixture(str(value))

        available = max_phase_shift(design, mixture, temperature,
                                    scenario.frequency_ghz, scenario.tmodel)
        loss_db = insertion_loss(design)
        tau = response_time(mixture, design.d_lc)
        volts, report = temperature_aware_voltages(
            wrapped, design, mixture, temperature, scenario.frequency_ghz, scenario.tmodel)
        phases = realized_phases(volts, design, mixture, temperature,
                                 scenario.frequency_ghz, scenario.tmodel)
        amplitudes = np.full(amplitudes_shape, 10.0 ** (-loss_db / 20.0))
        pattern = nrcs_map(scenario.geometry, phases, amplitudes, scenario.incident,
                           grid=AngularGrid.default(scenario.grid_step_deg),
                           method="fft", fft_size=scenario.fft_size)
        _, peak_value = peak(pattern)
        rows.append(SweepRow(
            value=value if axis == "mixture" else float(value),
            delta_theta_max_rad=available,
            insertion_loss_db=loss_db,
            tau_off_s=tau,
            peak_nrcs=peak_value,
            feasible=report.feasible,
        ))
    return rows


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    lines = ["value,delta_theta_max_rad,insertion_loss_db,tau_off_s,peak_nrcs,feasible"]
    for row in rows:
        lines.append(f"{row.value},{row.delta_theta_max_rad:.12g},"
                     f"{row.insertion_loss_db:.12g},{row.tau_off_s:.12g},"
                     f"{row.peak_nrcs:.12g},{_format(row.feasible)}")
    Path(path).write_text("\n".join(lines) + "\n")
