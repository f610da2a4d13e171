"""Per-element phase trajectories with asymmetric rise/fall time constants.

Transitions follow a single exponential with rate ln(10)/tau_90, so exactly 90%
of a step is complete at t = tau_90. Rising phases (voltage-driven alignment)
use tau_on_90; falling phases (mechanical relaxation) use tau_off_90. Every
evaluation is closed-form from the state at the last retarget, so advancing in
substeps accumulates no error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN_10 = math.log(10.0)


@dataclass(frozen=True)
class TransientParams:
    """90%-completion times for the two switching directions."""

    tau_on_90: float   # s, voltage-driven (rising phase)
    tau_off_90: float  # s, relaxation (falling phase)
    model: str = "exponential"

    def __post_init__(self) -> None:
        if not 0.0 < self.tau_on_90 <= self.tau_off_90:
            raise ValueError(
                f"need 0 < tau_on_90 <= tau_off_90, got ({self.tau_on_90}, {self.tau_off_90})"
            )
        if self.model != "exponential":
            raise ValueError(f"unsupported transition model {self.model!r}")


@dataclass(frozen=True)
class PhaseField:
    """Per-element phase state between retargets. Treat instances as immutable."""

    current: np.ndarray           # rad
    target: np.ndarray            # rad
    transition_start: np.ndarray  # rad, state at the last retarget
    elapsed: float = 0.0          # s since the last retarget

    @property
    def shape(self) -> tuple[int, int]:
        return self.current.shape


def phase_field(initial) -> PhaseField:
    """Field at rest: current, target, and start all equal to `initial`."""
    arr = np.array(initial, dtype=float)
    return PhaseField(current=arr, target=arr.copy(), transition_start=arr.copy(), elapsed=0.0)


def retarget(field: PhaseField, new_target) -> PhaseField:
    """Begin a transition from the instantaneous phases towards `new_target`."""
    new_target = np.asarray(new_target, dtype=float)
    if new_target.shape != field.current.shape:
        raise ValueError(
            f"target shape {new_target.shape} does not match field shape {field.current.shape}"
        )
    start = field.current.copy()
    return PhaseField(current=start.copy(), target=new_target.copy(),
                      transition_start=start, elapsed=0.0)


def _phases_at(field: PhaseField, t: float, params: TransientParams) -> np.ndarray:
    tau = np.where(field.target > field.transition_start, params.tau_on_90, params.tau_off_90)
    decay = np.exp(-LN_10 * t / tau)
    return field.target + (field.transition_start - field.target) * decay


def advance(field: PhaseField, dt: float, params: TransientParams) -> PhaseField:
    """Field `dt` seconds later. advance(dt1) then advance(dt2) == advance(dt1+dt2) exactly."""
    if dt < 0.0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    elapsed = field.elapsed + dt
    return PhaseField(current=_phases_at(field, elapsed, params),
                      target=field.target, transition_start=field.transition_start,
                      elapsed=elapsed)


def snapshot_phases(field: PhaseField, times, params: TransientParams) -> list[np.ndarray]:
    """Closed-form phase matrices at each time (seconds since the last retarget)."""
    times = [float(t) for t in times]
    if any(t < 0.0 for t in times):
        raise ValueError("snapshot times must be >= 0 relative to the last retarget")
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("snapshot times must be sorted ascending")
    return [_phases_at(field, t, params) for t in times]
