"""Scenario files: flat `key = value` text with dotted sections, validated at parse time.

Grammar (see README for the full key reference):

* one `key = value` pair per line; `#` starts a comment; blank lines ignored
* dotted keys form sections (`geometry.n_rows`, `schedule.0.phi_deg`, ...)
* values are numbers, bare strings, or comma-separated number lists

Every invariant is checked during parsing and violations raise `ScenarioError`
with the offending key and line number.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .farfield import ArrayGeometry, Direction
from .dynamics import TransientParams
from .materials import (
    LcMixture,
    TemperatureModel,
    UnknownMixtureError,
    lookup_mixture,
)
from .unitcell import (
    ANCHOR_FREQUENCY_GHZ,
    PHASED_ARRAY,
    REFLECT_ARRAY,
    TWO_PI,
    UnitCellDesign,
    lps_for_full_cycle,
)


class ScenarioError(ValueError):
    """Scenario file is missing, malformed, or violates an invariant."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        prefix = ""
        if key is not None:
            prefix += f"key {key!r}"
        if line is not None:
            prefix += f" (line {line})"
        super().__init__(f"{prefix}: {message}" if prefix else message)


@dataclass(frozen=True)
class ScheduleEntry:
    """One reconfiguration event: when, towards where, and how wide a beam."""

    switch_time_s: float
    target: Direction
    beamwidth_deg: float


@dataclass(frozen=True)
class Scenario:
    """Fully validated simulation input."""

    geometry: ArrayGeometry
    unitcell: UnitCellDesign
    mixture: LcMixture
    temperature_c: float
    frequency_ghz: float
    incident: Direction
    schedule: tuple[ScheduleEntry, ...]
    snapshot_times_s: tuple[float, ...]
    transient: TransientParams
    tmodel: TemperatureModel
    grid_step_deg: float = 1.0
    fft_size: int = 1024
    mask_radius_beamwidths: float = 2.0
    seed: int = 0


_REQUIRED_KEYS = (
    "geometry.n_rows", "geometry.n_cols",
    "unitcell.kind", "unitcell.d_lc",
    "mixture", "temperature_c", "frequency_ghz",
    "incident.phi_deg", "incident.theta_deg",
    "schedule.0.switch_time_s", "schedule.0.phi_deg", "schedule.0.theta_deg",
    "schedule.0.beamwidth_deg",
    "snapshot_times_s",
    "transient.tau_on_90_s", "transient.tau_off_90_s",
)


def _read_pairs(path: Path) -> dict[str, tuple[str, int]]:
    pairs: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ScenarioError(f"expected 'key = value', got {stripped!r}", line=lineno)
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.split("#", 1)[0].strip()
        if not key:
            raise ScenarioError("empty key", line=lineno)
        if key in pairs:
            raise ScenarioError("duplicate key", key=key, line=lineno)
        pairs[key] = (value, lineno)
    return pairs


class _Fields:
    """Typed access to the raw key/value pairs with consumption tracking."""

    def __init__(self, pairs: dict[str, tuple[str, int]]):
        self.pairs = pairs
        self.used: set[str] = set()

    def has(self, key: str) -> bool:
        return key in self.pairs

    def _raw(self, key: str) -> tuple[str, int]:
        self.used.add(key)
        return self.pairs[key]

    def string(self, key: str, default: str | None = None) -> str:
        if key not in self.pairs:
            if default is None:
                raise ScenarioError("missing required key", key=key)
            return default
        return self._raw(key)[0]

    def number(self, key: str, default: float | None = None) -> float:
        if key not in self.pairs:
            if default is None:
                raise ScenarioError("missing required key", key=key)
            return default
        value, line = self._raw(key)
        try:
            return float(value)
        except ValueError:
            raise ScenarioError(f"expected a number, got {value!r}", key=key, line=line) from None

    def integer(self, key: str, default: int | None = None) -> int:
        value = self.number(key, default if default is None else float(default))
        if value != int(value):
            line = self.line_of(key)
            raise ScenarioError(f"expected an integer, got {value}", key=key, line=line)
        return int(value)

    def number_list(self, key: str) -> list[float]:
        value, line = self._raw(key)
        if not value:
            raise ScenarioError("expected a comma-separated number list", key=key, line=line)
        try:
            return [float(item) for item in value.split(",")]
        except ValueError:
            raise ScenarioError(f"expected a comma-separated number list, got {value!r}",
                                key=key, line=line) from None

    def line_of(self, key: str) -> int | None:
        return self.pairs[key][1] if key in self.pairs else None


def _direction(fields: _Fields, prefix: str) -> Direction:
    phi = fields.number(f"{prefix}.phi_deg")
    theta = fields.number(f"{prefix}.theta_deg")
    try:
        return Direction(phi, theta)
    except ValueError as exc:
        raise ScenarioError(str(exc), key=f"{prefix}.phi_deg",
                            line=fields.line_of(f"{prefix}.phi_deg")) from None


def parse_scenario(path) -> Scenario:
    """Parse and fully validate a scenario file."""
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    pairs = _read_pairs(path)
    missing = [key for key in _REQUIRED_KEYS if key not in pairs]
    if missing:
        raise ScenarioError(f"missing required keys: {', '.join(missing)}")
    fields = _Fields(pairs)

    mixture_name = fields.string("mixture")
    try:
        mixture = lookup_mixture(mixture_name)
    except UnknownMixtureError as exc:
        raise ScenarioError(str(exc), key="mixture", line=fields.line_of("mixture")) from None

    temperature_c = fields.number("temperature_c")
    frequency_ghz = fields.number("frequency_ghz")
    if frequency_ghz <= 0.0:
        raise ScenarioError("frequency must be positive", key="frequency_ghz",
                            line=fields.line_of("frequency_ghz"))

    try:
        tmodel = TemperatureModel(
            reference_temperature=fields.number("temperature_model.reference_c", 20.0),
            haller_exponent=fields.number("temperature_model.haller_exponent", 0.2),
        )
    except ValueError as exc:
        raise ScenarioError(str(exc), key="temperature_model.haller_exponent") from None
    if tmodel.reference_temperature >= mixture.clearing_point:
        raise ScenarioError(
            f"reference temperature must be below the clearing point of {mixture.name} "
            f"({mixture.clearing_point} degC)",
            key="temperature_model.reference_c",
        )

    geometry = _parse_geometry(fields, frequency_ghz)
    unitcell = _parse_unitcell(fields, mixture, temperature_c, tmodel)
    incident = _direction(fields, "incident")
    schedule = _parse_schedule(fields)
    snapshots = _parse_snapshots(fields, schedule)
    transient = _parse_transient(fields)

    grid_step = fields.number("grid.step_deg", 1.0)
    if grid_step <= 0.0 or grid_step > 90.0:
        raise ScenarioError("grid step must lie in (0, 90] deg", key="grid.step_deg",
                            line=fields.line_of("grid.step_deg"))
    fft_size = fields.integer("grid.fft_size", 1024)
    if fft_size < max(geometry.n_rows, geometry.n_cols):
        raise ScenarioError("fft size must be at least the array dimension",
                            key="grid.fft_size", line=fields.line_of("grid.fft_size"))
    mask_radius = fields.number("metrics.mask_radius_beamwidths", 2.0)
    if mask_radius <= 0.0:
        raise ScenarioError("mask radius must be positive",
                            key="metrics.mask_radius_beamwidths",
                            line=fields.line_of("metrics.mask_radius_beamwidths"))
    seed = fields.integer("seed", 0)

    unknown = set(pairs) - fields.used
    if unknown:
        key = sorted(unknown)[0]
        raise ScenarioError("unknown key", key=key, line=fields.line_of(key))

    return Scenario(
        geometry=geometry, unitcell=unitcell, mixture=mixture,
        temperature_c=temperature_c, frequency_ghz=frequency_ghz,
        incident=incident, schedule=schedule, snapshot_times_s=snapshots,
        transient=transient, tmodel=tmodel, grid_step_deg=grid_step,
        fft_size=fft_size, mask_radius_beamwidths=mask_radius, seed=seed,
    )


def _parse_geometry(fields: _Fields, frequency_ghz: float) -> ArrayGeometry:
    n_rows = fields.integer("geometry.n_rows")
    n_cols = fields.integer("geometry.n_cols")
    spacing = fields.number("geometry.spacing_wavelengths", 0.5)
    try:
        return ArrayGeometry.from_frequency(n_rows, n_cols, frequency_ghz, spacing)
    except ValueError as exc:
        raise ScenarioError(str(exc), key="geometry.n_rows",
                            line=fields.line_of("geometry.n_rows")) from None


def _parse_unitcell(fields: _Fields, mixture: LcMixture, temperature_c: float,
                    tmodel: TemperatureModel) -> UnitCellDesign:
    kind = fields.string("unitcell.kind")
    if kind not in (REFLECT_ARRAY, PHASED_ARRAY):
        raise ScenarioError(f"kind must be {REFLECT_ARRAY!r} or {PHASED_ARRAY!r}, got {kind!r}",
                            key="unitcell.kind", line=fields.line_of("unitcell.kind"))
    design_frequency = fields.number("unitcell.design_frequency", ANCHOR_FREQUENCY_GHZ)

    l_ps = None
    if kind == PHASED_ARRAY:
        raw = fields.string("unitcell.l_ps", "auto")
        if raw == "auto":
            try:
                l_ps = lps_for_full_cycle(mixture, design_frequency, temperature_c, tmodel)
            except ValueError as exc:
                raise ScenarioError(str(exc), key="unitcell.l_ps") from None
        else:
            try:
                l_ps = float(raw)
            except ValueError:
                raise ScenarioError(f"expected a number or 'auto', got {raw!r}",
                                    key="unitcell.l_ps",
                                    line=fields.line_of("unitcell.l_ps")) from None

    anchor_db = None
    anchor_lps = None
    if fields.has("unitcell.insertion_loss_anchor"):
        anchor = fields.number_list("unitcell.insertion_loss_anchor")
        if len(anchor) not in (1, 2):
            raise ScenarioError("expected 'dB' or 'dB, ref_lps_mm'",
                                key="unitcell.insertion_loss_anchor",
                                line=fields.line_of("unitcell.insertion_loss_anchor"))
        anchor_db = anchor[0]
        if len(anchor) == 2:
            anchor_lps = anchor[1]
    if kind == PHASED_ARRAY and anchor_lps is None:
        anchor_lps = lps_for_full_cycle(mixture, ANCHOR_FREQUENCY_GHZ,
                                        tmodel.reference_temperature, tmodel)

    try:
        return UnitCellDesign(
            kind=kind,
            d_lc=fields.number("unitcell.d_lc"),
            design_frequency=design_frequency,
            l_ps=l_ps,
            v_threshold=fields.number("unitcell.v_threshold", 1.0),
            v_mid=fields.number("unitcell.v_mid", 3.0),
            v_max=fields.number("unitcell.v_max", 10.0),
            v_slope=fields.number("unitcell.v_slope", 2.0),
            insertion_loss_anchor_db=anchor_db,
            insertion_loss_anchor_lps=anchor_lps,
            max_phase_reflect=fields.number("unitcell.max_phase_reflect", TWO_PI),
        )
    except ValueError as exc:
        raise ScenarioError(str(exc), key="unitcell.kind",
                            line=fields.line_of("unitcell.kind")) from None


def _parse_schedule(fields: _Fields) -> tuple[ScheduleEntry, ...]:
    entries = []
    index = 0
    while fields.has(f"schedule.{index}.switch_time_s"):
        prefix = f"schedule.{index}"
        switch_time = fields.number(f"{prefix}.switch_time_s")
        target = _direction(fields, prefix)
        beamwidth = fields.number(f"{prefix}.beamwidth_deg")
        if beamwidth <= 0.0:
            raise ScenarioError("beamwidth must be positive", key=f"{prefix}.beamwidth_deg",
                                line=fields.line_of(f"{prefix}.beamwidth_deg"))
        entries.append(ScheduleEntry(switch_time, target, beamwidth))
        index += 1
    if entries[0].switch_time_s != 0.0:
        raise ScenarioError("first switch time must be 0", key="schedule.0.switch_time_s",
                            line=fields.line_of("schedule.0.switch_time_s"))
    for i, (a, b) in enumerate(zip(entries, entries[1:]), start=1):
        if b.switch_time_s <= a.switch_time_s:
            raise ScenarioError("switch times must be strictly increasing",
                                key=f"schedule.{i}.switch_time_s",
                                line=fields.line_of(f"schedule.{i}.switch_time_s"))
    return tuple(entries)


def _parse_snapshots(fields: _Fields, schedule: tuple[ScheduleEntry, ...]) -> tuple[float, ...]:
    times = fields.number_list("snapshot_times_s")
    if any(t < 0.0 for t in times):
        raise ScenarioError("snapshot times must be >= 0", key="snapshot_times_s",
                            line=fields.line_of("snapshot_times_s"))
    if any(b < a for a, b in zip(times, times[1:])):
        raise ScenarioError("snapshot times must be sorted ascending", key="snapshot_times_s",
                            line=fields.line_of("snapshot_times_s"))
    # snapshots are offsets from each retarget; they must fit before the next switch
    horizon = min((b.switch_time_s - a.switch_time_s
                   for a, b in zip(schedule[1:], schedule[2:])), default=None)
    if horizon is not None and times and max(times) > horizon:
        raise ScenarioError(
            f"snapshot offsets extend past the shortest transition window ({horizon} s)",
            key="snapshot_times_s", line=fields.line_of("snapshot_times_s"))
    return tuple(times)


def _parse_transient(fields: _Fields) -> TransientParams:
    try:
        return TransientParams(
            tau_on_90=fields.number("transient.tau_on_90_s"),
            tau_off_90=fields.number("transient.tau_off_90_s"),
            model=fields.string("transient.model", "exponential"),
        )
    except ValueError as exc:
        raise ScenarioError(str(exc), key="transient.tau_on_90_s",
                            line=fields.line_of("transient.tau_on_90_s")) from None
