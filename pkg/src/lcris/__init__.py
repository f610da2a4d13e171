"""Liquid-crystal RIS simulator: material laws, unit cells, transients, far-field patterns."""

__version__ = "0.1.0"

from .materials import (
    BUILTIN_MIXTURE_NAMES,
    DEFAULT_RESPONSE_CALIBRATION,
    LcMixture,
    ResponseCalibration,
    TemperatureModel,
    UnknownMixtureError,
    delta_epsilon,
    delta_epsilon_at_temperature,
    load_mixture_file,
    lookup_mixture,
    register_mixture,
    response_time,
)
from .unitcell import (
    PHASED_ARRAY,
    REFLECT_ARRAY,
    InsertionLossRangeWarning,
    PhaseUnreachableError,
    UnitCellDesign,
    amplitude_factor,
    effective_permittivity,
    full_cycle_design,
    insertion_loss,
    lps_for_full_cycle,
    max_phase_shift,
    phase_shift,
    saturation,
    voltage_for_phase,
    voltages_for_phases,
    with_l_ps,
)
from .dynamics import PhaseField, TransientParams, advance, phase_field, retarget, snapshot_phases
from .farfield import (
    AngularGrid,
    ArrayGeometry,
    Beamwidth,
    Direction,
    Pattern,
    UvGrid,
    angular_separation_deg,
    fft_nrcs_raster,
    half_power_beamwidth,
    nrcs,
    nrcs_map,
    nrcs_points,
    peak,
    value_at,
    write_pattern_csv,
)
from .design import (
    FeasibilityReport,
    PhaseProfile,
    quadratic_profile,
    quantize,
    realized_phases,
    specular_profile,
    steering_profile,
    temperature_aware_voltages,
    wrap_to_range,
)
from .scenario import Scenario, ScenarioError, ScheduleEntry, parse_scenario
from .simulate import (
    RunResult,
    TransientMetrics,
    WindowResult,
    export,
    masked_interference_max,
    run,
    sweep,
    transient_metrics,
)
