import math

import numpy as np
import pytest

from lcris import (
    InsertionLossRangeWarning,
    PhaseUnreachableError,
    TemperatureModel,
    UnitCellDesign,
    amplitude_factor,
    effective_permittivity,
    full_cycle_design,
    insertion_loss,
    lookup_mixture,
    lps_for_full_cycle,
    max_phase_shift,
    phase_shift,
    saturation,
    voltage_for_phase,
    voltages_for_phases,
    with_l_ps,
)

TWO_PI = 2.0 * math.pi
TMODEL = TemperatureModel()
MIXTURES = ["K15", "GT3-23001", "GT5-28004", "GT7-29001"]


@pytest.fixture(scope="module")
def pa_design():
    return full_cycle_design(lookup_mixture("GT7-29001"))


@pytest.fixture(scope="module")
def ra_design():
    return UnitCellDesign(kind="reflect_array", d_lc=100.0)


def test_saturation_contract(pa_design):
    assert saturation(pa_design, 0.0) == 0.0
    assert saturation(pa_design, pa_design.v_threshold) == 0.0
    assert saturation(pa_design, pa_design.v_threshold / 2.0) == 0.0
    assert saturation(pa_design, pa_design.v_max) == pytest.approx(1.0, abs=1e-15)
    v = np.linspace(0.0, pa_design.v_max, 500)
    s = saturation(pa_design, v)
    assert np.all(np.diff(s) >= 0.0)
    assert np.all((s >= 0.0) & (s <= 1.0))
    with pytest.raises(ValueError):
        saturation(pa_design, pa_design.v_max + 0.1)
    with pytest.raises(ValueError):
        saturation(pa_design, -0.1)


def test_effective_permittivity_limits(pa_design):
    k15 = lookup_mixture("K15")
    assert effective_permittivity(k15, 0.0, 20.0, pa_design, TMODEL) == 2.7
    top = effective_permittivity(k15, pa_design.v_max, 20.0, pa_design, TMODEL)
    assert top >= 2.7 + 0.999 * 0.4
    below = effective_permittivity(k15, pa_design.v_threshold / 2.0, 45.0, pa_design, TMODEL)
    assert below == 2.7


def test_phase_shift_zero_at_rest(pa_design, ra_design):
    gt7 = lookup_mixture("GT7-29001")
    assert phase_shift(pa_design, gt7, 0.0, 20.0, 28.0, TMODEL) == 0.0
    assert phase_shift(ra_design, gt7, 0.0, 20.0, 28.0, TMODEL) == 0.0


def test_full_cycle_design_reaches_two_pi(pa_design):
    gt7 = lookup_mixture("GT7-29001")
    top = max_phase_shift(pa_design, gt7, 20.0, 28.0, TMODEL)
    assert top >= TWO_PI - 1e-9


def test_phase_monotone_in_voltage_all_mixtures(pa_design, ra_design):
    volts = np.linspace(0.0, 10.0, 1000)
    for name in MIXTURES:
        mix = lookup_mixture(name)
        for design in (pa_design, ra_design):
            phases = phase_shift(design, mix, volts, 20.0, 28.0, TMODEL)
            assert np.all(np.diff(phases) >= 0.0)


def test_phase_linear_in_frequency(pa_design):
    gt7 = lookup_mixture("GT7-29001")
    p28 = phase_shift(pa_design, gt7, 7.0, 20.0, 28.0, TMODEL)
    p14 = phase_shift(pa_design, gt7, 7.0, 20.0, 14.0, TMODEL)
    assert p14 == pytest.approx(0.5 * p28, rel=1e-12)
    ratio = max_phase_shift(pa_design, gt7, 20.0, 21.0, TMODEL) \
        / max_phase_shift(pa_design, gt7, 20.0, 28.0, TMODEL)
    assert ratio == pytest.approx(21.0 / 28.0, rel=1e-12)


def test_max_phase_linear_in_lps(pa_design):
    gt7 = lookup_mixture("GT7-29001")
    base = max_phase_shift(pa_design, gt7, 20.0, 28.0, TMODEL)
    for c in (0.5, 2.0, 3.7):
        scaled = max_phase_shift(with_l_ps(pa_design, c * pa_design.l_ps),
                                 gt7, 20.0, 28.0, TMODEL)
        assert scaled / base == pytest.approx(c, rel=1e-12)


def test_max_phase_decreases_with_temperature(pa_design, ra_design):
    gt7 = lookup_mixture("GT7-29001")
    for design in (pa_design, ra_design):
        hot = max_phase_shift(design, gt7, 50.0, 28.0, TMODEL)
        cold = max_phase_shift(design, gt7, 20.0, 28.0, TMODEL)
        assert hot < cold
        assert max_phase_shift(design, gt7, gt7.clearing_point, 28.0, TMODEL) == 0.0


def test_insertion_loss_scaling(pa_design):
    assert insertion_loss(pa_design) == 4.5
    assert insertion_loss(with_l_ps(pa_design, 0.5 * pa_design.l_ps)) == 2.25
    assert insertion_loss(with_l_ps(pa_design, 2.0 * pa_design.l_ps)) == 9.0
    assert amplitude_factor(pa_design) == pytest.approx(10.0 ** (-4.5 / 20.0))


def test_reflect_array_loss_default_and_warning(ra_design):
    assert insertion_loss(ra_design) == 8.0
    noisy = UnitCellDesign(kind="reflect_array", d_lc=100.0,
                           insertion_loss_anchor_db=12.0)
    with pytest.warns(InsertionLossRangeWarning):
        assert insertion_loss(noisy) == 12.0


def test_design_validation():
    with pytest.raises(ValueError):
        UnitCellDesign(kind="phased_array", d_lc=4.6)  # missing l_ps
    with pytest.raises(ValueError):
        UnitCellDesign(kind="weird", d_lc=4.6)
    with pytest.raises(ValueError):
        UnitCellDesign(kind="reflect_array", d_lc=100.0, v_threshold=5.0, v_mid=4.0)
    with pytest.raises(ValueError):
        UnitCellDesign(kind="reflect_array", d_lc=100.0, max_phase_reflect=7.0)
    with pytest.raises(ValueError):
        phase_shift(full_cycle_design(lookup_mixture("K15")), lookup_mixture("K15"),
                    1.0, 20.0, -28.0, TMODEL)


def test_lps_for_full_cycle_matches_phase_formula():
    gt7 = lookup_mixture("GT7-29001")
    l_mm = lps_for_full_cycle(gt7, 28.0, 20.0, TMODEL)
    # independent check: two-way electrical length over the saturated line
    k0 = TWO_PI * 28e9 / 299792458.0
    droot = math.sqrt(gt7.eps_par) - math.sqrt(gt7.eps_perp)
    assert 2.0 * k0 * (l_mm * 1e-3) * droot == pytest.approx(TWO_PI, rel=1e-12)
    with pytest.raises(ValueError):
        lps_for_full_cycle(gt7, 28.0, gt7.clearing_point, TMODEL)


def test_voltage_for_phase_endpoints(pa_design):
    gt7 = lookup_mixture("GT7-29001")
    assert voltage_for_phase(pa_design, gt7, 20.0, 28.0, TMODEL, 0.0) == 0.0
    top = max_phase_shift(pa_design, gt7, 20.0, 28.0, TMODEL)
    assert voltage_for_phase(pa_design, gt7, 20.0, 28.0, TMODEL, top) == pa_design.v_max


def test_voltage_for_phase_round_trip(pa_design, ra_design):
    rng = np.random.default_rng(7)
    for name in ("K15", "GT7-29001"):
        mix = lookup_mixture(name)
        for design in (pa_design, ra_design):
            top = max_phase_shift(design, mix, 20.0, 28.0, TMODEL)
            targets = rng.uniform(0.0, top, size=100)
            volts = voltages_for_phases(design, mix, 20.0, 28.0, TMODEL, targets)
            back = phase_shift(design, mix, volts, 20.0, 28.0, TMODEL)
            assert np.max(np.abs(back - targets)) <= 1e-9


def test_voltage_for_phase_unreachable(pa_design):
    gt7 = lookup_mixture("GT7-29001")
    top = max_phase_shift(pa_design, gt7, 50.0, 28.0, TMODEL)
    with pytest.raises(PhaseUnreachableError):
        voltage_for_phase(pa_design, gt7, 50.0, 28.0, TMODEL, top + 0.1)


def test_hotter_design_point_costs_insertion_loss():
    gt7 = lookup_mixture("GT7-29001")
    hot = full_cycle_design(gt7, temperature=50.0)
    assert hot.l_ps > full_cycle_design(gt7).l_ps
    assert insertion_loss(hot) > 4.5
