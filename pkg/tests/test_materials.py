import math

import pytest

from lcris import (
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

# (eps_perp, tan_perp, eps_par, tan_par, delta_eps, Tc, K11, gamma_rot)
TABLE1 = {
    "K15": (2.7, 0.0273, 3.1, 0.0132, 0.4, 38.0, 7.0, 0.126),
    "GT3-23001": (2.41, 0.0141, 3.18, 0.0037, 0.77, 173.5, 24.0, 0.727),
    "GT5-28004": (2.40, 0.0043, 3.32, 0.0014, 0.92, 151.0, 11.8, 5.953),
    "GT7-29001": (2.46, 0.0116, 3.53, 0.0064, 1.07, 124.0, 14.5, 0.307),
}


def test_builtin_database_values_exact():
    for name, row in TABLE1.items():
        mix = lookup_mixture(name)
        assert mix.eps_perp == row[0]
        assert mix.tan_delta_perp == row[1]
        assert mix.eps_par == row[2]
        assert mix.tan_delta_par == row[3]
        assert mix.clearing_point == row[5]
        assert mix.k11 == row[6]
        assert mix.gamma_rot == row[7]


def test_delta_epsilon_matches_table_column():
    for name, row in TABLE1.items():
        assert delta_epsilon(lookup_mixture(name)) == pytest.approx(row[4], abs=5e-4)


def test_delta_epsilon_degenerate_mixture_is_zero():
    iso = LcMixture("iso", 2.5, 0.01, 2.5, 0.01, 60.0, 10.0, 0.5)
    assert delta_epsilon(iso) == 0.0


def test_unknown_mixture_error_names_available():
    with pytest.raises(UnknownMixtureError) as err:
        lookup_mixture("GT9-XXXX")
    message = str(err.value)
    assert "GT9-XXXX" in message
    for name in TABLE1:
        assert name in message


def test_haller_law_reference_and_clearing_points():
    model = TemperatureModel()
    for name in TABLE1:
        mix = lookup_mixture(name)
        assert delta_epsilon_at_temperature(mix, 20.0, model) == pytest.approx(
            delta_epsilon(mix), rel=1e-12)
        assert delta_epsilon_at_temperature(mix, mix.clearing_point, model) == 0.0
        assert delta_epsilon_at_temperature(mix, mix.clearing_point + 40.0, model) == 0.0


def test_haller_law_k15_at_30c():
    # oracle: the Haller ratio reduces to (Tc-T)/(Tc-Tref) in kelvin differences
    expected = 0.4 * ((38.0 - 30.0) / (38.0 - 20.0)) ** 0.2
    assert expected == pytest.approx(0.3401132001668775, rel=1e-12)
    value = delta_epsilon_at_temperature(lookup_mixture("K15"), 30.0, TemperatureModel())
    assert value == pytest.approx(expected, rel=1e-12)
    assert 0.0 < value < 0.4


def test_haller_law_monotone_in_temperature():
    model = TemperatureModel()
    mix = lookup_mixture("GT7-29001")
    temps = [(-30.0 + i * (mix.clearing_point + 30.0) / 39.0) for i in range(40)]
    values = [delta_epsilon_at_temperature(mix, t, model) for t in temps]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_temperature_model_validation():
    with pytest.raises(ValueError):
        TemperatureModel(haller_exponent=1.5)
    model = TemperatureModel(reference_temperature=50.0)
    with pytest.raises(ValueError):
        delta_epsilon_at_temperature(lookup_mixture("K15"), 20.0, model)  # ref above Tc


def test_response_time_anchor_is_exact():
    gt7 = lookup_mixture("GT7-29001")
    assert response_time(gt7, 4.6) == 0.070


def test_response_time_quadratic_in_thickness():
    gt7 = lookup_mixture("GT7-29001")
    assert response_time(gt7, 9.2) / response_time(gt7, 4.6) == 4.0
    for c in (0.5, 2.0, 8.0):
        assert response_time(gt7, c * 4.6) == pytest.approx(
            c * c * response_time(gt7, 4.6), rel=1e-12)


def test_response_time_reflect_array_regime_tens_of_seconds():
    gt7 = lookup_mixture("GT7-29001")
    tau = response_time(gt7, 100.0)
    assert 10.0 < tau < 100.0


def test_response_time_self_consistent_calibration():
    k15 = lookup_mixture("K15")
    calibration = ResponseCalibration(k15, 12.0, 0.5)
    assert response_time(k15, 12.0, calibration) == 0.5


def test_response_time_rejects_non_positive_thickness():
    with pytest.raises(ValueError):
        response_time(lookup_mixture("K15"), 0.0)
    with pytest.raises(ValueError):
        response_time(lookup_mixture("K15"), -4.6)


def test_mixture_invariant_validation():
    with pytest.raises(ValueError):
        LcMixture("bad", 3.0, 0.01, 2.5, 0.01, 60.0, 10.0, 0.5)  # eps_par < eps_perp
    with pytest.raises(ValueError):
        LcMixture("bad", 2.5, 0.0, 3.0, 0.01, 60.0, 10.0, 0.5)   # tan delta out of range
    with pytest.raises(ValueError):
        LcMixture("bad", 2.5, 0.01, 3.0, 0.01, 60.0, -1.0, 0.5)  # k11 <= 0


def test_load_mixture_file_round_trip(tmp_path):
    path = tmp_path / "custom.mixture"
    path.write_text(
        "# lab blend\n"
        "name = LAB-1\n"
        "eps_perp = 2.5\n"
        "tan_delta_perp = 0.01\n"
        "eps_par = 3.2\n"
        "tan_delta_par = 0.005\n"
        "clearing_point = 95.0\n"
        "k11 = 12.0\n"
        "gamma_rot = 0.4\n"
    )
    mix = load_mixture_file(path)
    assert mix.name == "LAB-1"
    assert lookup_mixture("LAB-1") == mix
    assert delta_epsilon(mix) == pytest.approx(0.7)


def test_load_mixture_file_rejects_bad_fields(tmp_path):
    path = tmp_path / "bad.mixture"
    path.write_text("name = X\neps_perp = 2.5\nunknown_field = 3\n")
    with pytest.raises(ValueError, match="unknown_field"):
        load_mixture_file(path)
    path.write_text("name = X\n")
    with pytest.raises(ValueError, match="missing"):
        load_mixture_file(path)


def test_register_mixture_conflicts():
    mix = LcMixture("DUP-1", 2.5, 0.01, 3.0, 0.01, 60.0, 10.0, 0.5)
    register_mixture(mix)
    with pytest.raises(ValueError):
        register_mixture(mix)
    register_mixture(mix, overwrite=True)
    assert lookup_mixture("DUP-1") is mix
