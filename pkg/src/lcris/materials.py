"""Nematic liquid-crystal mixtures: anisotropy, temperature behaviour, switching speed.

Units: permittivities and loss tangents dimensionless, temperatures in deg C
(converted to kelvin internally where ratios are formed), elastic constant k11
in pN, rotational viscosity gamma_rot in Pa*s, layer thickness in um, response
times in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

CELSIUS_TO_KELVIN = 273.15


class UnknownMixtureError(KeyError):
    """Requested mixture name is not registered."""


@dataclass(frozen=True)
class LcMixture:
    """Material constants of one nematic mixture (band-averaged microwave values)."""

    name: str
    eps_perp: float
    tan_delta_perp: float
    eps_par: float
    tan_delta_par: float
    clearing_point: float  # deg C
    k11: float             # pN
    gamma_rot: float       # Pa*s

    def __post_init__(self) -> None:
        if not self.eps_perp > 1.0:
            raise ValueError(f"{self.name}: eps_perp must exceed 1, got {self.eps_perp}")
        if self.eps_par < self.eps_perp:
            raise ValueError(
                f"{self.name}: eps_par must be >= eps_perp, got {self.eps_par} < {self.eps_perp}"
            )
        for label, tan in (("tan_delta_perp", self.tan_delta_perp),
                           ("tan_delta_par", self.tan_delta_par)):
            if not 0.0 < tan < 1.0:
                raise ValueError(f"{self.name}: {label} must lie in (0, 1), got {tan}")
        if self.clearing_point <= -CELSIUS_TO_KELVIN:
            raise ValueError(f"{self.name}: clearing point below absolute zero")
        if self.k11 <= 0.0:
            raise ValueError(f"{self.name}: k11 must be positive, got {self.k11}")
        if self.gamma_rot <= 0.0:
            raise ValueError(f"{self.name}: gamma_rot must be positive, got {self.gamma_rot}")


@dataclass(frozen=True)
class TemperatureModel:
    """Haller-type power-law model for the anisotropy falloff towards the clearing point.

    delta_eps(T) = delta_eps(T_ref) * ((1 - T/Tc) / (1 - T_ref/Tc))**haller_exponent
    with all temperatures in kelvin; identically 0 at and above the clearing point.
    """

    reference_temperature: float = 20.0  # deg C
    haller_exponent: float = 0.2

    def __post_init__(self) -> None:
        if not 0.0 < self.haller_exponent < 1.0:
            raise ValueError(f"haller_exponent must lie in (0, 1), got {self.haller_exponent}")
        if self.reference_temperature <= -CELSIUS_TO_KELVIN:
            raise ValueError("reference_temperature below absolute zero")


# Commercial mixtures for mm and sub-mm wave bands.
_BUILTIN_MIXTURES = (
    LcMixture("K15", 2.7, 0.0273, 3.1, 0.0132, 38.0, 7.0, 0.126),
    LcMixture("GT3-23001", 2.41, 0.0141, 3.18, 0.0037, 173.5, 24.0, 0.727),
    LcMixture("GT5-28004", 2.40, 0.0043, 3.32, 0.0014, 151.0, 11.8, 5.953),
    LcMixture("GT7-29001", 2.46, 0.0116, 3.53, 0.0064, 124.0, 14.5, 0.307),
)

_REGISTRY: dict[str, LcMixture] = {mix.name: mix for mix in _BUILTIN_MIXTURES}

BUILTIN_MIXTURE_NAMES = tuple(mix.name for mix in _BUILTIN_MIXTURES)


def lookup_mixture(name: str) -> LcMixture:
    """Return the registered mixture called `name`."""
    try:
        return _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise UnknownMixtureError(f"unknown mixture {name!r}; available: {known}") from None


def register_mixture(mix: LcMixture, overwrite: bool = False) -> None:
    """Add a user mixture to the registry."""
    if mix.name in _REGISTRY and not overwrite:
        raise ValueError(f"mixture {mix.name!r} already registered")
    _REGISTRY[mix.name] = mix


_MIXTURE_FIELDS = ("name", "eps_perp", "tan_delta_perp", "eps_par", "tan_delta_par",
                   "clearing_point", "k11", "gamma_rot")


def load_mixture_file(path: str | Path, register: bool = True) -> LcMixture:
    """Read one mixture from a `key = value` text file with the eight LcMixture fields."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _MIXTURE_FIELDS:
            raise ValueError(f"{path}:{lineno}: unknown mixture field {key!r}")
        if key in raw:
            raise ValueError(f"{path}:{lineno}: duplicate field {key!r}")
        raw[key] = value.strip()
    missing = [field for field in _MIXTURE_FIELDS if field not in raw]
    if missing:
        raise ValueError(f"{path}: missing mixture fields: {', '.join(missing)}")
    numbers = {}
    for field in _MIXTURE_FIELDS[1:]:
        try:
            numbers[field] = float(raw[field])
        except ValueError:
            raise ValueError(f"{path}: field {field!r} is not a number: {raw[field]!r}") from None
    mix = LcMixture(name=raw["name"], **numbers)
    if register:
        register_mixture(mix, overwrite=True)
    return mix


def delta_epsilon(mix: LcMixture) -> float:
    """Dielectric anisotropy eps_par - eps_perp (the phase-tuning contrast)."""
    return mix.eps_par - mix.eps_perp


def delta_epsilon_at_temperature(mix: LcMixture, temperature: float,
                                 model: TemperatureModel) -> float:
    """Anisotropy at `temperature` (deg C); 0 at and above the clearing point."""
    if model.reference_temperature >= mix.clearing_point:
        raise ValueError(
            f"reference temperature {model.reference_temperature} degC is not below the "
            f"clearing point of {mix.name} ({mix.clearing_point} degC)"
        )
    if temperature <= -CELSIUS_TO_KELVIN:
        raise ValueError("temperature below absolute zero")
    if temperature >= mix.clearing_point:
        return 0.0
    t_k = temperature + CELSIUS_TO_KELVIN
    tc_k = mix.clearing_point + CELSIUS_TO_KELVIN
    tref_k = model.reference_temperature + CELSIUS_TO_KELVIN
    ratio = (1.0 - t_k / tc_k) / (1.0 - tref_k / tc_k)
    return delta_epsilon(mix) * math.pow(ratio, model.haller_exponent)


@dataclass(frozen=True)
class ResponseCalibration:
    """One measured (mixture, thickness, switch-off time) point fixing the tau_off constant."""

    mixture: LcMixture
    d_lc: float     # um
    tau_off: float  # s

    def __post_init__(self) -> None:
        if self.d_lc <= 0.0:
            raise ValueError(f"calibration thickness must be positive, got {self.d_lc}")
        if self.tau_off <= 0.0:
            raise ValueError(f"calibration tau_off must be positive, got {self.tau_off}")


# 70 ms at 4.6 um for a GT7-class phased-array cell.
DEFAULT_RESPONSE_CALIBRATION = ResponseCalibration(lookup_mixture("GT7-29001"), 4.6, 0.070)


def response_time(mix: LcMixture, d_lc: float,
                  calibration: ResponseCalibration = DEFAULT_RESPONSE_CALIBRATION) -> float:
    """Switch-off (relaxation) time in seconds: tau ~ gamma_rot * d_lc^2 / k11.

    The proportionality constant comes from the calibration anchor.
    """
    if d_lc <= 0.0:
        raise ValueError(f"layer thickness must be positive, got {d_lc}")
    anchor = calibration.mixture
    return (calibration.tau_off
            * (mix.gamma_rot / anchor.gamma_rot)
            * (d_lc / calibration.d_lc) ** 2
            * (anchor.k11 / mix.k11))
