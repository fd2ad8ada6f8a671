"""Hardware requirements implied by a binning design.

The design fixes dimensionless ratios; real hardware fixes a spectrometer
resolution, a phase-modulator ceiling, and a fiber dispersion coefficient.
This module converts between them.  Because the literature splits on whether
the quadratic-phase bookkeeping is done against ordinary frequency (cycles)
or angular frequency (radians), every derived quantity is reported in both
conventions side by side; the total dispersive phase and fiber length differ
by ``(2*pi)**2`` between them, while the modulator frequency in hertz and
the required depth do not differ at all.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

from .detection import BinningScheme
from .errors import ParameterError

SPEED_OF_LIGHT = 299_792_458.0

_RESOLUTION_KINDS = ("wavelength", "frequency")
_CONVENTIONS = ("ordinary", "angular")


def wavelength_to_frequency(delta_lambda: float, center_wavelength: float) -> float:
    """Spectral width in hertz of a wavelength width around a center."""
    if not (delta_lambda > 0.0 and center_wavelength > 0.0):
        raise ParameterError("wavelength quantities must be positive")
    return SPEED_OF_LIGHT * delta_lambda / center_wavelength**2


def frequency_to_wavelength(delta_nu: float, center_wavelength: float) -> float:
    """Inverse of :func:`wavelength_to_frequency` at the same center."""
    if not (delta_nu > 0.0 and center_wavelength > 0.0):
        raise ParameterError("frequency quantities must be positive")
    return delta_nu * center_wavelength**2 / SPEED_OF_LIGHT


@dataclass(frozen=True)
class HardwareSpec:
    """Available hardware and the phase convention chosen for bookkeeping.

    ``spectrometer_resolution`` is in meters when ``resolution_kind`` is
    ``"wavelength"`` and in hertz when it is ``"frequency"``.  ``fiber_gvd``
    is the magnitude of the dispersion coefficient in seconds squared per
    meter.  ``angular_convention`` must be set explicitly; both conventions
    are always reported regardless.
    """

    center_wavelength: float
    spectrometer_resolution: float
    resolution_kind: str
    modulator_max_frequency: float
    modulator_max_depth: float
    fiber_gvd: float
    angular_convention: str

    def __post_init__(self) -> None:
        for name in (
            "center_wavelength",
            "spectrometer_resolution",
            "modulator_max_frequency",
            "modulator_max_depth",
            "fiber_gvd",
        ):
            if not getattr(self, name) > 0.0:
                raise ParameterError(f"{name} must be positive")
        if self.resolution_kind not in _RESOLUTION_KINDS:
            raise ParameterError(f"unknown resolution kind {self.resolution_kind!r}")
        if self.angular_convention not in _CONVENTIONS:
            raise ParameterError(f"unknown phase convention {self.angular_convention!r}")

    def resolution_hz(self) -> float:
        if self.resolution_kind == "frequency":
            return self.spectrometer_resolution
        return wavelength_to_frequency(self.spectrometer_resolution, self.center_wavelength)


@dataclass(frozen=True)
class ConventionFigures:
    """Derived lens quantities under one phase convention."""

    convention: str
    focusing_rate: float
    total_gvd: float
    fiber_length: float
    aperture: float


@dataclass(frozen=True)
class FeasibilityReport:
    """Hardware verdict for a binning design.

    ``required_frequency_hz`` and ``required_depth`` are
    convention-independent; the per-convention figures differ by powers of
    ``2*pi``.
    """

    bin_frequency_hz: float
    required_frequency_hz: float
    required_depth: float
    frequency_ok: bool
    depth_ok: bool
    ordinary: ConventionFigures
    angular: ConventionFigures
    selected_convention: str

    @property
    def feasible(self) -> bool:
        return self.frequency_ok and self.depth_ok

    @property
    def selected(self) -> ConventionFigures:
        if self.selected_convention == "ordinary":
            return self.ordinary
        return self.angular


def _figures(convention: str, binning: BinningScheme, unit: float, gvd_per_meter: float) -> ConventionFigures:
    rate = binning.beta_plus * binning.beta_minus * binning.m * unit**2
    total_gvd = 1.0 / rate
    return ConventionFigures(
        convention=convention,
        focusing_rate=rate,
        total_gvd=total_gvd,
        fiber_length=total_gvd / gvd_per_meter,
        aperture=1.0 / (binning.beta_minus * unit),
    )


def check_feasibility(binning: BinningScheme, hardware: HardwareSpec) -> FeasibilityReport:
    """Translate the design ratios into hardware numbers and compare.

    The spectrometer resolution sets the bin width; the modulator must run
    at ``beta_minus`` times that bin width (in hertz, identically under both
    conventions) with a depth of ``(beta_plus / beta_minus) * m`` radians,
    and the fiber must supply the reciprocal of the focusing rate as total
    quadratic spectral phase.
    """
    delta_nu = hardware.resolution_hz()
    required_frequency = binning.beta_minus * delta_nu
    required_depth = (binning.beta_plus / binning.beta_minus) * binning.m
    ordinary = _figures("ordinary", binning, delta_nu, hardware.fiber_gvd)
    angular = _figures("angular", binning, 2.0 * math.pi * delta_nu, hardware.fiber_gvd)
    return FeasibilityReport(
        bin_frequency_hz=delta_nu,
        required_frequency_hz=required_frequency,
        required_depth=required_depth,
        frequency_ok=required_frequency <= hardware.modulator_max_frequency,
        depth_ok=required_depth <= hardware.modulator_max_depth,
        ordinary=ordinary,
        angular=angular,
        selected_convention=hardware.angular_convention,
    )
