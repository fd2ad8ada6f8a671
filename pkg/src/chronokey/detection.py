"""Binned spectral and temporal measurements of the two-photon state.

Each party resolves its photon into ``m`` contiguous frequency bins of width
``delta_omega``, or into ``m`` arrival-time bins after a time lens that maps
arrival time onto output frequency.  A lens with focusing rate ``phi_ddot``
(quadratic temporal phase, realized to lowest order by a sinusoidal phase
modulator of depth ``mod_depth`` and frequency ``mod_frequency``) followed by
a spectrometer measures time with resolution ``delta_omega / phi_ddot``, so
the two bases share one bin count and one resolution product.

Bin indices are 0-based everywhere in this package; bin ``b`` of a scheme
with ``m`` bins is centered on ``(b - (m - 1)/2) * width``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .chronocyclic import (
    FrequencyGrid,
    JointSpectralAmplitude,
    TimeGrid,
    transform_1d,
)
from .errors import CoverageWarning, ParameterError

FREQUENCY_BASIS = "frequency"
TIME_BASIS = "time"

# Fraction of probability mass outside the binned window above which a
# CoverageWarning is emitted by the binning routines.
COVERAGE_WARN_THRESHOLD = 0.01
# Target fine-sampling step for the time-basis evaluation, as a fraction of
# the band-limit step pi/span of the spectral grid.
_ZOOM_OVERSAMPLE = 8
# Relative tolerance tying a lens's focusing rate to depth * frequency**2.
_LENS_CONSISTENCY_RTOL = 1e-12


@dataclass(frozen=True)
class BinningScheme:
    """Partition of a spectral window into ``m`` equal bins.

    ``beta_plus`` and ``beta_minus`` record the design ratios of the matched
    source: the wide amplitude width is ``beta_plus`` times the full window
    ``m * delta_omega`` and the narrow width is ``beta_minus`` times one bin.
    """

    m: int
    delta_omega: float = 1.0
    beta_plus: float = 0.75
    beta_minus: float = 0.2
    center: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or self.m < 2:
            raise ParameterError(f"bin count must be an integer >= 2, got {self.m!r}")
        if not self.delta_omega > 0.0:
            raise ParameterError("bin width must be positive")
        if not 0.0 < self.beta_minus < self.beta_plus <= 1.0:
            raise ParameterError(
                "design ratios must satisfy 0 < beta_minus < beta_plus <= 1, "
                f"got beta_plus={self.beta_plus!r} beta_minus={self.beta_minus!r}"
            )

    @property
    def span(self) -> float:
        """Full width of the binned window."""
        return self.m * self.delta_omega

    @property
    def bin_centers(self) -> np.ndarray:
        b = np.arange(self.m)
        return self.center + (b - (self.m - 1) / 2.0) * self.delta_omega

    @property
    def bin_edges(self) -> np.ndarray:
        e = np.arange(self.m + 1)
        return self.center + (e - self.m / 2.0) * self.delta_omega

    def matched_widths(self) -> tuple[float, float]:
        """Source widths this scheme was designed for: wide then narrow."""
        return self.beta_plus * self.span, self.beta_minus * self.delta_omega


@dataclass(frozen=True)
class TimeLens:
    """Quadratic-phase time lens and the modulator that approximates it.

    ``focusing_rate`` is the curvature of the temporal phase (the rate at
    which arrival time is chirped onto frequency), ``gvd`` the quadratic
    spectral phase applied before the modulator, and ``aperture`` the
    half-period scale ``1/mod_frequency`` inside which the sinusoidal phase
    tracks the ideal parabola.
    """

    focusing_rate: float
    mod_frequency: float
    mod_depth: float
    gvd: float

    def __post_init__(self) -> None:
        for name in ("focusing_rate", "mod_frequency", "mod_depth", "gvd"):
            if not getattr(self, name) > 0.0:
                raise ParameterError(f"{name} must be positive")
        implied = self.mod_depth * self.mod_frequency**2
        if abs(implied - self.focusing_rate) > _LENS_CONSISTENCY_RTOL * self.focusing_rate:
            raise ParameterError(
                f"focusing_rate {self.focusing_rate!r} does not equal "
                f"mod_depth * mod_frequency**2 = {implied!r}"
            )

    @property
    def aperture(self) -> float:
        return 1.0 / self.mod_frequency

    @property
    def fraunhofer_deviation(self) -> float:
        """Distance of ``gvd * focusing_rate`` from the imaging condition 1."""
        return abs(self.gvd * self.focusing_rate - 1.0)


def design_binning(
    m: int,
    beta_plus: float = 0.75,
    beta_minus: float = 0.2,
    delta_omega: float = 1.0,
    grid: FrequencyGrid | None = None,
):
    """Binning scheme plus the source matched to it.

    The returned amplitude has wide width ``beta_plus * m * delta_omega`` and
    narrow width ``beta_minus * delta_omega``, which makes the binned
    time-basis statistics mirror the frequency-basis ones exactly.
    """
    from .chronocyclic import make_gaussian_jsa

    scheme = BinningScheme(m=m, delta_omega=delta_omega, beta_plus=beta_plus, beta_minus=beta_minus)
    wide, narrow = scheme.matched_widths()
    return scheme, make_gaussian_jsa(wide, narrow, grid=grid)


def design_time_lens(binning: BinningScheme) -> TimeLens:
    """Lens whose resolution product saturates the design of ``binning``.

    The modulator frequency matches the narrow source width, the depth is
    ``(beta_plus / beta_minus) * m``, and the dispersion satisfies the
    imaging condition exactly.
    """
    mod_frequency = binning.beta_minus * binning.delta_omega
    mod_depth = (binning.beta_plus / binning.beta_minus) * binning.m
    focusing_rate = mod_depth * mod_frequency**2
    return TimeLens(
        focusing_rate=focusing_rate,
        mod_frequency=mod_frequency,
        mod_depth=mod_depth,
        gvd=1.0 / focusing_rate,
    )


def time_resolution(binning: BinningScheme, lens: TimeLens) -> float:
    """Arrival-time bin width implied by reading time through the lens."""
    return binning.delta_omega / lens.focusing_rate


def resolution_product(binning: BinningScheme, lens: TimeLens) -> float:
    """Product of the frequency and time bin widths.

    For a lens built by :func:`design_time_lens` this equals
    ``1 / (beta_plus * beta_minus * m)`` identically.
    """
    return binning.delta_omega * time_resolution(binning, lens)


def bin_overlap_weights(points: np.ndarray, spacing: float, edges: np.ndarray) -> np.ndarray:
    """Fraction of each midpoint sampling cell covered by each bin.

    Returns a ``(len(edges) - 1, len(points))`` matrix whose columns sum to 1
    for cells fully inside the binned window, so binned masses are exact cell
    sums with boundary cells split in proportion to their overlap.
    """
    lo = points - spacing / 2.0
    hi = points + spacing / 2.0
    left = np.maximum(edges[:-1, None], lo[None, :])
    right = np.minimum(edges[1:, None], hi[None, :])
    return np.clip((right - left) / spacing, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Joint probabilities of the two parties' bin outcomes in one basis.

    ``probabilities[b, a]`` is the chance the receiver lands in bin ``b``
    while the sender lands in bin ``a``, renormalized over the measured
    window; ``out_of_window`` is the fraction of intensity that fell outside
    it and was discarded by that renormalization.
    """

    basis: str
    probabilities: np.ndarray
    out_of_window: float = 0.0

    def __post_init__(self) -> None:
        if self.basis not in (FREQUENCY_BASIS, TIME_BASIS):
            raise ParameterError(f"unknown basis {self.basis!r}")
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ParameterError("probabilities must be a square matrix")
        if float(p.min()) < -1e-12:
            raise ParameterError("probabilities must be non-negative")
        total = float(p.sum())
        if abs(total - 1.0) > 1e-9:
            raise ParameterError(f"probabilities sum to {total!r}, expected 1")
        if not 0.0 <= self.out_of_window <= 1.0:
            raise ParameterError("out_of_window must lie in [0, 1]")
        object.__setattr__(self, "probabilities", np.clip(p, 0.0, None))
        self.probabilities.setflags(write=False)

    @property
    def m(self) -> int:
        return self.probabilities.shape[0]


def _warn_coverage(out_mass: float, basis: str) -> None:
    if out_mass > COVERAGE_WARN_THRESHOLD:
        warnings.warn(
            f"{out_mass:.1%} of the intensity lies outside the {basis}-basis window "
            "and is discarded by postselection",
            CoverageWarning,
            stacklevel=3,
        )


def _finalize(raw: np.ndarray, basis: str) -> OutcomeDistribution:
    in_mass = float(raw.sum())
    out_mass = max(0.0, 1.0 - in_mass)
    _warn_coverage(out_mass, basis)
    return OutcomeDistribution(basis=basis, probabilities=raw / in_mass, out_of_window=out_mass)


def _zoom_time_points(span: float, binning: BinningScheme, lens: TimeLens):
    """Aligned fine time grid covering the binned window.

    The step divides the time bin width exactly and stays below a quarter of
    the band-limit step ``pi / span`` of the spectral grid, so cell sums are
    spectrally accurate and bins are whole groups of cells.
    """
    dt_bin = time_resolution(binning, lens)
    band_step = math.pi / span
    per_bin = max(1, math.ceil(dt_bin * _ZOOM_OVERSAMPLE / band_step))
    step = dt_bin / per_bin
    n_fine = binning.m * per_bin
    k = np.arange(n_fine)
    t = (k - (n_fine - 1) / 2.0) * step
    return t, step, per_bin


def _zoom_kernel(times: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    return np.exp(-1j * np.outer(times, grid.points)) * (
        grid.spacing / math.sqrt(2.0 * math.pi)
    )


def joint_outcome_distribution(
    jsa: JointSpectralAmplitude,
    binning: BinningScheme,
    lens: TimeLens,
    basis: str = FREQUENCY_BASIS,
    relabel_receiver: bool = True,
) -> OutcomeDistribution:
    """Bin the two-photon intensity in the chosen basis.

    In the frequency basis the sampled spectral intensity is integrated over
    the bin rectangles.  In the time basis the temporal amplitude is
    evaluated directly on a fine grid covering the time window (a zoomed
    transform, so the time resolution is not tied to the spectral grid) and
    integrated over time-bin rectangles of width ``delta_omega /
    focusing_rate``.

    With ``relabel_receiver`` (frequency basis only) the receiver's bin
    labels are reversed, which turns the anti-correlation of the source into
    agreement on identical labels, matching the time basis where correlation
    is direct.  A :class:`CoverageWarning` is emitted when more than 1% of
    the intensity falls outside the window; the returned distribution is
    renormalized over the window either way.
    """
    if basis == FREQUENCY_BASIS:
        intensity = np.abs(jsa.amplitudes) ** 2 * jsa.grid.spacing**2
        weights = bin_overlap_weights(
            jsa.grid.points, jsa.grid.spacing, binning.bin_edges
        )
        raw = weights @ intensity @ weights.T
        if relabel_receiver:
            raw = raw[::-1, :]
        return _finalize(raw, basis)
    if basis == TIME_BASIS:
        t, step, per_bin = _zoom_time_points(jsa.grid.span, binning, lens)
        kernel = _zoom_kernel(t, jsa.grid)
        amps_t = kernel @ jsa.amplitudes @ kernel.T
        intensity = np.abs(amps_t) ** 2 * step**2
        m = binning.m
        raw = intensity.reshape(m, per_bin, m, per_bin).sum(axis=(1, 3))
        return _finalize(raw, basis)
    raise ParameterError(f"unknown basis {basis!r}")


def binned_spectrum(
    state: np.ndarray, grid: FrequencyGrid, binning: BinningScheme
) -> tuple[np.ndarray, float]:
    """Bin a normalized single-photon spectral amplitude.

    Returns the renormalized in-window probabilities and the discarded
    fraction, warning as in :func:`joint_outcome_distribution`.
    """
    psi = np.asarray(state, dtype=np.complex128)
    intensity = np.abs(psi) ** 2 * grid.spacing
    weights = bin_overlap_weights(grid.points, grid.spacing, binning.bin_edges)
    raw = weights @ intensity
    in_mass = float(raw.sum())
    out_mass = max(0.0, 1.0 - in_mass)
    _warn_coverage(out_mass, FREQUENCY_BASIS)
    return raw / in_mass, out_mass


def binned_arrival_times(
    state: np.ndarray,
    grid: FrequencyGrid,
    binning: BinningScheme,
    lens: TimeLens,
) -> tuple[np.ndarray, float]:
    """Bin the arrival-time intensity of a single-photon spectral amplitude.

    The temporal wavefunction is evaluated on the same zoomed grid as the
    joint routine and integrated over time bins of width ``delta_omega /
    focusing_rate``.
    """
    psi = np.asarray(state, dtype=np.complex128)
    t, step, per_bin = _zoom_time_points(grid.span, binning, lens)
    kernel = _zoom_kernel(t, grid)
    psi_t = kernel @ psi
    intensity = np.abs(psi_t) ** 2 * step
    raw = intensity.reshape(binning.m, per_bin).sum(axis=1)
    in_mass = float(raw.sum())
    out_mass = max(0.0, 1.0 - in_mass)
    _warn_coverage(out_mass, TIME_BASIS)
    return raw / in_mass, out_mass


def simulate_time_lens(
    field: np.ndarray,
    time_grid: TimeGrid,
    lens: TimeLens,
    mode: str = "sinusoidal",
) -> tuple[FrequencyGrid, np.ndarray]:
    """Propagate a temporal field through dispersion plus phase modulation.

    The field picks up the spectral phase ``exp(-i * gvd * w**2 / 2)``, then
    the temporal phase of the modulator, and the returned array is its
    spectrum on the dual frequency grid.  Under the imaging condition the
    output spectral intensity at ``w`` reproduces the input temporal
    intensity at ``w / focusing_rate``.

    ``mode`` selects the modulator model: ``"ideal-quadratic"`` applies the
    exact parabolic phase ``-focusing_rate * t**2 / 2`` while
    ``"sinusoidal"`` applies ``mod_depth * (cos(mod_frequency * t) - 1)``,
    which matches the parabola only within the aperture.
    """
    if mode not in ("ideal-quadratic", "sinusoidal"):
        raise ParameterError(f"unknown lens mode {mode!r}")
    if time_grid.center != 0.0:
        raise ParameterError("time lens simulation requires a grid centered at zero")
    freq_grid, spectrum = transform_1d(np.asarray(field, np.complex128), time_grid, sign=+1)
    spectrum = spectrum * np.exp(-0.5j * lens.gvd * freq_grid.points**2)
    _, field_mid = transform_1d(spectrum, freq_grid, sign=-1)
    t = time_grid.points
    if mode == "ideal-quadratic":
        phase = -0.5 * lens.focusing_rate * t**2
    else:
        phase = lens.mod_depth * (np.cos(lens.mod_frequency * t) - 1.0)
    field_mid = field_mid * np.exp(1j * phase)
    out_grid, out = transform_1d(field_mid, time_grid, sign=+1)
    return out_grid, out


def overlap_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Normalized squared overlap of two sampled wavefunctions."""
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    na = float(np.vdot(a, a).real)
    nb = float(np.vdot(b, b).real)
    if na == 0.0 or nb == 0.0:
        raise ParameterError("cannot compute fidelity with a zero field")
    return abs(np.vdot(a, b)) ** 2 / (na * nb)


def temporal_kernel(
    binning: BinningScheme,
    lens: TimeLens,
    index: int,
    times: np.ndarray,
) -> np.ndarray:
    """Temporal response of one spectrometer bin read through the lens.

    Detecting the lens output in frequency bin ``index`` acts on the input
    temporal amplitude as projection onto this kernel: a carrier at the bin's
    mapped arrival frequency under a ``sin(y)/y`` envelope whose first zero
    sits at ``2 * pi * focusing_rate / delta_omega``.
    """
    if not 0 <= index < binning.m:
        raise ParameterError(f"bin index {index} outside range(0, {binning.m})")
    x = np.asarray(times, dtype=float)
    rate = lens.focusing_rate
    center = float(binning.bin_centers[index])
    arg = x * binning.delta_omega / (2.0 * rate)
    envelope = np.sinc(arg / math.pi)
    prefactor = binning.delta_omega / math.sqrt(2.0 * math.pi * rate)
    return prefactor * envelope * np.exp(-1j * center * x / rate)
