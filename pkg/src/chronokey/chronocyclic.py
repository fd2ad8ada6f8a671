"""Two-photon spectral and temporal amplitudes on uniform midpoint grids.

The source model is a Gaussian two-photon amplitude that is narrow along the
sum-frequency direction (strong anti-correlation of the photon detunings) and
wide along the difference direction.  Everything downstream consumes either
the sampled amplitude matrix or the analytic widths stored alongside it, so
this module is the single place where grids, normalization, and the
frequency/time transform convention are fixed.

Transform convention: the time-domain amplitude is obtained with the
``exp(-i*w*t)`` kernel and prefactor ``1/sqrt(2*pi)`` per axis, and the
inverse direction uses ``exp(+i*w*t)``.  Discrete sums approximate the
integrals with the grid spacing as the quadrature weight, which keeps the
discrete L2 mass exactly conserved (Parseval) on dual grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, GridCoverageError, ParameterError

# Tolerance on the discrete L2 mass of an amplitude record.
NORMALIZATION_ATOL = 1e-9
# Tolerance on the sum of squared singular values of a normalized amplitude.
SINGULAR_SUMSQ_ATOL = 1e-6
# Sampling requirements for the default grid of make_gaussian_jsa.
_SPAN_WIDTHS = 4.0
_SAMPLES_PER_WIDTH = 8
_MIN_POINTS = 64


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


class _UniformGrid:
    """Shared behaviour of the frequency and time axes.

    Points sit at cell midpoints: ``center - span + (j + 1/2) * spacing`` for
    ``j = 0 .. n_points - 1``, so the grid covers ``[center - span,
    center + span]`` with no sample on either boundary.
    """

    n_points: int
    span: float
    center: float

    def _validate(self) -> None:
        if not isinstance(self.n_points, int) or not _is_power_of_two(self.n_points) or self.n_points < 2:
            raise ParameterError(f"n_points must be a power of two >= 2, got {self.n_points!r}")
        if not self.span > 0.0:
            raise ParameterError(f"span must be positive, got {self.span!r}")
        if not math.isfinite(self.center):
            raise ParameterError(f"center must be finite, got {self.center!r}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.span / self.n_points

    @property
    def points(self) -> np.ndarray:
        j = np.arange(self.n_points)
        return self.center + (j - (self.n_points - 1) / 2.0) * self.spacing


@dataclass(frozen=True)
class FrequencyGrid(_UniformGrid):
    """Uniform grid of angular-frequency detunings around ``center``."""

    n_points: int
    span: float
    center: float = 0.0

    def __post_init__(self) -> None:
        self._validate()

    def dual(self) -> "TimeGrid":
        """Time grid on which the FFT of samples from this grid lives."""
        return TimeGrid(self.n_points, span=math.pi / self.spacing)


@dataclass(frozen=True)
class TimeGrid(_UniformGrid):
    """Uniform grid of arrival times around ``center``."""

    n_points: int
    span: float
    center: float = 0.0

    def __post_init__(self) -> None:
        self._validate()

    def dual(self) -> FrequencyGrid:
        return FrequencyGrid(self.n_points, span=math.pi / self.spacing)


def _check_normalized(amplitudes: np.ndarray, spacing: float, label: str) -> None:
    mass = float(np.sum(np.abs(amplitudes) ** 2)) * spacing * spacing
    if abs(mass - 1.0) > NORMALIZATION_ATOL:
        raise ParameterError(f"{label} is not L2-normalized: discrete mass {mass!r}")


@dataclass(frozen=True, eq=False)
class JointSpectralAmplitude:
    """Sampled two-photon amplitude over a square frequency grid.

    ``amplitudes[i, j]`` is the value at ``(grid.points[i], grid.points[j])``;
    axis 0 is the receiver-side photon and axis 1 the sender-side photon.
    The matrix is treated as read-only and carries unit discrete L2 mass.
    ``kind`` is ``"parametric-gaussian"`` when the analytic widths
    ``delta_plus`` (difference direction, wide) and ``delta_minus`` (sum
    direction, narrow) are meaningful, ``"sampled"`` otherwise.
    """

    kind: str
    grid: FrequencyGrid
    amplitudes: np.ndarray
    delta_plus: float | None = None
    delta_minus: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("parametric-gaussian", "sampled"):
            raise ParameterError(f"unknown amplitude kind {self.kind!r}")
        if self.kind == "parametric-gaussian":
            if self.delta_plus is None or self.delta_minus is None:
                raise ParameterError("parametric-gaussian amplitudes need both widths")
        n = self.grid.n_points
        if self.amplitudes.shape != (n, n):
            raise ParameterError(
                f"amplitude matrix shape {self.amplitudes.shape} does not match grid size {n}"
            )
        _check_normalized(self.amplitudes, self.grid.spacing, "joint spectral amplitude")
        self.amplitudes.setflags(write=False)


@dataclass(frozen=True, eq=False)
class JointTemporalAmplitude:
    """Sampled two-photon amplitude over a square time grid.

    Produced by :func:`to_temporal`.  ``t_plus`` (correlated direction, long)
    and ``t_minus`` (anti-correlated direction, short) are the analytic
    intensity widths when the spectral record was parametric, else ``None``.
    """

    grid: TimeGrid
    amplitudes: np.ndarray
    t_plus: float | None = None
    t_minus: float | None = None

    def __post_init__(self) -> None:
        n = self.grid.n_points
        if self.amplitudes.shape != (n, n):
            raise ParameterError(
                f"amplitude matrix shape {self.amplitudes.shape} does not match grid size {n}"
            )
        _check_normalized(self.amplitudes, self.grid.spacing, "joint temporal amplitude")
        self.amplitudes.setflags(write=False)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Singular spectrum of a joint amplitude.

    ``singular_values`` are non-negative and sorted descending with unit sum
    of squares (up to :data:`SINGULAR_SUMSQ_ATOL`); ``schmidt_number`` is the
    inverse participation ratio of their squares and equals 1 only for a
    product state.
    """

    singular_values: np.ndarray
    schmidt_number: float

    def __post_init__(self) -> None:
        lam = self.singular_values
        if lam.ndim != 1 or lam.size == 0:
            raise ParameterError("singular_values must be a non-empty 1-d array")
        if np.any(lam < -1e-15) or np.any(np.diff(lam) > 1e-12):
            raise ParameterError("singular_values must be non-negative and sorted descending")
        total = float(np.sum(lam**2))
        if abs(total - 1.0) > SINGULAR_SUMSQ_ATOL:
            raise ParameterError(f"squared singular values sum to {total!r}, expected 1")
        if self.schmidt_number < 1.0 - 1e-12:
            raise ParameterError("schmidt_number cannot be below 1")
        lam.setflags(write=False)


def default_grid(delta_plus: float, delta_minus: float) -> FrequencyGrid:
    """Grid sized to hold a Gaussian amplitude with the given widths.

    The half-span is four times the larger width and the spacing resolves the
    smaller width with at least eight samples, rounded up to a power of two
    with a floor of 64 points.
    """
    wide = max(delta_plus, delta_minus)
    narrow = min(delta_plus, delta_minus)
    span = _SPAN_WIDTHS * wide
    needed = 2.0 * span * _SAMPLES_PER_WIDTH / narrow
    n = max(_MIN_POINTS, 1 << math.ceil(math.log2(needed)))
    return FrequencyGrid(n_points=n, span=span)


def make_gaussian_jsa(
    delta_plus: float,
    delta_minus: float,
    grid: FrequencyGrid | None = None,
) -> JointSpectralAmplitude:
    """Sample the Gaussian two-photon amplitude and normalize it on the grid.

    Parameters
    ----------
    delta_plus:
        Width along the difference of the two detunings (the wide, marginal
        direction).
    delta_minus:
        Width along the sum of the two detunings (the narrow, correlation
        direction).  ``delta_plus > delta_minus`` gives frequency
        anti-correlation; the degenerate and swapped orderings are allowed.
    grid:
        Optional explicit grid.  It must span at least four times the larger
        width on each side of its center and resolve the smaller width with
        at least two samples.

    Raises
    ------
    GridCoverageError
        If the supplied grid is too small or too coarse for the widths.
    """
    if not (delta_plus > 0.0 and delta_minus > 0.0):
        raise ParameterError("widths must be positive")
    wide = max(delta_plus, delta_minus)
    narrow = min(delta_plus, delta_minus)
    if grid is None:
        grid = default_grid(delta_plus, delta_minus)
    else:
        if grid.span < _SPAN_WIDTHS * wide * (1.0 - 1e-12):
            raise GridCoverageError(
                f"grid half-span {grid.span} is below {_SPAN_WIDTHS} times the larger width {wide}"
            )
        if grid.spacing > narrow / 2.0:
            raise GridCoverageError(
                f"grid spacing {grid.spacing} does not resolve the smaller width {narrow}"
            )
    w = grid.points - grid.center
    wm = (w[:, None] - w[None, :]) / math.sqrt(2.0)
    wp = (w[:, None] + w[None, :]) / math.sqrt(2.0)
    amps = np.exp(-(wm**2) / (2.0 * delta_plus**2) - (wp**2) / (2.0 * delta_minus**2))
    amps = amps.astype(np.complex128)
    norm = math.sqrt(float(np.sum(np.abs(amps) ** 2))) * grid.spacing
    amps /= norm
    return JointSpectralAmplitude(
        kind="parametric-gaussian",
        grid=grid,
        amplitudes=amps,
        delta_plus=float(delta_plus),
        delta_minus=float(delta_minus),
    )


def analytic_schmidt_number(delta_plus: float, delta_minus: float) -> float:
    """Closed-form mode count of the Gaussian amplitude: ``(r + 1/r) / 2``
    with ``r`` the ratio of the two widths."""
    if not (delta_plus > 0.0 and delta_minus > 0.0):
        raise ParameterError("widths must be positive")
    r = delta_plus / delta_minus
    return 0.5 * (r + 1.0 / r)


def schmidt_decompose(jsa: JointSpectralAmplitude) -> SchmidtDecomposition:
    """Singular-value decomposition of the sampled amplitude.

    The matrix is scaled by the grid spacing so the squared singular values
    sum to the (unit) discrete L2 mass and approximate the modal weights of
    the continuous kernel.
    """
    matrix = jsa.amplitudes * jsa.grid.spacing
    # A real matrix factors measurably faster; the Gaussian source is real.
    if np.all(matrix.imag == 0.0):
        matrix = np.ascontiguousarray(matrix.real)
    try:
        lam = np.linalg.svd(matrix, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"singular value decomposition failed: {exc}") from exc
    sumsq = float(np.sum(lam**2))
    weights = lam**2 / sumsq
    schmidt_number = 1.0 / float(np.sum(weights**2))
    return SchmidtDecomposition(singular_values=lam, schmidt_number=schmidt_number)


def _axis_transform(
    values: np.ndarray,
    points_in: np.ndarray,
    spacing_in: float,
    points_out: np.ndarray,
    sign: int,
    axis: int,
) -> np.ndarray:
    """Exact uniform-grid Fourier sum along one axis via a phase-decorated FFT.

    Computes ``sum_j f_j exp(sign*i*x_j*y_k) * h / sqrt(2*pi)`` for midpoint
    grids whose spacings satisfy the dual relation ``g*h = 2*pi/n``.
    """
    n = values.shape[axis]
    if points_in.size != n or points_out.size != n:
        raise ParameterError("transform grids must match the axis length")
    spacing_out = float(points_out[1] - points_out[0])
    if abs(spacing_in * spacing_out * n - 2.0 * math.pi) > 1e-9 * 2.0 * math.pi:
        raise ParameterError("grids are not Fourier duals: spacing product must be 2*pi/n")
    x0 = float(points_in[0])
    y0 = float(points_out[0])
    j = np.arange(n)
    pre = np.exp(sign * 1j * y0 * spacing_in * j)
    post = np.exp(sign * 1j * (x0 * y0 + x0 * spacing_out * j)) * (
        spacing_in / math.sqrt(2.0 * math.pi)
    )
    shape = [1] * values.ndim
    shape[axis] = n
    work = values * pre.reshape(shape)
    if sign == -1:
        core = np.fft.fft(work, axis=axis)
    elif sign == +1:
        core = np.fft.ifft(work, axis=axis) * n
    else:
        raise ParameterError("sign must be +1 or -1")
    return core * post.reshape(shape)


def transform_1d(
    values: np.ndarray,
    grid_in: FrequencyGrid | TimeGrid,
    sign: int = -1,
) -> tuple[TimeGrid | FrequencyGrid, np.ndarray]:
    """Transform samples on a grid to its dual grid.

    ``sign=-1`` is the frequency-to-time direction of this package's
    convention and ``sign=+1`` the time-to-frequency direction; either sign
    is accepted on either grid kind so round trips are expressible.
    """
    grid_out = grid_in.dual()
    out = _axis_transform(
        np.asarray(values, dtype=np.complex128),
        grid_in.points,
        grid_in.spacing,
        grid_out.points,
        sign,
        axis=-1,
    )
    return grid_out, out


def to_temporal(jsa: JointSpectralAmplitude) -> JointTemporalAmplitude:
    """Two-dimensional transform of the spectral amplitude to arrival times.

    Both axes use the ``exp(-i*w*t)`` kernel, so a frequency anti-correlated
    Gaussian becomes time correlated.  For a parametric record the analytic
    intensity widths ``1/delta_minus`` (along the correlated diagonal) and
    ``1/delta_plus`` (across it) are attached to the result.
    """
    tg = jsa.grid.dual()
    work = _axis_transform(
        jsa.amplitudes, jsa.grid.points, jsa.grid.spacing, tg.points, sign=-1, axis=0
    )
    work = _axis_transform(work, jsa.grid.points, jsa.grid.spacing, tg.points, sign=-1, axis=1)
    t_plus = t_minus = None
    if jsa.kind == "parametric-gaussian":
        t_plus = 1.0 / jsa.delta_minus
        t_minus = 1.0 / jsa.delta_plus
    return JointTemporalAmplitude(grid=tg, amplitudes=work, t_plus=t_plus, t_minus=t_minus)


def from_temporal(jta: JointTemporalAmplitude) -> JointSpectralAmplitude:
    """Inverse of :func:`to_temporal`; returns a sampled spectral record."""
    fg = jta.grid.dual()
    work = _axis_transform(
        jta.amplitudes, jta.grid.points, jta.grid.spacing, fg.points, sign=+1, axis=0
    )
    work = _axis_transform(work, jta.grid.points, jta.grid.spacing, fg.points, sign=+1, axis=1)
    return JointSpectralAmplitude(kind="sampled", grid=fg, amplitudes=work)


def _diagonal_widths(amplitudes: np.ndarray, points: np.ndarray, spacing: float) -> tuple[float, float]:
    """Intensity widths along the +45 and -45 degree axes.

    Returns ``sqrt(2)`` times the standard deviation of the intensity along
    ``(u + v)/sqrt(2)`` and ``(u - v)/sqrt(2)``; for a Gaussian intensity
    ``exp(-x**2 / W**2)`` that estimator recovers ``W`` exactly.
    """
    intensity = np.abs(amplitudes) ** 2 * spacing * spacing
    total = float(intensity.sum())
    row_mass = intensity.sum(axis=1)
    col_mass = intensity.sum(axis=0)
    mu_r = float(row_mass @ points) / total
    mu_c = float(col_mass @ points) / total
    var_r = float(row_mass @ (points - mu_r) ** 2) / total
    var_c = float(col_mass @ (points - mu_c) ** 2) / total
    cross = float((points - mu_r) @ intensity @ (points - mu_c)) / total
    var_sum = 0.5 * (var_r + var_c + 2.0 * cross)
    var_diff = 0.5 * (var_r + var_c - 2.0 * cross)
    return math.sqrt(2.0 * var_sum), math.sqrt(2.0 * var_diff)


def fitted_spectral_widths(jsa: JointSpectralAmplitude) -> tuple[float, float]:
    """Moment-fitted intensity widths of a spectral amplitude.

    Returns ``(width_difference, width_sum)``: the width across the
    anti-diagonal (matching ``delta_plus``) and along the sum direction
    (matching ``delta_minus``).
    """
    w_sum, w_diff = _diagonal_widths(jsa.amplitudes, jsa.grid.points, jsa.grid.spacing)
    return w_diff, w_sum


def fitted_temporal_widths(jta: JointTemporalAmplitude) -> tuple[float, float]:
    """Moment-fitted intensity widths of a temporal amplitude.

    Returns ``(width_correlated, width_anticorrelated)``: the width along the
    diagonal (matching ``t_plus``) and across it (matching ``t_minus``).
    """
    w_sum, w_diff = _diagonal_widths(jta.amplitudes, jta.grid.points, jta.grid.spacing)
    return w_sum, w_diff
