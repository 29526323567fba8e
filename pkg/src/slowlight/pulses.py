"""Sampled pulse envelopes on uniform FFT grids.

Envelopes are complex baseband fields E(t) riding a carrier at angular
frequency omega_c, stored in time order on a symmetric window with t = 0 at
sample n/2. The analytic Fourier pair follows the exp(-1j*omega*t) field
convention:

    spectrum(omega) = integral E(t) exp(+1j*omega*t) dt
    E(t) = (1/2pi) integral spectrum(omega) exp(-1j*omega*t) domega

realized discretely by :func:`to_spectrum` / :func:`from_spectrum` on the
baseband frequencies 2*pi*fftfreq(n, dt). Multiplying the spectrum by
exp(+1j*omega*tau) therefore delays the envelope by tau.

Two transform-limited shapes are provided. The Gaussian is defined in time,
E(t) = exp(-2 ln2 t^2 / T0^2), with intensity FWHM exactly T0 and spectral
intensity FWHM 0.4413/T0. The sinc pulse is defined in frequency as an
exact rectangle of full width 0.8859/T0 Hz, which makes its time-domain
intensity FWHM equal T0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, GridError

# Intensity-FWHM time-bandwidth products of the transform-limited shapes.
GAUSSIAN_TBP = 0.4412712003053032  # 2 ln2 / pi
SINC_TBP = 0.885892941378905  # (2/pi) * half-power argument of sinc^2

# Fraction of an ideal sinc pulse's energy inside its main lobe, 2 Si(2pi)/pi.
SINC_MAIN_LOBE_FRACTION = 0.9028233335802807

# Default relative envelope magnitude allowed at the window edge. On a
# periodic grid the sinc's two 1/t tails alias onto each other near the
# edge, so the construction check allows roughly twice the ideal-tail
# level that the grid designer budgets for.
GAUSSIAN_EDGE_TARGET = 1e-6
SINC_EDGE_TARGET = 1.2e-4
SINC_EDGE_DESIGN_TARGET = 5e-5

_MIN_TIME_FACTOR = 16.0
_MIN_FREQ_FACTOR = 8.0


@dataclass(frozen=True)
class SampledGrid:
    """Uniform time grid of n samples (power of two) spaced dt seconds."""

    n: int
    dt: float

    def __post_init__(self) -> None:
        if not (isinstance(self.n, int) and self.n >= 4 and (self.n & (self.n - 1)) == 0):
            raise GridError("grid size must be a power of two, at least 4")
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise GridError("grid spacing must be positive and finite")

    @property
    def t(self) -> np.ndarray:
        """Sample times, symmetric about t = 0 (s)."""
        return (np.arange(self.n) - self.n // 2) * self.dt

    @property
    def omega(self) -> np.ndarray:
        """Baseband angular frequencies in FFT order (rad/s)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, self.dt)

    @property
    def span_time(self) -> float:
        return self.n * self.dt

    @property
    def span_omega(self) -> float:
        return 2.0 * np.pi / self.dt

    @property
    def domega(self) -> float:
        return 2.0 * np.pi / (self.n * self.dt)


def to_spectrum(samples: np.ndarray, grid: SampledGrid) -> np.ndarray:
    """Baseband spectrum on ``grid.omega``, honoring the t = 0 origin."""
    return np.fft.ifft(np.fft.ifftshift(samples)) * (grid.n * grid.dt)


def from_spectrum(spectrum: np.ndarray, grid: SampledGrid) -> np.ndarray:
    """Inverse of :func:`to_spectrum`; returns samples in time order."""
    return np.fft.fftshift(np.fft.fft(spectrum)) / (grid.n * grid.dt)


@dataclass(frozen=True, eq=False)
class PulseEnvelope:
    """A complex envelope sampled on a grid, riding a carrier.

    ``t0`` and ``bandwidth`` record the nominal intensity FWHM (s) and the
    nominal full spectral width (Hz) of the shape the envelope was built
    from; they are None for envelopes of unknown pedigree.
    """

    grid: SampledGrid
    carrier: float
    samples: np.ndarray
    shape: str = "custom"
    t0: float | None = None
    bandwidth: float | None = None

    def __post_init__(self) -> None:
        if self.carrier <= 0.0:
            raise ValueError("carrier angular frequency must be positive")
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (self.grid.n,):
            raise ValueError("samples must be a 1-d array matching the grid size")
        object.__setattr__(self, "samples", samples)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    @property
    def energy(self) -> float:
        """Integral of |E|^2 dt over the window."""
        return float(np.sum(self.intensity) * self.grid.dt)

    @property
    def band(self) -> tuple[float, float] | None:
        """Absolute angular frequency interval covered by the nominal bandwidth."""
        if self.bandwidth is None:
            return None
        half = math.pi * self.bandwidth
        return (self.carrier - half, self.carrier + half)

    def edge_ratio(self, margin: int = 32) -> float:
        """Largest |E| within ``margin`` samples of either window edge, / peak."""
        margin = min(margin, self.grid.n // 4)
        mags = np.abs(self.samples)
        peak = mags.max()
        if peak == 0.0:
            return 0.0
        return float(max(mags[:margin].max(), mags[-margin:].max()) / peak)


def _check_envelope_grid(grid: SampledGrid, t0: float, bandwidth: float) -> None:
    if grid.span_omega < _MIN_FREQ_FACTOR * (2.0 * math.pi * bandwidth):
        raise GridError(
            f"frequency span {grid.span_omega:.3e} rad/s is below "
            f"{_MIN_FREQ_FACTOR:g}x the pulse bandwidth; decrease dt"
        )
    if grid.span_time < _MIN_TIME_FACTOR * t0:
        raise GridError(
            f"time span {grid.span_time:.3e} s is below {_MIN_TIME_FACTOR:g}x the "
            f"pulse duration; increase the number of samples"
        )


def _check_edges(pulse: PulseEnvelope, target: float) -> None:
    ratio = pulse.edge_ratio()
    if ratio >= target:
        raise GridError(
            f"envelope magnitude at the window edge is {ratio:.2e} of the peak "
            f"(limit {target:.0e}); enlarge the time window"
        )


def make_gaussian(t0: float, carrier: float, grid: SampledGrid) -> PulseEnvelope:
    """Transform-limited Gaussian with intensity FWHM ``t0``, unit peak."""
    if t0 <= 0.0:
        raise ValueError("t0 must be positive")
    bandwidth = GAUSSIAN_TBP / t0
    _check_envelope_grid(grid, t0, bandwidth)
    t = grid.t
    samples = np.exp(-2.0 * math.log(2.0) * (t / t0) ** 2).astype(complex)
    pulse = PulseEnvelope(grid, carrier, samples, "gaussian", t0, bandwidth)
    _check_edges(pulse, GAUSSIAN_EDGE_TARGET)
    return pulse


def make_sinc(
    t0: float,
    carrier: float,
    grid: SampledGrid,
    edge_target: float = SINC_EDGE_TARGET,
) -> PulseEnvelope:
    """Transform-limited sinc pulse with intensity FWHM ``t0``, unit peak.

    Built in the frequency domain as an exact rectangle of full width
    0.8859/t0 Hz, so the passband is flat and the out-of-band spectrum is
    identically zero by construction. The 1/t envelope tails decay slowly;
    ``edge_target`` bounds their relative magnitude at the window edge.
    """
    if t0 <= 0.0:
        raise ValueError("t0 must be positive")
    bandwidth = SINC_TBP / t0
    _check_envelope_grid(grid, t0, bandwidth)
    half_width = math.pi * bandwidth
    mask = np.abs(grid.omega) <= half_width * (1.0 + 1e-12)
    spectrum = mask.astype(complex)
    field = from_spectrum(spectrum, grid).real
    peak = field[grid.n // 2]
    if peak <= 0.0:
        raise GridError("sinc construction failed; grid cannot resolve the passband")
    samples = (field / peak).astype(complex)
    pulse = PulseEnvelope(grid, carrier, samples, "sinc", t0, bandwidth)
    _check_edges(pulse, edge_target)
    return pulse


def design_grid(
    t0: float,
    shape: str = "sinc",
    max_delay: float = 0.0,
    extra_broadening: float = 0.0,
    time_factor: float = _MIN_TIME_FACTOR,
    freq_factor: float = _MIN_FREQ_FACTOR,
    samples_per_t0: float = 32.0,
    edge_target: float | None = None,
    max_samples: int = 2**22,
) -> SampledGrid:
    """Choose a grid that represents a pulse and its propagated version.

    The time window covers ``time_factor`` times the pulse duration plus the
    expected delay and broadening, and additionally whatever span the shape's
    tails need to fall below ``edge_target`` at the window edge. The sample
    spacing resolves ``freq_factor`` times the pulse bandwidth and keeps at
    least ``samples_per_t0`` samples across the duration.
    """
    if t0 <= 0.0:
        raise ValueError("t0 must be positive")
    if shape not in ("gaussian", "sinc"):
        raise ValueError(f"unknown pulse shape {shape!r}")
    if time_factor < _MIN_TIME_FACTOR or freq_factor < _MIN_FREQ_FACTOR:
        raise GridError(
            f"time_factor below {_MIN_TIME_FACTOR:g} or freq_factor below "
            f"{_MIN_FREQ_FACTOR:g} cannot satisfy the envelope invariants"
        )
    if shape == "gaussian":
        bandwidth = GAUSSIAN_TBP / t0
        target = GAUSSIAN_EDGE_TARGET if edge_target is None else edge_target
        # exp(-2 ln2 (t/t0)^2) = target
        tail_half_span = t0 * math.sqrt(math.log(1.0 / target) / (2.0 * math.log(2.0)))
    else:
        bandwidth = SINC_TBP / t0
        target = SINC_EDGE_DESIGN_TARGET if edge_target is None else edge_target
        # 1 / (pi * bandwidth * t) = target
        tail_half_span = 1.0 / (math.pi * bandwidth * target)
    dt = min(1.0 / (freq_factor * bandwidth), t0 / samples_per_t0)
    span = max(
        time_factor * (t0 + max_delay + extra_broadening),
        2.0 * (tail_half_span + max_delay + extra_broadening),
    )
    n = 2 ** math.ceil(math.log2(span / dt))
    if n > max_samples:
        raise GridError(
            f"grid would need {n} samples (limit {max_samples}); relax the edge "
            f"target or the window factors"
        )
    return SampledGrid(n=n, dt=dt)


_HEADER_FIELDS = ("carrier", "dt", "n", "shape", "t0", "bandwidth")


def save_envelope(path: str | Path, pulse: PulseEnvelope) -> None:
    """Write an envelope as comma-delimited (t, Re E, Im E) text."""
    header_lines = [
        "pulse envelope",
        f"carrier = {pulse.carrier!r}",
        f"dt = {pulse.grid.dt!r}",
        f"n = {pulse.grid.n}",
        f"shape = {pulse.shape}",
        f"t0 = {pulse.t0!r}",
        f"bandwidth = {pulse.bandwidth!r}",
        "columns: t_s, re_e, im_e",
    ]
    data = np.column_stack([pulse.grid.t, pulse.samples.real, pulse.samples.imag])
    # 12 significant digits keeps files half the size of full repr precision
    # while staying far below any physical tolerance of interest.
    np.savetxt(
        path,
        data,
        fmt="%.12e",
        delimiter=",",
        header="\n".join(header_lines),
    )


def load_envelope(path: str | Path) -> PulseEnvelope:
    """Read an envelope written by :func:`save_envelope`."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"pulse file not found: {path}")
    meta: dict[str, str] = {}
    with path.open() as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
    for key in ("carrier", "dt", "n"):
        if key not in meta:
            raise ConfigError(f"pulse file {path} is missing header field {key!r}")
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.shape[1] != 3:
        raise ConfigError(f"pulse file {path} must have three columns: t, Re E, Im E")
    n = int(meta["n"])
    if data.shape[0] != n:
        raise ConfigError(f"pulse file {path} row count {data.shape[0]} != header n {n}")
    grid = SampledGrid(n=n, dt=float(meta["dt"]))

    def _optional(key: str) -> float | None:
        value = meta.get(key, "None")
        return None if value == "None" else float(value)

    return PulseEnvelope(
        grid=grid,
        carrier=float(meta["carrier"]),
        samples=data[:, 1] + 1j * data[:, 2],
        shape=meta.get("shape", "custom"),
        t0=_optional("t0"),
        bandwidth=_optional("bandwidth"),
    )
