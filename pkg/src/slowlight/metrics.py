"""Delay, broadening, distortion and leakage figures for propagated pulses.

Peak positions and widths are measured on the intensity |E(t)|^2 with
local three-point parabolic interpolation, so they do not snap to the
sample spacing. Delay compares output against input peak times and is
meaningful for vacuum-referenced transfer functions, where t = 0 marks the
vacuum arrival.

Distortion splits into an amplitude number D_a, the RMS deviation of |H|
from its band average normalized by that average, and a phase number D_p,
the RMS residual of the unwrapped phase about its least-squares linear fit
in units of 2*pi. A linear phase is a pure delay, so both vanish for
distortionless propagation.

Leakage measures how much pulse energy escapes a fixed-width time window:
the window width is taken from the input envelope (between the first
local intensity minima flanking its main peak), the window is then slid
over the output and leakage is one minus the largest contained energy
fraction. Envelopes without flanking minima (Gaussians) fall back to a
window holding the same energy fraction as an ideal sinc main lobe, which
gives every shape the same undistorted baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

from .errors import MetricUndefinedError
from .medium import VaporCell, _check_validity, susceptibility
from .propagation import TransferFunction
from .pulses import SINC_MAIN_LOBE_FRACTION, PulseEnvelope


def interpolated_peak(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Peak location and value of a sampled curve, parabola-refined."""
    i = int(np.argmax(y))
    if i == 0 or i == len(y) - 1:
        return float(x[i]), float(y[i])
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return float(x[i]), float(y1)
    shift = 0.5 * (y0 - y2) / denom
    shift = min(0.5, max(-0.5, shift))
    h = x[i + 1] - x[i]
    peak_value = y1 - 0.25 * (y0 - y2) * shift
    return float(x[i] + shift * h), float(peak_value)


def _quadratic_crossing(x: np.ndarray, y: np.ndarray, k0: int, level: float) -> float:
    """Where y crosses ``level`` inside [x[k0], x[k0+1]], quadratically refined."""
    n = len(y)
    base = k0 - 1 if k0 - 1 >= 0 else k0
    base = min(base, n - 3)
    y0, y1, y2 = (float(y[base + j]) for j in range(3))
    # Lagrange quadratic on unit-spaced local coordinate s in [0, 2].
    a = 0.5 * y0 - y1 + 0.5 * y2
    b = -1.5 * y0 + 2.0 * y1 - 0.5 * y2
    c = y0 - level
    s_lo = k0 - base
    s_hi = s_lo + 1.0
    roots = []
    if a != 0.0:
        disc = b * b - 4.0 * a * c
        if disc >= 0.0:
            sq = disc**0.5
            roots = [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)]
    elif b != 0.0:
        roots = [-c / b]
    tol = 1e-9
    inside = [s for s in roots if s_lo - tol <= s <= s_hi + tol]
    if inside:
        s = min(inside, key=lambda s: abs(s - 0.5 * (s_lo + s_hi)))
    else:
        ya, yb = float(y[k0]), float(y[k0 + 1])
        s = s_lo + ((level - ya) / (yb - ya) if yb != ya else 0.5)
    h = float(x[base + 1] - x[base])
    return float(x[base] + s * h)


def interpolated_fwhm(x: np.ndarray, y: np.ndarray) -> float:
    """Full width of a sampled curve at half its interpolated peak."""
    _, peak_value = interpolated_peak(x, y)
    half = 0.5 * peak_value
    i = int(np.argmax(y))
    j = i
    while j > 0 and y[j - 1] > half:
        j -= 1
    if j == 0 and y[0] > half:
        raise MetricUndefinedError("half level not reached on the left of the peak")
    # bracket: y[j-1] <= half <= y[j] when j > 0; or y[0] == half
    if j == 0:
        left = float(x[0])
    else:
        left = _quadratic_crossing(x, y, j - 1, half)
    k = i
    n = len(y)
    while k < n - 1 and y[k + 1] > half:
        k += 1
    if k == n - 1 and y[k] > half:
        raise MetricUndefinedError("half level not reached on the right of the peak")
    if k == n - 1:
        right = float(x[n - 1])
    else:
        right = _quadratic_crossing(x, y, k, half)
    return right - left


def peak_delay(pulse_in: PulseEnvelope, pulse_out: PulseEnvelope) -> float:
    """Output peak time minus input peak time (s)."""
    t_in, _ = interpolated_peak(pulse_in.grid.t, pulse_in.intensity)
    t_out, _ = interpolated_peak(pulse_out.grid.t, pulse_out.intensity)
    return t_out - t_in


def fractional_delay(pulse_in: PulseEnvelope, pulse_out: PulseEnvelope) -> float:
    """Peak delay divided by the input intensity FWHM."""
    return peak_delay(pulse_in, pulse_out) / interpolated_fwhm(
        pulse_in.grid.t, pulse_in.intensity
    )


def fractional_broadening(pulse_in: PulseEnvelope, pulse_out: PulseEnvelope) -> float:
    """(output FWHM - input FWHM) / input FWHM on the intensity."""
    w_in = interpolated_fwhm(pulse_in.grid.t, pulse_in.intensity)
    w_out = interpolated_fwhm(pulse_out.grid.t, pulse_out.intensity)
    return (w_out - w_in) / w_in


def distortion_from_samples(omega: np.ndarray, h: np.ndarray) -> tuple[float, float]:
    """Amplitude and phase distortion of transfer samples over a band."""
    if len(omega) < 4:
        raise MetricUndefinedError("distortion needs at least 4 samples across the band")
    order = np.argsort(omega)
    omega = np.asarray(omega, dtype=float)[order]
    h = np.asarray(h, dtype=complex)[order]
    magnitude = np.abs(h)
    mean_mag = magnitude.mean()
    if mean_mag <= 0.0:
        raise MetricUndefinedError("band-averaged |H| vanishes; distortion undefined")
    d_a = float(np.sqrt(np.mean((magnitude - mean_mag) ** 2)) / mean_mag)
    phase = np.unwrap(np.angle(h))
    # Center the frequency axis to keep the linear fit well conditioned.
    x = omega - omega.mean()
    slope, intercept = np.polyfit(x, phase, 1)
    residual = phase - (slope * x + intercept)
    d_p = float(np.sqrt(np.mean(residual**2)) / (2.0 * np.pi))
    return d_a, d_p


def distortion(tf: TransferFunction, band: tuple[float, float]) -> tuple[float, float]:
    """Distortion of a sampled transfer function over an absolute band."""
    omega_abs = tf.absolute_omega
    lo, hi = band
    mask = (omega_abs >= lo) & (omega_abs <= hi)
    if mask.sum() < 4:
        raise MetricUndefinedError("band covers fewer than 4 grid samples")
    return distortion_from_samples(omega_abs[mask], tf.samples[mask])


def distortion_in_band(
    cell: VaporCell, band: tuple[float, float], samples: int = 2048
) -> tuple[float, float]:
    """Distortion of a cell over a band, on a dedicated dense grid.

    Evaluates the vacuum-referenced transfer function analytically, so no
    pulse grid is needed; used by design scans.
    """
    lo, hi = band
    if not lo < hi:
        raise ValueError("band must satisfy lo < hi")
    omega = np.linspace(lo, hi, samples)
    chi = susceptibility(cell, omega)
    _check_validity(chi, omega)
    h = np.exp(1j * omega * cell.effective_length / C_LIGHT * (chi / 2.0))
    return distortion_from_samples(omega, h)


def _first_minimum(intensity: np.ndarray, start: int, step: int) -> int | None:
    """Index of the first strict-rise turning point walking from ``start``."""
    j = start
    n = len(intensity)
    while 0 <= j + step < n:
        if intensity[j + step] > intensity[j]:
            return j
        j += step
    return None


def _window_width(pulse: PulseEnvelope, fallback: bool) -> int:
    """Leakage window width in samples, from the input envelope."""
    intensity = pulse.intensity
    i_peak = int(np.argmax(intensity))
    left = _first_minimum(intensity, i_peak, -1)
    right = _first_minimum(intensity, i_peak, +1)
    if left is not None and right is not None:
        return right - left + 1
    if not fallback:
        raise MetricUndefinedError(
            "envelope has no intensity minima flanking its peak; "
            "no natural leakage window"
        )
    total = float(intensity.sum())
    if total <= 0.0:
        raise MetricUndefinedError("envelope carries no energy")
    cumulative = np.concatenate([[0.0], np.cumsum(intensity)])
    n = len(intensity)
    for half in range(n // 2 + 1):
        lo = max(0, i_peak - half)
        hi = min(n, i_peak + half + 1)
        if (cumulative[hi] - cumulative[lo]) >= SINC_MAIN_LOBE_FRACTION * total:
            return hi - lo
    return n


def power_leakage(
    pulse_in: PulseEnvelope, pulse_out: PulseEnvelope, fallback: bool = True
) -> float:
    """Fraction of output energy outside the best-placed input-sized window.

    The window width comes from the input envelope's main intensity lobe;
    the window slides over the output to maximize the contained energy.
    Invariant under amplitude scaling and under time shifts of either
    envelope.
    """
    width = _window_width(pulse_in, fallback)
    intensity = pulse_out.intensity
    total = float(intensity.sum())
    if total <= 0.0:
        raise MetricUndefinedError("output envelope carries no energy")
    n = len(intensity)
    width = min(width, n)
    cumulative = np.concatenate([[0.0], np.cumsum(intensity)])
    window_sums = cumulative[width:] - cumulative[: n - width + 1]
    best = float(window_sums.max())
    return 1.0 - best / total


@dataclass(frozen=True, eq=False)
class PropagationReport:
    """Scalar figures of one propagation, plus the output envelope."""

    delay: float
    input_fwhm: float
    output_fwhm: float
    fractional_delay: float
    fractional_broadening: float
    amplitude_distortion: float
    phase_distortion: float
    leakage: float
    absorbed: float
    input_energy: float
    output_energy: float
    output: PulseEnvelope

    def to_record(self) -> dict[str, float]:
        """Flat key-value record of the scalar figures."""
        return {
            "delay_s": self.delay,
            "input_fwhm_s": self.input_fwhm,
            "output_fwhm_s": self.output_fwhm,
            "fractional_delay": self.fractional_delay,
            "fractional_broadening": self.fractional_broadening,
            "amplitude_distortion": self.amplitude_distortion,
            "phase_distortion": self.phase_distortion,
            "leakage": self.leakage,
            "absorbed": self.absorbed,
            "input_energy": self.input_energy,
            "output_energy": self.output_energy,
        }


def propagation_report(
    pulse_in: PulseEnvelope,
    pulse_out: PulseEnvelope,
    tf: TransferFunction,
    band: tuple[float, float] | None = None,
) -> PropagationReport:
    """Assemble the full report for one propagated pulse.

    ``band`` defaults to the input pulse's nominal band and scopes the
    distortion figures. The transfer function must be vacuum referenced,
    otherwise the peak delay would include the trivial vacuum transit.
    """
    if not tf.vacuum_referenced:
        raise ValueError("report requires a vacuum-referenced transfer function")
    if band is None:
        band = pulse_in.band
    if band is None:
        raise ValueError("band is required when the input pulse has no nominal bandwidth")
    t_in, _ = interpolated_peak(pulse_in.grid.t, pulse_in.intensity)
    t_out, _ = interpolated_peak(pulse_out.grid.t, pulse_out.intensity)
    w_in = interpolated_fwhm(pulse_in.grid.t, pulse_in.intensity)
    w_out = interpolated_fwhm(pulse_out.grid.t, pulse_out.intensity)
    d_a, d_p = distortion(tf, band)
    energy_in = pulse_in.energy
    energy_out = pulse_out.energy
    return PropagationReport(
        delay=t_out - t_in,
        input_fwhm=w_in,
        output_fwhm=w_out,
        fractional_delay=(t_out - t_in) / w_in,
        fractional_broadening=(w_out - w_in) / w_in,
        amplitude_distortion=d_a,
        phase_distortion=d_p,
        leakage=power_leakage(pulse_in, pulse_out),
        absorbed=1.0 - energy_out / energy_in,
        input_energy=energy_in,
        output_energy=energy_out,
        output=pulse_out,
    )
