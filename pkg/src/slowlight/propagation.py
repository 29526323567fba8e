"""Linear propagation of envelopes through a vapor column.

A cell acts on the field spectrum as H(omega) = exp(1j*n(omega)*omega*L/c)
with L the effective column length. The vacuum-referenced variant divides
out the empty-cell transit, H_ref = H * exp(-1j*omega*L/c), so an empty
cell gives H_ref = 1 and the phase slope at band center equals the group
delay relative to vacuum. Under the exp(-1j*omega*t) convention Im(n) >= 0
yields |H| <= 1 (a passive cell).

The transfer function is evaluated on the pulse grid's absolute
frequencies carrier + grid.omega. An FFT grid broad enough for a
femtosecond pulse legitimately spans the vapor resonances where the
weak-susceptibility index expansion breaks down; that is harmless because
the envelope spectrum is zero there, so the model-validity guard is
enforced only over the band the caller declares.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.constants import c as C_LIGHT

from .errors import GridError, WraparoundError
from .medium import CHI_VALIDITY_LIMIT, VaporCell, _check_validity, susceptibility
from .pulses import PulseEnvelope, SampledGrid, from_spectrum, to_spectrum

DEFAULT_EDGE_GUARD = 1e-3


@dataclass(frozen=True, eq=False)
class TransferFunction:
    """Complex H sampled on a grid's absolute frequencies, FFT order."""

    grid: SampledGrid
    carrier: float
    samples: np.ndarray
    vacuum_referenced: bool

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (self.grid.n,):
            raise ValueError("samples must be a 1-d array matching the grid size")
        object.__setattr__(self, "samples", samples)

    @property
    def absolute_omega(self) -> np.ndarray:
        return self.carrier + self.grid.omega


def transfer_function(
    cell: VaporCell,
    grid: SampledGrid,
    carrier: float,
    vacuum_referenced: bool = True,
    band: tuple[float, float] | None = None,
) -> TransferFunction:
    """Evaluate the cell's transfer function on a pulse grid.

    :param band: absolute angular frequency interval over which the
        weak-susceptibility validity guard is enforced; None skips the
        guard (the caller vouches for the band of interest).
    """
    omega_abs = carrier + grid.omega
    if omega_abs.min() <= 0.0:
        raise GridError(
            "grid spans non-positive absolute frequencies; use a larger dt or carrier"
        )
    chi = susceptibility(cell, omega_abs)
    if band is not None:
        lo, hi = band
        mask = (omega_abs >= lo) & (omega_abs <= hi)
        if not mask.any():
            raise ValueError("declared band does not intersect the grid frequencies")
        _check_validity(chi[mask], omega_abs[mask])
    phase = 1j * omega_abs * (cell.effective_length / C_LIGHT)
    if vacuum_referenced:
        h = np.exp(phase * (chi / 2.0))
    else:
        h = np.exp(phase * (1.0 + chi / 2.0))
    return TransferFunction(grid, carrier, h, vacuum_referenced)


def propagate(
    pulse: PulseEnvelope,
    tf: TransferFunction,
    edge_guard: float = DEFAULT_EDGE_GUARD,
) -> PulseEnvelope:
    """Apply a transfer function to an envelope via the FFT.

    Raises :class:`WraparoundError` when the output envelope at the window
    edge exceeds ``edge_guard`` times its peak, which signals that the
    periodic window is too small for the delayed and broadened pulse.
    """
    if (pulse.grid.n, pulse.grid.dt) != (tf.grid.n, tf.grid.dt):
        raise ValueError("pulse and transfer function grids do not match")
    if pulse.carrier != tf.carrier:
        raise ValueError("pulse and transfer function carriers do not match")
    spectrum = to_spectrum(pulse.samples, pulse.grid)
    out = from_spectrum(spectrum * tf.samples, pulse.grid)
    magnitudes = np.abs(out)
    peak = magnitudes.max()
    if peak > 0.0:
        edge = max(magnitudes[0], magnitudes[-1])
        if edge > edge_guard * peak:
            raise WraparoundError(
                f"output envelope edge is {edge / peak:.2e} of its peak "
                f"(limit {edge_guard:.0e}); enlarge the time window (more samples "
                f"or a larger span) to contain the delayed pulse"
            )
    return PulseEnvelope(
        grid=pulse.grid,
        carrier=pulse.carrier,
        samples=out,
        shape=pulse.shape,
        t0=pulse.t0,
        bandwidth=pulse.bandwidth,
    )


def export_transfer_function(path: str | Path, tf: TransferFunction) -> None:
    """Write (wavelength_nm, |H|, unwrapped phase) sorted by wavelength."""
    omega_abs = tf.absolute_omega
    order = np.argsort(omega_abs)[::-1]  # ascending wavelength
    omega_sorted = omega_abs[order]
    h_sorted = tf.samples[order]
    wavelength_nm = 2.0 * np.pi * C_LIGHT / omega_sorted * 1e9
    magnitude = np.abs(h_sorted)
    phase = np.unwrap(np.angle(h_sorted))
    header_lines = [
        "transfer function",
        f"carrier = {tf.carrier!r}",
        f"vacuum_referenced = {tf.vacuum_referenced}",
        f"n = {tf.grid.n}",
        f"dt = {tf.grid.dt!r}",
        "columns: wavelength_nm, magnitude, phase_rad",
    ]
    data = np.column_stack([wavelength_nm, magnitude, phase])
    np.savetxt(path, data, fmt="%.17e", delimiter=",", header="\n".join(header_lines))
