"""Dispersion model for a warm alkali vapor cell.

The vapor's complex susceptibility is a sum of Lorentzian lines,

    chi(omega) = -N(T) * sum_j  s_j / (omega - omega_j + 1j*gamma_j),

with N the number density, s_j the line strength (m^3 rad/s), omega_j the
line center and gamma_j the half linewidth (rad/s). Envelopes and fields
evolve as exp(-1j*omega*t) throughout the package, so the poles of chi sit
in the lower half plane (causal response) and Im chi >= 0 corresponds to
absorption.

The refractive index uses the weak-vapor expansion n = 1 + chi/2, which is
only trusted while |chi| < CHI_VALIDITY_LIMIT; functions that rely on the
expansion raise :class:`ModelValidityError` beyond that. Group quantities
are evaluated from closed-form derivatives of the Lorentzian sum, never
from numerical differencing.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import k as K_BOLTZMANN
from scipy.constants import torr as TORR_PA

from .errors import (
    CalibrationError,
    CatalogError,
    DensityRangeError,
    ModelValidityError,
    RootNotFoundError,
)

# Beyond this magnitude the n = 1 + chi/2 expansion is not trusted.
CHI_VALIDITY_LIMIT = 1e-2

ZERO_CELSIUS = 273.15


def celsius_to_kelvin(temperature_c: float) -> float:
    return float(temperature_c) + ZERO_CELSIUS


def kelvin_to_celsius(temperature_k: float) -> float:
    return float(temperature_k) - ZERO_CELSIUS


def wavelength_to_omega(wavelength: float) -> float:
    """Vacuum wavelength (m) to angular frequency (rad/s)."""
    if wavelength <= 0.0:
        raise ValueError("wavelength must be positive")
    return 2.0 * math.pi * C_LIGHT / wavelength


def omega_to_wavelength(omega: float) -> float:
    """Angular frequency (rad/s) to vacuum wavelength (m)."""
    if omega <= 0.0:
        raise ValueError("angular frequency must be positive")
    return 2.0 * math.pi * C_LIGHT / omega


@dataclass(frozen=True)
class SpectralLine:
    """One Lorentzian line of the susceptibility sum.

    :param strength: line strength s_j in m^3 rad/s.
    :param center: line center omega_j in rad/s.
    :param linewidth: half linewidth gamma_j in rad/s.
    """

    strength: float
    center: float
    linewidth: float

    def __post_init__(self) -> None:
        for name in ("strength", "center", "linewidth"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise CatalogError(f"line {name} must be a finite number")
            if value <= 0.0:
                raise CatalogError(f"line {name} must be positive")

    @property
    def wavelength(self) -> float:
        """Vacuum wavelength of the line center (m)."""
        return omega_to_wavelength(self.center)


@dataclass(frozen=True)
class LineCatalog:
    """An ordered set of spectral lines describing one species."""

    label: str
    lines: tuple[SpectralLine, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lines", tuple(self.lines))
        if not self.lines:
            raise CatalogError("catalog must contain at least one line")
        centers = [line.center for line in self.lines]
        if len(set(centers)) != len(centers):
            raise CatalogError("catalog line centers must be distinct")

    @property
    def centers(self) -> np.ndarray:
        return np.array([line.center for line in self.lines])


@dataclass(frozen=True)
class VaporPressureBranch:
    """Coefficients of log10 P(torr) = a + b/T + c*T + d*log10(T)."""

    a: float
    b: float
    c: float
    d: float

    def log10_pressure_torr(self, temperature_k: float) -> float:
        t = temperature_k
        return self.a + self.b / t + self.c * t + self.d * math.log10(t)


@dataclass(frozen=True)
class DensityModel:
    """Number density from a two-branch saturated vapor pressure fit.

    The solid branch applies below ``transition_k``, the liquid branch at
    and above it. ``scale`` is a dimensionless calibration factor applied
    multiplicatively to the density; see :func:`calibrate_density_scale`.
    """

    label: str
    solid: VaporPressureBranch
    liquid: VaporPressureBranch
    transition_k: float
    validity_k: tuple[float, float]
    scale: float = 1.0

    def __post_init__(self) -> None:
        lo, hi = self.validity_k
        if not (0.0 < lo < hi):
            raise CatalogError("density validity range must satisfy 0 < lo < hi")
        if not (lo <= self.transition_k <= hi):
            raise CatalogError("density branch transition must lie inside the validity range")
        if not (self.scale >= 0.0 and math.isfinite(self.scale)):
            raise CatalogError("density scale must be finite and non-negative")
        object.__setattr__(self, "validity_k", (float(lo), float(hi)))

    def number_density(self, temperature_k: float) -> float:
        """Atoms per m^3 at the given temperature (K)."""
        lo, hi = self.validity_k
        if not (lo <= temperature_k <= hi):
            raise DensityRangeError(
                f"temperature {temperature_k:.2f} K outside the vapor-pressure fit "
                f"validity range [{lo:.2f}, {hi:.2f}] K"
            )
        branch = self.solid if temperature_k < self.transition_k else self.liquid
        pressure_pa = 10.0 ** branch.log10_pressure_torr(temperature_k) * TORR_PA
        return self.scale * pressure_pa / (K_BOLTZMANN * temperature_k)

    def scaled(self, factor: float) -> "DensityModel":
        """A copy with the calibration scale multiplied by ``factor``."""
        if factor < 0.0 or not math.isfinite(factor):
            raise ValueError("scale factor must be finite and non-negative")
        return dataclasses.replace(self, scale=self.scale * factor)


@dataclass(frozen=True)
class VaporCell:
    """A vapor column: line catalog, density model, temperature and length.

    ``temperature`` is stored in kelvin; use :meth:`from_celsius` when
    building cells from interface-level values. ``passes`` counts traversals
    of the physical length, so the effective column is ``length * passes``.
    """

    catalog: LineCatalog
    density: DensityModel
    temperature: float
    length: float
    passes: int = 1

    def __post_init__(self) -> None:
        if self.length <= 0.0:
            raise ValueError("cell length must be positive")
        if not (isinstance(self.passes, int) and self.passes >= 1):
            raise ValueError("passes must be an integer >= 1")
        # Fail early if the temperature is outside the density fit's range.
        self.density.number_density(self.temperature)

    @classmethod
    def from_celsius(
        cls,
        catalog: LineCatalog,
        density: DensityModel,
        temperature_c: float,
        length: float,
        passes: int = 1,
    ) -> "VaporCell":
        return cls(catalog, density, celsius_to_kelvin(temperature_c), length, passes)

    @property
    def temperature_celsius(self) -> float:
        return kelvin_to_celsius(self.temperature)

    @property
    def effective_length(self) -> float:
        return self.length * self.passes

    @property
    def number_density(self) -> float:
        return self.density.number_density(self.temperature)


def _as_array(omega) -> tuple[np.ndarray, bool]:
    arr = np.asarray(omega, dtype=float)
    return arr, arr.ndim == 0


def _restore(value: np.ndarray, scalar: bool):
    return value[()] if scalar else value


def susceptibility(cell: VaporCell, omega) -> complex | np.ndarray:
    """Complex susceptibility chi(omega). Accepts scalars or arrays."""
    arr, scalar = _as_array(omega)
    n_density = cell.number_density
    chi = np.zeros(arr.shape, dtype=complex)
    for line in cell.catalog.lines:
        chi -= line.strength / (arr - line.center + 1j * line.linewidth)
    chi *= n_density
    return _restore(chi, scalar)


def _check_validity(chi: np.ndarray, omega: np.ndarray) -> None:
    magnitude = np.abs(chi)
    worst = np.argmax(magnitude)
    if magnitude.flat[worst] >= CHI_VALIDITY_LIMIT:
        wavelength_nm = omega_to_wavelength(float(np.asarray(omega).flat[worst])) * 1e9
        raise ModelValidityError(
            f"|chi| = {magnitude.flat[worst]:.3e} at {wavelength_nm:.3f} nm exceeds "
            f"{CHI_VALIDITY_LIMIT:.0e}; the weak-vapor index n = 1 + chi/2 is not valid here"
        )


def refractive_index(cell: VaporCell, omega) -> complex | np.ndarray:
    """Complex refractive index n = 1 + chi/2 under the weak-vapor expansion."""
    arr, scalar = _as_array(omega)
    chi = np.atleast_1d(susceptibility(cell, arr))
    _check_validity(chi, np.atleast_1d(arr))
    n = 1.0 + chi / 2.0
    return _restore(n.reshape(arr.shape), scalar)


def optical_depth(cell: VaporCell, omega) -> float | np.ndarray:
    """Intensity optical depth alpha*L = 2 omega L_eff Im(n) / c.

    Computed directly from Im(chi)/2, which is exact within the linear
    response model, so this stays meaningful on resonance where the real
    index expansion does not.
    """
    arr, scalar = _as_array(omega)
    chi = np.atleast_1d(susceptibility(cell, arr))
    depth = arr.reshape(-1) * cell.effective_length * chi.imag / C_LIGHT
    return _restore(depth.reshape(arr.shape), scalar)


def transmission(cell: VaporCell, omega) -> float | np.ndarray:
    """Intensity transmission exp(-alpha*L) through the effective column."""
    arr, scalar = _as_array(omega)
    t = np.exp(-np.atleast_1d(optical_depth(cell, arr)))
    return _restore(t.reshape(arr.shape), scalar)


def _dispersion_sums(cell: VaporCell, omega: np.ndarray):
    """Real index and its first two frequency derivatives, closed form.

    With Delta_j = omega - omega_j and D_j = Delta_j^2 + gamma_j^2:

        n' - 1        = -(N/2) sum_j s_j Delta_j / D_j
        dn'/domega    = -(N/2) sum_j s_j (gamma_j^2 - Delta_j^2) / D_j^2
        d2n'/domega2  =    N   sum_j s_j Delta_j (3 gamma_j^2 - Delta_j^2) / D_j^3
    """
    n_density = cell.number_density
    n_minus_1 = np.zeros(omega.shape)
    dn = np.zeros(omega.shape)
    d2n = np.zeros(omega.shape)
    for line in cell.catalog.lines:
        delta = omega - line.center
        g2 = line.linewidth * line.linewidth
        d = delta * delta + g2
        n_minus_1 -= line.strength * delta / d
        dn -= line.strength * (g2 - delta * delta) / (d * d)
        d2n += 2.0 * line.strength * delta * (3.0 * g2 - delta * delta) / (d * d * d)
    n_minus_1 *= 0.5 * n_density
    dn *= 0.5 * n_density
    d2n *= 0.5 * n_density
    return n_minus_1, dn, d2n


def group_index(cell: VaporCell, omega) -> float | np.ndarray:
    """Group index n_g = n' + omega dn'/domega from analytic derivatives."""
    arr, scalar = _as_array(omega)
    flat = np.atleast_1d(arr).astype(float)
    chi = np.atleast_1d(susceptibility(cell, flat))
    _check_validity(chi, flat)
    n_minus_1, dn, _ = _dispersion_sums(cell, flat)
    ng = 1.0 + n_minus_1 + flat * dn
    return _restore(ng.reshape(arr.shape), scalar)


def group_delay(cell: VaporCell, omega) -> float | np.ndarray:
    """Group delay relative to vacuum, t_D = L_eff (n_g - 1) / c."""
    arr, scalar = _as_array(omega)
    ng = np.atleast_1d(group_index(cell, arr))
    delay = cell.effective_length * (ng - 1.0) / C_LIGHT
    return _restore(delay.reshape(arr.shape), scalar)


def gvd(cell: VaporCell, omega) -> float | np.ndarray:
    """Group velocity dispersion d(1/v_g)/domega = (dn_g/domega) / c in s^2/m."""
    arr, scalar = _as_array(omega)
    flat = np.atleast_1d(arr).astype(float)
    chi = np.atleast_1d(susceptibility(cell, flat))
    _check_validity(chi, flat)
    _, dn, d2n = _dispersion_sums(cell, flat)
    beta2 = (2.0 * dn + flat * d2n) / C_LIGHT
    return _restore(beta2.reshape(arr.shape), scalar)


def _default_gvd_bracket(cell: VaporCell) -> tuple[float, float]:
    centers = cell.catalog.centers
    if centers.size < 2:
        raise RootNotFoundError(
            "catalog has a single line; supply an explicit bracket for the dispersion zero"
        )
    lo, hi = centers.min(), centers.max()
    span = hi - lo
    return lo + 0.25 * span, hi - 0.25 * span


def find_gvd_zero(
    cell: VaporCell,
    omega_lo: float | None = None,
    omega_hi: float | None = None,
    rtol: float = 1e-12,
    max_iterations: int = 200,
) -> float:
    """Locate the zero of the group velocity dispersion by bisection.

    With no explicit bracket the search window is the middle half of the
    interval spanned by the catalog's line centers, which isolates the
    between-line dispersion zero for doublet-like catalogs.

    :returns: angular frequency of the GVD zero, to relative tolerance ``rtol``.
    :raises RootNotFoundError: if the bracket does not straddle a sign change.
    """
    if (omega_lo is None) != (omega_hi is None):
        raise ValueError("supply both bracket endpoints or neither")
    if omega_lo is None:
        omega_lo, omega_hi = _default_gvd_bracket(cell)
    lo, hi = float(omega_lo), float(omega_hi)
    if not lo < hi:
        raise ValueError("bracket must satisfy omega_lo < omega_hi")
    f_lo = gvd(cell, lo)
    f_hi = gvd(cell, hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise RootNotFoundError(
            "group velocity dispersion does not change sign over the bracket; "
            "supply a bracket that straddles the dispersion zero"
        )
    for _ in range(max_iterations):
        mid = 0.5 * (lo + hi)
        if (hi - lo) <= rtol * mid:
            return mid
        f_mid = gvd(cell, mid)
        if f_mid == 0.0:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _index_excess_bisect(f, lo: float, hi: float, rtol: float = 1e-12) -> float:
    f_lo = f(lo)
    if f_lo == 0.0:
        return lo
    sign_lo = math.copysign(1.0, f_lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (hi - lo) <= rtol * abs(mid):
            return mid
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if math.copysign(1.0, f_mid) == sign_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _band_edge(cell: VaporCell, omega_zero: float, omega_line: float) -> float:
    """First frequency, marching from the dispersion zero toward one line,
    where n_g - 1 exceeds 1.5x its dispersion-zero value."""
    threshold = 1.5 * (group_index(cell, omega_zero) - 1.0)

    def excess(omega: float) -> float:
        return (group_index(cell, omega) - 1.0) - threshold

    gap = omega_line - omega_zero
    probes = omega_zero + gap * np.linspace(0.0, 0.97, 400)[1:]
    previous = omega_zero
    for omega in probes:
        chi = susceptibility(cell, float(omega))
        if abs(chi) >= CHI_VALIDITY_LIMIT:
            break
        if excess(float(omega)) > 0.0:
            lo, hi = sorted((previous, float(omega)))
            return _index_excess_bisect(excess, lo, hi)
        previous = float(omega)
    raise RootNotFoundError(
        "uniform-delay band edge not bracketed between the dispersion zero and the line"
    )


def uniform_delay_band(cell: VaporCell, omega_zero: float | None = None) -> tuple[float, float]:
    """Frequency interval around the dispersion zero where n_g - 1 stays
    within 50% of its value at the zero.

    n_g is minimal at the dispersion zero between two lines, so the band
    edges sit where n_g - 1 first reaches 1.5x that minimum on each side.
    Both sides of the criterion scale linearly with density, so the band
    does not move under density calibration.

    :returns: (omega_lo, omega_hi) in rad/s.
    :raises RootNotFoundError: if either edge cannot be bracketed.
    """
    if omega_zero is None:
        omega_zero = find_gvd_zero(cell)
    centers = np.sort(cell.catalog.centers)
    below = centers[centers < omega_zero]
    above = centers[centers > omega_zero]
    if not (below.size and above.size):
        raise RootNotFoundError("dispersion zero is not bracketed by catalog lines")
    edge_lo = _band_edge(cell, omega_zero, float(below.max()))
    edge_hi = _band_edge(cell, omega_zero, float(above.min()))
    lo, hi = sorted((edge_lo, edge_hi))
    return lo, hi


# Sample count for the band average in plateau_delay; fixed so calibration
# is reproducible to the last bit across runs.
PLATEAU_BAND_SAMPLES = 1025


def plateau_delay(cell: VaporCell, omega_zero: float | None = None) -> float:
    """Representative delay of the flat between-line region.

    Defined as the group delay averaged uniformly in frequency over the
    uniform-delay band (see :func:`uniform_delay_band`). The average, not
    the minimum at the dispersion zero, is what the eye reads off a delay
    spectrum as the plateau level.
    """
    lo, hi = uniform_delay_band(cell, omega_zero)
    omega = np.linspace(lo, hi, PLATEAU_BAND_SAMPLES)
    return float(np.mean(group_delay(cell, omega)))


def calibrate_density_scale(
    catalog: LineCatalog,
    density: DensityModel,
    target_delay: float = 10e-12,
    temperature_c: float = 280.0,
    length: float = 0.07,
    passes: int = 3,
    bounds: tuple[float, float] | None = (0.5, 2.0),
) -> float:
    """Scale factor pinning the plateau group delay to a target value.

    The plateau delay is the band-averaged group delay around the GVD zero
    (see :func:`plateau_delay`). Delay is linear in density and the band
    edges are density independent, so a single reference condition fixes
    the factor. The return value multiplies the model's current scale;
    apply it with ``density.scaled(factor)``.

    :raises CalibrationError: if the factor falls outside ``bounds``.
    """
    cell = VaporCell.from_celsius(catalog, density, temperature_c, length, passes)
    raw_delay = plateau_delay(cell)
    if raw_delay <= 0.0:
        raise CalibrationError("plateau delay is not positive; cannot calibrate")
    factor = target_delay / raw_delay
    if bounds is not None and not (bounds[0] <= factor <= bounds[1]):
        raise CalibrationError(
            f"calibration factor {factor:.4f} outside accepted bounds "
            f"[{bounds[0]}, {bounds[1]}]; vapor-pressure coefficients rejected"
        )
    return factor
