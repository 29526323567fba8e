"""Parameter sweeps, design scans and the regime-length ratio.

Every sweep is a plain loop over pure functions, evaluated in parameter
order, so results are deterministic and independent of any evaluation
strategy. All propagations within one sweep share a single grid sized for
the largest expected delay, which keeps envelopes directly comparable
across the swept parameter.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.constants import c as C_LIGHT

from .errors import ModelValidityError, RootNotFoundError, SingularRegimeError
from .medium import (
    CHI_VALIDITY_LIMIT,
    DensityModel,
    LineCatalog,
    VaporCell,
    find_gvd_zero,
    group_delay,
    group_index,
    gvd,
    omega_to_wavelength,
    plateau_delay,
    susceptibility,
    transmission,
    uniform_delay_band,
    wavelength_to_omega,
)
from .metrics import PropagationReport, distortion_in_band, propagation_report
from .propagation import propagate, transfer_function
from .pulses import (
    GAUSSIAN_TBP,
    SINC_TBP,
    PulseEnvelope,
    SampledGrid,
    design_grid,
    make_gaussian,
    make_sinc,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PulseRecipe:
    """How to build an input pulse: shape, duration or bandwidth, center.

    Exactly one of ``t0`` (intensity FWHM, s) and ``bandwidth`` (full
    spectral width, Hz) must be given; the other follows from the shape's
    time-bandwidth product. ``center_wavelength`` (m) of None means the
    catalog's dispersion zero.
    """

    shape: str
    t0: float | None = None
    bandwidth: float | None = None
    center_wavelength: float | None = None

    def __post_init__(self) -> None:
        if self.shape not in ("gaussian", "sinc"):
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        if (self.t0 is None) == (self.bandwidth is None):
            raise ValueError("give exactly one of t0 and bandwidth")
        for name in ("t0", "bandwidth", "center_wavelength"):
            value = getattr(self, name)
            if value is not None and not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite")

    @property
    def tbp(self) -> float:
        return SINC_TBP if self.shape == "sinc" else GAUSSIAN_TBP

    @property
    def resolved_t0(self) -> float:
        return self.t0 if self.t0 is not None else self.tbp / self.bandwidth

    @property
    def resolved_bandwidth(self) -> float:
        return self.bandwidth if self.bandwidth is not None else self.tbp / self.t0

    @property
    def label(self) -> str:
        center = (
            "dispersion-zero"
            if self.center_wavelength is None
            else f"{self.center_wavelength * 1e9:.4g} nm"
        )
        return f"{self.shape} {self.resolved_t0 * 1e15:.4g} fs at {center}"

    def build(self, carrier: float, grid: SampledGrid) -> PulseEnvelope:
        if self.shape == "gaussian":
            return make_gaussian(self.resolved_t0, carrier, grid)
        return make_sinc(self.resolved_t0, carrier, grid)


@dataclass(frozen=True)
class CellTemplate:
    """Fixed cell parameters with the temperature left as the knob."""

    catalog: LineCatalog
    density: DensityModel
    temperature_c: float
    length: float
    passes: int = 1

    def at_temperature_c(self, temperature_c: float) -> VaporCell:
        return VaporCell.from_celsius(
            self.catalog, self.density, temperature_c, self.length, self.passes
        )

    @property
    def cell(self) -> VaporCell:
        return self.at_temperature_c(self.temperature_c)


@dataclass(frozen=True)
class SweepSpec:
    """A swept parameter over [start, stop] in steps, on a fixed recipe."""

    parameter: str
    start: float
    stop: float
    step: float
    cell: CellTemplate
    pulse: PulseRecipe | None = None
    d_max: float | None = None

    def __post_init__(self) -> None:
        if self.parameter not in ("temperature", "wavelength", "bandwidth"):
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")
        if not (self.step > 0.0 and math.isfinite(self.step)):
            raise ValueError("sweep step must be positive")
        if self.stop < self.start:
            raise ValueError("sweep stop must not precede start")

    @property
    def values(self) -> np.ndarray:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(count)


def resolve_carrier(template: CellTemplate, recipe: PulseRecipe) -> float:
    """Carrier angular frequency for a recipe, locating the dispersion zero
    when no center wavelength is pinned."""
    if recipe.center_wavelength is not None:
        return wavelength_to_omega(recipe.center_wavelength)
    return find_gvd_zero(template.cell)


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Reports of one temperature sweep, in parameter order."""

    template: CellTemplate
    recipe: PulseRecipe
    carrier: float
    temperatures_c: tuple[float, ...]
    reports: tuple[PropagationReport, ...]

    def records(self) -> list[dict[str, float]]:
        rows = []
        for t_c, report in zip(self.temperatures_c, self.reports):
            row = {"temperature_c": t_c}
            row.update(report.to_record())
            rows.append(row)
        return rows

    def columns(self) -> dict[str, list]:
        records = self.records()
        return {key: [row[key] for row in records] for key in records[0]}


def sweep_grid(template: CellTemplate, recipe: PulseRecipe, carrier: float, t_max_c: float):
    """One grid for a whole sweep, sized at the hottest point.

    The window must contain every spectral component whose input amplitude
    times cell transmission stays above the wraparound guard, so the delay
    budget is a masked maximum over the spectrum rather than the value at
    the carrier alone. Gaussian tails reach slow frequencies well outside
    the nominal band; components beyond the mask are absorbed or too weak
    to trip the guard.
    """
    hottest = template.at_temperature_c(t_max_c)
    half = math.pi * recipe.resolved_bandwidth
    if recipe.shape == "sinc":
        # The spectrum is flat out to the band edge and zero beyond it.
        reach = half
        ring = 0.0
    else:
        # Containment matters only for strong components; out to twice the
        # half width the Gaussian amplitude is still a quarter of its peak.
        reach = 2.0 * half
        # Fainter tails graze the line wings and excite a slowly decaying
        # dispersive ring instead of a clean delayed replica; this floor
        # covers the optically-thin crossover for the shipped lines, and
        # the propagation guard backstops the rest.
        ring = 96e-12
    # Budget the group delay over the strong part of the spectrum, skipping
    # samples outside the weak-vapor validity region: those sit in opaque
    # line cores and never reach the output.
    offsets = np.linspace(-reach, reach, 257)
    omega = carrier + offsets
    core = np.abs(susceptibility(hottest, omega)) < CHI_VALIDITY_LIMIT
    max_delay = float(np.abs(group_delay(hottest, omega[core])).max())
    t0 = recipe.resolved_t0
    # Rough broadening allowance from the quadratic and cubic phase the
    # hottest cell applies across the pulse bandwidth.
    beta2 = gvd(hottest, carrier) * hottest.effective_length
    quad = t0 * math.sqrt(1.0 + (4.0 * math.log(2.0) * beta2 / t0**2) ** 2) - t0
    d_omega = math.pi * recipe.resolved_bandwidth
    beta3 = _third_order_phase(hottest, carrier)
    cubic = abs(beta3) * d_omega**2 / 2.0
    allowance = 4.0 * (quad + cubic) + ring
    return design_grid(
        t0,
        shape=recipe.shape,
        max_delay=max_delay,
        extra_broadening=allowance,
    )


def _third_order_phase(cell: VaporCell, omega: float) -> float:
    """d^2(group delay)/domega^2 of the column, via a small closed stencil.

    Only used to budget the sweep grid's time window, so a compact
    three-point second difference of the analytic group delay is enough.
    """
    h = 1e-4 * omega
    d = group_delay(cell, np.array([omega - h, omega, omega + h]))
    return float((d[0] - 2.0 * d[1] + d[2]) / h**2)


def temperature_sweep(
    template: CellTemplate,
    recipe: PulseRecipe,
    temperatures_c,
) -> SweepResult:
    """Propagate one recipe through the cell at each temperature."""
    temperatures = [float(t) for t in temperatures_c]
    if not temperatures:
        raise ValueError("temperature sweep needs at least one temperature")
    carrier = resolve_carrier(template, recipe)
    grid = sweep_grid(template, recipe, carrier, max(temperatures))
    pulse = recipe.build(carrier, grid)
    reports = []
    for t_c in temperatures:
        cell = template.at_temperature_c(t_c)
        tf = transfer_function(cell, grid, carrier, band=pulse.band)
        out = propagate(pulse, tf)
        reports.append(propagation_report(pulse, out, tf))
    return SweepResult(template, recipe, carrier, tuple(temperatures), tuple(reports))


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Delay spectrum of a cell plus its uniform-delay summary."""

    wavelength: np.ndarray
    delay: np.ndarray
    group_index: np.ndarray
    transmission: np.ndarray
    gvd_zero_wavelength: float | None
    plateau_delay: float | None
    uniform_band: tuple[float, float] | None

    @property
    def uniform_band_width(self) -> float | None:
        if self.uniform_band is None:
            return None
        return self.uniform_band[1] - self.uniform_band[0]

    def columns(self) -> dict[str, list]:
        return {
            "wavelength_nm": [w * 1e9 for w in self.wavelength],
            "delay_s": list(self.delay),
            "group_index": list(self.group_index),
            "transmission": list(self.transmission),
        }


def delay_spectrum(cell: VaporCell, wavelengths) -> SpectrumResult:
    """Group delay, group index and transmission across a wavelength range.

    Points where the weak-susceptibility expansion fails (within a fraction
    of a nanometer of a line center) are reported as NaN rather than
    aborting the sweep; transmission stays defined everywhere.
    """
    wavelengths = np.asarray(wavelengths, dtype=float)
    omega = 2.0 * np.pi * C_LIGHT / wavelengths
    chi = susceptibility(cell, omega)
    valid = np.abs(chi) < CHI_VALIDITY_LIMIT
    delay = np.full(omega.shape, np.nan)
    ng = np.full(omega.shape, np.nan)
    if valid.any():
        ng[valid] = group_index(cell, omega[valid])
        delay[valid] = group_delay(cell, omega[valid])
    trans = transmission(cell, omega)
    gvd_zero = None
    plateau = None
    band = None
    try:
        omega_zero = find_gvd_zero(cell)
        gvd_zero = omega_to_wavelength(omega_zero)
        lo, hi = uniform_delay_band(cell, omega_zero)
        plateau = plateau_delay(cell, omega_zero)
        lam = sorted((omega_to_wavelength(lo), omega_to_wavelength(hi)))
        band = (lam[0], lam[1])
    except RootNotFoundError:
        pass
    return SpectrumResult(
        wavelength=wavelengths,
        delay=delay,
        group_index=ng,
        transmission=trans,
        gvd_zero_wavelength=gvd_zero,
        plateau_delay=plateau,
        uniform_band=band,
    )


@dataclass(frozen=True)
class DesignPoint:
    """Largest distortion-bounded fractional delay at one bandwidth."""

    bandwidth: float
    fractional_delay: float
    temperature_c: float | None
    amplitude_distortion: float | None
    phase_distortion: float | None
    feasible: bool


def max_fractional_delay(
    template: CellTemplate,
    bandwidth: float,
    d_max: float,
    t_range_c: tuple[float, float] = (25.0, 550.0),
    t_step_c: float = 1.0,
    refine_tol: float = 1e-3,
) -> DesignPoint:
    """Best fractional delay with both distortion figures kept below d_max.

    Temperature is the knob. A coarse ascending scan (step <= t_step_c)
    brackets the feasibility boundary, then golden-section refinement pins
    it to ``refine_tol`` in distortion. Fractional delay is the group delay
    at the carrier over the transform-limited sinc duration for the given
    bandwidth, valid because the constraint keeps distortion negligible.
    """
    if not (d_max > 0.0):
        raise ValueError("d_max must be positive")
    if t_step_c > 1.0:
        raise ValueError("scan step must be at most 1 degree C")
    carrier = find_gvd_zero(template.cell)
    t0 = SINC_TBP / bandwidth
    half = math.pi * bandwidth
    band = (carrier - half, carrier + half)

    cache: dict[float, tuple[float, float]] = {}

    def metrics_at(t_c: float) -> tuple[float, float]:
        if t_c not in cache:
            try:
                cache[t_c] = distortion_in_band(template.at_temperature_c(t_c), band)
            except ModelValidityError:
                cache[t_c] = (math.inf, math.inf)
        return cache[t_c]

    def is_feasible(t_c: float) -> bool:
        return max(metrics_at(t_c)) < d_max

    def objective(t_c: float) -> float:
        # Penalized objective: fractional delay where feasible, zero beyond.
        if not is_feasible(t_c):
            return 0.0
        return float(group_delay(template.at_temperature_c(t_c), carrier)) / t0

    t_lo, t_hi = t_range_c
    temps = np.arange(t_lo, t_hi + 1e-9, t_step_c)
    last_feasible = None
    first_infeasible = None
    for value in temps:
        t_c = float(value)
        if is_feasible(t_c):
            last_feasible = t_c
        else:
            first_infeasible = t_c
            break
    if last_feasible is None:
        return DesignPoint(bandwidth, 0.0, None, None, None, False)
    t_best = last_feasible
    if first_infeasible is not None:
        a, b = last_feasible, first_infeasible
        # Distortion grows roughly linearly in temperature over one scan
        # step; shrink the bracket until it spans less than refine_tol in D.
        d_slope = (max(metrics_at(b)) - max(metrics_at(a))) / (b - a)
        span_target = refine_tol / d_slope if math.isfinite(d_slope) and d_slope > 0 else 1e-3
        span_target = max(span_target, 1e-6)
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        g_c, g_d = objective(c), objective(d)
        for _ in range(80):
            for probe in (c, d):
                if probe > t_best and is_feasible(probe):
                    t_best = probe
            if g_c >= g_d:
                b, d, g_d = d, c, g_c
                c = b - _GOLDEN * (b - a)
                g_c = objective(c)
            else:
                a, c, g_c = c, d, g_d
                d = a + _GOLDEN * (b - a)
                g_d = objective(d)
            if (b - a) <= span_target:
                break
    pair_best = metrics_at(t_best)
    cell = template.at_temperature_c(t_best)
    f_d = float(group_delay(cell, carrier)) / t0
    return DesignPoint(bandwidth, f_d, t_best, pair_best[0], pair_best[1], True)


def design_curve(
    template: CellTemplate,
    bandwidths,
    d_max: float,
    t_range_c: tuple[float, float] = (25.0, 550.0),
    t_step_c: float = 1.0,
) -> list[DesignPoint]:
    """Design scan across bandwidths (Hz), each optimized independently."""
    return [
        max_fractional_delay(template, float(bw), d_max, t_range_c, t_step_c)
        for bw in bandwidths
    ]


def fb_leakage_curves(
    template: CellTemplate,
    recipes,
    temperatures_c,
) -> list[tuple[PulseRecipe, SweepResult]]:
    """Broadening and leakage versus temperature for several recipes.

    A thin wrapper over :func:`temperature_sweep`, so each curve agrees
    with a direct sweep by construction.
    """
    return [
        (recipe, temperature_sweep(template, recipe, temperatures_c))
        for recipe in recipes
    ]


@dataclass(frozen=True)
class RegimeQuery:
    """Inputs of the absorption-versus-dispersion length comparison."""

    t0: float
    gamma: float
    omega21: float

    def __post_init__(self) -> None:
        for name in ("t0", "gamma", "omega21"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite")


def regime_ratio(query: RegimeQuery) -> float:
    """Exact ratio of absorption length to dispersion length.

    For a symmetric doublet probed midway between lines of half split
    omega21 and width gamma, with r = omega21/gamma:

        L_A / L_D = |-6 + 36 r^2 - 6 r^4| / (2 gamma T0 (r^2 + 1)(6 r^2 - 2))

    The ratio is singular at r = 1/sqrt(3), where the leading dispersion
    order vanishes.
    """
    r2 = (query.omega21 / query.gamma) ** 2
    bracket = 6.0 * r2 - 2.0
    if abs(bracket) < 1e-9:
        raise SingularRegimeError(
            "ratio undefined at the degenerate splitting omega21/gamma = 1/sqrt(3)"
        )
    numerator = abs(-6.0 + 36.0 * r2 - 6.0 * r2 * r2)
    denominator = 2.0 * query.gamma * query.t0 * (r2 + 1.0) * bracket
    return numerator / denominator


def regime_ratio_asymptotic(query: RegimeQuery) -> float:
    """Far-split limit of :func:`regime_ratio`, 1 / (2 gamma T0)."""
    return 1.0 / (2.0 * query.gamma * query.t0)


def dominant_regime(query: RegimeQuery) -> str:
    """Which mechanism broadens the pulse first: 'absorption' or 'dispersion'.

    L_A and L_D are the path lengths at which each mechanism alone doubles
    the pulse; the mechanism with the shorter required length dominates, so
    L_A/L_D > 1 means dispersion wins.
    """
    return "dispersion" if regime_ratio(query) >= 1.0 else "absorption"


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table_csv(path: str | Path, metadata: dict, columns: dict) -> None:
    """Comma-delimited table with '#' metadata comments, point decimals."""
    names = list(columns)
    length = len(columns[names[0]]) if names else 0
    lines = [f"# {key} = {_format_cell(value)}" for key, value in metadata.items()]
    lines.append(",".join(names))
    for i in range(length):
        lines.append(",".join(_format_cell(columns[name][i]) for name in names))
    Path(path).write_text("\n".join(lines) + "\n")


def write_table_json(path: str | Path, metadata: dict, columns: dict) -> None:
    """JSON mirror of :func:`write_table_csv`."""
    names = list(columns)
    length = len(columns[names[0]]) if names else 0
    rows = [{name: _json_value(columns[name][i]) for name in names} for i in range(length)]
    payload = {"metadata": {k: _json_value(v) for k, v in metadata.items()}, "rows": rows}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def _json_value(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value
