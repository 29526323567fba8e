"""Broadband slow light in warm atomic vapor.

Models the vapor's complex susceptibility as a sum of Lorentzian lines,
propagates ultrashort pulse envelopes through the resulting linear transfer
function, and quantifies delay, broadening, distortion and leakage. All
physics lives in pure functions over immutable value types, so everything
here is safe to evaluate concurrently.
"""

from __future__ import annotations

from .catalog_io import (
    CatalogBundle,
    default_catalog,
    load_catalog,
    parse_catalog,
    resolve_catalog,
)
from .config import (
    CellConfig,
    GridConfig,
    OutputConfig,
    PulseConfig,
    RunConfig,
    apply_overrides,
    load_run_config,
    parse_run_config,
    resolve_config_path,
)
from .errors import (
    CalibrationError,
    CatalogError,
    ConfigError,
    DensityRangeError,
    GridError,
    MetricUndefinedError,
    ModelValidityError,
    NumericsError,
    RootNotFoundError,
    SingularRegimeError,
    SlowlightError,
    WraparoundError,
)
from .medium import (
    CHI_VALIDITY_LIMIT,
    DensityModel,
    LineCatalog,
    SpectralLine,
    VaporCell,
    VaporPressureBranch,
    calibrate_density_scale,
    celsius_to_kelvin,
    find_gvd_zero,
    group_delay,
    group_index,
    gvd,
    kelvin_to_celsius,
    omega_to_wavelength,
    optical_depth,
    plateau_delay,
    refractive_index,
    susceptibility,
    transmission,
    uniform_delay_band,
    wavelength_to_omega,
)
from .metrics import (
    PropagationReport,
    distortion,
    distortion_from_samples,
    distortion_in_band,
    fractional_broadening,
    fractional_delay,
    interpolated_fwhm,
    interpolated_peak,
    peak_delay,
    power_leakage,
    propagation_report,
)
from .propagation import (
    TransferFunction,
    export_transfer_function,
    propagate,
    transfer_function,
)
from .pulses import (
    GAUSSIAN_TBP,
    SINC_MAIN_LOBE_FRACTION,
    SINC_TBP,
    PulseEnvelope,
    SampledGrid,
    design_grid,
    from_spectrum,
    load_envelope,
    make_gaussian,
    make_sinc,
    save_envelope,
    to_spectrum,
)
from .sweeps import (
    CellTemplate,
    DesignPoint,
    PulseRecipe,
    RegimeQuery,
    SpectrumResult,
    SweepResult,
    SweepSpec,
    delay_spectrum,
    design_curve,
    dominant_regime,
    fb_leakage_curves,
    max_fractional_delay,
    regime_ratio,
    regime_ratio_asymptotic,
    resolve_carrier,
    sweep_grid,
    temperature_sweep,
    write_table_csv,
    write_table_json,
)

__version__ = "0.1.0"
