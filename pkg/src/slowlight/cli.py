"""Command line front end.

Subcommands mirror the package's top-level operations:

    slowlight spectrum  --config fig2          delay/index/transmission table
    slowlight propagate --config fig3a         envelopes plus a report record
    slowlight sweep     --config fig4          metrics versus temperature
    slowlight design    --config fig5          best f_D per bandwidth under D_max
    slowlight regime    --t0-fs 250 --ratio 1e3   length-ratio record on stdout

``--config`` takes a YAML file path or the name of a packaged preset
(fig2, fig3a, fig3b, fig4, fig5, fig6). Per-field overrides layer on top.
Exit codes: 0 success, 2 configuration error, 3 numerical guard.

Outputs are deterministic: the same config writes byte-identical files,
and every table embeds the resolved configuration as metadata comments.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .catalog_io import CatalogBundle, load_catalog, resolve_catalog
from .config import (
    OutputConfig,
    RunConfig,
    apply_overrides,
    load_run_config,
)
from .errors import ConfigError, NumericsError
from .medium import VaporCell, calibrate_density_scale, find_gvd_zero
from .metrics import propagation_report
from .propagation import propagate, transfer_function
from .pulses import SampledGrid, save_envelope
from .sweeps import (
    CellTemplate,
    PulseRecipe,
    RegimeQuery,
    SweepSpec,
    delay_spectrum,
    design_curve,
    dominant_regime,
    fb_leakage_curves,
    regime_ratio,
    regime_ratio_asymptotic,
    resolve_carrier,
    sweep_grid,
    temperature_sweep,
    write_table_csv,
    write_table_json,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3

C_LIGHT = 299792458.0


def _load_calibrated(config: RunConfig) -> tuple[CatalogBundle, float]:
    """Catalog bundle with the density scale resolved.

    A cell block without an explicit density_scale gets the package's
    delay calibration; an explicit value (0.0 included) replaces it.
    """
    path = resolve_catalog(config.catalog)
    bundle = load_catalog(path)
    explicit = config.cell.density_scale if config.cell is not None else None
    if explicit is None:
        factor = calibrate_density_scale(bundle.catalog, bundle.density)
    else:
        factor = float(explicit)
    scaled = CatalogBundle(bundle.catalog, bundle.density.scaled(factor))
    return scaled, factor


def _template(config: RunConfig, bundle: CatalogBundle) -> CellTemplate:
    cell = config.require("cell")
    return CellTemplate(
        bundle.catalog, bundle.density, cell.temperature_c, cell.length_m, cell.passes
    )


def _recipe(pulse_config) -> PulseRecipe:
    return PulseRecipe(
        shape=pulse_config.shape,
        t0=None if pulse_config.t0_fs is None else pulse_config.t0_fs * 1e-15,
        bandwidth=(
            None if pulse_config.bandwidth_thz is None else pulse_config.bandwidth_thz * 1e12
        ),
        center_wavelength=(
            None if pulse_config.center_nm is None else pulse_config.center_nm * 1e-9
        ),
    )


def _metadata(config: RunConfig, factor: float, extra: dict | None = None) -> dict:
    record = config.metadata()
    record["resolved.density_scale"] = factor
    if extra:
        record.update(extra)
    return record


def _write_table(output: OutputConfig, metadata: dict, columns: dict) -> None:
    if output.format == "json":
        write_table_json(output.path, metadata, columns)
    else:
        write_table_csv(output.path, metadata, columns)


def cmd_spectrum(config: RunConfig) -> int:
    bundle, factor = _load_calibrated(config)
    cell_cfg = config.require("cell")
    spec = config.require("spectrum")
    output = config.require("output")
    cell = VaporCell.from_celsius(
        bundle.catalog, bundle.density, cell_cfg.temperature_c, cell_cfg.length_m,
        cell_cfg.passes,
    )
    wavelengths = np.linspace(spec.start_nm * 1e-9, spec.stop_nm * 1e-9, spec.points)
    result = delay_spectrum(cell, wavelengths)
    extra = {}
    if result.gvd_zero_wavelength is not None:
        extra["resolved.gvd_zero_nm"] = result.gvd_zero_wavelength * 1e9
    if result.plateau_delay is not None:
        extra["resolved.plateau_delay_s"] = result.plateau_delay
    if result.uniform_band is not None:
        extra["resolved.uniform_band_lo_nm"] = result.uniform_band[0] * 1e9
        extra["resolved.uniform_band_hi_nm"] = result.uniform_band[1] * 1e9
    _write_table(output, _metadata(config, factor, extra), result.columns())
    return EXIT_OK


def _propagation_paths(base: str) -> tuple[Path, Path, Path]:
    root = Path(base)
    stem = root.with_suffix("") if root.suffix in (".csv", ".json") else root
    return (
        Path(f"{stem}_input.txt"),
        Path(f"{stem}_output.txt"),
        root,
    )


def cmd_propagate(config: RunConfig) -> int:
    bundle, factor = _load_calibrated(config)
    template = _template(config, bundle)
    recipe = _recipe(config.require("pulse"))
    output = config.require("output")
    carrier = resolve_carrier(template, recipe)
    if config.grid is not None:
        grid = SampledGrid(config.grid.samples, config.grid.dt_fs * 1e-15)
    else:
        grid = sweep_grid(template, recipe, carrier, template.temperature_c)
    pulse = recipe.build(carrier, grid)
    cell = template.cell
    tf = transfer_function(cell, grid, carrier, band=pulse.band)
    out = propagate(pulse, tf)
    report = propagation_report(pulse, out, tf)
    in_path, out_path, report_path = _propagation_paths(output.path)
    save_envelope(in_path, pulse)
    save_envelope(out_path, out)
    extra = {
        "resolved.carrier_rad_s": carrier,
        "resolved.grid_samples": grid.n,
        "resolved.grid_dt_s": grid.dt,
        "resolved.input_envelope": str(in_path),
        "resolved.output_envelope": str(out_path),
    }
    columns = {key: [value] for key, value in report.to_record().items()}
    report_output = OutputConfig(str(report_path), output.format)
    _write_table(report_output, _metadata(config, factor, extra), columns)
    return EXIT_OK


def cmd_sweep(config: RunConfig) -> int:
    bundle, factor = _load_calibrated(config)
    template = _template(config, bundle)
    sweep = config.require("sweep")
    output = config.require("output")
    if config.pulse is None and not config.pulses:
        raise ConfigError("pulse: block is required for this command")
    recipes = [_recipe(p) for p in (config.pulses or (config.pulse,))]
    spec = SweepSpec(
        parameter=sweep.parameter,
        start=sweep.start,
        stop=sweep.stop,
        step=sweep.step,
        cell=template,
        pulse=recipes[0],
    )
    temperatures = spec.values
    extra: dict[str, object] = {
        "resolved.sweep_values": len(temperatures),
    }
    if len(recipes) == 1:
        result = temperature_sweep(template, recipes[0], temperatures)
        extra["resolved.pulse_label"] = recipes[0].label
        extra["resolved.carrier_rad_s"] = result.carrier
        columns = result.columns()
    else:
        curves = fb_leakage_curves(template, recipes, temperatures)
        columns = {"temperature_c": [float(t) for t in temperatures]}
        for index, (recipe, result) in enumerate(curves, start=1):
            extra[f"resolved.pulse_{index}_label"] = recipe.label
            extra[f"resolved.pulse_{index}_carrier_rad_s"] = result.carrier
            record_columns = result.columns()
            for key in ("fractional_delay", "fractional_broadening", "leakage"):
                columns[f"{key}_{index}"] = record_columns[key]
    _write_table(output, _metadata(config, factor, extra), columns)
    return EXIT_OK


def cmd_design(config: RunConfig) -> int:
    bundle, factor = _load_calibrated(config)
    template = _template(config, bundle)
    design = config.require("design")
    output = config.require("output")
    carrier = find_gvd_zero(template.cell)
    lam_c = 2.0 * np.pi * C_LIGHT / carrier
    steps = int(np.floor((design.stop_nm - design.start_nm) / design.step_nm + 1e-9)) + 1
    bw_nm = design.start_nm + design.step_nm * np.arange(steps)
    bw_hz = bw_nm * 1e-9 * C_LIGHT / lam_c**2
    points = design_curve(
        template, bw_hz, design.d_max, t_range_c=(design.t_min_c, design.t_max_c)
    )
    columns = {
        "bandwidth_nm": list(bw_nm),
        "bandwidth_thz": [b / 1e12 for b in bw_hz],
        "fractional_delay": [p.fractional_delay for p in points],
        "temperature_c": [p.temperature_c for p in points],
        "amplitude_distortion": [p.amplitude_distortion for p in points],
        "phase_distortion": [p.phase_distortion for p in points],
        "feasible": [p.feasible for p in points],
    }
    extra = {"resolved.gvd_zero_nm": lam_c * 1e9}
    _write_table(output, _metadata(config, factor, extra), columns)
    return EXIT_OK


def cmd_regime(args) -> int:
    gamma = 2.0 * np.pi * args.linewidth_mhz * 1e6
    if (args.ratio is None) == (args.split_thz is None):
        raise ConfigError("give exactly one of --ratio and --split-thz")
    if args.ratio is not None:
        omega21 = args.ratio * gamma
    else:
        omega21 = 2.0 * np.pi * args.split_thz * 1e12
    query = RegimeQuery(t0=args.t0_fs * 1e-15, gamma=gamma, omega21=omega21)
    record = {
        "t0_s": query.t0,
        "gamma_rad_s": query.gamma,
        "omega21_rad_s": query.omega21,
        "omega21_over_gamma": query.omega21 / query.gamma,
        "length_ratio_exact": regime_ratio(query),
        "length_ratio_asymptotic": regime_ratio_asymptotic(query),
        "dominant_broadening": dominant_regime(query),
    }
    json.dump(record, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        required=True,
        help="YAML config file path or packaged preset name (fig2 ... fig6)",
    )
    parser.add_argument("--temp-c", type=float, help="override cell temperature (Celsius)")
    parser.add_argument("--length-m", type=float, help="override cell length (m)")
    parser.add_argument("--passes", type=int, help="override cell pass count")
    parser.add_argument("--t0-fs", type=float, help="override pulse duration (fs)")
    parser.add_argument("--center-nm", type=float, help="override pulse center (nm)")
    parser.add_argument("--out", help="override output path")
    parser.add_argument(
        "--format", choices=("csv", "json"), dest="out_format", help="override output format"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slowlight",
        description="Broadband slow light in warm atomic vapor: spectra, pulse "
        "propagation, sweeps and design scans.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_text in (
        ("spectrum", "delay, group index and transmission versus wavelength"),
        ("propagate", "propagate one pulse and write envelopes plus a report"),
        ("sweep", "propagation metrics versus temperature"),
        ("design", "best fractional delay per bandwidth under a distortion budget"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_config_options(p)
    regime = sub.add_parser(
        "regime", help="absorptive versus dispersive broadening length ratio"
    )
    regime.add_argument("--t0-fs", type=float, required=True, help="pulse duration (fs)")
    regime.add_argument(
        "--linewidth-mhz", type=float, default=6.0, help="line half width (MHz, default 6)"
    )
    regime.add_argument("--ratio", type=float, help="half splitting over linewidth")
    regime.add_argument("--split-thz", type=float, help="half splitting (THz)")
    return parser


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "propagate": cmd_propagate,
    "sweep": cmd_sweep,
    "design": cmd_design,
}


def _run(args) -> int:
    if args.subcommand == "regime":
        return cmd_regime(args)
    config = load_run_config(args.config)
    if config.command is not None and config.command != args.subcommand:
        raise ConfigError(
            f"command: config is for {config.command!r}, invoked as {args.subcommand!r}"
        )
    config = apply_overrides(
        config,
        temp_c=args.temp_c,
        length_m=args.length_m,
        passes=args.passes,
        t0_fs=args.t0_fs,
        center_nm=args.center_nm,
        out=args.out,
        out_format=args.out_format,
    )
    return _COMMANDS[args.subcommand](config)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericsError as exc:
        print(f"numerics error: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
