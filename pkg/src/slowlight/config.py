"""Run configurations for the command line.

A run config is a YAML mapping with nested blocks: ``cell``, ``pulse``,
``grid``, ``output``, plus one block per subcommand that needs its own
parameters (``spectrum``, ``sweep``, ``design``). Validation is strict:
unknown keys and malformed values raise :class:`ConfigError` naming the
offending field by its dotted path, so a typo fails the run instead of
silently falling back to a default.

Everything needed to reproduce a run lives in the config; outputs embed
the resolved values as metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from importlib import resources
from pathlib import Path

import yaml

from .errors import ConfigError

OUTPUT_FORMATS = ("csv", "json")
PULSE_SHAPES = ("gaussian", "sinc")
COMMANDS = ("spectrum", "propagate", "sweep", "design", "regime")


def _require_mapping(value, path: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(value).__name__}")
    return value


def _reject_unknown(data: dict, known, path: str) -> None:
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {', '.join(unknown)}")


def _number(data: dict, key: str, path: str, default=None, required: bool = False):
    if key not in data or data[key] is None:
        if required:
            raise ConfigError(f"{path}.{key}: required value is missing")
        return default
    value = data[key]
    # YAML reads bare "1e7" as a string; coerce the usual numeric spellings.
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(f"{path}.{key}: expected a number, got {data[key]!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{path}.{key}: value must be finite")
    return value


def _integer(data: dict, key: str, path: str, default=None, required: bool = False):
    value = _number(data, key, path, default=None, required=required)
    if value is None:
        return default
    if value != int(value):
        raise ConfigError(f"{path}.{key}: expected an integer, got {value}")
    return int(value)


def _string(data: dict, key: str, path: str, default=None, choices=None):
    if key not in data or data[key] is None:
        return default
    value = data[key]
    if not isinstance(value, str):
        raise ConfigError(f"{path}.{key}: expected a string, got {type(value).__name__}")
    if choices is not None and value not in choices:
        raise ConfigError(f"{path}.{key}: must be one of {', '.join(choices)}; got {value!r}")
    return value


@dataclass(frozen=True)
class CellConfig:
    """Cell block: temperature in Celsius, physical length, pass count.

    ``density_scale`` of None means apply the package's delay calibration;
    an explicit number replaces the calibrated factor (0.0 gives an empty
    cell, useful as a vacuum reference).
    """

    temperature_c: float
    length_m: float = 0.07
    passes: int = 1
    density_scale: float | None = None


@dataclass(frozen=True)
class PulseConfig:
    """Pulse block. Exactly one of t0_fs and bandwidth_thz; center_nm of
    None means the catalog's dispersion zero."""

    shape: str
    t0_fs: float | None = None
    bandwidth_thz: float | None = None
    center_nm: float | None = None


@dataclass(frozen=True)
class GridConfig:
    """Explicit grid override (both fields), bypassing automatic sizing."""

    samples: int
    dt_fs: float


@dataclass(frozen=True)
class SpectrumConfig:
    start_nm: float
    stop_nm: float
    points: int = 2401


@dataclass(frozen=True)
class TemperatureSweepConfig:
    parameter: str
    start: float
    stop: float
    step: float


@dataclass(frozen=True)
class DesignConfig:
    d_max: float
    start_nm: float
    stop_nm: float
    step_nm: float
    t_min_c: float = 25.0
    t_max_c: float = 550.0


@dataclass(frozen=True)
class OutputConfig:
    path: str
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    """One validated run: catalog, cell, pulse(s), and command blocks."""

    catalog: str = "rb_effective_doublet"
    command: str | None = None
    cell: CellConfig | None = None
    pulse: PulseConfig | None = None
    pulses: tuple[PulseConfig, ...] = ()
    grid: GridConfig | None = None
    spectrum: SpectrumConfig | None = None
    sweep: TemperatureSweepConfig | None = None
    design: DesignConfig | None = None
    output: OutputConfig | None = None

    def require(self, name: str) -> object:
        value = getattr(self, name)
        if value is None:
            raise ConfigError(f"{name}: block is required for this command")
        return value

    def metadata(self) -> dict:
        """Flat dotted-path record of every resolved value, for embedding
        in output files."""
        record: dict[str, object] = {"catalog": self.catalog}
        if self.command is not None:
            record["command"] = self.command
        for block_name in ("cell", "pulse", "grid", "spectrum", "sweep", "design", "output"):
            block = getattr(self, block_name)
            if block is None:
                continue
            for f in fields(block):
                record[f"{block_name}.{f.name}"] = getattr(block, f.name)
        for index, pulse in enumerate(self.pulses, start=1):
            for f in fields(pulse):
                record[f"pulses.{index}.{f.name}"] = getattr(pulse, f.name)
        return record


def _parse_cell(data, path: str) -> CellConfig:
    data = _require_mapping(data, path)
    _reject_unknown(data, ("temperature_c", "length_m", "passes", "density_scale"), path)
    temperature = _number(data, "temperature_c", path, required=True)
    length = _number(data, "length_m", path, default=0.07)
    passes = _integer(data, "passes", path, default=1)
    scale = _number(data, "density_scale", path, default=None)
    if length <= 0.0:
        raise ConfigError(f"{path}.length_m: must be positive")
    if passes < 1:
        raise ConfigError(f"{path}.passes: must be at least 1")
    if scale is not None and scale < 0.0:
        raise ConfigError(f"{path}.density_scale: must be non-negative")
    return CellConfig(temperature, length, passes, scale)


def _parse_pulse(data, path: str) -> PulseConfig:
    data = _require_mapping(data, path)
    _reject_unknown(data, ("shape", "t0_fs", "bandwidth_thz", "center_nm"), path)
    shape = _string(data, "shape", path, choices=PULSE_SHAPES)
    if shape is None:
        raise ConfigError(f"{path}.shape: required value is missing")
    t0 = _number(data, "t0_fs", path)
    bandwidth = _number(data, "bandwidth_thz", path)
    center = _number(data, "center_nm", path)
    if (t0 is None) == (bandwidth is None):
        raise ConfigError(f"{path}: give exactly one of t0_fs and bandwidth_thz")
    for key, value in (("t0_fs", t0), ("bandwidth_thz", bandwidth), ("center_nm", center)):
        if value is not None and value <= 0.0:
            raise ConfigError(f"{path}.{key}: must be positive")
    return PulseConfig(shape, t0, bandwidth, center)


def _parse_grid(data, path: str) -> GridConfig:
    data = _require_mapping(data, path)
    _reject_unknown(data, ("samples", "dt_fs"), path)
    samples = _integer(data, "samples", path, required=True)
    dt = _number(data, "dt_fs", path, required=True)
    if samples < 4:
        raise ConfigError(f"{path}.samples: must be at least 4")
    if dt <= 0.0:
        raise ConfigError(f"{path}.dt_fs: must be positive")
    return GridConfig(samples, dt)


def _parse_spectrum(data, path: str) -> SpectrumConfig:
    data = _require_mapping(data, path)
    _reject_unknown(data, ("start_nm", "stop_nm", "points"), path)
    start = _number(data, "start_nm", path, required=True)
    stop = _number(data, "stop_nm", path, required=True)
    points = _integer(data, "points", path, default=2401)
    if not (0.0 < start < stop):
        raise ConfigError(f"{path}: need 0 < start_nm < stop_nm")
    if points < 2:
        raise ConfigError(f"{path}.points: must be at least 2")
    return SpectrumConfig(start, stop, points)


def _parse_sweep(data, path: str) -> TemperatureSweepConfig:
    data = _require_mapping(data, path)
    _reject_unknown(data, ("parameter", "start", "stop", "step"), path)
    parameter = _string(data, "parameter", path, default="temperature", choices=("temperature",))
    start = _number(data, "start", path, required=True)
    stop = _number(data, "stop", path, required=True)
    step = _number(data, "step", path, required=True)
    if stop < start:
        raise ConfigError(f"{path}: stop must not precede start")
    if step <= 0.0:
        raise ConfigError(f"{path}.step: must be positive")
    return TemperatureSweepConfig(parameter, start, stop, step)


def _parse_design(data, path: str) -> DesignConfig:
    data = _require_mapping(data, path)
    _reject_unknown(
        data, ("d_max", "start_nm", "stop_nm", "step_nm", "t_min_c", "t_max_c"), path
    )
    d_max = _number(data, "d_max", path, required=True)
    start = _number(data, "start_nm", path, required=True)
    stop = _number(data, "stop_nm", path, required=True)
    step = _number(data, "step_nm", path, default=1.0)
    t_min = _number(data, "t_min_c", path, default=25.0)
    t_max = _number(data, "t_max_c", path, default=550.0)
    if d_max <= 0.0:
        raise ConfigError(f"{path}.d_max: must be positive")
    if not (0.0 < start <= stop):
        raise ConfigError(f"{path}: need 0 < start_nm <= stop_nm")
    if step <= 0.0:
        raise ConfigError(f"{path}.step_nm: must be positive")
    if not t_min < t_max:
        raise ConfigError(f"{path}: need t_min_c < t_max_c")
    return DesignConfig(d_max, start, stop, step, t_min, t_max)


def _parse_output(data, path: str) -> OutputConfig:
    data = _require_mapping(data, path)
    _reject_unknown(data, ("path", "format"), path)
    out_path = _string(data, "path", path)
    if not out_path:
        raise ConfigError(f"{path}.path: required value is missing")
    fmt = _string(data, "format", path, default="csv", choices=OUTPUT_FORMATS)
    return OutputConfig(out_path, fmt)


def parse_run_config(data, source: str = "<config>") -> RunConfig:
    """Validate a parsed YAML mapping into a :class:`RunConfig`."""
    data = _require_mapping(data, source)
    known = (
        "catalog",
        "command",
        "cell",
        "pulse",
        "pulses",
        "grid",
        "spectrum",
        "sweep",
        "design",
        "output",
    )
    _reject_unknown(data, known, source)
    catalog = _string(data, "catalog", source, default="rb_effective_doublet")
    command = _string(data, "command", source, choices=COMMANDS)
    cell = _parse_cell(data["cell"], "cell") if data.get("cell") is not None else None
    pulse = _parse_pulse(data["pulse"], "pulse") if data.get("pulse") is not None else None
    pulses: tuple[PulseConfig, ...] = ()
    if data.get("pulses") is not None:
        raw = data["pulses"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("pulses: expected a non-empty list of pulse blocks")
        pulses = tuple(
            _parse_pulse(entry, f"pulses[{index}]") for index, entry in enumerate(raw)
        )
    if pulse is not None and pulses:
        raise ConfigError("give either pulse or pulses, not both")
    grid = _parse_grid(data["grid"], "grid") if data.get("grid") is not None else None
    spectrum = (
        _parse_spectrum(data["spectrum"], "spectrum")
        if data.get("spectrum") is not None
        else None
    )
    sweep = _parse_sweep(data["sweep"], "sweep") if data.get("sweep") is not None else None
    design = (
        _parse_design(data["design"], "design") if data.get("design") is not None else None
    )
    output = (
        _parse_output(data["output"], "output") if data.get("output") is not None else None
    )
    return RunConfig(
        catalog=catalog,
        command=command,
        cell=cell,
        pulse=pulse,
        pulses=pulses,
        grid=grid,
        spectrum=spectrum,
        sweep=sweep,
        design=design,
        output=output,
    )


def packaged_preset_path(name: str) -> Path | None:
    """Path of a preset shipped inside the package, or None."""
    base = resources.files("slowlight") / "presets" / f"{name}.yaml"
    path = Path(str(base))
    return path if path.is_file() else None


def resolve_config_path(spec: str | Path) -> Path:
    """An explicit YAML path, or the name of a packaged preset."""
    path = Path(spec)
    if path.suffix in (".yaml", ".yml") or path.exists():
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        return path
    packaged = packaged_preset_path(str(spec))
    if packaged is not None:
        return packaged
    raise ConfigError(f"config {spec!r} is neither a file nor a packaged preset")


def load_run_config(spec: str | Path) -> RunConfig:
    path = resolve_config_path(spec)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    return parse_run_config(data, source=str(path))


def apply_overrides(
    config: RunConfig,
    temp_c: float | None = None,
    length_m: float | None = None,
    passes: int | None = None,
    t0_fs: float | None = None,
    center_nm: float | None = None,
    out: str | None = None,
    out_format: str | None = None,
) -> RunConfig:
    """Per-field command line overrides layered over a loaded config."""
    if temp_c is not None or length_m is not None or passes is not None:
        if config.cell is None:
            raise ConfigError("cell: block is required before cell overrides apply")
        cell = config.cell
        cell = replace(
            cell,
            temperature_c=temp_c if temp_c is not None else cell.temperature_c,
            length_m=length_m if length_m is not None else cell.length_m,
            passes=passes if passes is not None else cell.passes,
        )
        if cell.length_m <= 0.0:
            raise ConfigError("cell.length_m: must be positive")
        if cell.passes < 1:
            raise ConfigError("cell.passes: must be at least 1")
        config = replace(config, cell=cell)
    if t0_fs is not None or center_nm is not None:
        if config.pulse is None:
            raise ConfigError("pulse: block is required before pulse overrides apply")
        pulse = config.pulse
        if t0_fs is not None:
            if t0_fs <= 0.0:
                raise ConfigError("pulse.t0_fs: must be positive")
            pulse = replace(pulse, t0_fs=t0_fs, bandwidth_thz=None)
        if center_nm is not None:
            if center_nm <= 0.0:
                raise ConfigError("pulse.center_nm: must be positive")
            pulse = replace(pulse, center_nm=center_nm)
        config = replace(config, pulse=pulse)
    if out is not None or out_format is not None:
        base = config.output or OutputConfig(path="", format="csv")
        path = out if out is not None else base.path
        fmt = out_format if out_format is not None else base.format
        if not path:
            raise ConfigError("output.path: required value is missing")
        if fmt not in OUTPUT_FORMATS:
            raise ConfigError(f"output.format: must be one of {', '.join(OUTPUT_FORMATS)}")
        config = replace(config, output=OutputConfig(path, fmt))
    return config
