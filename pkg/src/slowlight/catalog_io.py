"""Reading line catalogs and density coefficients from YAML files.

A catalog file carries a label, a list of lines and a density block. Each
line gives its center either as ``center_nm`` (vacuum wavelength) or as
``center`` (rad/s), never both; ``strength`` is in m^3 rad/s and
``linewidth`` in rad/s. The density block holds the two-branch vapor
pressure coefficients.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from .errors import CatalogError
from .medium import (
    DensityModel,
    LineCatalog,
    SpectralLine,
    VaporPressureBranch,
    wavelength_to_omega,
)

ENV_CATALOG_DIR = "SLOWLIGHT_CATALOG_DIR"
DEFAULT_CATALOG_NAME = "rb_effective_doublet"

_LINE_KEYS = {"center", "center_nm", "strength", "linewidth"}
_BRANCH_KEYS = ("a", "b", "c", "d")


@dataclass(frozen=True)
class CatalogBundle:
    """A line catalog together with its density model."""

    catalog: LineCatalog
    density: DensityModel


def _as_float(value, field: str) -> float:
    # YAML readers may hand back strings for exponent forms like 1e7.
    try:
        return float(value)
    except (TypeError, ValueError):
        raise CatalogError(f"{field} must be a number, got {value!r}") from None


def _parse_line(entry, index: int) -> SpectralLine:
    where = f"lines[{index}]"
    if not isinstance(entry, dict):
        raise CatalogError(f"{where} must be a mapping")
    unknown = set(entry) - _LINE_KEYS
    if unknown:
        raise CatalogError(f"{where} has unknown keys: {sorted(unknown)}")
    has_nm = "center_nm" in entry
    has_rad = "center" in entry
    if has_nm and has_rad:
        raise CatalogError(f"{where} gives both center_nm and center; use exactly one")
    if not (has_nm or has_rad):
        raise CatalogError(f"{where} must give the line center as center_nm or center")
    if has_nm:
        center = wavelength_to_omega(_as_float(entry["center_nm"], f"{where}.center_nm") * 1e-9)
    else:
        center = _as_float(entry["center"], f"{where}.center")
    for key in ("strength", "linewidth"):
        if key not in entry:
            raise CatalogError(f"{where} is missing {key}")
    return SpectralLine(
        strength=_as_float(entry["strength"], f"{where}.strength"),
        center=center,
        linewidth=_as_float(entry["linewidth"], f"{where}.linewidth"),
    )


def _parse_branch(data, field: str) -> VaporPressureBranch:
    if not isinstance(data, dict):
        raise CatalogError(f"{field} must be a mapping with keys a, b, c, d")
    missing = [k for k in _BRANCH_KEYS if k not in data]
    if missing:
        raise CatalogError(f"{field} is missing coefficients: {missing}")
    return VaporPressureBranch(*(_as_float(data[k], f"{field}.{k}") for k in _BRANCH_KEYS))


def _parse_density(data) -> DensityModel:
    if not isinstance(data, dict):
        raise CatalogError("density block must be a mapping")
    for key in ("solid", "liquid", "transition_k", "validity_k"):
        if key not in data:
            raise CatalogError(f"density block is missing {key}")
    validity = data["validity_k"]
    if not (isinstance(validity, (list, tuple)) and len(validity) == 2):
        raise CatalogError("density validity_k must be a [lo, hi] pair in kelvin")
    return DensityModel(
        label=str(data.get("label", "")),
        solid=_parse_branch(data["solid"], "density.solid"),
        liquid=_parse_branch(data["liquid"], "density.liquid"),
        transition_k=_as_float(data["transition_k"], "density.transition_k"),
        validity_k=(
            _as_float(validity[0], "density.validity_k[0]"),
            _as_float(validity[1], "density.validity_k[1]"),
        ),
    )


def parse_catalog(data, source: str = "<catalog>") -> CatalogBundle:
    """Build a :class:`CatalogBundle` from already-parsed YAML data."""
    if not isinstance(data, dict):
        raise CatalogError(f"{source}: catalog file must contain a mapping")
    if "lines" not in data or not isinstance(data["lines"], list) or not data["lines"]:
        raise CatalogError(f"{source}: catalog must list at least one line")
    if "density" not in data:
        raise CatalogError(f"{source}: catalog must contain a density block")
    lines = tuple(_parse_line(entry, i) for i, entry in enumerate(data["lines"]))
    catalog = LineCatalog(label=str(data.get("label", "")), lines=lines)
    density = _parse_density(data["density"])
    return CatalogBundle(catalog=catalog, density=density)


def load_catalog(path: str | Path) -> CatalogBundle:
    """Load a catalog file, raising :class:`CatalogError` on any defect."""
    path = Path(path)
    if not path.exists():
        raise CatalogError(f"catalog file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise CatalogError(f"{path}: not valid YAML: {exc}") from exc
    return parse_catalog(data, source=str(path))


def packaged_catalog_path(name: str) -> Path | None:
    """Path of a catalog shipped inside the package, or None."""
    candidate = resources.files("slowlight") / "data" / f"{name}.yaml"
    try:
        if candidate.is_file():
            return Path(str(candidate))
    except (OSError, TypeError):
        return None
    return None


def resolve_catalog(spec: str | Path) -> Path:
    """Resolve a catalog reference to a file path.

    Tries, in order: an existing path as given, a ``<name>.yaml`` in the
    directory named by the SLOWLIGHT_CATALOG_DIR environment variable, and
    the catalogs shipped with the package.
    """
    as_path = Path(spec)
    if as_path.exists():
        return as_path
    name = str(spec)
    env_dir = os.environ.get(ENV_CATALOG_DIR)
    if env_dir:
        candidate = Path(env_dir) / f"{name}.yaml"
        if candidate.exists():
            return candidate
    packaged = packaged_catalog_path(name)
    if packaged is not None:
        return packaged
    raise CatalogError(f"catalog not found: {spec}")


def default_catalog() -> CatalogBundle:
    """The packaged effective-doublet rubidium catalog."""
    return load_catalog(resolve_catalog(DEFAULT_CATALOG_NAME))
