"""File formats: config, mic-spectra CSV, band CSV, stack/scenario/material files.

All numeric I/O is SI. Floats are written with ``repr`` so that a write, read,
write cycle is byte-identical.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import os
import tempfile

import numpy as np

from .bands import BandTable, band_from_nominal
from .core import AirProperties, ComplexSpectrum, FrequencyGrid, MaterialSpec, TubeGeometry
from .errors import ConfigMismatchError, InputFormatError
from .models import LayerModel
from .synth import SynthScenario

__all__ = [
    "load_config",
    "dump_config",
    "config_hash",
    "write_mic_spectra",
    "read_mic_spectra",
    "require_header_matches",
    "write_band_csv",
    "read_band_csv",
    "load_stack",
    "load_materials",
    "load_scenario",
    "write_text_atomic",
    "write_report",
]

MIC_SPECTRA_MAGIC = "# tubeloss mic spectra v1"
MIC_SPECTRA_HEADER = "frequency_hz,p1_re,p1_im,p2_re,p2_im,p3_re,p3_im,p4_re,p4_im"


def _fmt(x: float) -> str:
    return repr(float(x))


def write_text_atomic(path, text: str) -> None:
    """Write a text file atomically (temp file + rename in the same directory)."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tubeloss-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# configuration


def load_config(path) -> tuple[AirProperties, TubeGeometry]:
    """Read the INI config: [air] density/sound_speed..., [tube] geometry."""
    parser = configparser.ConfigParser()
    read = parser.read(os.fspath(path))
    if not read:
        raise InputFormatError("config file not found or unreadable", path=path)
    try:
        air_section = parser["air"] if parser.has_section("air") else {}
        air = AirProperties(
            density=float(air_section.get("density", AirProperties.density)),
            sound_speed=float(air_section.get("sound_speed", AirProperties.sound_speed)),
            temperature=(
                float(air_section["temperature"]) if "temperature" in air_section else None
            ),
            relative_humidity=(
                float(air_section["relative_humidity"])
                if "relative_humidity" in air_section
                else None
            ),
        )
        if not parser.has_section("tube"):
            raise InputFormatError("missing [tube] section", path=path)
        tube = parser["tube"]
        positions = tuple(float(v) for v in tube["mic_positions"].replace(",", " ").split())
        geometry = TubeGeometry(
            mic_positions=positions,  # type: ignore[arg-type]
            sample_thickness=float(tube["sample_thickness"]),
            tube_diameter=float(tube["diameter"]),
        )
    except InputFormatError:
        raise
    except (KeyError, ValueError, configparser.Error) as exc:
        raise InputFormatError(f"bad config: {exc}", path=path) from exc
    return air, geometry


def dump_config(air: AirProperties, geometry: TubeGeometry | None) -> str:
    """Canonical flat rendering of the effective configuration."""
    lines = [
        f"air.density={_fmt(air.density)}",
        f"air.sound_speed={_fmt(air.sound_speed)}",
        f"air.temperature={'none' if air.temperature is None else _fmt(air.temperature)}",
        "air.relative_humidity="
        + ("none" if air.relative_humidity is None else _fmt(air.relative_humidity)),
    ]
    if geometry is None:
        lines.append("tube=none")
    else:
        lines += [
            "tube.mic_positions=" + " ".join(_fmt(x) for x in geometry.mic_positions),
            f"tube.sample_thickness={_fmt(geometry.sample_thickness)}",
            f"tube.diameter={_fmt(geometry.tube_diameter)}",
        ]
    return "\n".join(lines) + "\n"


def config_hash(air: AirProperties, geometry: TubeGeometry | None) -> str:
    return "sha256:" + hashlib.sha256(dump_config(air, geometry).encode()).hexdigest()


# ---------------------------------------------------------------------------
# mic spectra CSV


def write_mic_spectra(path, spectra, geometry: TubeGeometry, air: AirProperties) -> None:
    """Write four pressure spectra with the geometry/air echo header."""
    p1, p2, p3, p4 = spectra
    grid = p1.grid
    for s in (p2, p3, p4):
        grid.require_matches(s.grid, "write_mic_spectra")
    lines = [
        MIC_SPECTRA_MAGIC,
        f"# n_frequencies = {len(grid)}",
        "# mic_positions_m = " + " ".join(_fmt(x) for x in geometry.mic_positions),
        f"# sample_thickness_m = {_fmt(geometry.sample_thickness)}",
        f"# tube_diameter_m = {_fmt(geometry.tube_diameter)}",
        f"# air_density_kg_m3 = {_fmt(air.density)}",
        f"# air_sound_speed_m_s = {_fmt(air.sound_speed)}",
        MIC_SPECTRA_HEADER,
    ]
    for i, f in enumerate(grid.frequencies):
        row = [_fmt(f)]
        for s in (p1, p2, p3, p4):
            row.append(_fmt(s.values[i].real))
            row.append(_fmt(s.values[i].imag))
        lines.append(",".join(row))
    write_text_atomic(path, "\n".join(lines) + "\n")


def read_mic_spectra(path):
    """Read a mic-spectra CSV.

    Returns (spectra tuple, TubeGeometry, AirProperties).
    """
    header: dict[str, str] = {}
    rows: list[list[float]] = []
    seen_columns = False
    with open(path, "r", newline="") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            if line.startswith("#"):
                if lineno == 1 and line != MIC_SPECTRA_MAGIC:
                    raise InputFormatError(
                        f"not a mic-spectra file (expected '{MIC_SPECTRA_MAGIC}')",
                        path=path,
                        line=lineno,
                    )
                if "=" in line:
                    key, _, value = line[1:].partition("=")
                    header[key.strip()] = value.strip()
                continue
            if not seen_columns:
                if line != MIC_SPECTRA_HEADER:
                    raise InputFormatError(
                        f"unexpected column header '{line}'", path=path, line=lineno
                    )
                seen_columns = True
                continue
            fields = line.split(",")
            if len(fields) != 9:
                raise InputFormatError(
                    f"expected 9 numeric columns, got {len(fields)}", path=path, line=lineno
                )
            try:
                rows.append([float(v) for v in fields])
            except ValueError as exc:
                raise InputFormatError(f"bad number: {exc}", path=path, line=lineno) from exc
    if not seen_columns or not rows:
        raise InputFormatError("no data rows", path=path)

    try:
        positions = tuple(float(v) for v in header["mic_positions_m"].split())
        geometry = TubeGeometry(
            mic_positions=positions,  # type: ignore[arg-type]
            sample_thickness=float(header["sample_thickness_m"]),
            tube_diameter=float(header["tube_diameter_m"]),
        )
        air = AirProperties(
            density=float(header["air_density_kg_m3"]),
            sound_speed=float(header["air_sound_speed_m_s"]),
        )
        n_declared = int(header["n_frequencies"])
    except (KeyError, ValueError) as exc:
        raise InputFormatError(f"bad or missing header field: {exc}", path=path) from exc
    if n_declared != len(rows):
        raise InputFormatError(
            f"header declares {n_declared} frequencies but file has {len(rows)} rows",
            path=path,
        )

    data = np.array(rows)
    try:
        grid = FrequencyGrid(data[:, 0])
    except ValueError as exc:
        raise InputFormatError(f"bad frequency column: {exc}", path=path) from exc
    spectra = tuple(
        ComplexSpectrum(grid, data[:, 1 + 2 * i] + 1j * data[:, 2 + 2 * i]) for i in range(4)
    )
    return spectra, geometry, air


def require_header_matches(
    path,
    file_geometry: TubeGeometry,
    file_air: AirProperties,
    geometry: TubeGeometry,
    air: AirProperties,
    rtol: float = 1e-9,
) -> None:
    """Abort when a file's geometry/air echo disagrees with the active config."""

    def close(a: float, b: float) -> bool:
        return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)

    problems = []
    for i, (got, want) in enumerate(zip(file_geometry.mic_positions, geometry.mic_positions)):
        if not close(got, want):
            problems.append(f"mic x{i + 1}: file {got} vs config {want}")
    if not close(file_geometry.sample_thickness, geometry.sample_thickness):
        problems.append(
            f"sample_thickness: file {file_geometry.sample_thickness} "
            f"vs config {geometry.sample_thickness}"
        )
    if not close(file_geometry.tube_diameter, geometry.tube_diameter):
        problems.append(
            f"tube_diameter: file {file_geometry.tube_diameter} vs config {geometry.tube_diameter}"
        )
    if not close(file_air.density, air.density):
        problems.append(f"air density: file {file_air.density} vs config {air.density}")
    if not close(file_air.sound_speed, air.sound_speed):
        problems.append(f"sound speed: file {file_air.sound_speed} vs config {air.sound_speed}")
    if problems:
        raise ConfigMismatchError(
            "header disagrees with active config: " + "; ".join(problems), path=path
        )


# ---------------------------------------------------------------------------
# band tables CSV


def write_band_csv(path, tables: dict[str, BandTable]) -> None:
    """Write band tables: nominal-center header row, then value and coverage rows."""
    if not tables:
        raise ValueError("need at least one table")
    first = next(iter(tables.values()))
    for name, table in tables.items():
        if not first.same_bands(table):
            raise ValueError(f"table '{name}' uses a different band set")
        if any(ch in name for ch in ",\n\r"):
            raise ValueError(f"table name '{name}' may not contain commas or newlines")
    header = "band_nominal_hz," + ",".join(format(b.nominal, "g") for b in first.bands)
    lines = [header]
    for name, table in tables.items():
        values = ",".join("" if np.isnan(v) else _fmt(v) for v in table.values)
        coverage = ",".join(_fmt(c) for c in table.coverage)
        lines.append(f"{name},{values}")
        lines.append(f"{name}_coverage,{coverage}")
    write_text_atomic(path, "\n".join(lines) + "\n")


def read_band_csv(path) -> dict[str, BandTable]:
    """Read band tables written by :func:`write_band_csv`."""
    with open(path, "r", newline="") as handle:
        lines = [line.rstrip("\n").rstrip("\r") for line in handle]
    lines = [line for line in lines if line]
    if not lines:
        raise InputFormatError("empty band CSV", path=path)
    head = lines[0].split(",")
    if head[0] != "band_nominal_hz" or len(head) < 2:
        raise InputFormatError("first row must be 'band_nominal_hz,<centers...>'", path=path, line=1)
    try:
        bands = tuple(band_from_nominal(float(v)) for v in head[1:])
    except ValueError as exc:
        raise InputFormatError(f"bad nominal center: {exc}", path=path, line=1) from exc

    raw: dict[str, list[float]] = {}
    order: list[str] = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != len(bands) + 1:
            raise InputFormatError(
                f"expected {len(bands) + 1} columns, got {len(fields)}", path=path, line=lineno
            )
        name = fields[0]
        if name in raw:
            raise InputFormatError(f"duplicate row '{name}'", path=path, line=lineno)
        try:
            raw[name] = [float(v) if v else float("nan") for v in fields[1:]]
        except ValueError as exc:
            raise InputFormatError(f"bad number: {exc}", path=path, line=lineno) from exc
        order.append(name)

    tables: dict[str, BandTable] = {}
    for name in order:
        if name.endswith("_coverage"):
            continue
        values = raw[name]
        coverage = raw.get(name + "_coverage")
        if coverage is None:
            coverage = [0.0 if np.isnan(v) else 1.0 for v in values]
        tables[name] = BandTable(bands, np.array(values), np.array(coverage))
    if not tables:
        raise InputFormatError("no value rows found", path=path)
    return tables


# ---------------------------------------------------------------------------
# stacks, materials, scenarios


def _layer_from_record(record: dict, path, index: int) -> LayerModel:
    kind = record.get("kind")
    try:
        if kind == "limp-mass":
            return LayerModel.limp_mass(float(record["surface_density"]))
        if kind == "air-gap":
            return LayerModel.air_gap(float(record["thickness"]))
        if kind == "identity":
            return LayerModel.identity()
        if kind == "matrix":
            entries = []
            for key in ("t11", "t12", "t21", "t22"):
                re_part, im_part = record[key]
                entries.append(complex(float(re_part), float(im_part)))
            return LayerModel.explicit(
                *entries,
                passive_symmetric=bool(record.get("passive_symmetric", False)),
                thickness=float(record.get("thickness", 0.0)),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"bad layer #{index + 1}: {exc}", path=path) from exc
    raise InputFormatError(f"bad layer #{index + 1}: unknown kind '{kind}'", path=path)


def load_stack(path) -> tuple[LayerModel, ...]:
    """Read an ordered JSON list of layer records (incident side first)."""
    try:
        with open(path, "r") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON: {exc}", path=path) from exc
    if not isinstance(data, list) or not data:
        raise InputFormatError("stack file must be a non-empty JSON list", path=path)
    return tuple(_layer_from_record(rec, path, i) for i, rec in enumerate(data))


def load_materials(path) -> tuple[MaterialSpec, ...]:
    """Read a JSON list of material records."""
    try:
        with open(path, "r") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON: {exc}", path=path) from exc
    if not isinstance(data, list) or not data:
        raise InputFormatError("materials file must be a non-empty JSON list", path=path)
    materials = []
    for i, rec in enumerate(data):
        try:
            materials.append(
                MaterialSpec(
                    name=str(rec["name"]),
                    thickness_mm=float(rec["thickness_mm"]),
                    surface_density=float(rec["surface_density"]),
                    bulk_density=(
                        float(rec["bulk_density"])
                        if rec.get("bulk_density") is not None
                        else None
                    ),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputFormatError(f"bad material #{i + 1}: {exc}", path=path) from exc
    return tuple(materials)


def _parse_complex(text: str, what: str, path) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise InputFormatError(f"bad {what}: '{text}'", path=path) from exc


def load_scenario(path, geometry: TubeGeometry, air: AirProperties) -> tuple[SynthScenario, FrequencyGrid]:
    """Read a synthesis scenario INI; geometry and air come from the config."""
    parser = configparser.ConfigParser()
    read = parser.read(os.fspath(path))
    if not read:
        raise InputFormatError("scenario file not found or unreadable", path=path)
    if not parser.has_section("scenario"):
        raise InputFormatError("missing [scenario] section", path=path)
    section = parser["scenario"]
    try:
        sample_kind = section.get("sample", "identity").strip()
        if sample_kind == "limp-mass":
            layers: tuple[LayerModel, ...] = (
                LayerModel.limp_mass(float(section["surface_density"])),
            )
        elif sample_kind == "air-gap":
            layers = (LayerModel.air_gap(float(section["gap_thickness"])),)
        elif sample_kind == "identity":
            layers = (LayerModel.identity(),)
        elif sample_kind == "stack":
            stack_path = section["stack_file"]
            if not os.path.isabs(stack_path):
                stack_path = os.path.join(os.path.dirname(os.path.abspath(os.fspath(path))), stack_path)
            layers = load_stack(stack_path)
        else:
            raise InputFormatError(f"unknown sample kind '{sample_kind}'", path=path)

        termination_text = section.get("termination", "anechoic").strip()
        termination = (
            0j if termination_text == "anechoic" else _parse_complex(termination_text, "termination", path)
        )
        incident = _parse_complex(section.get("incident_amplitude", "1.0"), "incident amplitude", path)
        snr_text = section.get("snr_db", "off").strip().lower()
        snr = None if snr_text in ("off", "none", "") else float(snr_text)
        seed = int(section.get("seed", "0"))
        grid = FrequencyGrid.from_range(
            float(section.get("f_min", "100")),
            float(section.get("f_max", "2000")),
            float(section.get("f_step", "10")),
        )
        scenario = SynthScenario(
            sample=layers,
            geometry=geometry,
            air=air,
            incident_amplitude=incident,
            termination_ratio=termination,
            snr_db=snr,
            seed=seed,
        )
    except InputFormatError:
        raise
    except (KeyError, ValueError, configparser.Error) as exc:
        raise InputFormatError(f"bad scenario: {exc}", path=path) from exc
    return scenario, grid


# ---------------------------------------------------------------------------
# run reports


def write_report(path, report: dict) -> str:
    """Serialize a run report as JSON; path None or '-' prints to stdout."""
    text = json.dumps(report, indent=2, allow_nan=True) + "\n"
    if path is None or path == "-":
        print(text, end="")
    else:
        write_text_atomic(path, text)
    return text
