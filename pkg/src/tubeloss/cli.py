"""Command-line surface tying the analysis pipeline together.

Exit codes: 0 success, 2 input/format error, 3 numerical validity error.
Warnings go to stderr and into the report; they never change the exit code.
"""
from __future__ import annotations

import argparse
import datetime
import sys
import warnings

import numpy as np

from . import __version__
from .bands import (
    BandTable,
    RepetitionSet,
    average_repetitions,
    band_average,
    insertion_loss,
    third_octave_bands,
)
from .core import DEFAULT_AIR, FrequencyGrid, plane_wave_cutoff
from .errors import (
    AllBinsInvalidError,
    BandMismatchError,
    GridMismatchError,
    InputFormatError,
    PlaneWaveCutoffWarning,
    SingularBinWarning,
    TubelossError,
)
from .io_files import (
    config_hash,
    load_config,
    load_materials,
    load_scenario,
    load_stack,
    read_band_csv,
    read_mic_spectra,
    require_header_matches,
    write_band_csv,
    write_mic_spectra,
    write_report,
)
from .models import mass_law_constant_db, mass_law_stl, stack_indicators
from .pipeline import analyze_four_mic
from .synth import SynthScenario, synth_mic_pressures

_DB_DECIMALS = 2  # reports quote dB to 0.01; CSV files keep full precision


def _round_db(values) -> list:
    out = []
    for v in np.asarray(values, dtype=float):
        out.append(round(float(v), _DB_DECIMALS) if np.isfinite(v) else (None if np.isnan(v) else float(v)))
    return out


def _provenance(command: str, air, geometry, modes: dict, seed) -> dict:
    return {
        "tool": "tubeloss",
        "version": __version__,
        "command": command,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config_hash": config_hash(air, geometry),
        "modes": modes,
        "seed": seed,
    }


def _band_block(table: BandTable) -> dict:
    return {
        "nominal_hz": [b.nominal for b in table.bands],
        "values_db": _round_db(table.values),
        "coverage": [float(c) for c in table.coverage],
    }


def _require_config(args) -> tuple:
    if not args.config:
        raise InputFormatError("this command needs --config <path>")
    return load_config(args.config)


def _emit(report: dict, caught, output) -> None:
    report["warnings"] = [str(w.message) for w in caught]
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    write_report(output, report)


def _cmd_bands(args) -> int:
    bands = third_octave_bands(args.f_min, args.f_max)
    lines = ["band_nominal_hz,exact_center_hz,lower_edge_hz,upper_edge_hz"]
    for b in bands:
        lines.append(f"{b.nominal:g},{b.center!r},{b.lower!r},{b.upper!r}")
    text = "\n".join(lines) + "\n"
    if args.output and args.output != "-":
        from .io_files import write_text_atomic

        write_text_atomic(args.output, text)
    else:
        print(text, end="")
    return 0


def _cmd_synth(args) -> int:
    air, geometry = _require_config(args)
    scenario, grid = load_scenario(args.scenario, geometry, air)
    if args.seed is not None:
        scenario = SynthScenario(
            sample=scenario.sample,
            geometry=scenario.geometry,
            air=scenario.air,
            incident_amplitude=scenario.incident_amplitude,
            termination_ratio=scenario.termination_ratio,
            snr_db=scenario.snr_db,
            seed=args.seed,
        )
    spectra = synth_mic_pressures(scenario, grid)
    write_mic_spectra(args.output, spectra, geometry, air)
    return 0


def _cmd_stl(args) -> int:
    air, geometry = _require_config(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")

        grid = None
        runs = []
        reflectances = []
        direct_runs = []
        for path in args.inputs:
            spectra, file_geometry, file_air = read_mic_spectra(path)
            require_header_matches(path, file_geometry, file_air, geometry, air)
            if grid is None:
                grid = spectra[0].grid
            else:
                grid.require_matches(spectra[0].grid, f"input '{path}'")
            analysis = analyze_four_mic(*spectra, geometry=geometry, air=air)
            stl_run = np.where(analysis.indicators.valid, analysis.indicators.stl_db, np.nan)
            runs.append(stl_run)
            reflectances.append(
                np.where(analysis.indicators.valid, analysis.indicators.reflectance, np.nan)
            )
            direct_runs.append(analysis.stl_direct_db)
            singular = analysis.amplitudes.singular_frequencies()
            for pair in ("upstream", "downstream"):
                if singular[pair].size:
                    warnings.warn(
                        f"{path}: {pair} pair singular at {singular[pair].tolist()} Hz",
                        SingularBinWarning,
                        stacklevel=1,
                    )

        reps = RepetitionSet(grid, np.array(runs), tuple(args.inputs))
        mean_stl, spread_stl = average_repetitions(reps, mode=args.rep_mode)
        if not np.any(np.isfinite(mean_stl)):
            raise AllBinsInvalidError("no valid frequency bin in any input (all bins singular)")
        valid = np.isfinite(mean_stl)

        cutoff = plane_wave_cutoff(geometry, air)
        above = grid.frequencies > cutoff
        if np.any(above):
            warnings.warn(
                f"{int(np.count_nonzero(above))} bins above the plane-wave cutoff "
                f"({cutoff:.1f} Hz) are flagged, not rejected",
                PlaneWaveCutoffWarning,
                stacklevel=1,
            )

        with np.errstate(invalid="ignore"), warnings.catch_warnings():
            # all-NaN columns (singular bins) are expected, not reportable
            warnings.simplefilter("ignore", RuntimeWarning)
            mean_reflectance = np.nanmean(np.array(reflectances), axis=0)
            mean_direct = np.nanmean(np.array(direct_runs), axis=0)

        bands = third_octave_bands(args.f_min, args.f_max)
        table = band_average(grid, mean_stl, bands, mode=args.band_mode)

        report = _provenance(
            "stl",
            air,
            geometry,
            {"band_mode": args.band_mode, "rep_mode": args.rep_mode},
            args.seed,
        )
        report.update(
            {
                "inputs": list(args.inputs),
                "n_repetitions": len(args.inputs),
                "cutoff_hz": cutoff,
                "narrowband": {
                    "frequency_hz": grid.frequencies.tolist(),
                    "stl_db": _round_db(mean_stl),
                    "stl_spread_db": _round_db(spread_stl),
                    "stl_direct_db": _round_db(mean_direct),
                    "reflectance": [
                        round(float(r), 6) if np.isfinite(r) else None for r in mean_reflectance
                    ],
                    "valid": [bool(v) for v in valid],
                    "above_cutoff": [bool(v) for v in above],
                },
                "bands": _band_block(table),
            }
        )
        if args.band_csv:
            write_band_csv(args.band_csv, {"stl_db": table})
        if args.narrowband_csv:
            _write_narrowband_csv(args.narrowband_csv, grid, mean_stl, spread_stl, mean_reflectance)
    _emit(report, caught, args.output)
    return 0


def _write_narrowband_csv(path, grid, stl_db, spread_db, reflectance) -> None:
    from .io_files import write_text_atomic

    lines = ["frequency_hz,stl_db,stl_spread_db,reflectance"]
    for row in zip(grid.frequencies, stl_db, spread_db, reflectance):
        lines.append(",".join(repr(float(v)) for v in row))
    write_text_atomic(path, "\n".join(lines) + "\n")


def _cmd_masslaw(args) -> int:
    air = load_config(args.config)[0] if args.config else DEFAULT_AIR
    materials = load_materials(args.materials)
    bands = third_octave_bands(args.f_min, args.f_max)
    centers = np.array([b.center for b in bands])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        entries = []
        for mat in materials:
            values = mass_law_stl(centers, mat.surface_density, args.masslaw_constant, air)
            below = values < 0.0
            if np.any(below):
                nominals = [b.nominal for b, flag in zip(bands, below) if flag]
                warnings.warn(
                    f"{mat.name}: mass-law prediction below validity (negative) in bands "
                    f"{nominals} Hz",
                    UserWarning,
                    stacklevel=1,
                )
            entries.append(
                {
                    "name": mat.name,
                    "thickness_mm": mat.thickness_mm,
                    "surface_density": mat.surface_density,
                    "bands": {
                        "nominal_hz": [b.nominal for b in bands],
                        "stl_db": _round_db(values),
                        "below_validity": [bool(v) for v in below],
                    },
                }
            )
        report = _provenance(
            "masslaw",
            air,
            None,
            {"masslaw_constant": args.masslaw_constant},
            args.seed,
        )
        report["constant_db"] = mass_law_constant_db(args.masslaw_constant, air)
        report["materials"] = entries
        if args.band_csv:
            tables = {
                mat.name.replace(",", " "): BandTable.from_values(
                    bands, mass_law_stl(centers, mat.surface_density, args.masslaw_constant, air)
                )
                for mat in materials
            }
            write_band_csv(args.band_csv, tables)
    _emit(report, caught, args.output)
    return 0


def _cmd_il(args) -> int:
    def pick_table(path, preferred: str) -> BandTable:
        tables = read_band_csv(path)
        if preferred in tables:
            return tables[preferred]
        return next(iter(tables.values()))

    before = pick_table(args.before, "L_r0")
    after = pick_table(args.after, "L_rs")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        table = insertion_loss(before, after)
        report = _provenance("il", DEFAULT_AIR, None, {}, args.seed)
        report.update(
            {
                "before": args.before,
                "after": args.after,
                "bands": {
                    "nominal_hz": [b.nominal for b in table.bands],
                    "il_db": _round_db(table.values),
                    "coverage": [float(c) for c in table.coverage],
                },
            }
        )
        if args.band_csv:
            write_band_csv(args.band_csv, {"il_db": table})
    _emit(report, caught, args.output)
    return 0


def _cmd_stack(args) -> int:
    air = load_config(args.config)[0] if args.config else DEFAULT_AIR
    layers = load_stack(args.stack)
    grid = FrequencyGrid.from_range(args.f_min, args.f_max, args.f_step)
    bands = third_octave_bands(args.f_min, args.f_max)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        stack = stack_indicators(layers, grid, air)
        stack_stl = np.where(stack.valid, stack.stl_db, np.nan)
        stack_table = band_average(grid, stack_stl, bands, mode=args.band_mode)

        constituents = []
        for layer in layers:
            single = stack_indicators((layer,), grid, air)
            single_stl = np.where(single.valid, single.stl_db, np.nan)
            constituents.append(
                {
                    "layer": layer.describe(),
                    "bands": _band_block(
                        band_average(grid, single_stl, bands, mode=args.band_mode)
                    ),
                }
            )

        report = _provenance("stack", air, None, {"band_mode": args.band_mode}, args.seed)
        report.update(
            {
                "stack": [layer.describe() for layer in layers],
                "narrowband": {
                    "frequency_hz": grid.frequencies.tolist(),
                    "stl_db": _round_db(stack_stl),
                },
                "bands": _band_block(stack_table),
                "constituents": constituents,
            }
        )
        if args.band_csv:
            write_band_csv(args.band_csv, {"stack_stl_db": stack_table})
    _emit(report, caught, args.output)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", metavar="PATH", help="INI config with [air] and [tube]")
    shared.add_argument("--band-mode", choices=("power", "db"), default="power")
    shared.add_argument("--rep-mode", choices=("db", "power"), default="db")
    shared.add_argument("--masslaw-constant", choices=("paper", "normal"), default="paper")
    shared.add_argument("--seed", type=int, default=None, metavar="U64")
    shared.add_argument("--output", "-o", default="-", metavar="PATH", help="'-' for stdout")

    parser = argparse.ArgumentParser(
        prog="tubeloss",
        description="Impedance-tube transmission loss and two-room insertion loss toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bands", parents=[shared], help="list third-octave bands")
    p.add_argument("--f-min", type=float, default=100.0)
    p.add_argument("--f-max", type=float, default=5000.0)
    p.set_defaults(func=_cmd_bands)

    p = sub.add_parser("synth", parents=[shared], help="generate synthetic mic spectra")
    p.add_argument("scenario", help="scenario INI file")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("stl", parents=[shared], help="transmission loss from mic spectra files")
    p.add_argument("inputs", nargs="+", help="mic-spectra CSV files (repetitions)")
    p.add_argument("--f-min", type=float, default=100.0)
    p.add_argument("--f-max", type=float, default=5000.0)
    p.add_argument("--band-csv", metavar="PATH")
    p.add_argument("--narrowband-csv", metavar="PATH")
    p.set_defaults(func=_cmd_stl)

    p = sub.add_parser("masslaw", parents=[shared], help="mass-law predictions per material")
    p.add_argument("--materials", required=True, metavar="PATH", help="materials JSON")
    p.add_argument("--f-min", type=float, default=100.0)
    p.add_argument("--f-max", type=float, default=5000.0)
    p.add_argument("--band-csv", metavar="PATH")
    p.set_defaults(func=_cmd_masslaw)

    p = sub.add_parser("il", parents=[shared], help="insertion loss from two band CSVs")
    p.add_argument("--before", required=True, metavar="PATH", help="receiver levels, no sample")
    p.add_argument("--after", required=True, metavar="PATH", help="receiver levels, sample installed")
    p.add_argument("--band-csv", metavar="PATH")
    p.set_defaults(func=_cmd_il)

    p = sub.add_parser("stack", parents=[shared], help="predicted loss of a layer stack")
    p.add_argument("--stack", required=True, metavar="PATH", help="stack JSON")
    p.add_argument("--f-min", type=float, default=100.0)
    p.add_argument("--f-max", type=float, default=5000.0)
    p.add_argument("--f-step", type=float, default=10.0)
    p.add_argument("--band-csv", metavar="PATH")
    p.set_defaults(func=_cmd_stack)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AllBinsInvalidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InputFormatError, BandMismatchError, GridMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TubelossError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
