"""Command-line entry point: ``tunneldwell {sweep,potential,geometry,overlay}``."""

from __future__ import annotations

import argparse
import logging
import sys
import warnings

from . import __version__
from .sweep import (
    ConfigError,
    DataFormatError,
    PotentialConfig,
    SweepConfig,
    dump_potential,
    format_geometry,
    format_table,
    geometry_rows,
    load_sections,
    overlay_experimental,
    read_table,
    run_sweep,
    write_table,
)

log = logging.getLogger("tunneldwell")


def _overrides(args) -> dict:
    out = {}
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    if getattr(args, "output", None):
        out["output_path"] = args.output
    if getattr(args, "time_unit", None):
        out["time_unit"] = args.time_unit
    return out


def _emit(text: str, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
        log.info("wrote %s", path)
    else:
        sys.stdout.write(text)


def cmd_sweep(args) -> int:
    for section in load_sections(args.config, "sweep", _overrides(args)):
        config = SweepConfig.from_mapping(section)
        table = run_sweep(config)
        bad = sum(not r.ok for r in table.rows)
        if bad:
            log.warning("%d of %d rows have no finite barrier or did not converge", bad, len(table.rows))
        if config.output_path:
            write_table(table)
            log.info("wrote %s (%d rows)", config.output_path, len(table.rows))
        else:
            sys.stdout.write(format_table(table))
    return 0


def cmd_potential(args) -> int:
    for section in load_sections(args.config, "potential", _overrides(args)):
        config = PotentialConfig.from_mapping(section)
        text = dump_potential(config)
        if not config.output_path:
            sys.stdout.write(text)
        else:
            log.info("wrote %s", config.output_path)
    return 0


def cmd_geometry(args) -> int:
    for section in load_sections(args.config, "geometry", _overrides(args)):
        config = SweepConfig.from_mapping(section)
        _emit(format_geometry(config, geometry_rows(config)), config.output_path)
    return 0


def cmd_overlay(args) -> int:
    table = read_table(args.table)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = overlay_experimental(table, args.data, gamma=args.gamma)
    for w in caught:
        log.warning("%s", w.message)
    _emit(report.format(table.config.delimiter), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunneldwell",
        description="JWKB dwell times for field ionization of helium, with screening and friction.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p, run):
        p.add_argument("config", nargs="?", help="INI-style key = value configuration file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a configuration key")
        p.add_argument("-o", "--output", help="output file (default: output_path from the config, else stdout)")
        p.set_defaults(run=run)
        return p

    p = with_config(sub.add_parser("sweep", help="dwell-time table over a field grid"), cmd_sweep)
    p.add_argument("--time-unit", choices=("au", "as"))
    with_config(sub.add_parser("potential", help="dump potential curves as columns"), cmd_potential)
    with_config(sub.add_parser("geometry", help="turning points and barrier maximum over a field grid"), cmd_geometry)

    p = sub.add_parser("overlay", help="align experimental points with a sweep table")
    p.add_argument("table", help="table written by the sweep command")
    p.add_argument("data", help="two or three column file: field, time[, uncertainty]")
    p.add_argument("--gamma", type=float, help="friction coefficient of the model curve (default: first in table)")
    p.add_argument("-o", "--output", help="report file (default: stdout)")
    p.set_defaults(run=cmd_overlay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.run(args)
    except (ConfigError, DataFormatError) as exc:
        print(f"tunneldwell: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"tunneldwell: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
