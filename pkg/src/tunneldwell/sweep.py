"""Field sweeps, plot-ready text tables and experimental-data overlays.

Tables are plain delimited text: ``#``-prefixed header lines echo the
configuration, followed by one column-name line and the data rows. Floats
are written in their shortest round-trip form (at most 17 significant
digits), so a table read back holds the same doubles.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import warnings
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .dissipation import MODES, TOTAL_SHIFT, dissipative_dwell_time
from .geometry import GeometryError, NoBarrier, NoExitPoint, find_turning_points
from .params import BINDING, COORDINATE_SYSTEMS, PARABOLIC, AtomParams, convert_time, get_atom
from .potentials import PotentialModel
from .quadrature import ConvergenceFailure
from .times import evaluate

TIME_UNITS = ("au", "as")

OK = "ok"
OVER_BARRIER = "over-barrier"
NO_EXIT = "no-exit"
NOT_CONVERGED = "not-converged"

COLUMNS = (
    "f",
    "gamma",
    "status",
    "tau_d",
    "tau_traversal",
    "t2",
    "tau_dt",
    "tau_dr",
    "delta_e",
    "x1",
    "x2",
    "v_max",
)
TIME_COLUMNS = ("tau_d", "tau_traversal", "tau_dt", "tau_dr")
GEOMETRY_COLUMNS = ("f", "status", "energy", "x1", "x2", "x_max", "v_max")

_ATOM_KEYS = tuple(f.name for f in fields(AtomParams))


class ConfigError(ValueError):
    """Invalid or unparsable configuration."""


class DataFormatError(ValueError):
    """Malformed experimental data file."""


class UnitMismatchWarning(UserWarning):
    pass


def fmt(x) -> str:
    """Text form of a number that parses back to the same double."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_list(text) -> list[str]:
    if isinstance(text, (list, tuple)):
        return [str(t) for t in text]
    return [t for t in (s.strip() for s in str(text).replace(";", ",").split(",")) if t]


def _resolve_atom(values: dict) -> tuple[str, AtomParams]:
    name = str(values.get("atom", "he4")).strip()
    try:
        atom = get_atom(name)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    overrides = {}
    for key in _ATOM_KEYS:
        if key in values:
            cast = int if key in ("Z", "m") else float
            try:
                overrides[key] = cast(values[key])
            except ValueError:
                raise ConfigError(f"{key} must be numeric, got {values[key]!r}") from None
    if overrides:
        try:
            atom = atom.with_overrides(**overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return name, atom


@dataclass(frozen=True)
class SweepConfig:
    """Everything needed to reproduce one sweep table."""

    atom_name: str = "he4"
    atom: AtomParams = field(default_factory=lambda: get_atom("he4"))
    coords: str = PARABOLIC
    screening: bool = True
    triangle: bool = False
    triangle_rule: str = "area"
    spherical_energy: str = BINDING
    gamma_list: tuple = (0.0,)
    mode: str = TOTAL_SHIFT
    f_start: float = 0.03
    f_stop: float = 0.12
    f_steps: int = 64
    output_path: str = ""
    time_unit: str = "au"
    delimiter: str = ","
    rtol: float = 1e-8

    def __post_init__(self):
        if self.coords not in COORDINATE_SYSTEMS:
            raise ConfigError(f"coords must be one of {COORDINATE_SYSTEMS}, got {self.coords!r}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.time_unit not in TIME_UNITS:
            raise ConfigError(f"time_unit must be one of {TIME_UNITS}, got {self.time_unit!r}")
        if not self.f_start > 0:
            raise ConfigError("f_start must be positive")
        if not self.f_stop > self.f_start:
            raise ConfigError("f_stop must exceed f_start")
        if self.f_steps < 2:
            raise ConfigError("f_steps must be at least 2")
        if len(self.delimiter) != 1:
            raise ConfigError("delimiter must be a single character")
        if not self.gamma_list:
            raise ConfigError("gamma_list must not be empty")
        for g in self.gamma_list:
            if not abs(g) < 1:
                raise ConfigError(f"|gamma| must be below 1, got {g}")
        try:
            self.model()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_mapping(cls, values: dict) -> "SweepConfig":
        """Build a config from string-valued keys (config-file section)."""
        values = {k.strip(): v for k, v in values.items()}
        name, atom = _resolve_atom(values)
        kw = {"atom_name": name, "atom": atom}
        try:
            for key, cast in (
                ("coords", str),
                ("triangle_rule", str),
                ("spherical_energy", str),
                ("mode", str),
                ("output_path", str),
                ("time_unit", str),
                ("f_start", float),
                ("f_stop", float),
                ("f_steps", int),
                ("rtol", float),
            ):
                if key in values:
                    kw[key] = cast(str(values[key]).strip())
            for key in ("screening", "triangle"):
                if key in values:
                    kw[key] = _parse_bool(values[key])
            if "delimiter" in values:
                kw["delimiter"] = _parse_delimiter(values["delimiter"])
            gammas = values.get("gamma_list", values.get("gamma"))
            if gammas is not None:
                kw["gamma_list"] = tuple(float(g) for g in _parse_list(gammas))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None
        return cls(**kw)

    def model(self) -> PotentialModel:
        return PotentialModel(
            coords=self.coords,
            screening=self.screening,
            triangle=self.triangle,
            params=self.atom,
            spherical_energy=self.spherical_energy,
            triangle_rule=self.triangle_rule,
        )

    def fields(self) -> np.ndarray:
        return np.linspace(self.f_start, self.f_stop, self.f_steps)

    def header_items(self) -> list[tuple[str, str]]:
        """Key/value pairs echoed in output headers (output path excluded)."""
        items = [("atom", self.atom_name)]
        items += [(k, fmt(getattr(self.atom, k))) for k in _ATOM_KEYS]
        items += [
            ("coords", self.coords),
            ("screening", str(self.screening).lower()),
            ("triangle", str(self.triangle).lower()),
            ("triangle_rule", self.triangle_rule),
            ("spherical_energy", self.spherical_energy),
            ("gamma_list", ", ".join(fmt(g) for g in self.gamma_list)),
            ("mode", self.mode),
            ("f_start", fmt(self.f_start)),
            ("f_stop", fmt(self.f_stop)),
            ("f_steps", str(self.f_steps)),
            ("time_unit", self.time_unit),
            ("delimiter", _delimiter_name(self.delimiter)),
            ("rtol", fmt(self.rtol)),
        ]
        return items


_DELIMITER_NAMES = {",": "comma", "\t": "tab", " ": "space", ";": "semicolon"}


def _parse_delimiter(text: str) -> str:
    raw = str(text)
    t = raw.strip().lower()
    for char, name in _DELIMITER_NAMES.items():
        if t == name:
            return char
    if t in ("\\t",):
        return "\t"
    if len(raw) == 1:
        return raw
    if len(t) == 1:
        return t
    raise ConfigError(f"cannot interpret delimiter {text!r}")


def _delimiter_name(d: str) -> str:
    return _DELIMITER_NAMES.get(d, d)


@dataclass(frozen=True)
class SweepRow:
    f: float
    gamma: float
    status: str
    tau_d: float = math.nan
    tau_traversal: float = math.nan
    t2: float = math.nan
    tau_dt: float = math.nan
    tau_dr: float = math.nan
    delta_e: float = math.nan
    x1: float = math.nan
    x2: float = math.nan
    v_max: float = math.nan
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == OK


@dataclass
class SweepTable:
    """Sweep rows (times in a.u.) plus the configuration that produced them."""

    config: SweepConfig
    rows: list = field(default_factory=list)

    def curve(self, gamma=None, status_ok=True):
        """Rows for one friction coefficient (the first listed one by default)."""
        if gamma is None:
            gamma = self.config.gamma_list[0]
        return [r for r in self.rows if r.gamma == gamma and (r.ok or not status_ok)]

    def column(self, name, gamma=None):
        return np.array([getattr(r, name) for r in self.curve(gamma, status_ok=False)])


def _row_from_result(f, gamma, res) -> SweepRow:
    g = res.geometry
    return SweepRow(
        f=f,
        gamma=gamma,
        status=OK,
        tau_d=res.tau_d,
        tau_traversal=res.tau_traversal,
        t2=res.t2,
        tau_dt=res.tau_dt,
        tau_dr=res.tau_dr,
        delta_e=res.delta_e,
        x1=g.x1,
        x2=g.x2,
        v_max=g.v_max,
    )


def evaluate_point(model, f, gamma, mode=TOTAL_SHIFT, rtol=1e-8) -> SweepRow:
    """One sweep row; failures are recorded in the row instead of raised."""
    try:
        if gamma == 0:
            res = evaluate(model, f, rtol=rtol)
        else:
            res = dissipative_dwell_time(model, f, gamma=gamma, mode=mode, rtol=rtol)
    except NoBarrier as exc:
        return SweepRow(f=f, gamma=gamma, status=OVER_BARRIER, message=str(exc))
    except NoExitPoint as exc:
        return SweepRow(f=f, gamma=gamma, status=NO_EXIT, message=str(exc))
    except ConvergenceFailure as exc:
        return SweepRow(f=f, gamma=gamma, status=NOT_CONVERGED, message=str(exc))
    return _row_from_result(f, gamma, res)


def run_sweep(config: SweepConfig) -> SweepTable:
    """Evaluate the time pipeline over the field grid for every gamma.

    Rows are ordered by field, then by gamma.
    """
    model = config.model()
    gammas = sorted(config.gamma_list)
    rows = [
        evaluate_point(model, float(f), float(g), config.mode, config.rtol)
        for f in config.fields()
        for g in gammas
    ]
    return SweepTable(config, rows)


def _header_lines(kind, items) -> list[str]:
    lines = [f"# tunneldwell {__version__} {kind}"]
    lines += [f"# {k} = {v}" for k, v in items]
    return lines


def format_table(table: SweepTable) -> str:
    cfg = table.config
    buf = io.StringIO()
    for line in _header_lines("sweep", cfg.header_items()):
        buf.write(line + "\n")
    writer = csv.writer(buf, delimiter=cfg.delimiter, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in table.rows:
        out = []
        for name in COLUMNS:
            v = getattr(r, name)
            if name in TIME_COLUMNS:
                v = convert_time(v, cfg.time_unit)
            out.append(fmt(v))
        writer.writerow(out)
    return buf.getvalue()


def write_table(table: SweepTable, path=None) -> Path:
    path = Path(path or table.config.output_path)
    if not str(path):
        raise ConfigError("no output path given")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(format_table(table))
    return path


def _read_header(lines):
    meta = {}
    body = []
    for line in lines:
        if line.startswith("#"):
            text = line[1:].strip()
            if "=" in text:
                key, _, value = text.partition("=")
                meta[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    return meta, body


def read_table(path) -> SweepTable:
    """Parse a table written by :func:`write_table`; times come back in a.u."""
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    meta, body = _read_header(lines)
    config = SweepConfig.from_mapping(meta)
    reader = csv.reader(body, delimiter=config.delimiter)
    header = next(reader)
    if tuple(header) != COLUMNS:
        raise DataFormatError(f"{path}: unexpected columns {header}")
    scale = convert_time(1.0, config.time_unit)
    rows = []
    for values in reader:
        kw = dict(zip(COLUMNS, values))
        for name in COLUMNS:
            if name == "status":
                continue
            kw[name] = float(kw[name])
            if name in TIME_COLUMNS and scale != 1.0:
                kw[name] = kw[name] / scale
        rows.append(SweepRow(**kw))
    return SweepTable(config, rows)


# -- experimental overlay ---------------------------------------------------


@dataclass(frozen=True)
class OverlayPoint:
    f_exp: float
    t_exp: float
    sigma: float
    f_model: float
    t_model: float

    @property
    def residual(self) -> float:
        return self.t_exp - self.t_model

    @property
    def relative_residual(self) -> float:
        return self.residual / self.t_model


@dataclass
class OverlayReport:
    time_unit: str
    gamma: float
    points: list = field(default_factory=list)

    def format(self, delimiter=",") -> str:
        buf = io.StringIO()
        buf.write(f"# tunneldwell {__version__} overlay\n")
        buf.write(f"# time_unit = {self.time_unit}\n")
        buf.write(f"# gamma = {fmt(self.gamma)}\n")
        buf.write(f"# points = {len(self.points)}\n")
        w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
        w.writerow(("f_exp", "t_exp", "sigma", "f_model", "t_model", "residual", "relative_residual"))
        for p in self.points:
            w.writerow(
                [fmt(v) for v in (p.f_exp, p.t_exp, p.sigma, p.f_model, p.t_model, p.residual, p.relative_residual)]
            )
        return buf.getvalue()


def read_experimental(path):
    """Read (field, time[, uncertainty]) rows.

    Comma, semicolon or whitespace separated; ``#`` starts a comment. A
    comment of the form ``# time_unit = as`` declares the time unit.
    Returns ``(array of shape (n, 3), declared unit or None)``.
    """
    rows = []
    unit = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if line.startswith("#"):
                text = line[1:].strip()
                key, sep, value = text.partition("=")
                if sep and key.strip() == "time_unit":
                    unit = value.strip()
                    if unit not in TIME_UNITS:
                        raise DataFormatError(f"{path}:{lineno}: unknown time unit {unit!r}")
                continue
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").replace(";", " ").split()
            if len(parts) not in (2, 3):
                raise DataFormatError(f"{path}:{lineno}: expected 2 or 3 columns, got {len(parts)}")
            try:
                vals = [float(p) for p in parts]
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-numeric value in {line!r}") from None
            if len(vals) == 2:
                vals.append(math.nan)
            rows.append(vals)
    return np.array(rows, dtype=float).reshape(-1, 3), unit


def overlay_experimental(table: SweepTable, data_path, gamma=None) -> OverlayReport:
    """Pair each data point with the nearest valid model grid point.

    Residuals are data minus model in the table's time unit. No fitting is
    done. Data declared in a different unit is converted with a warning.
    """
    if gamma is None:
        gamma = table.config.gamma_list[0]
    unit = table.config.time_unit
    data, declared = read_experimental(data_path)
    if declared is not None and declared != unit:
        warnings.warn(
            f"{data_path} declares times in {declared!r} but the table uses {unit!r}; converting",
            UnitMismatchWarning,
            stacklevel=2,
        )
        factor = convert_time(1.0, unit) / convert_time(1.0, declared)
        data = data * np.array([1.0, factor, factor])
    curve = table.curve(gamma)
    report = OverlayReport(time_unit=unit, gamma=gamma)
    if not curve:
        return report
    fs = np.array([r.f for r in curve])
    ts = np.array([convert_time(r.tau_d, unit) for r in curve])
    for f_exp, t_exp, sigma in data:
        i = int(np.argmin(np.abs(fs - f_exp)))
        report.points.append(OverlayPoint(float(f_exp), float(t_exp), float(sigma), float(fs[i]), float(ts[i])))
    return report


# -- geometry rows ------------------------------------------------------------


def geometry_rows(config: SweepConfig) -> list[dict]:
    model = config.model()
    rows = []
    for f in config.fields():
        f = float(f)
        e = model.energy(f)
        try:
            g = find_turning_points(model, f, e)
            rows.append(dict(f=f, status=OK, energy=e, x1=g.x1, x2=g.x2, x_max=g.x_max, v_max=g.v_max))
        except GeometryError as exc:
            status = OVER_BARRIER if isinstance(exc, NoBarrier) else NO_EXIT
            rows.append(dict(f=f, status=status, energy=e, x1=math.nan, x2=math.nan, x_max=math.nan, v_max=math.nan))
    return rows


def format_geometry(config: SweepConfig, rows) -> str:
    buf = io.StringIO()
    for line in _header_lines("geometry", config.header_items()):
        buf.write(line + "\n")
    w = csv.writer(buf, delimiter=config.delimiter, lineterminator="\n")
    w.writerow(GEOMETRY_COLUMNS)
    for r in rows:
        w.writerow([fmt(r[c]) for c in GEOMETRY_COLUMNS])
    return buf.getvalue()


# -- potential curves -----------------------------------------------------------

VARIANTS = ("unscreened", "screened", "triangle", "triangle_screened", "terms", "energy")


@dataclass(frozen=True)
class PotentialConfig:
    """Curves to dump for the potential-shape figures."""

    atom_name: str = "he4"
    atom: AtomParams = field(default_factory=lambda: get_atom("he4"))
    coords: str = PARABOLIC
    spherical_energy: str = BINDING
    triangle_rule: str = "area"
    fields: tuple = (0.06,)
    variants: tuple = ("unscreened", "screened")
    x_start: float = 0.5
    x_stop: float = 40.0
    x_steps: int = 400
    spacing: str = "linear"
    output_path: str = ""
    delimiter: str = ","

    def __post_init__(self):
        if self.coords not in COORDINATE_SYSTEMS:
            raise ConfigError(f"coords must be one of {COORDINATE_SYSTEMS}, got {self.coords!r}")
        for v in self.variants:
            if v not in VARIANTS:
                raise ConfigError(f"unknown variant {v!r}; choose from {VARIANTS}")
        if self.coords != PARABOLIC and any(v.startswith("triangle") for v in self.variants):
            raise ConfigError("triangle variants need parabolic coordinates")
        if not self.fields or any(not f > 0 for f in self.fields):
            raise ConfigError("fields must be a non-empty list of positive values")
        if not self.x_start > 0:
            raise ConfigError("x_start must be positive")
        if self.x_steps < 1:
            raise ConfigError("x_steps must be at least 1")
        if self.x_steps > 1 and not self.x_stop > self.x_start:
            raise ConfigError("x_stop must exceed x_start")
        if self.spacing not in ("linear", "log"):
            raise ConfigError("spacing must be 'linear' or 'log'")

    @classmethod
    def from_mapping(cls, values: dict) -> "PotentialConfig":
        values = {k.strip(): v for k, v in values.items()}
        name, atom = _resolve_atom(values)
        kw = {"atom_name": name, "atom": atom}
        try:
            for key, cast in (
                ("coords", str),
                ("spherical_energy", str),
                ("triangle_rule", str),
                ("x_start", float),
                ("x_stop", float),
                ("x_steps", int),
                ("spacing", str),
                ("output_path", str),
            ):
                if key in values:
                    kw[key] = cast(str(values[key]).strip())
            if "fields" in values or "f" in values:
                kw["fields"] = tuple(float(v) for v in _parse_list(values.get("fields", values.get("f"))))
            if "variants" in values:
                kw["variants"] = tuple(_parse_list(values["variants"]))
            if "delimiter" in values:
                kw["delimiter"] = _parse_delimiter(values["delimiter"])
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None
        return cls(**kw)

    def grid(self) -> np.ndarray:
        if self.x_steps == 1:
            return np.array([self.x_start])
        if self.spacing == "log":
            return np.geomspace(self.x_start, self.x_stop, self.x_steps)
        return np.linspace(self.x_start, self.x_stop, self.x_steps)

    def header_items(self):
        return [
            ("atom", self.atom_name),
            *[(k, fmt(getattr(self.atom, k))) for k in _ATOM_KEYS],
            ("coords", self.coords),
            ("spherical_energy", self.spherical_energy),
            ("triangle_rule", self.triangle_rule),
            ("fields", ", ".join(fmt(f) for f in self.fields)),
            ("variants", ", ".join(self.variants)),
            ("x_start", fmt(self.x_start)),
            ("x_stop", fmt(self.x_stop)),
            ("x_steps", str(self.x_steps)),
            ("spacing", self.spacing),
            ("delimiter", _delimiter_name(self.delimiter)),
        ]


def potential_columns(config: PotentialConfig, f, x) -> dict:
    """Named potential curves at field ``f`` on the grid ``x``."""
    base = dict(coords=config.coords, params=config.atom, spherical_energy=config.spherical_energy)
    unscreened = PotentialModel(screening=False, **base)
    screened = PotentialModel(screening=True, **base)
    tag = fmt(f)
    cols = {}
    for variant in config.variants:
        if variant == "unscreened":
            cols[f"unscreened@{tag}"] = unscreened.potential(x, f)
        elif variant == "screened":
            cols[f"screened@{tag}"] = screened.potential(x, f)
        elif variant in ("triangle", "triangle_screened"):
            model = replace(
                screened if variant == "triangle_screened" else unscreened,
                triangle=True,
                triangle_rule=config.triangle_rule,
            )
            try:
                cols[f"{variant}@{tag}"] = model.potential(x, f)
            except GeometryError:
                cols[f"{variant}@{tag}"] = np.full_like(x, np.nan)
        elif variant == "terms":
            for name, values in unscreened.terms(x, f).items():
                cols[f"{name}@{tag}"] = values
        elif variant == "energy":
            cols[f"energy@{tag}"] = np.full_like(x, unscreened.energy(f))
    return cols


def dump_potential(config: PotentialConfig, path=None, fields=None, x=None) -> str:
    """Write the selected curves as delimited (x, V...) columns.

    Returns the text; it is also written to ``path`` (or the configured
    output path) when one is given.
    """
    fields = config.fields if fields is None else tuple(fields)
    x = config.grid() if x is None else np.atleast_1d(np.asarray(x, dtype=float))
    cols = {}
    for f in fields:
        cols.update(potential_columns(config, float(f), x))
    buf = io.StringIO()
    for line in _header_lines("potential", config.header_items()):
        buf.write(line + "\n")
    w = csv.writer(buf, delimiter=config.delimiter, lineterminator="\n")
    w.writerow(["x", *cols])
    for i, xi in enumerate(x):
        w.writerow([fmt(xi), *(fmt(np.atleast_1d(v)[i]) for v in cols.values())])
    text = buf.getvalue()
    target = path or config.output_path
    if target:
        target = Path(target)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
    return text


def read_columns(path, delimiter=","):
    """Parse a dumped curve file into ``{column: array}``."""
    _, body = _read_header(Path(path).read_text().splitlines())
    reader = csv.reader(body, delimiter=delimiter)
    header = next(reader)
    data = np.array([[float(v) for v in row] for row in reader], dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


# -- config files -----------------------------------------------------------------


def load_sections(path, kind: str, overrides=None) -> list[dict]:
    """Sections of an INI-style config whose name starts with ``kind``.

    Keys in ``[DEFAULT]`` are shared by all sections. A file without any
    matching section yields its defaults as a single section.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    if path is not None:
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
    names = [s for s in parser.sections() if s.split(":")[0].split()[0] == kind]
    sections = [dict(parser[s]) for s in names] or [dict(parser.defaults())]
    if overrides:
        for s in sections:
            s.update(overrides)
    return sections
