import math

import numpy as np
import pytest

from tunneldwell import PotentialModel, evaluate
from tunneldwell.params import AU_TIME_IN_AS
from tunneldwell.sweep import (
    COLUMNS,
    OK,
    OVER_BARRIER,
    ConfigError,
    DataFormatError,
    PotentialConfig,
    SweepConfig,
    UnitMismatchWarning,
    dump_potential,
    format_table,
    geometry_rows,
    load_sections,
    overlay_experimental,
    read_columns,
    read_table,
    run_sweep,
    write_table,
)


@pytest.fixture(scope="module")
def small_table():
    return run_sweep(SweepConfig(f_steps=5, gamma_list=(0.0, -0.01, 0.00575)))


def test_two_steps_give_two_rows():
    table = run_sweep(SweepConfig(f_steps=2, gamma_list=(0.0,)))
    assert len(table.rows) == 2
    assert [r.f for r in table.rows] == [0.03, 0.12]


def test_rows_ordered_by_field_then_gamma(small_table):
    keys = [(r.f, r.gamma) for r in small_table.rows]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys) == 15


def test_over_barrier_rows_are_marked(small_table):
    low = [r for r in small_table.rows if r.f == 0.03 and r.gamma == -0.01]
    assert low[0].status == OVER_BARRIER and math.isnan(low[0].tau_d)
    assert all(r.ok for r in small_table.rows if r.gamma >= 0)


def test_rows_satisfy_time_invariants(small_table):
    for r in small_table.rows:
        if r.ok:
            assert r.tau_dt >= r.tau_d and r.tau_dr >= r.tau_d and 0 < r.t2 <= 1
            assert 1 / r.tau_d == pytest.approx(1 / r.tau_dt + 1 / r.tau_dr, rel=1e-12)


def test_rows_match_direct_evaluation(small_table):
    r = small_table.curve(0.0)[2]
    assert r.tau_d == evaluate(PotentialModel("parabolic", True), r.f).tau_d


def test_screened_rows_below_unscreened():
    kw = dict(f_steps=50)
    sc = run_sweep(SweepConfig(screening=True, **kw)).column("tau_d")
    un = run_sweep(SweepConfig(screening=False, **kw)).column("tau_d")
    assert np.all(sc < un)


def test_repeat_runs_are_byte_identical(tmp_path):
    cfg = SweepConfig(f_steps=6, gamma_list=(0.0, 0.01))
    a = write_table(run_sweep(cfg), tmp_path / "a.csv").read_bytes()
    b = write_table(run_sweep(cfg), tmp_path / "b.csv").read_bytes()
    assert a == b


@pytest.mark.parametrize("unit", ["au", "as"])
def test_table_round_trip(tmp_path, small_table, unit):
    table = run_sweep(SweepConfig(f_steps=4, gamma_list=(0.0, -0.01), time_unit=unit, delimiter="\t"))
    path = write_table(table, tmp_path / "t.tsv")
    back = read_table(path)
    assert back.config == table.config
    for r, s in zip(table.rows, back.rows):
        for name in COLUMNS:
            a, b = getattr(r, name), getattr(s, name)
            if isinstance(a, float) and math.isnan(a):
                assert math.isnan(b)
            elif unit == "as" and name.startswith("tau"):
                assert b == pytest.approx(a, rel=4e-16)
            else:
                assert a == b
    assert format_table(back) == path.read_text()


def test_attosecond_output_scales_times():
    a = run_sweep(SweepConfig(f_steps=2))
    text = format_table(run_sweep(SweepConfig(f_steps=2, time_unit="as")))
    row = text.splitlines()[-1].split(",")
    assert float(row[COLUMNS.index("tau_d")]) == pytest.approx(a.rows[-1].tau_d * AU_TIME_IN_AS, rel=1e-15)


@pytest.mark.parametrize(
    "values",
    [
        {"f_start": "0"},
        {"f_start": "0.1", "f_stop": "0.05"},
        {"f_steps": "1"},
        {"coords": "cylindrical"},
        {"gamma": "0.0, 2.0"},
        {"mode": "sometimes"},
        {"time_unit": "fs"},
        {"f_steps": "many"},
        {"screening": "perhaps"},
        {"coords": "spherical", "Z": "3"},
    ],
)
def test_bad_configs_rejected(values):
    with pytest.raises(ConfigError):
        SweepConfig.from_mapping(values)


def test_config_from_mapping_parses_lists_and_overrides():
    cfg = SweepConfig.from_mapping({"gamma": "-0.01, 0, 0.00575", "r0": "0.3", "screening": "no", "delimiter": "tab"})
    assert cfg.gamma_list == (-0.01, 0.0, 0.00575)
    assert cfg.atom.r0 == 0.3 and not cfg.screening and cfg.delimiter == "\t"


# -- overlay -------------------------------------------------------------------


def _write(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return path


def test_overlay_empty_file(tmp_path, small_table):
    before = format_table(small_table)
    report = overlay_experimental(small_table, _write(tmp_path / "d.txt", ["# nothing here"]))
    assert report.points == []
    assert format_table(small_table) == before


def test_self_overlay_has_zero_residuals(tmp_path, small_table):
    curve = small_table.curve(0.0)
    data = _write(tmp_path / "d.txt", [f"{r.f!r}, {r.tau_d!r}" for r in curve])
    report = overlay_experimental(small_table, data)
    assert len(report.points) == len(curve)
    assert all(p.residual == 0.0 for p in report.points)


def test_five_percent_offset(tmp_path, small_table):
    curve = small_table.curve(0.0)
    data = _write(tmp_path / "d.txt", [f"{r.f + 1e-4!r} {1.05 * r.tau_d!r} 0.1" for r in curve])
    report = overlay_experimental(small_table, data)
    for p, r in zip(report.points, curve):
        assert p.f_model == r.f
        assert p.relative_residual == pytest.approx(0.05, rel=1e-12)
        assert p.sigma == 0.1


def test_overlay_selects_gamma_curve(tmp_path, small_table):
    data = _write(tmp_path / "d.txt", ["0.03 1.0"])
    report = overlay_experimental(small_table, data, gamma=-0.01)
    # 0.03 is over the barrier for gamma = -0.01, so the nearest valid point is used
    assert report.points[0].f_model > 0.03


@pytest.mark.parametrize(
    "lines,lineno",
    [(["0.05 1.0", "0.06 oops"], 2), (["# header", "0.05"], 2), (["0.05 1 2 3"], 1), (["# time_unit = fs"], 1)],
)
def test_overlay_parse_errors_report_line(tmp_path, small_table, lines, lineno):
    path = _write(tmp_path / "d.txt", lines)
    with pytest.raises(DataFormatError, match=f"d.txt:{lineno}:"):
        overlay_experimental(small_table, path)


def test_overlay_unit_mismatch_warns_and_converts(tmp_path, small_table):
    r = small_table.curve(0.0)[1]
    path = _write(tmp_path / "d.txt", ["# time_unit = as", f"{r.f!r} {r.tau_d * AU_TIME_IN_AS!r}"])
    with pytest.warns(UnitMismatchWarning):
        report = overlay_experimental(small_table, path)
    assert report.points[0].relative_residual == pytest.approx(0.0, abs=1e-14)


def test_overlay_report_format(tmp_path, small_table):
    r = small_table.curve(0.0)[0]
    report = overlay_experimental(small_table, _write(tmp_path / "d.txt", [f"{r.f!r},{r.tau_d!r}"]))
    text = report.format()
    assert "# points = 1" in text
    assert text.splitlines()[-1].split(",")[5] == "0.0"


# -- geometry and potential dumps --------------------------------------------------


def test_geometry_rows_mark_missing_barrier():
    rows = geometry_rows(SweepConfig(coords="spherical", f_start=0.05, f_stop=0.8, f_steps=4))
    assert rows[0]["status"] == OK and rows[-1]["status"] == OVER_BARRIER
    assert rows[0]["x1"] < rows[0]["x_max"] < rows[0]["x2"]


def test_single_point_potential_dump(tmp_path):
    cfg = PotentialConfig(x_start=3.0, x_steps=1)
    text = dump_potential(cfg, tmp_path / "p.csv")
    body = [line for line in text.splitlines() if not line.startswith("#")]
    assert len(body) == 2
    cols = read_columns(tmp_path / "p.csv")
    assert cols["x"].tolist() == [3.0]


@pytest.mark.parametrize("coords", ["parabolic", "spherical"])
def test_screening_column_difference(tmp_path, coords):
    cfg = PotentialConfig(coords=coords, fields=(0.05, 0.09), variants=("unscreened", "screened"), x_steps=50)
    dump_potential(cfg, tmp_path / "p.csv")
    cols = read_columns(tmp_path / "p.csv")
    x = cols["x"]
    r0 = cfg.atom.r0
    if coords == "parabolic":
        term = -(1 / x + 1 / (4 * r0)) * np.exp(-x / (2 * r0))
    else:
        term = -(1 / x) * (1 + x / (2 * r0)) * np.exp(-x / r0)
    for f in ("0.05", "0.09"):
        np.testing.assert_allclose(cols[f"screened@{f}"] - cols[f"unscreened@{f}"], term, rtol=1e-9, atol=1e-15)


def test_term_breakdown_sums_to_total(tmp_path):
    cfg = PotentialConfig(fields=(0.06,), variants=("terms", "unscreened", "energy"), x_steps=40)
    dump_potential(cfg, tmp_path / "p.csv")
    cols = read_columns(tmp_path / "p.csv")
    parts = ("coulomb", "centrifugal", "field", "polarization")
    total = sum(cols[f"{p}@0.06"] for p in parts)
    np.testing.assert_allclose(total, cols["unscreened@0.06"], rtol=1e-13, atol=1e-15)
    np.testing.assert_allclose(cols["polarization_bare@0.06"], (9 / 32) * 0.06 / cols["x"] ** 2, rtol=1e-14)


def test_triangle_columns_meet_energy_at_turning_points():
    from tunneldwell import find_turning_points
    from tunneldwell.sweep import potential_columns

    cfg = PotentialConfig(variants=("triangle_screened", "energy"))
    model = PotentialModel("parabolic", True)
    g = find_turning_points(model, 0.07, model.energy(0.07))
    cols = potential_columns(cfg, 0.07, np.array([g.x1, g.x2]))
    np.testing.assert_allclose(cols["triangle_screened@0.07"], model.energy(0.07), atol=1e-12)


def test_bad_potential_configs():
    with pytest.raises(ConfigError):
        PotentialConfig(variants=("wiggly",))
    with pytest.raises(ConfigError):
        PotentialConfig(coords="spherical", variants=("triangle",))
    with pytest.raises(ConfigError):
        PotentialConfig.from_mapping({"x_steps": "0"})


def test_load_sections(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("[DEFAULT]\nf_steps = 3\n\n[sweep screened]\nscreening = yes\n\n[sweep unscreened]\nscreening = no\n")
    sections = load_sections(cfg, "sweep", {"f_steps": "2"})
    assert [s["screening"] for s in sections] == ["yes", "no"]
    assert all(s["f_steps"] == "2" for s in sections)
    assert load_sections(cfg, "potential") == [{"f_steps": "3"}]
    bad = tmp_path / "bad.cfg"
    bad.write_text("no section header\n")
    with pytest.raises(ConfigError):
        load_sections(bad, "sweep")
