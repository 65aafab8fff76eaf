import os

import numpy as np
import pytest

from mfoc_plots import PlotError, PlotJob, moving_average, read_columns, render
from mfoc_plots.cli import build_parser, main
from mfoc_plots.render import _labels


class TestMovingAverage:
    def test_trailing_window(self):
        out = moving_average([1, 2, 3, 4, 5, 6], 3)
        assert np.allclose(out, [1.0, 1.5, 2.0, 3.0, 4.0, 5.0])

    def test_window_one_is_identity(self):
        x = np.array([3.0, 1.0, 4.0])
        out = moving_average(x, 1)
        assert np.array_equal(out, x)
        assert out is not x

    def test_window_longer_than_series(self):
        # degenerates to the running mean of the prefix
        out = moving_average([2.0, 4.0], 10)
        assert np.allclose(out, [2.0, 3.0])

    def test_bad_window(self):
        with pytest.raises(PlotError):
            moving_average([1.0], 0)

    def test_empty_series(self):
        assert moving_average([], 5).size == 0


class TestJobValidation:
    def test_unknown_kind(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("episode,cost\n0,1.0\n")
        with pytest.raises(PlotError, match="unknown figure kind"):
            PlotJob(kind="pie", inputs=(str(f),), out="x.png")

    def test_no_inputs(self):
        with pytest.raises(PlotError, match="no input"):
            PlotJob(kind="cost_curve", inputs=(), out="x.png")

    def test_bad_window(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("episode,cost\n0,1.0\n")
        with pytest.raises(PlotError, match="window"):
            PlotJob(kind="cost_curve", inputs=(str(f),), out="x.png", window=0)

    def test_missing_file_named(self, tmp_path):
        missing = str(tmp_path / "nope.csv")
        with pytest.raises(PlotError, match="nope.csv"):
            PlotJob(kind="cost_curve", inputs=(missing,), out="x.png")


class TestReadColumns:
    def test_missing_column_named(self, tmp_path):
        f = tmp_path / "c.csv"
        f.write_text("episode,steps\n0,10\n")
        with pytest.raises(PlotError, match="missing column 'cost'"):
            read_columns(str(f), ("episode", "cost"))

    def test_empty_file(self, tmp_path):
        f = tmp_path / "c.csv"
        f.write_text("")
        with pytest.raises(PlotError, match="empty CSV"):
            read_columns(str(f), ("episode",))

    def test_header_only(self, tmp_path):
        f = tmp_path / "c.csv"
        f.write_text("episode,cost\n")
        with pytest.raises(PlotError, match="no data rows"):
            read_columns(str(f), ("episode", "cost"))

    def test_non_numeric_named(self, tmp_path):
        f = tmp_path / "c.csv"
        f.write_text("episode,cost\n0,oops\n")
        with pytest.raises(PlotError, match="column 'cost'"):
            read_columns(str(f), ("episode", "cost"))

    def test_short_row_named(self, tmp_path):
        f = tmp_path / "c.csv"
        f.write_text("episode,cost\n0\n")
        with pytest.raises(PlotError, match="column 'cost'"):
            read_columns(str(f), ("episode", "cost"))

    def test_text_column(self, tmp_path):
        f = tmp_path / "c.csv"
        f.write_text("mode,cost\nK+RL,1.5\n")
        out = read_columns(str(f), ("cost",), text=("mode",))
        assert out["mode"] == ["K+RL"]
        assert np.allclose(out["cost"], [1.5])


class TestLabels:
    def test_unique_stems_pass_through(self):
        assert _labels(["a/x.csv", "b/y.csv"]) == ["x", "y"]

    def test_colliding_stems_use_parent_dir(self):
        labels = _labels(["run1/costs.csv", "run2/costs.csv"])
        assert labels == [os.path.join("run1", "costs"),
                          os.path.join("run2", "costs")]


class TestRender:
    def test_trajectory(self, harness_csvs, tmp_path):
        out = str(tmp_path / "traj.png")
        render(PlotJob(kind="trajectory", inputs=(harness_csvs["trajectory"],),
                       out=out))
        assert os.path.getsize(out) > 1024

    def test_trajectory_rejects_two_inputs(self, harness_csvs, tmp_path):
        with pytest.raises(PlotError, match="exactly one"):
            render(PlotJob(kind="trajectory",
                           inputs=(harness_csvs["trajectory"],) * 2,
                           out=str(tmp_path / "x.png")))

    def test_cost_curve_two_files(self, harness_csvs, tmp_path):
        out = str(tmp_path / "curve.png")
        render(PlotJob(kind="cost_curve",
                       inputs=(harness_csvs["costs_krl"],
                               harness_csvs["costs_rl"]),
                       out=out, window=10))
        assert os.path.getsize(out) > 1024

    def test_cost_curve_raw_window(self, harness_csvs, tmp_path):
        out = str(tmp_path / "raw.png")
        render(PlotJob(kind="cost_curve", inputs=(harness_csvs["costs_krl"],),
                       out=out, window=1))
        assert os.path.getsize(out) > 1024

    def test_sweep_bars(self, harness_csvs, tmp_path):
        out = str(tmp_path / "bars.png")
        render(PlotJob(kind="sweep_bars", inputs=(harness_csvs["sweep"],),
                       out=out))
        assert os.path.getsize(out) > 1024

    def test_deterministic_bytes(self, harness_csvs, tmp_path):
        a = str(tmp_path / "a.png")
        b = str(tmp_path / "b.png")
        for out in (a, b):
            render(PlotJob(kind="cost_curve",
                           inputs=(harness_csvs["costs_krl"],), out=out))
        with open(a, "rb") as fa, open(b, "rb") as fb:
            assert fa.read() == fb.read()

    def test_schema_error_writes_no_file(self, harness_csvs, tmp_path):
        bad = tmp_path / "costs.csv"
        bad.write_text("episode,steps\n0,10\n")
        out = str(tmp_path / "never.png")
        with pytest.raises(PlotError, match="missing column 'cost'"):
            render(PlotJob(kind="cost_curve", inputs=(str(bad),), out=out))
        assert not os.path.exists(out)

    def test_empty_csv_writes_no_file(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        out = str(tmp_path / "never.png")
        with pytest.raises(PlotError, match="empty CSV"):
            render(PlotJob(kind="cost_curve", inputs=(str(empty),), out=out))
        assert not os.path.exists(out)


class TestCli:
    def test_window_default(self):
        args = build_parser().parse_args(
            ["cost_curve", "--in", "a.csv", "--out", "b.png"])
        assert args.window == 50

    def test_success_exit_code(self, harness_csvs, tmp_path):
        out = str(tmp_path / "cli.png")
        rc = main(["trajectory", "--in", harness_csvs["trajectory"],
                   "--out", out])
        assert rc == 0
        assert os.path.exists(out)

    def test_schema_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "c.csv"
        bad.write_text("episode\n0\n")
        rc = main(["cost_curve", "--in", str(bad),
                   "--out", str(tmp_path / "x.png")])
        assert rc == 1
        err = capsys.readouterr().err
        assert "missing column 'cost'" in err

    def test_missing_input_exit_code(self, tmp_path, capsys):
        rc = main(["sweep_bars", "--in", str(tmp_path / "nope.csv"),
                   "--out", str(tmp_path / "x.png")])
        assert rc == 1
        assert "nope.csv" in capsys.readouterr().err


def test_A9_renders_all_kinds_and_names_truncated_columns(
        criterion, harness_csvs, tmp_path):
    jobs = [
        ("trajectory", (harness_csvs["trajectory"],)),
        ("cost_curve", (harness_csvs["costs_krl"], harness_csvs["costs_rl"])),
        ("sweep_bars", (harness_csvs["sweep"],)),
    ]
    sizes = []
    for kind, inputs in jobs:
        out = str(tmp_path / f"{kind}.png")
        render(PlotJob(kind=kind, inputs=inputs, out=out))
        sizes.append(os.path.getsize(out))

    # truncate the sweep CSV: drop one required column, keep the rest
    with open(harness_csvs["sweep"]) as fh:
        rows = [line.rstrip("\n").split(",") for line in fh]
    drop = rows[0].index("success_pct")
    truncated = tmp_path / "sweep_truncated.csv"
    truncated.write_text(
        "\n".join(",".join(r[:drop] + r[drop + 1:]) for r in rows) + "\n")
    out = str(tmp_path / "never.png")
    with pytest.raises(PlotError, match="missing column 'success_pct'") as exc:
        render(PlotJob(kind="sweep_bars", inputs=(str(truncated),), out=out))

    ok = all(s > 1024 for s in sizes) and not os.path.exists(out)
    criterion("A9", ok,
              f"three figure kinds rendered from harness CSVs "
              f"(sizes {sizes} bytes); truncated CSV rejected with "
              f"\"{exc.value}\" and no output written")
