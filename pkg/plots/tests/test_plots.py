import subprocess
import sys

import pytest

from bulkresv_plots import FigureSpec, PlotError, plot
from bulkresv_plots.cli import main

HEADER = (
    "experiment,topology_n,load,scheme,replication,offered,accepted,blocked,"
    "failed,blocking_prob,fail_prob,mean_flow_time,mean_intervals,seed"
)

SAMPLE = HEADER + "\n" + "\n".join(
    [
        "single-link,1,0.4,multi,0,900,890,10,0,0.0111,0,14.2,1.0,7",
        "single-link,1,0.4,multi,1,900,880,20,0,0.0222,0,14.4,1.0,8",
        "single-link,1,0.4,multi,agg,900,885,15,0,0.0167,0,14.3,1.0,1",
        "single-link,1,0.8,multi,0,900,850,50,0,0.0556,0,15.0,1.0,9",
        "single-link,1,0.8,multi,1,900,840,60,0,0.0667,0,15.2,1.0,10",
        "single-link,1,0.8,multi,agg,900,845,55,0,0.0611,0,15.1,1.0,1",
    ]
) + "\n"


def run_simulator(tmp_path, *extra):
    out = tmp_path / "sweep.csv"
    cmd = [
        sys.executable, "-m", "bulkresv.cli", "single-link",
        "--loads", "0.6", "1.0", "--arrivals", "300", "--reps", "2",
        "--seed", "3", "--out", str(out), *extra,
    ]
    subprocess.run(cmd, check=True, capture_output=True)
    return out


class TestPlot:
    def test_single_scheme_csv_gives_one_series(self, tmp_path):
        csv_path = tmp_path / "one.csv"
        csv_path.write_text(SAMPLE)
        out = tmp_path / "fig.png"
        labels = plot(FigureSpec(str(csv_path), "blocking-vs-load", str(out)))
        assert labels == ["multi"]
        assert out.stat().st_size > 0

    def test_header_only_csv_errors(self, tmp_path):
        csv_path = tmp_path / "empty.csv"
        csv_path.write_text(HEADER + "\n")
        with pytest.raises(PlotError, match="no aggregate rows"):
            plot(FigureSpec(str(csv_path), "blocking-vs-load", str(tmp_path / "x.png")))

    def test_any_missing_column_errors(self, tmp_path):
        columns = HEADER.split(",")
        for drop in range(len(columns)):
            kept = [i for i in range(len(columns)) if i != drop]
            lines = [",".join(line.split(",")[i] for i in kept) for line in SAMPLE.splitlines()]
            csv_path = tmp_path / f"missing{drop}.csv"
            csv_path.write_text("\n".join(lines) + "\n")
            with pytest.raises(PlotError, match=f"missing columns: {columns[drop]}"):
                plot(FigureSpec(str(csv_path), "blocking-vs-load", str(tmp_path / "x.png")))

    def test_unknown_kind_errors(self, tmp_path):
        with pytest.raises(PlotError, match="unknown figure kind"):
            FigureSpec("x.csv", "pie", "x.png")

    def test_deterministic_output(self, tmp_path):
        csv_path = tmp_path / "one.csv"
        csv_path.write_text(SAMPLE)
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        plot(FigureSpec(str(csv_path), "flowtime-vs-load", str(a)))
        plot(FigureSpec(str(csv_path), "flowtime-vs-load", str(b)))
        assert a.read_bytes() == b.read_bytes()


class TestPipeline:
    def test_five_scheme_sweep_gives_five_series(self, tmp_path):
        csv_path = run_simulator(
            tmp_path, "--schemes", "ftfr-rmin", "ftfr-rmax", "threshold", "flex", "multi"
        )
        out = tmp_path / "blocking.png"
        rc = main(["--csv", str(csv_path), "--kind", "blocking-vs-load", "--out", str(out)])
        assert rc == 0
        labels = plot(FigureSpec(str(csv_path), "blocking-vs-load", str(out)))
        assert labels == ["flex", "ftfr-rmax", "ftfr-rmin", "multi", "threshold"]

    def test_default_sweep_includes_ideal_reference(self, tmp_path):
        csv_path = run_simulator(tmp_path)
        labels = plot(
            FigureSpec(str(csv_path), "blocking-vs-load", str(tmp_path / "all.png"))
        )
        assert "rmin-ideal" in labels
        assert len(labels) == 6

    def test_cli_reports_missing_column(self, tmp_path, capsys):
        csv_path = tmp_path / "broken.csv"
        lines = [",".join(line.split(",")[1:]) for line in SAMPLE.splitlines()]
        csv_path.write_text("\n".join(lines) + "\n")
        rc = main(["--csv", str(csv_path), "--kind", "blocking-vs-load", "--out", str(tmp_path / "x.png")])
        assert rc == 2
        assert "missing columns: experiment" in capsys.readouterr().err

    def test_logy_flag(self, tmp_path):
        csv_path = tmp_path / "one.csv"
        csv_path.write_text(SAMPLE)
        out = tmp_path / "log.png"
        rc = main(["--csv", str(csv_path), "--kind", "blocking-vs-load", "--out", str(out), "--logy"])
        assert rc == 0
        assert out.stat().st_size > 0

    def test_intervals_kind_uses_topology_n(self, tmp_path):
        rows = [
            "interval-count,10,1.0,multi,0,900,850,50,0,0.055,0,15.0,1.41,3",
            "interval-count,10,1.0,multi,agg,900,850,50,0,0.055,0,15.0,1.41,1",
            "interval-count,20,1.0,multi,0,900,840,60,0,0.066,0,15.2,1.52,4",
            "interval-count,20,1.0,multi,agg,900,840,60,0,0.066,0,15.2,1.52,1",
        ]
        csv_path = tmp_path / "intervals.csv"
        csv_path.write_text(HEADER + "\n" + "\n".join(rows) + "\n")
        out = tmp_path / "intervals.png"
        rc = main(["--csv", str(csv_path), "--kind", "intervals-vs-n", "--out", str(out)])
        assert rc == 0
        labels = plot(
            FigureSpec(str(csv_path), "intervals-vs-n", str(tmp_path / "x.png"), group="load")
        )
        assert labels == ["1.0"]
