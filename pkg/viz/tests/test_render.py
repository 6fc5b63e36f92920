from pathlib import Path

import pytest

from psgzt_viz import FigureSpec, SchemaError, render
from psgzt_viz.cli import main


def test_regions_renders(golden, tmp_path):
    out = tmp_path / "regions.png"
    summary = render(FigureSpec("regions", [str(golden / "region.csv")], str(out)))
    assert out.exists() and out.stat().st_size > 5000
    assert summary["n_points"] == 80 * 60
    assert summary["subregions"] >= 2   # II and III present on this grid


def test_boundary_segment_count(golden, tmp_path):
    out = tmp_path / "boundary.png"
    summary = render(FigureSpec("boundary", [str(golden / "boundary.csv")], str(out)))
    assert out.exists() and out.stat().st_size > 5000
    # SN + 2 border-collision arcs + 7 torus segments (k <= 3) + 7 vertical joins
    assert summary["segments"] == 17


def test_staircase_plateaus(golden, tmp_path):
    out = tmp_path / "staircase.png"
    summary = render(FigureSpec("staircase", [str(golden / "boundary.csv")], str(out)))
    assert out.exists() and out.stat().st_size > 5000
    assert summary["segments"] == 7    # rotation plateaus on (1/2, 4)


def test_timeseries_and_phaseplane(golden, tmp_path):
    out1 = tmp_path / "ts.png"
    render(FigureSpec("timeseries", [str(golden / "traj.csv")], str(out1)))
    assert out1.exists() and out1.stat().st_size > 5000
    out2 = tmp_path / "pp.png"
    summary = render(FigureSpec("phaseplane", [str(golden / "traj.csv")],
                                str(out2), {"tau": 0.76}))
    assert out2.exists() and summary["tau"] == 0.76
    # tau can also come from the run's metadata record
    out3 = tmp_path / "pp2.png"
    summary = render(FigureSpec("phaseplane", [str(golden / "traj.csv")], str(out3),
                                {"meta": str(golden / "traj_meta.json")}))
    assert summary["tau"] == 0.76


def test_comparison_with_overlay(golden, tmp_path):
    out = tmp_path / "cmp.png"
    summary = render(FigureSpec("comparison", [str(golden / "compare.csv")],
                                str(out), {"boundary_csv": str(golden / "boundary.csv")}))
    assert out.exists() and summary["series"] == 2


def test_schema_mismatch_fails_loudly(golden, tmp_path):
    with pytest.raises(SchemaError):
        render(FigureSpec("boundary", [str(golden / "region.csv")],
                          str(tmp_path / "x.png")))
    with pytest.raises(SchemaError):
        render(FigureSpec("nonsense", [str(golden / "region.csv")],
                          str(tmp_path / "x.png")))


def test_cli_entry_points(golden, tmp_path):
    out = tmp_path / "b.png"
    rc = main(["boundary", str(golden / "boundary.csv"), "--out", str(out)])
    assert rc == 0 and out.exists()
    rc = main(["boundary", str(golden / "region.csv"), "--out", str(tmp_path / "y.png")])
    assert rc == 2
    rc = main(["whatever"])
    assert rc == 2
    rc = main(["phaseplane", str(golden / "traj.csv"), "--out",
               str(tmp_path / "p.png"), "--tau", "0.76"])
    assert rc == 0


def test_render_is_deterministic(golden, tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render(FigureSpec("staircase", [str(golden / "boundary.csv")], str(a)))
    render(FigureSpec("staircase", [str(golden / "boundary.csv")], str(b)))
    assert a.read_bytes() == b.read_bytes()
