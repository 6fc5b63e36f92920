import subprocess
import sys
from pathlib import Path

import pytest


def _run_psgzt(args, cwd):
    proc = subprocess.run([sys.executable, "-m", "psgzt.cli"] + args,
                          cwd=cwd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def golden(tmp_path_factory) -> Path:
    """Golden CSVs produced through the solver's command-line interface."""
    d = tmp_path_factory.mktemp("golden")
    _run_psgzt(["curve", "--id", "B", "--grid", "0.02:3.98:800",
                "--out", str(d / "boundary.csv")], d)
    _run_psgzt(["region", "--grid", "0.0:0.995:80,0.05:4.0:60",
                "--out", str(d / "region.csv")], d)
    _run_psgzt(["simulate", "--tau", "0.76", "--c", "1", "--t-end", "60",
                "--out", str(d / "traj.csv")], d)
    _run_psgzt(["compare", "--kappa", "11", "--tau", "0.75",
                "--out", str(d / "compare.csv")], d)
    return d
