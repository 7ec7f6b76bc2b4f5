"""Golden fixtures produced by the solver CLI (the only coupling point)."""
import math
import subprocess
import sys

import pytest


def run_cli(*args: str) -> None:
    cmd = [sys.executable, "-m", "ptwell.cli", *args]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, f"{' '.join(cmd)} failed: {proc.stderr}"


@pytest.fixture(scope="session")
def fixtures(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_outputs")
    files = {}

    def grid(name, lam, surface, clip, sigma="0:6:41", tau="3:7:41"):
        path = root / f"{name}.csv"
        run_cli(
            "nodal-grid", "--lambda", str(lam), "--sigma", sigma, "--tau", tau,
            "--surface", surface, "--clip", clip, "--out", str(path),
        )
        files[name] = path

    grid("grid_q", 0.275, "Q", "0:0.05")
    grid("grid_d275", 0.275, "D", "0.05")
    grid("grid_d355", 0.355, "D", "0.05")
    grid("grid_d395", 0.395, "D", "0.05")
    grid("grid_d415", 0.415, "D", "0.05")
    grid("grid_f6", 2.4, "D", "0.05", sigma="0:3:41", tau="3:7:41")

    for name, z in (("roots_z0", "0"), ("roots_z1", "1.0")):
        path = root / f"{name}.csv"
        run_cli("spectrum", "--lambda", "2.4", "--Z", z, "--rmax", "7", "--out", str(path))
        files[name] = path

    for lam in ("1.25", "1.35", "1.45", "1.55"):
        path = root / f"spec_{lam}.json"
        run_cli(
            "spectrum", "--lambda", lam, "--Z", "2", "--rmax", "8",
            "--format", "json", "--out", str(path),
        )
        files[f"spec_{lam}"] = path

    path = root / "spec_z0.json"
    run_cli("spectrum", "--lambda", "1.0", "--Z", "0", "--rmax", "10", "--format", "json", "--out", str(path))
    files["spec_z0"] = path

    path = root / "shallow.json"
    run_cli(
        "shallow", "--ell", str(math.pi), "--T", "1", "--nmax", "5",
        "--format", "json", "--out", str(path),
    )
    files["shallow"] = path

    return files
