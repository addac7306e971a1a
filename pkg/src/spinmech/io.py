"""CSV serialization for simulation artifacts.

All floating-point values are written with 17 significant digits so that
reading a file back reproduces the original doubles exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .fokker_planck import DensityField, Grid1D
from .sde import TrajectoryBatch
from .stern_gerlach import DOWN, UP, PlateRecords

FLOAT_FMT = "%.17g"


def fmt(x) -> str:
    """Round-trip-exact decimal form of one float."""
    return FLOAT_FMT % float(x)


def write_trajectories(path, batch: TrajectoryBatch) -> None:
    """``t,particle_0,...,particle_{N-1}``; one row per recorded time."""
    path = Path(path)
    n = batch.n_particles
    header = "t," + ",".join(f"particle_{i}" for i in range(n))
    with path.open("w", newline="") as fh:
        fh.write(header + "\n")
        for j, t in enumerate(batch.times):
            row = [fmt(t)]
            row.extend(FLOAT_FMT % v for v in batch.paths[:, j])
            fh.write(",".join(row) + "\n")


def read_trajectories(path) -> TrajectoryBatch:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 2:
        raise InvalidInputError(f"{path}: expected a time column plus particles")
    return TrajectoryBatch(times=data[:, 0], paths=data[:, 1:].T, seed_used=-1)


def write_density(path, field: DensityField) -> None:
    """``x,rho`` rows at cell centers."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("x,rho\n")
        for x, r in zip(field.grid.centers, field.values):
            fh.write(f"{fmt(x)},{fmt(r)}\n")


def read_density(path) -> DensityField:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xs, values = data[:, 0], data[:, 1]
    if xs.size < 2:
        raise InvalidInputError(f"{path}: need at least two cells")
    dx = xs[1] - xs[0]
    grid = Grid1D(
        x_min=float(xs[0] - 0.5 * dx),
        x_max=float(xs[-1] + 0.5 * dx),
        n_cells=xs.size,
    )
    return DensityField(grid, values)


def write_density_sequence(out_dir, times, fields, prefix="density") -> list[str]:
    """One ``x,rho`` file per snapshot plus a manifest listing the times.

    Returns the written file names (manifest last).
    """
    out_dir = Path(out_dir)
    names = []
    for i, (t, field) in enumerate(zip(times, fields)):
        name = f"{prefix}_{i:04d}.csv"
        write_density(out_dir / name, field)
        names.append(name)
    manifest = f"{prefix}_manifest.csv"
    with (out_dir / manifest).open("w", newline="") as fh:
        fh.write("index,time,file\n")
        for i, t in enumerate(times):
            fh.write(f"{i},{fmt(t)},{names[i]}\n")
    names.append(manifest)
    return names


def write_plate_records(path, records: PlateRecords) -> None:
    """``index,branch,z_final,p_final``, one row per particle."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("index,branch,z_final,p_final\n")
        for i in range(len(records)):
            branch = UP if records.is_up[i] else DOWN
            fh.write(
                f"{i},{branch},{fmt(records.z_final[i])},{fmt(records.p_final[i])}\n"
            )


def read_plate_records(path) -> PlateRecords:
    is_up, z, p = [], [], []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            is_up.append(row["branch"] == UP)
            z.append(float(row["z_final"]))
            p.append(float(row["p_final"]))
    if not is_up:
        raise InvalidInputError(f"{path}: no plate records")
    return PlateRecords(np.array(is_up), np.array(z), np.array(p), seed_used=-1)


def write_branch_summary(path, records: PlateRecords) -> None:
    """Per-branch counts, means, and standard deviations."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("branch,count,mean_z,std_z,mean_p,std_p\n")
        for branch in (UP, DOWN):
            z, p = records.branch_arrays(branch)
            if z.size == 0:
                fh.write(f"{branch},0,nan,nan,nan,nan\n")
                continue
            std_z = z.std(ddof=1) if z.size > 1 else 0.0
            std_p = p.std(ddof=1) if p.size > 1 else 0.0
            fh.write(
                f"{branch},{z.size},{fmt(z.mean())},{fmt(std_z)},"
                f"{fmt(p.mean())},{fmt(std_p)}\n"
            )


def write_tracking_report(path, report) -> None:
    """``t,e_mean,e_std,u`` rows."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("t,e_mean,e_std,u\n")
        for t, e, s, u in zip(report.times, report.errors, report.error_std, report.control):
            fh.write(f"{fmt(t)},{fmt(e)},{fmt(s)},{fmt(u)}\n")


def read_tracking_table(path) -> dict[str, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {
        "t": data[:, 0],
        "e_mean": data[:, 1],
        "e_std": data[:, 2],
        "u": data[:, 3],
    }


def write_tracking_summary(path, report, config_echo: dict) -> None:
    """JSON record of the fit results alongside the config that produced them."""
    payload = {
        "fitted_decay_rate": report.fitted_decay_rate,
        "terminal_error": report.terminal_error,
        "fit_window": list(report.fit_window),
        "config": config_echo,
    }
    with Path(path).open("w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
