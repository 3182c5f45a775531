"""Run-artifact serialization: JSON with fixed float precision, CSV grids.

All floats are written with 17 significant digits so that reloading
reproduces the in-memory values exactly; record files contain no wall-clock
data, so identical invocations produce byte-identical files.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .driver import IterationRecord
from .gaussians import Gaussian, GaussianMixture
from .oracles import GriddedDensity


def _format(obj) -> str:
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (float, np.floating)):
        return f"{float(obj):.17g}"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_format(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_format(str(k))}: {_format(v)}" for k, v in obj.items()) + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps(obj) -> str:
    return _format(obj)


def mixture_to_dict(mix: GaussianMixture) -> dict:
    return {
        "log_weights": mix.log_weights,
        "means": mix.means,
        "covs": np.stack([c.cov for c in mix.components]),
    }


def mixture_from_dict(d: dict) -> GaussianMixture:
    comps = tuple(Gaussian(m, c) for m, c in zip(np.asarray(d["means"]), np.asarray(d["covs"])))
    return GaussianMixture(comps, np.asarray(d["log_weights"], dtype=float))


def record_to_dict(rec: IterationRecord) -> dict:
    return {
        "iteration": rec.iteration,
        "log_weights": rec.log_weights,
        "means": rec.means,
        "cov_fro_norms": rec.cov_fro_norms,
        "misfits": rec.misfits,
        "forward_evals": rec.forward_evals,
    }


def write_records(path: Path, records) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(dumps(record_to_dict(rec)) + "\n")


def write_mixtures(path: Path, mixtures) -> None:
    with open(path, "w") as fh:
        for n, mix in enumerate(mixtures):
            d = {"iteration": n}
            d.update(mixture_to_dict(mix))
            fh.write(dumps(d) + "\n")


def read_mixtures(path: Path) -> list:
    import json

    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(mixture_from_dict(json.loads(line)))
    return out


def write_final_mixture(path: Path, mix: GaussianMixture) -> None:
    Path(path).write_text(dumps(mixture_to_dict(mix)) + "\n")


def read_final_mixture(path: Path) -> GaussianMixture:
    import json

    return mixture_from_dict(json.loads(Path(path).read_text()))


def write_density_csv(path: Path, density: GriddedDensity) -> None:
    buf = io.StringIO()
    if density.ndim == 1:
        buf.write("axis0,density\n")
        for x, v in zip(density.axes[0], density.values):
            buf.write(f"{x:.17g},{v:.17g}\n")
    else:
        buf.write("axis0,axis1,density\n")
        for i, x in enumerate(density.axes[0]):
            for j, y in enumerate(density.axes[1]):
                buf.write(f"{x:.17g},{y:.17g},{density.values[i, j]:.17g}\n")
    Path(path).write_text(buf.getvalue())


def read_density_csv(path: Path) -> GriddedDensity:
    raw = np.genfromtxt(path, delimiter=",", names=True)
    if "axis1" in (raw.dtype.names or ()):
        ax0 = np.unique(raw["axis0"])
        ax1 = np.unique(raw["axis1"])
        values = raw["density"].reshape(len(ax0), len(ax1))
        cv = float((ax0[1] - ax0[0]) * (ax1[1] - ax1[0]))
        return GriddedDensity(axes=(ax0, ax1), values=values, cell_volume=cv)
    ax0 = raw["axis0"]
    values = raw["density"]
    cv = float(ax0[1] - ax0[0])
    return GriddedDensity(axes=(ax0,), values=values, cell_volume=cv)


def write_field_csv(path: Path, field: np.ndarray) -> None:
    np.savetxt(path, np.asarray(field), delimiter=",", fmt="%.17g")


def read_field_csv(path: Path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",")


def write_vector_csv(path: Path, vec: np.ndarray, header: str = "value") -> None:
    buf = io.StringIO()
    buf.write(header + "\n")
    for v in np.asarray(vec).ravel():
        buf.write(f"{v:.17g}\n")
    Path(path).write_text(buf.getvalue())
