"""Artifact parsers with explicit schema errors.

Every reader validates the column layout it needs and raises
:class:`SchemaError` naming the offending column, so the command-line
wrapper can exit with a single actionable diagnostic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SchemaError(Exception):
    """An input file does not match the expected artifact layout."""


@dataclass(frozen=True)
class GridDensity:
    axes: tuple
    values: np.ndarray

    @property
    def ndim(self) -> int:
        return len(self.axes)


@dataclass(frozen=True)
class Mixture:
    weights: np.ndarray   # (K,)
    means: np.ndarray     # (K, dim)
    covs: np.ndarray      # (K, dim, dim)

    @property
    def dim(self) -> int:
        return self.means.shape[1]


def _read_table(path, required):
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    for col in required:
        if col not in header:
            raise SchemaError(f"{path}: missing column '{col}' "
                              f"(found {header})")
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.size == 0:
        raise SchemaError(f"{path}: no data rows")
    return {name: np.atleast_1d(data[name]) for name in header}


def read_density(path) -> GridDensity:
    """CSV grid density: axis0[,axis1],density in row-major order."""
    cols = _read_table(path, ["axis0", "density"])
    if "axis1" in cols:
        ax0 = np.unique(cols["axis0"])
        ax1 = np.unique(cols["axis1"])
        if len(ax0) * len(ax1) != len(cols["density"]):
            raise SchemaError(f"{path}: column 'density' has "
                              f"{len(cols['density'])} rows, expected "
                              f"{len(ax0)}x{len(ax1)}")
        return GridDensity(axes=(ax0, ax1),
                           values=cols["density"].reshape(len(ax0), len(ax1)))
    return GridDensity(axes=(cols["axis0"],), values=cols["density"])


def read_tv_table(path):
    """CSV convergence table: iteration,tv."""
    cols = _read_table(path, ["iteration", "tv"])
    return cols["iteration"], cols["tv"]


def read_mixture(path) -> Mixture:
    """JSON mixture: log_weights (K), means (K,dim), covs (K,dim,dim)."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    for key in ("log_weights", "means", "covs"):
        if key not in raw:
            raise SchemaError(f"{path}: missing column '{key}'")
    weights = np.exp(np.asarray(raw["log_weights"], dtype=float))
    means = np.atleast_2d(np.asarray(raw["means"], dtype=float))
    covs = np.asarray(raw["covs"], dtype=float)
    if covs.ndim != 3 or covs.shape[:2] != (means.shape[0], means.shape[1]):
        raise SchemaError(f"{path}: column 'covs' has shape {covs.shape}, "
                          f"expected ({means.shape[0]}, {means.shape[1]}, "
                          f"{means.shape[1]})")
    return Mixture(weights=weights, means=means, covs=covs)


def read_field(path) -> np.ndarray:
    """CSV matrix of a scalar field sampled on a square periodic grid."""
    path = Path(path)
    try:
        field = np.loadtxt(path, delimiter=",")
    except ValueError as exc:
        raise SchemaError(f"{path}: not a numeric CSV matrix ({exc})") from exc
    if field.ndim != 2 or field.shape[0] != field.shape[1]:
        raise SchemaError(f"{path}: expected a square matrix, got shape "
                          f"{field.shape}")
    return field
