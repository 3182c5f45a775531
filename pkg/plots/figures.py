"""The five figure kinds and their renderer."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .readers import SchemaError, read_density, read_field, read_mixture, read_tv_table

FIGURE_KINDS = ("density1d", "density2d", "tv-curve", "vorticity", "marginals")

# role -> required? per kind
_INPUT_ROLES = {
    "density1d": {"density": True, "mixture": True, "reference": False},
    "density2d": {"density": True},
    "tv-curve": {"tv": True},
    "vorticity": {"field": True},
    "marginals": {"mixture": True},
}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: dict = field(default_factory=dict)
    out: str = "figure.png"

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; "
                              f"known: {sorted(FIGURE_KINDS)}")
        roles = _INPUT_ROLES[self.kind]
        for role, required in roles.items():
            if required and role not in self.inputs:
                raise SchemaError(f"figure kind {self.kind!r} needs input "
                                  f"'{role}'")
        for role, path in self.inputs.items():
            if role not in roles:
                raise SchemaError(f"figure kind {self.kind!r} does not take "
                                  f"input '{role}'")
            if not Path(path).exists():
                raise SchemaError(f"input '{role}' not found: {path}")


def _gaussian_pdf(x, mean, var):
    return np.exp(-0.5 * (x - mean) ** 2 / var) / np.sqrt(2.0 * np.pi * var)


def _render_density1d(spec, ax):
    density = read_density(spec.inputs["density"])
    if density.ndim != 1:
        raise SchemaError(f"{spec.inputs['density']}: column 'axis1' present "
                          "but density1d needs a 1-D grid")
    mixture = read_mixture(spec.inputs["mixture"])
    if "reference" in spec.inputs:
        ref = read_density(spec.inputs["reference"])
        ax.plot(ref.axes[0], ref.values, color="0.6", lw=1.0, marker="s",
                markevery=max(1, len(ref.axes[0]) // 40), ms=3,
                label="reference")
    ax.plot(density.axes[0], density.values, color="C0", lw=1.5,
            label="mixture")
    for k, (mean, w) in enumerate(zip(mixture.means[:, 0], mixture.weights)):
        ax.axvline(mean, color=f"C{k % 9 + 1}", ls="--", lw=1.0)
        ax.plot([mean], [0.0], marker="o", color=f"C{k % 9 + 1}",
                label=f"mean {k} (w={w:.2f})")
    ax.set_xlabel("parameter")
    ax.set_ylabel("density")
    ax.legend(loc="best", fontsize=8)


def _render_density2d(spec, ax):
    density = read_density(spec.inputs["density"])
    if density.ndim != 2:
        raise SchemaError(f"{spec.inputs['density']}: missing column 'axis1' "
                          "(density2d needs a 2-D grid)")
    ax0, ax1 = density.axes
    mesh = ax.pcolormesh(ax0, ax1, density.values.T, shading="nearest",
                         cmap="viridis")
    ax.figure.colorbar(mesh, ax=ax, label="density")
    ax.set_xlabel("parameter 1")
    ax.set_ylabel("parameter 2")
    ax.set_aspect("equal")


def _render_tv_curve(spec, ax):
    iterations, tv = read_tv_table(spec.inputs["tv"])
    ax.plot(iterations, tv, marker="o", ms=3, color="C0")
    ax.set_xlabel("iteration")
    ax.set_ylabel("TV distance")
    ax.set_ylim(bottom=0.0)


def _render_vorticity(spec, ax):
    fld = read_field(spec.inputs["field"])
    extent = (0.0, 2.0 * np.pi, 0.0, 2.0 * np.pi)
    image = ax.imshow(fld.T, origin="lower", extent=extent, cmap="RdBu_r")
    ax.figure.colorbar(image, ax=ax, label="vorticity")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")


def _render_marginals(spec, ax):
    # per-coordinate 1-D mixture marginals, computed analytically
    mixture = read_mixture(spec.inputs["mixture"])
    fig = ax.figure
    fig.clf()
    dim = mixture.dim
    ncols = min(8, dim)
    nrows = (dim + ncols - 1) // ncols
    for i in range(dim):
        sub = fig.add_subplot(nrows, ncols, i + 1)
        mus = mixture.means[:, i]
        sds = np.sqrt(mixture.covs[:, i, i])
        lo = float(np.min(mus - 4.0 * sds))
        hi = float(np.max(mus + 4.0 * sds))
        grid = np.linspace(lo, hi, 200)
        pdf = sum(w * _gaussian_pdf(grid, m, s**2)
                  for w, m, s in zip(mixture.weights, mus, sds))
        sub.plot(grid, pdf, lw=1.0)
        for m in mus:
            sub.axvline(m, color="0.7", ls=":", lw=0.6)
        sub.set_title(f"coeff {i}", fontsize=6)
        sub.tick_params(labelsize=5)
    fig.set_size_inches(1.6 * ncols, 1.4 * nrows)
    fig.tight_layout()


_RENDERERS = {
    "density1d": _render_density1d,
    "density2d": _render_density2d,
    "tv-curve": _render_tv_curve,
    "vorticity": _render_vorticity,
    "marginals": _render_marginals,
}


def render(spec: FigureSpec) -> Path:
    """Render the figure and write it to ``spec.out``; returns the path."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    try:
        _RENDERERS[spec.kind](spec, ax)
        out = Path(spec.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, dpi=120, metadata={"Software": "plots"})
    finally:
        plt.close(fig)
    return out
