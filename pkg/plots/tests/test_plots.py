import json
import subprocess
import sys

import numpy as np
import pytest

from plots import FigureSpec, SchemaError, render
from plots.cli import main
from plots.readers import read_density, read_mixture, read_tv_table


def write_density1d(path, n=64):
    x = np.linspace(-4.0, 4.0, n)
    v = np.exp(-0.5 * x**2) / np.sqrt(2 * np.pi)
    lines = ["axis0,density"] + [f"{a:.17g},{b:.17g}" for a, b in zip(x, v)]
    path.write_text("\n".join(lines) + "\n")


def write_density2d(path, n=16):
    x = np.linspace(-2.0, 2.0, n)
    lines = ["axis0,axis1,density"]
    for a in x:
        for b in x:
            lines.append(f"{a:.17g},{b:.17g},{np.exp(-a*a-b*b):.17g}")
    path.write_text("\n".join(lines) + "\n")


def write_mixture(path, means, weights):
    means = np.atleast_2d(np.asarray(means, dtype=float).reshape(len(weights), -1))
    dim = means.shape[1]
    payload = {
        "log_weights": np.log(weights).tolist(),
        "means": means.tolist(),
        "covs": [np.eye(dim).tolist() for _ in weights],
    }
    path.write_text(json.dumps(payload))


def write_tv(path, n=31):
    lines = ["iteration,tv"] + [f"{i},{0.9 * 0.8**i:.17g}" for i in range(n)]
    path.write_text("\n".join(lines) + "\n")


def write_field(path, n=32):
    x = np.linspace(0, 2 * np.pi, n, endpoint=False)
    fld = np.sin(x)[:, None] * np.cos(x)[None, :]
    np.savetxt(path, fld, delimiter=",", fmt="%.17g")


def test_reader_density_roundtrip(tmp_path):
    p = tmp_path / "d.csv"
    write_density1d(p)
    d = read_density(p)
    assert d.ndim == 1
    assert len(d.axes[0]) == 64
    p2 = tmp_path / "d2.csv"
    write_density2d(p2)
    d2 = read_density(p2)
    assert d2.ndim == 2
    assert d2.values.shape == (16, 16)


def test_reader_mixture(tmp_path):
    p = tmp_path / "m.json"
    write_mixture(p, [[-1.0], [1.0]], [0.3, 0.7])
    m = read_mixture(p)
    assert m.dim == 1
    np.testing.assert_allclose(m.weights, [0.3, 0.7])


def test_reader_missing_column_named(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,y\n1,2\n")
    with pytest.raises(SchemaError, match="axis0"):
        read_density(p)
    q = tmp_path / "bad.json"
    q.write_text('{"means": [[0.0]], "covs": [[[1.0]]]}')
    with pytest.raises(SchemaError, match="log_weights"):
        read_mixture(q)
    t = tmp_path / "bad_tv.csv"
    t.write_text("iteration,value\n0,1\n")
    with pytest.raises(SchemaError, match="tv"):
        read_tv_table(t)


@pytest.mark.parametrize("kind", ["density1d", "density2d", "tv-curve",
                                  "vorticity", "marginals"])
def test_render_each_kind(tmp_path, kind):
    density1 = tmp_path / "d1.csv"
    density2 = tmp_path / "d2.csv"
    mixture = tmp_path / "m.json"
    tv = tmp_path / "tv.csv"
    fld = tmp_path / "f.csv"
    write_density1d(density1)
    write_density2d(density2)
    write_mixture(mixture, [[-1.0, 0.0], [1.0, 0.5], [0.0, -1.0]],
                  [0.2, 0.5, 0.3])
    if kind == "density1d":
        write_mixture(mixture, [[-1.0], [1.0]], [0.5, 0.5])
    write_tv(tv)
    write_field(fld)
    inputs = {
        "density1d": {"density": str(density1), "mixture": str(mixture),
                      "reference": str(density1)},
        "density2d": {"density": str(density2)},
        "tv-curve": {"tv": str(tv)},
        "vorticity": {"field": str(fld)},
        "marginals": {"mixture": str(mixture)},
    }[kind]
    out = tmp_path / f"{kind}.png"
    result = render(FigureSpec(kind=kind, inputs=inputs, out=str(out)))
    assert result.exists()
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_render_deterministic(tmp_path):
    tv = tmp_path / "tv.csv"
    write_tv(tv)
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render(FigureSpec(kind="tv-curve", inputs={"tv": str(tv)}, out=str(a)))
    render(FigureSpec(kind="tv-curve", inputs={"tv": str(tv)}, out=str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(SchemaError, match="kind"):
        FigureSpec(kind="pie", inputs={}, out=str(tmp_path / "x.png"))


def test_missing_required_input_rejected(tmp_path):
    with pytest.raises(SchemaError, match="density"):
        FigureSpec(kind="density1d", inputs={}, out=str(tmp_path / "x.png"))


def test_cli_spec_file(tmp_path):
    tv = tmp_path / "tv.csv"
    write_tv(tv)
    out = tmp_path / "fig.png"
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"kind": "tv-curve",
                                "inputs": {"tv": str(tv)},
                                "out": str(out)}))
    assert main(["--spec", str(spec)]) == 0
    assert out.exists()


def test_cli_flags(tmp_path):
    d = tmp_path / "d.csv"
    m = tmp_path / "m.json"
    write_density1d(d)
    write_mixture(m, [[0.0]], [1.0])
    out = tmp_path / "fig.png"
    assert main(["--kind", "density1d", "--density", str(d),
                 "--mixture", str(m), "--out", str(out)]) == 0
    assert out.exists()


def test_cli_schema_error_exit_code(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\n")
    out = tmp_path / "fig.png"
    assert main(["--kind", "tv-curve", "--tv", str(bad),
                 "--out", str(out)]) == 2
    assert not out.exists()


def test_renders_real_run_artifacts(tmp_path):
    # end-to-end: produce artifacts with the sampler CLI (as a subprocess,
    # honoring the file-format contract) and render them
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k_components": 2, "n_iterations": 3,
                               "j_samples": 200}))
    run_dir = tmp_path / "run"
    ref = tmp_path / "ref.csv"

    def sampler(*args):
        proc = subprocess.run([sys.executable, "-m", "gmki.cli", *args],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    sampler("run", "--problem", "bimodal1d-a", "--config", str(cfg),
            "--out", str(run_dir), "--seed", "13")
    sampler("reference", "--problem", "bimodal1d-a", "--resolution", "256",
            "--out", str(ref))
    sampler("metrics", "--run", str(run_dir), "--reference", str(ref))
    sampler("ns-truth", "--out", str(tmp_path / "truth"), "--modes", "8",
            "--grid", "32", "--seed", "7")

    figures = [
        ("density1d", {"density": str(run_dir / "density.csv"),
                       "mixture": str(run_dir / "final_mixture.json"),
                       "reference": str(ref)}),
        ("tv-curve", {"tv": str(run_dir / "tv.csv")}),
        ("vorticity", {"field": str(tmp_path / "truth" / "omega0.csv")}),
        ("marginals", {"mixture": str(run_dir / "final_mixture.json")}),
    ]
    for kind, inputs in figures:
        out = tmp_path / f"{kind}.png"
        render(FigureSpec(kind=kind, inputs=inputs, out=str(out)))
        assert out.exists(), kind
