"""Figures rendered next to the CSV output of ``sweep`` and ``thermalize``.

matplotlib is an optional dependency (``pip install artifact[plot]``) and is
imported lazily.
"""
from __future__ import annotations

from pathlib import Path


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:
        raise RuntimeError("plotting needs matplotlib; install the 'plot' extra") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update({"figure.dpi": 100, "font.size": 10, "axes.grid": True, "grid.alpha": 0.3})
    return plt


def _save(fig, path: Path) -> Path:
    # No software/date metadata so repeated runs write identical files.
    fig.savefig(path, metadata={"Software": None})
    return path


def _as_float(v):
    return float("nan") if v is None or v == "" else float(v)


def plot_sweep(rows: list[dict], axis_names: list[str], path: Path) -> Path:
    plt = _pyplot()
    if len(axis_names) == 1:
        name = axis_names[0]
        x = [r[name] for r in rows]
        fig, (ax_w, ax_eta) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
        ax_w.plot(x, [r["W"] for r in rows], label="W")
        ax_w.plot(x, [r["Q_in"] for r in rows], "--", label="Q_in")
        ax_w.plot(x, [r["Q_out"] for r in rows], ":", label="Q_out")
        ax_w.axhline(0.0, color="k", lw=0.5)
        ax_w.set_ylabel("energy")
        ax_w.legend()
        ax_eta.plot(x, [_as_float(r["eta"]) for r in rows], "o-", ms=2)
        ax_eta.set_ylabel("efficiency")
        ax_eta.set_xlabel(name)
        if len(x) > 1 and x[0] > 0 and x[-1] / x[0] > 100:
            ax_eta.set_xscale("log")
    else:
        a, b = axis_names
        xs = sorted({r[a] for r in rows})
        ys = sorted({r[b] for r in rows})
        grid = [[0.0] * len(xs) for _ in ys]
        for r in rows:
            grid[ys.index(r[b])][xs.index(r[a])] = r["W"]
        fig, ax = plt.subplots(figsize=(6, 5))
        mesh = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap="RdBu_r")
        ax.contour(xs, ys, grid, levels=[0.0], colors="k", linewidths=0.8)
        fig.colorbar(mesh, ax=ax, label="W")
        ax.set_xlabel(a)
        ax.set_ylabel(b)
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_thermalization(rows: list[dict], path: Path) -> Path:
    plt = _pyplot()
    t = [r["t"] for r in rows]
    fig, (ax_z, ax_d) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    ax_z.plot(t, [r["sz_S"] for r in rows], label="S")
    ax_z.plot(t, [r["sz_D"] for r in rows], label="D")
    ax_z.set_ylabel("p1 - p0")
    ax_z.legend()
    ax_d.semilogy(t, [max(r["trace_distance"], 1e-300) for r in rows])
    ax_d.set_ylabel("trace distance to Gibbs")
    ax_d.set_xlabel("t")
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out
