"""The six standard figures rendered from a telemetry log.

Each figure function takes parsed telemetry and an axes/figure and returns a
dict of annotation values it drew (e.g. the global barrier minimum), so the
numbers in the rendered image are also available programmatically.
"""

from __future__ import annotations

import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from inspectplot.telemetry import Telemetry, load_telemetry  # noqa: E402

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

FIGURES = (
    "trajectory3d",
    "position",
    "velocity",
    "cbf_position",
    "cbf_attitude",
    "pointing",
)

FORMATS = ("png", "svg")


@dataclass(frozen=True)
class PlotJob:
    telemetry_path: str
    out_dir: str
    figures: tuple[str, ...] = FIGURES
    image_format: str = "png"
    scenario_path: str | None = None  # optional TOML with obstacle geometry

    def __post_init__(self):
        unknown = [f for f in self.figures if f not in FIGURES]
        if unknown:
            raise ValueError(
                f"unknown figures: {', '.join(unknown)} "
                f"(available: {', '.join(FIGURES)})"
            )
        if self.image_format not in FORMATS:
            raise ValueError(
                f"unknown format {self.image_format!r} (available: png, svg)"
            )


def _load_obstacles(scenario_path):
    """Keep-out ellipsoids (name, center, semi-axes) from a scenario TOML."""
    with open(scenario_path, "rb") as fh:
        doc = tomllib.load(fh)
    return [
        (o.get("name", f"obstacle {k + 1}"),
         np.asarray(o["center_m"], dtype=float),
         np.asarray(o["semi_axes_m"], dtype=float))
        for k, o in enumerate(doc.get("obstacles", []))
    ]


def _ellipsoid_wireframe(ax, center, semi, n=12):
    u = np.linspace(0.0, 2 * np.pi, 2 * n)
    v = np.linspace(0.0, np.pi, n)
    x = center[0] + semi[0] * np.outer(np.cos(u), np.sin(v))
    y = center[1] + semi[1] * np.outer(np.sin(u), np.sin(v))
    z = center[2] + semi[2] * np.outer(np.ones_like(u), np.cos(v))
    ax.plot_wireframe(x, y, z, color="0.7", linewidth=0.4)


def _checkpoint_positions(tel: Telemetry):
    """Positions at the instants the checkpoint index advances."""
    cp = tel.column("checkpoint").astype(int)
    r = np.column_stack([tel.column(f"r_{ax}") for ax in "xyz"])
    switches = np.flatnonzero(np.diff(cp) > 0)
    return r[switches] if switches.size else np.empty((0, 3))


def _empty_note(ax, tel):
    if tel.empty:
        ax.text(0.5, 0.5, "no telemetry rows", transform=ax.transAxes,
                ha="center", va="center", color="0.5")


def fig_trajectory3d(tel: Telemetry, fig, scenario_path=None):
    ax = fig.add_subplot(projection="3d")
    ann = {}
    if not tel.empty:
        r = np.column_stack([tel.column(f"r_{ax}") for ax in "xyz"])
        ax.plot(r[:, 0], r[:, 1], r[:, 2], color="C0", linewidth=1.0,
                label="trajectory")
        ax.scatter(*r[0], color="C2", marker="o", s=40, label="start")
        cps = _checkpoint_positions(tel)
        if cps.size:
            ax.scatter(cps[:, 0], cps[:, 1], cps[:, 2], color="C3",
                       marker="^", s=40, label="checkpoint arrivals")
        ann["n_checkpoint_arrivals"] = int(cps.shape[0])
    if scenario_path is not None:
        for _, center, semi in _load_obstacles(scenario_path):
            _ellipsoid_wireframe(ax, center, semi)
    ax.set_xlabel("along-track [m]")
    ax.set_ylabel("radial [m]")
    ax.set_zlabel("cross-track [m]")
    ax.set_title("Relative trajectory")
    if not tel.empty:
        ax.legend(loc="upper left", fontsize=8)
    return ann


def fig_position(tel: Telemetry, fig, scenario_path=None):
    ax = fig.add_subplot()
    if not tel.empty:
        t = tel.column("t")
        for k, axis in enumerate("xyz"):
            ax.plot(t, tel.column(f"r_{axis}"), label=f"r_{axis}", color=f"C{k}")
        ax.legend(fontsize=8)
    _empty_note(ax, tel)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("relative position [m]")
    ax.set_title("Position history")
    ax.grid(True, alpha=0.3)
    return {}


def fig_velocity(tel: Telemetry, fig, scenario_path=None):
    ax = fig.add_subplot()
    if not tel.empty:
        t = tel.column("t")
        for k, axis in enumerate("xyz"):
            ax.plot(t, tel.column(f"v_{axis}"), label=f"v_{axis}", color=f"C{k}")
        for k, axis in enumerate("xyz"):
            ax.plot(t, tel.column(f"v_s_{axis}"), linestyle="--", alpha=0.6,
                    label=f"v_s_{axis}", color=f"C{k}")
        ax.legend(fontsize=8, ncol=2)
    _empty_note(ax, tel)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("velocity [m/s]")
    ax.set_title("Velocity and filtered command")
    ax.grid(True, alpha=0.3)
    return {}


def fig_cbf_position(tel: Telemetry, fig, scenario_path=None):
    ax = fig.add_subplot()
    ann = {}
    names = tel.h_p_columns
    if not tel.empty and names:
        t = tel.column("t")
        for name in names:
            ax.plot(t, tel.column(name), linewidth=0.8)
        # global minimum over every barrier column, annotated exactly
        stacked = np.column_stack([tel.column(n) for n in names])
        flat = int(np.argmin(stacked))
        row, col = divmod(flat, stacked.shape[1])
        min_val = stacked[row, col]
        ann["min_value"] = float(min_val)
        ann["min_column"] = names[col]
        ann["min_time"] = float(t[row])
        ax.annotate(f"min {names[col]} = {min_val!r}",
                    xy=(t[row], min_val), xytext=(0.35, 0.08),
                    textcoords="axes fraction",
                    arrowprops={"arrowstyle": "->", "color": "C3"}, color="C3")
        ax.plot(t[row], min_val, "o", color="C3", markersize=4)
    ax.axhline(0.0, color="k", linewidth=0.8)
    _empty_note(ax, tel)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("position barrier value")
    ax.set_title("Keep-out barrier functions (safe while > 0)")
    ax.grid(True, alpha=0.3)
    return ann


def fig_cbf_attitude(tel: Telemetry, fig, scenario_path=None):
    ax = fig.add_subplot()
    ann = {}
    if not tel.empty:
        t = tel.column("t")
        for i in range(1, 6):
            ax.plot(t, tel.column(f"h_a{i}"), linewidth=0.7, alpha=0.7,
                    label=f"h_a{i}")
        h_min = tel.column("h_min")
        ax.plot(t, h_min, color="k", linewidth=1.4, label="composed min")
        # shade the steps where the rate filter held cone rows active
        active = tel.column("active_mask") > 0
        if np.any(active):
            ax.fill_between(t, *ax.get_ylim(), where=active, color="C1",
                            alpha=0.12, label="cone rows active")
        k = int(np.argmin(h_min))
        ann["min_value"] = float(h_min[k])
        ann["min_column"] = "h_min"
        ann["min_time"] = float(t[k])
        ax.annotate(f"min h_min = {h_min[k]!r}",
                    xy=(t[k], h_min[k]), xytext=(0.35, 0.05),
                    textcoords="axes fraction",
                    arrowprops={"arrowstyle": "->", "color": "C3"}, color="C3")
        ax.plot(t[k], h_min[k], "o", color="C3", markersize=4)
        ax.legend(fontsize=7, ncol=2)
    ax.axhline(0.0, color="k", linewidth=0.8)
    _empty_note(ax, tel)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("attitude barrier value")
    ax.set_title("Pointing-cone barriers (safe while > 0)")
    ax.grid(True, alpha=0.3)
    return ann


def fig_pointing(tel: Telemetry, fig, scenario_path=None):
    ax1 = fig.add_subplot(2, 1, 1)
    ax2 = fig.add_subplot(2, 1, 2, sharex=ax1)
    if not tel.empty:
        t = tel.column("t")
        ax1.plot(t, tel.column("pointing_err_deg"), color="C0")
        for k, axis in enumerate("xyz"):
            ax2.plot(t, np.degrees(tel.column(f"omega_{axis}")),
                     label=f"omega_{axis}", color=f"C{k}")
        for k, axis in enumerate("xyz"):
            ax2.plot(t, np.degrees(tel.column(f"omega_s_{axis}")),
                     linestyle="--", alpha=0.6, color=f"C{k}")
        ax2.legend(fontsize=8)
    _empty_note(ax1, tel)
    ax1.set_ylabel("pointing error [deg]")
    ax1.set_title("Boresight pointing error and body rates")
    ax1.grid(True, alpha=0.3)
    ax2.set_xlabel("t [s]")
    ax2.set_ylabel("rate [deg/s]")
    ax2.grid(True, alpha=0.3)
    return {}


_RENDERERS = {
    "trajectory3d": fig_trajectory3d,
    "position": fig_position,
    "velocity": fig_velocity,
    "cbf_position": fig_cbf_position,
    "cbf_attitude": fig_cbf_attitude,
    "pointing": fig_pointing,
}


@dataclass(frozen=True)
class RenderedFigure:
    name: str
    path: Path
    annotations: dict = field(default_factory=dict)


def render(job: PlotJob) -> dict[str, RenderedFigure]:
    """Render the selected figures; returns name -> output file + annotations.

    The telemetry file is only ever opened for reading. An empty (header-only)
    log renders empty axes with a warning rather than failing.
    """
    tel = load_telemetry(job.telemetry_path)
    if tel.empty:
        warnings.warn("telemetry has no data rows; rendering empty axes",
                      stacklevel=2)
    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results: dict[str, RenderedFigure] = {}
    for name in job.figures:
        fig = plt.figure(figsize=(7.0, 5.0), dpi=120)
        try:
            ann = _RENDERERS[name](tel, fig, scenario_path=job.scenario_path)
            path = out_dir / f"{name}.{job.image_format}"
            fig.savefig(path)
        finally:
            plt.close(fig)
        results[name] = RenderedFigure(name=name, path=path, annotations=ann)
    return results
