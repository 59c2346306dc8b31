"""Diagnostic figures for a scenario report, written next to the report file.

Everything is drawn from the report dict alone; nothing is recomputed.
"""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FLOOR = 1e-300  # keeps exact zeros visible on log axes


def _trace_axes(ax, traces, key):
    for tr in traces:
        vals = tr[key]
        if not vals:
            continue
        ax.semilogy(range(len(vals)), np.maximum(vals, _FLOOR), marker=".", lw=1.0,
                    label=tr["schedule"])
    ax.set_xlabel("schedule step")
    ax.grid(True, alpha=0.3)


def _boundedness_figure(report, path):
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    bnd = report["boundedness"]
    _trace_axes(ax, bnd["traces"], "values")
    sup = bnd["sup_estimate"]
    if np.isfinite(sup) and sup > 0:
        ax.axhline(sup, color="k", ls="--", lw=1.0, label="sup estimate")
    ax.axhline(report["config"]["unbounded_threshold"], color="r", ls=":", lw=1.0,
               label="divergence threshold")
    ax.set_ylabel("B(z) along schedule")
    ax.set_title("%s: boundedness probes (%s)" % (report["scenario"]["name"], bnd["verdict"]))
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _compactness_figure(report, path):
    fig, axes = plt.subplots(2, 1, figsize=(7.0, 6.0), sharex=True)
    cmp_ = report["compactness"]
    eps = report["config"]["compact_epsilon"]
    for ax, key, lim in ((axes[0], "q_phi", cmp_["limsup_phi"]), (axes[1], "q_psi", cmp_["limsup_psi"])):
        _trace_axes(ax, cmp_["traces"], key)
        ax.axhline(eps, color="g", ls=":", lw=1.0, label="compact below")
        ax.axhline(10.0 * eps, color="r", ls=":", lw=1.0, label="noncompact above")
        if np.isfinite(lim) and lim > 0:
            ax.axhline(lim, color="k", ls="--", lw=1.0, label="limsup estimate")
        ax.set_ylabel(key)
        ax.legend(fontsize=7, ncol=2)
    axes[0].set_title("%s: compactness probes (%s)" % (report["scenario"]["name"], cmp_["verdict"]))
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _probes_figure(report, path):
    fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.6))
    lower = [row["value"] for row in report["lower_bounds"]]
    axes[0].semilogy(range(len(lower)), np.maximum(lower, _FLOOR), marker="o", lw=1.0)
    axes[0].set_xlabel("probe point index")
    axes[0].set_ylabel("norm lower bound")
    axes[0].grid(True, alpha=0.3)
    sizes = [row["size"] for row in report["psumming"]]
    ratios = [row["ratio"] for row in report["psumming"]]
    axes[1].plot(sizes, ratios, marker="s", lw=1.0)
    axes[1].set_xlabel("family size")
    axes[1].set_ylabel("summing ratio")
    axes[1].grid(True, alpha=0.3)
    fig.suptitle("%s: operator probes" % (report["scenario"]["name"],), fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def render_figures(report, out_path):
    """Write the three diagnostic PNGs next to out_path; returns their paths."""
    directory = os.path.dirname(os.path.abspath(out_path))
    stem = os.path.splitext(os.path.basename(out_path))[0]
    targets = [
        (os.path.join(directory, "%s_boundedness.png" % stem), _boundedness_figure),
        (os.path.join(directory, "%s_compactness.png" % stem), _compactness_figure),
        (os.path.join(directory, "%s_probes.png" % stem), _probes_figure),
    ]
    written = []
    for path, draw in targets:
        draw(report, path)
        written.append(path)
    return written
