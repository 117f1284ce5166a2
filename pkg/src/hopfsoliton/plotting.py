"""Matplotlib figures written next to the exported CSV data."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .hopf import choose_pole, stereographic_projection  # noqa: E402

_STYLE = {"figure.dpi": 120, "axes.grid": True, "grid.alpha": 0.3, "font.size": 10}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_profiles(path, r, f, g, r_max=None):
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(r, f, label="f(r)")
        ax.plot(r, g, "--", label="g(r)")
        ax.set_xlabel("r")
        ax.set_ylabel("profile")
        if r_max is not None:
            ax.set_xlim(0, r_max)
        ax.legend()
        return _save(fig, path)


def plot_density(path, r, kinetic, gauge, potential):
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for values, label in ((kinetic, "kinetic"), (gauge, "gauge"), (potential, "potential")):
            ax.plot(r, values, label=label)
        ax.plot(r, kinetic + gauge + potential, "k", lw=1.5, label="total")
        ax.set_xscale("log")
        ax.set_xlabel("r")
        ax.set_ylabel("action density")
        ax.legend()
        return _save(fig, path)


def plot_fibers(path, curves, labels):
    """Stereographic images of fibres in R^3, one colour per curve."""
    pole = choose_pole([c.points for c in curves])
    with plt.rc_context(_STYLE):
        fig = plt.figure(figsize=(5, 5))
        ax = fig.add_subplot(projection="3d")
        for curve, label in zip(curves, labels):
            xyz = stereographic_projection(curve.closed_points(), pole)
            ax.plot(xyz[:, 0], xyz[:, 1], xyz[:, 2], label=label)
        ax.set_xlabel("X")
        ax.set_ylabel("Y")
        ax.set_zlabel("Z")
        ax.legend()
        return _save(fig, path)


def plot_history(path, history):
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.semilogy(np.arange(len(history)), history, "o-")
        ax.set_xlabel("Newton iteration")
        ax.set_ylabel("residual max-norm")
        return _save(fig, path)
