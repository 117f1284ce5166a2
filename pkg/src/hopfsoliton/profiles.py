"""Radial profile functions f(r), g(r) and model parameters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline


@dataclass(frozen=True)
class ModelParams:
    """Quartic coupling of V = lam (phi.phi - v^2)^2; v and e are fixed to 1."""

    lam: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")

    @property
    def v(self):
        return 1.0

    @property
    def e(self):
        return 1.0


class RadialProfile:
    """Nodal values of f and g on a mesh, with natural cubic-spline interpolants.

    Derivatives f', g' come from the spline so that the action and the
    field strengths see one consistent profile.
    """

    def __init__(self, r, f, g):
        r = np.asarray(r, dtype=float)
        f = np.asarray(f, dtype=float)
        g = np.asarray(g, dtype=float)
        if r.ndim != 1 or r.shape != f.shape or r.shape != g.shape:
            raise ValueError("r, f and g must be 1-D arrays of equal length")
        if len(r) < 4:
            raise ValueError("need at least 4 mesh nodes")
        if r[0] < 0 or np.any(np.diff(r) <= 0):
            raise ValueError("mesh must be non-negative and strictly increasing")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))):
            raise ValueError("profile values must be finite")
        self.r = r
        self.f_nodes = f
        self.g_nodes = g
        self._f = CubicSpline(r, f, bc_type="natural")
        self._g = CubicSpline(r, g, bc_type="natural")
        self._df = self._f.derivative()
        self._dg = self._g.derivative()

    @property
    def r_max(self):
        return float(self.r[-1])

    def f(self, r):
        return self._f(r)

    def g(self, r):
        return self._g(r)

    def df(self, r):
        return self._df(r)

    def dg(self, r):
        return self._dg(r)

    def satisfies_boundary_conditions(self, tol=1e-10):
        """f(0) = g(0) = 0 and f, g = 1 at the last node, within ``tol``."""
        return bool(
            self.r[0] == 0.0
            and abs(self.f_nodes[0]) <= tol
            and abs(self.g_nodes[0]) <= tol
            and abs(self.f_nodes[-1] - 1.0) <= tol
            and abs(self.g_nodes[-1] - 1.0) <= tol
        )

    def is_monotone(self):
        return bool(np.all(np.diff(self.f_nodes) >= 0)), bool(np.all(np.diff(self.g_nodes) >= 0))


@dataclass(frozen=True)
class AnalyticProfile:
    """Profile given by closed-form callables; handy for oracles and tests."""

    f_fn: Callable
    g_fn: Callable
    df_fn: Callable
    dg_fn: Callable
    r_max: float = np.inf

    def f(self, r):
        return self.f_fn(np.asarray(r, dtype=float))

    def g(self, r):
        return self.g_fn(np.asarray(r, dtype=float))

    def df(self, r):
        return self.df_fn(np.asarray(r, dtype=float))

    def dg(self, r):
        return self.dg_fn(np.asarray(r, dtype=float))


def constant_profile(f_value, g_value, r_max=np.inf):
    return AnalyticProfile(
        lambda r: np.full(np.shape(r), float(f_value)),
        lambda r: np.full(np.shape(r), float(g_value)),
        lambda r: np.zeros(np.shape(r)),
        lambda r: np.zeros(np.shape(r)),
        r_max,
    )


def smooth_test_profile():
    """f = tanh(r)^2, g = tanh(r)^3: smooth, vanishing at 0, tending to 1."""
    return AnalyticProfile(
        lambda r: np.tanh(r) ** 2,
        lambda r: np.tanh(r) ** 3,
        lambda r: 2 * np.tanh(r) / np.cosh(r) ** 2,
        lambda r: 3 * np.tanh(r) ** 2 / np.cosh(r) ** 2,
    )
