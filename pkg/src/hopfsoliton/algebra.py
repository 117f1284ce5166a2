"""Pauli / su(2) algebra, complex coordinates on R^4 and small form containers.

Index conventions: adjoint indices ``a`` and spacetime indices ``mu`` are
0-based in every array. The Pauli identity checks take 1-based indices so
they can be called with the labels used in the physics literature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def _levi_civita(n):
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


EPS3 = _levi_civita(3)
EPS4 = _levi_civita(4)

# x^T M^a x = zbar_i sigma^a_ij z_j  with z1 = x1 + i x2, z2 = x3 + i x4
HOPF_QUADRATIC = np.array(
    [
        [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]],
        [[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]],
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]],
    ],
    dtype=float,
)

# Complex structure: multiplication by i acting on (x1, x2, x3, x4).
COMPLEX_STRUCTURE = np.array(
    [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float
)

# Real-index components from complex-index ones, basis order (z1, z2, zbar1, zbar2):
#   V_mu = sum_alpha TO_REAL[mu, alpha] V_alpha
# for covariant tensors (e_x = d_z + d_zbar, e_y = i (d_z - d_zbar)).
TO_REAL = np.array(
    [
        [1, 0, 1, 0],
        [1j, 0, -1j, 0],
        [0, 1, 0, 1],
        [0, 1j, 0, -1j],
    ],
    dtype=complex,
)
TO_COMPLEX = np.linalg.inv(TO_REAL)


@dataclass(frozen=True)
class Point4:
    x1: float
    x2: float
    x3: float
    x4: float

    @property
    def r(self):
        return float(np.sqrt(self.x1**2 + self.x2**2 + self.x3**2 + self.x4**2))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x1, self.x2, self.x3, self.x4], dtype=dtype)

    @classmethod
    def from_array(cls, x):
        x1, x2, x3, x4 = (float(v) for v in np.asarray(x, dtype=float).reshape(4))
        return cls(x1, x2, x3, x4)

    def to_complex(self):
        return ComplexPair.from_point4(self)


@dataclass(frozen=True)
class ComplexPair:
    """(z1, z2) = (x1 + i x2, x3 + i x4)."""

    z1: complex
    z2: complex

    @classmethod
    def from_point4(cls, x):
        x = Point4.from_array(x) if not isinstance(x, Point4) else x
        return cls(complex(x.x1, x.x2), complex(x.x3, x.x4))

    def to_point4(self):
        return Point4(self.z1.real, self.z1.imag, self.z2.real, self.z2.imag)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.z1, self.z2], dtype=dtype or complex)


@dataclass(frozen=True)
class S2Point:
    y1: float
    y2: float
    y3: float

    def __array__(self, dtype=None, copy=None):
        return np.array([self.y1, self.y2, self.y3], dtype=dtype)

    @classmethod
    def from_array(cls, y):
        y1, y2, y3 = (float(v) for v in np.asarray(y, dtype=float).reshape(3))
        return cls(y1, y2, y3)


def to_complex(x):
    """Map real points (..., 4) to complex pairs (..., 2)."""
    x = np.asarray(x, dtype=float)
    return x[..., 0::2] + 1j * x[..., 1::2]


def to_real(z):
    """Inverse of :func:`to_complex`."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (4,))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def adjoint_dot(u, v):
    return np.einsum("...a,...a->...", u, v)


def adjoint_cross(u, v):
    """eps^{abc} u^b v^c, broadcasting over leading axes (complex allowed)."""
    return np.einsum("abc,...b,...c->...a", EPS3, u, v)


class OneForm4:
    """Components A_mu of a 1-form on R^4 (or a stack of them)."""

    def __init__(self, components):
        self.components = np.asarray(components, dtype=float)
        if self.components.shape[-1] != 4:
            raise ValueError("OneForm4 needs 4 components on the last axis")

    def __getitem__(self, mu):
        return self.components[..., mu]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)

    def pullback(self, jac):
        """Components in chart coordinates, ``jac[..., mu, k] = dx_mu/du_k``."""
        return np.einsum("...m,...mk->...k", self.components, jac)


class TwoForm4:
    """Antisymmetric F_mu,nu; only the upper triangle is stored.

    ``F[mu, nu]`` for ``mu > nu`` reads back the negated stored entry, so
    antisymmetry holds by construction.
    """

    _PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

    def __init__(self, upper):
        upper = np.asarray(upper, dtype=float)
        if upper.shape[-1] != 6:
            raise ValueError("TwoForm4 stores the 6 components (12,13,14,23,24,34)")
        self._upper = upper

    @classmethod
    def from_components(cls, f12=0.0, f13=0.0, f14=0.0, f23=0.0, f24=0.0, f34=0.0):
        return cls(np.stack(np.broadcast_arrays(f12, f13, f14, f23, f24, f34), axis=-1))

    @classmethod
    def from_matrix(cls, mat, atol=1e-12):
        mat = np.asarray(mat, dtype=float)
        if not np.allclose(mat, -np.swapaxes(mat, -1, -2), atol=atol, rtol=0):
            raise ValueError("matrix is not antisymmetric")
        return cls(np.stack([mat[..., i, j] for i, j in cls._PAIRS], axis=-1))

    def __getitem__(self, index):
        mu, nu = index
        if mu == nu:
            return np.zeros(self._upper.shape[:-1]) if self._upper.ndim > 1 else 0.0
        if mu < nu:
            return self._upper[..., self._PAIRS.index((mu, nu))]
        return -self._upper[..., self._PAIRS.index((nu, mu))]

    @property
    def matrix(self):
        mat = np.zeros(self._upper.shape[:-1] + (4, 4))
        for k, (i, j) in enumerate(self._PAIRS):
            mat[..., i, j] = self._upper[..., k]
            mat[..., j, i] = -self._upper[..., k]
        return mat

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def bilinear(self, u, v):
        return np.einsum("...m,...mn,...n->...", u, self.matrix, v)

    def pullback(self, jac):
        return np.einsum("...mk,...mn,...nl->...kl", jac, self.matrix, jac)


def pauli_completeness(i, j, k, l):
    """Both sides of  sum_a s^a_ij s^a_kl = 2 d_il d_jk - d_ij d_kl  (1-based)."""
    i, j, k, l = i - 1, j - 1, k - 1, l - 1
    lhs = np.sum(PAULI[:, i, j] * PAULI[:, k, l])
    rhs = 2.0 * (i == l) * (j == k) - 1.0 * (i == j) * (k == l)
    return lhs.real if abs(lhs.imag) == 0 else lhs, float(rhs)


def pauli_epsilon_product(a, i, j, k, l):
    """Both sides of  eps^abc s^b_ij s^c_kl = i (s^a_il d_jk - s^a_kj d_il)  (1-based)."""
    a, i, j, k, l = a - 1, i - 1, j - 1, k - 1, l - 1
    lhs = np.einsum("bc,b,c->", EPS3[a], PAULI[:, i, j], PAULI[:, k, l])
    rhs = 1j * (PAULI[a, i, l] * (j == k) - PAULI[a, k, j] * (i == l))
    return complex(lhs), complex(rhs)


def wedge_density(A, F):
    """eps_{mu nu lambda} A_mu F_{nu lambda} for 3-component forms.

    ``A`` has shape (..., 3) and ``F`` (..., 3, 3) in the intrinsic
    coordinates of a 3-surface.
    """
    return np.einsum("mnl,...m,...nl->...", EPS3, A, F)
