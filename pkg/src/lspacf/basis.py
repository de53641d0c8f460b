"""
Orthonormal sieve bases on [0, 1].

Three families are available:

* ``legendre``  - alpha_k(t) = sqrt(2k-1) P_{k-1}(2t-1), via the three-term recurrence
* ``fourier``   - 1, sqrt(2) cos(2 pi t), sqrt(2) sin(2 pi t), sqrt(2) cos(4 pi t), ...
* ``chebyshev`` - T_{k-1}(2t-1) orthonormalized against Lebesgue measure on a
  fixed 10,001-point grid (composite Simpson weights)

The first function is always the constant 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, InvalidArgumentError

QUAD_POINTS = 10_001


class BasisFamily(str, enum.Enum):
    LEGENDRE = "legendre"
    FOURIER = "fourier"
    CHEBYSHEV = "chebyshev"


def quadrature_weights(npts: int = QUAD_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and composite-Simpson weights on [0, 1] (``npts`` must be odd).

    The trapezoid rule on the same grid is off by about 1e-4 for products of
    degree-29 Legendre polynomials; Simpson is exact to rounding there.
    """
    if npts < 3 or npts % 2 == 0:
        raise InvalidArgumentError("Simpson quadrature needs an odd number of points >= 3")
    t = np.linspace(0.0, 1.0, npts)
    h = 1.0 / (npts - 1)
    w = np.full(npts, 2.0 * h / 3.0)
    w[1::2] = 4.0 * h / 3.0
    w[0] = w[-1] = h / 3.0
    return t, w


def _legendre(t: np.ndarray, c: int) -> np.ndarray:
    u = 2.0 * t - 1.0
    out = np.empty((t.size, c))
    p_prev = np.ones_like(u)
    out[:, 0] = 1.0
    if c == 1:
        return out
    p = u.copy()
    out[:, 1] = np.sqrt(3.0) * p
    for k in range(2, c):
        # (k) P_k = (2k-1) u P_{k-1} - (k-1) P_{k-2}
        p_prev, p = p, ((2 * k - 1) * u * p - (k - 1) * p_prev) / k
        out[:, k] = np.sqrt(2.0 * k + 1.0) * p
    return out


def _fourier(t: np.ndarray, c: int) -> np.ndarray:
    out = np.empty((t.size, c))
    out[:, 0] = 1.0
    for idx in range(1, c):
        freq = (idx + 1) // 2
        arg = 2.0 * np.pi * freq * t
        out[:, idx] = np.sqrt(2.0) * (np.cos(arg) if idx % 2 == 1 else np.sin(arg))
    return out


def _chebyshev_raw(t: np.ndarray, c: int) -> np.ndarray:
    u = 2.0 * t - 1.0
    out = np.empty((t.size, c))
    out[:, 0] = 1.0
    if c > 1:
        out[:, 1] = u
    for k in range(2, c):
        out[:, k] = 2.0 * u * out[:, k - 1] - out[:, k - 2]
    return out


@lru_cache(maxsize=64)
def _chebyshev_transform(c: int) -> np.ndarray:
    """Upper-triangular map from raw Chebyshev values to orthonormal ones.

    Householder QR of the weighted Vandermonde matrix; equivalent to
    Gram-Schmidt on the quadrature grid but better conditioned.
    """
    t, w = quadrature_weights()
    v = _chebyshev_raw(t, c) * np.sqrt(w)[:, None]
    _, r = np.linalg.qr(v)
    # Make the diagonal positive so alpha_1 is +1 rather than -1.
    r = r * np.sign(np.diag(r))[:, None]
    inv = np.linalg.solve(r, np.eye(c))
    inv.setflags(write=False)
    return inv


@dataclass(frozen=True)
class BasisSet:
    """The first ``c`` functions of an orthonormal family.

    Immutable; safe to share between threads.
    """

    family: BasisFamily
    c: int
    _transform: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def exact_orthonormal(self) -> bool:
        """True when L2[0,1] orthonormality holds in closed form."""
        return self.family is not BasisFamily.CHEBYSHEV

    def __call__(self, t) -> np.ndarray:
        """Evaluate B(t). Scalar ``t`` gives shape (c,), an array gives (len(t), c)."""
        scalar = np.ndim(t) == 0
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(tt < 0.0) or np.any(tt > 1.0) or not np.all(np.isfinite(tt)):
            raise DomainError("basis functions are defined on [0, 1] only")
        if self.family is BasisFamily.LEGENDRE:
            out = _legendre(tt, self.c)
        elif self.family is BasisFamily.FOURIER:
            out = _fourier(tt, self.c)
        else:
            out = _chebyshev_raw(tt, self.c) @ self._transform
        return out[0] if scalar else out


def make_basis(family: BasisFamily | str, c: int) -> BasisSet:
    """Build the basis set of size ``c`` for ``family``."""
    try:
        family = BasisFamily(family)
    except ValueError:
        raise InvalidArgumentError(f"unknown basis family {family!r}") from None
    if int(c) != c or c < 1:
        raise InvalidArgumentError(f"number of basis functions must be >= 1, got {c}")
    c = int(c)
    transform = _chebyshev_transform(c) if family is BasisFamily.CHEBYSHEV else None
    return BasisSet(family, c, transform)


def eval_basis(b: BasisSet, t) -> np.ndarray:
    return b(t)


def basis_sup_norms(b: BasisSet, grid_size: int = QUAD_POINTS) -> tuple[float, float]:
    """Grid approximations of (xi_c, zeta_c).

    xi_c is the largest absolute value of any single basis function and
    zeta_c the largest Euclidean norm of the vector B(t).
    """
    if grid_size < 2:
        raise InvalidArgumentError("grid_size must be at least 2")
    vals = b(np.linspace(0.0, 1.0, grid_size))
    xi = float(np.max(np.abs(vals)))
    zeta = float(np.max(np.linalg.norm(vals, axis=1)))
    return xi, zeta


def gram_matrix(b: BasisSet, npts: int = QUAD_POINTS) -> np.ndarray:
    """Quadrature Gram matrix G_jk = int alpha_j alpha_k dt (Simpson rule)."""
    t, w = quadrature_weights(npts)
    vals = b(t)
    return vals.T @ (vals * w[:, None])
