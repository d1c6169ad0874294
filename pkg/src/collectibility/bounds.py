"""Purity-constrained bound on products of matrix elements, PPT bounds and
critical purities.

For a Hermitian ``D x D`` matrix with fixed trace and fixed ``Tr(rho^2)`` the
product of the entries of its leading ``N x N`` block satisfies
``(prod_{i,j<N} rho_ij)^(1/N) <= r_N``; :func:`r_bound` evaluates ``r_N`` and
:func:`maximizer_matrix` builds a matrix attaining it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import NoRoot, ShapeMismatch, Unsupported, ValidationError, XiOutOfRange
from .qcore import TensorShape

XI_SLACK = 1e-12


@dataclass(frozen=True)
class BoundQuery:
    d: int
    n: int
    trace: float
    purity: float

    def __post_init__(self):
        if self.n < 1 or self.n > self.d:
            raise ValidationError(f"need 1 <= N <= D, got N={self.n}, D={self.d}")
        if self.trace <= 0:
            raise ValidationError("trace must be positive")
        xi = self.xi
        if xi < 1.0 / self.d - XI_SLACK or xi > 1.0 + XI_SLACK:
            raise XiOutOfRange(f"xi = {xi:.12g} outside [1/{self.d}, 1]")

    @property
    def xi(self) -> float:
        return self.purity / self.trace**2

    @property
    def d_dual(self) -> int:
        return self.d - self.n


@dataclass(frozen=True)
class BoundResult:
    phi: float
    r_n: float


def _rho_c(q: BoundQuery) -> float:
    """Smaller root of ``D*Dt*c^2 - (D+Dt-1)*c + 1 - xi = 0``."""
    d, dt = q.d, q.d_dual
    xi = min(max(q.xi, 1.0 / d), 1.0)
    s = d + dt - 1
    if dt == 0:
        return (1.0 - xi) / s
    disc = max(s * s + 4.0 * d * dt * (xi - 1.0), 0.0)
    # rationalized minus branch, stable when xi -> 1
    return 2.0 * (1.0 - xi) / (s + math.sqrt(disc))


def r_bound(q: BoundQuery) -> BoundResult:
    """``r_N = (Tr/N)^N (1 - D Phi)^((N-1)/2) (1 - Dt Phi)^((N+1)/2)``, ``Dt = D - N``.

    >>> r_bound(BoundQuery(4, 2, 1.0, 1.0)).r_n
    0.25
    """
    phi = _rho_c(q)
    n = q.n
    a = max(1.0 - q.d * phi, 0.0)
    b = max(1.0 - q.d_dual * phi, 0.0)
    r = (q.trace / n) ** n * a ** ((n - 1) / 2) * b ** ((n + 1) / 2)
    return BoundResult(phi=phi, r_n=r)


@dataclass(frozen=True, eq=False)
class MaximizerMatrix:
    rho_a: float
    rho_b: float
    rho_c: float
    matrix: np.ndarray


def maximizer_matrix(q: BoundQuery, phases=None) -> MaximizerMatrix:
    """Hermitian matrix saturating :func:`r_bound`.

    ``phases`` optionally gives an ``N x N`` array whose strict upper triangle
    sets the off-diagonal phases of the leading block; the lower triangle is
    filled by Hermiticity.
    """
    n, d, tr = q.n, q.d, q.trace
    c = _rho_c(q)
    a = (1.0 - q.d_dual * c) / n
    b = math.sqrt(max(1.0 - d * c, 0.0) * max(1.0 - q.d_dual * c, 0.0)) / n
    block = np.full((n, n), b, dtype=complex)
    if phases is not None:
        ph = np.asarray(phases, dtype=float)
        if ph.shape != (n, n):
            raise ShapeMismatch(f"phases must be {n}x{n}")
        up = np.triu(ph, 1)
        block = block * np.exp(1j * (up - up.T))
    np.fill_diagonal(block, a)
    m = np.zeros((d, d), dtype=complex)
    m[:n, :n] = block
    idx = np.arange(n, d)
    m[idx, idx] = c
    return MaximizerMatrix(a, b, c, tr * m)


def block_product(mat: np.ndarray, n: int) -> float:
    """``(prod_{i,j<n} mat_ij)^(1/n)`` of a Hermitian matrix, as a real number."""
    blk = np.abs(np.asarray(mat)[:n, :n])
    if blk.min() < 1e-300:
        return 0.0
    return math.exp(float(np.sum(np.log(blk))) / n)


def _check_supported(shape: TensorShape):
    if shape.k != 2 and shape.n != 2:
        raise Unsupported(f"PPT bounds cover K=2 or N=2 only, got K={shape.k}, N={shape.n}")


def ppt_bound(shape: TensorShape) -> float:
    """Largest mixed-state collectibility of a PPT state.

    ``N**(-2N)`` for two parties, ``1/(16 (2**(K-1) - 1))`` for K qubits that
    are PPT across every bipartition.
    """
    _check_supported(shape)
    if shape.k == 2:
        return float(shape.n) ** (-2 * shape.n)
    return 1.0 / (16.0 * (2 ** (shape.k - 1) - 1))


def purity_floors(shape: TensorShape) -> tuple[float, float]:
    """``(P_min, P_PPT)``: minimal purity, and the purity below which all states are PPT."""
    return 1.0 / shape.d, 1.0 / (shape.d - 1)


def critical_purity(shape: TensorShape, xtol: float = 1e-10) -> float:
    """Purity at which the general bound ``r_N`` falls to :func:`ppt_bound`."""
    target = ppt_bound(shape)
    d, n = shape.d, shape.n

    def gap(p):
        return r_bound(BoundQuery(d, n, 1.0, p)).r_n - target

    lo, hi = 1.0 / d, 1.0
    if gap(hi) < 0 or gap(lo) > 0:
        raise NoRoot(f"r_N never reaches {target} on [{lo}, {hi}]")
    return float(bisect(gap, lo, hi, xtol=xtol))
