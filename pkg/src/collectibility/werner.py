"""Generalized Werner states: ``alpha (U x V)|psi_lam><psi_lam|(U x V)^dagger + (1-alpha) I/N^2``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import BadLambda, BadParams, NotBipartite
from .qcore import DensityMatrix, PureState, TensorShape, _pt_array, negativity, validate_density

LAMBDA_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WernerSpec:
    n: int
    lambdas: np.ndarray
    alpha: float
    local_u: np.ndarray | None = None
    local_v: np.ndarray | None = None

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float).ravel()
        if lam.size != self.n:
            raise BadLambda(f"need {self.n} Schmidt weights, got {lam.size}")
        if np.any(lam < 0) or abs(lam.sum() - 1.0) > LAMBDA_TOL:
            raise BadLambda(f"Schmidt weights must be nonnegative and sum to 1, got {lam}")
        if not 0.0 <= self.alpha <= 1.0:
            raise BadLambda(f"alpha must lie in [0, 1], got {self.alpha}")
        object.__setattr__(self, "lambdas", lam)


def schmidt_vector_state(lambdas) -> np.ndarray:
    """Amplitudes of ``sum_i sqrt(lam_i) |ii>``."""
    lam = np.asarray(lambdas, dtype=float)
    n = lam.size
    psi = np.zeros(n * n)
    psi[np.arange(n) * (n + 1)] = np.sqrt(lam)
    return psi


def werner_state(spec: WernerSpec) -> DensityMatrix:
    n = spec.n
    psi = schmidt_vector_state(spec.lambdas).astype(complex)
    u = np.eye(n) if spec.local_u is None else np.asarray(spec.local_u)
    v = np.eye(n) if spec.local_v is None else np.asarray(spec.local_v)
    psi = np.kron(u, v) @ psi
    mat = spec.alpha * np.outer(psi, psi.conj()) + (1.0 - spec.alpha) / n**2 * np.eye(n * n)
    return validate_density(mat, TensorShape(2, n))


def pure_collectibility(lambdas) -> float:
    """``y(lam) = (sum_i sqrt(lam_i) / N)^(2N)``."""
    lam = np.asarray(lambdas, dtype=float)
    n = lam.size
    return float((np.sum(np.sqrt(lam)) / n) ** (2 * n))


def werner_collectibility(spec: WernerSpec) -> float:
    n, a = spec.n, spec.alpha
    y = pure_collectibility(spec.lambdas)
    return a ** (n - 1) * y * (a + (1.0 - a) / n**2 * y ** (-1.0 / n))


def renyi_half(lambdas) -> float:
    """Renyi entropy of order 1/2, ``2 log(sum_i sqrt(lam_i))``."""
    return 2.0 * math.log(float(np.sum(np.sqrt(np.asarray(lambdas, dtype=float)))))


@dataclass(frozen=True)
class WernerThresholds:
    omega: float
    alpha_t: float
    alpha_c: float


def thresholds_two_qubit(lam: float) -> WernerThresholds:
    """Separability (``alpha_t``) and detection (``alpha_c``) thresholds for N=2.

    Below ``alpha_t`` the two-qubit state is separable; above ``alpha_c``
    its collectibility exceeds 1/16.
    """
    if not 0.0 <= lam <= 1.0:
        raise BadLambda(f"lambda must lie in [0, 1], got {lam}")
    w = math.sqrt(lam * (1.0 - lam))
    alpha_t = 1.0 / (1.0 + 4.0 * w)
    alpha_c = 2.0 / (1.0 + 2.0 * w + math.sqrt((1.0 + 2.0 * w) * (1.0 + 10.0 * w)))
    return WernerThresholds(w, alpha_t, alpha_c)


def alpha_c_numeric(lam: float, xtol: float = 1e-14) -> float:
    """Bisection for the alpha where :func:`werner_collectibility` reaches 1/16."""

    def gap(a):
        return werner_collectibility(WernerSpec(2, [lam, 1.0 - lam], a)) - 1.0 / 16

    if gap(1.0) <= 0:
        return 1.0
    return float(bisect(gap, 0.0, 1.0, xtol=xtol))


def alpha_t_numeric(lam: float, xtol: float = 1e-14) -> float:
    """Bisection for the alpha where the partial transpose gets a negative eigenvalue."""

    def min_eig(a):
        rho = werner_state(WernerSpec(2, [lam, 1.0 - lam], a))
        return float(np.linalg.eigvalsh(_pt_array(rho.mat, 2, 2, [1]))[0])

    if min_eig(1.0) >= 0:
        return 1.0
    return float(bisect(min_eig, 0.0, 1.0, xtol=xtol))


def negativity_collectibility(psi: PureState) -> float:
    """Pure-state collectibility written through the negativity: ``(1+(N-1)Neg)^N / N^(2N)``."""
    if psi.k != 2:
        raise NotBipartite(f"needs K=2, got K={psi.k}")
    n = psi.n
    return (1.0 + (n - 1) * negativity(psi)) ** n / float(n) ** (2 * n)


def schur_theta(x, b: float, q: float, j: int, k: int) -> float:
    """``(x_j - x_k)(dh/dx_j - dh/dx_k)`` for ``h(x) = prod_i (x_i^2 + b) x_i^q``.

    Evaluated from the factored form, which is manifestly ``<= 0`` for
    ``b >= 0``, ``q >= 1``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or b < 0 or q < 1 or j == k or not (0 <= j < x.size and 0 <= k < x.size):
        raise BadParams("need x >= 0, b >= 0, q >= 1 and distinct valid indices j, k")
    xj, xk = x[j], x[k]
    rest = np.delete(x, [j, k])
    others = float(np.prod((rest**2 + b) * rest**q))
    b1, b2 = q + 2.0, b * (q - 1.0)
    bracket = b1 * xj**2 * xk**2 + b2 * (xk**2 + xj**2) + b * (xk - xj) ** 2 + q * b**2
    return -((xj - xk) ** 2) * (xj * xk) ** (q - 1) * others * bracket


def saturating_basis(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Local unitaries reaching the Werner-state maximum: DFT and its conjugate."""
    if n < 2:
        raise BadParams("N must be >= 2")
    idx = np.arange(n)
    u = np.exp(2j * np.pi * np.outer(idx, idx) / n) / math.sqrt(n)
    return u, u.conj()


def saturation_residual(u: np.ndarray, v: np.ndarray, lambdas) -> float:
    """``max_i | |sum_n u_in v_in sqrt(lam_n)| - sum_n sqrt(lam_n) / N |``."""
    s = np.sqrt(np.asarray(lambdas, dtype=float))
    lhs = np.abs((u * v) @ s)
    return float(np.max(np.abs(lhs - s.sum() / s.size)))
