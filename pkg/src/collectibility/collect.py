"""Collectibility functionals and their maximization over separable bases.

A separable basis set is ``K`` local unitaries ``U^(I)``; its ``N`` product
vectors are ``chi_j = U^(0)[:, j] (x) ... (x) U^(K-1)[:, j]``.  The optimizer
parameterizes each local unitary with complex Givens rotations and runs a
multi-start Nelder-Mead search on the logarithm of the objective.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import NegativeRadicand, NotQubits, NotUnitary, ShapeMismatch, ValidationError
from .qcore import DensityMatrix, PureState, TensorShape, purity

FLOOR = _kernels.FLOOR
VERDICT_GUARD = 1e-8
UNITARY_TOL = 1e-9
_MAX_PASSES = 8
_XATOL = 1e-7
_STEP = 0.25  # initial simplex edge, radians


class Verdict(str, enum.Enum):
    ENTANGLED_DETECTED = "ENTANGLED_DETECTED"
    INCONCLUSIVE = "INCONCLUSIVE"


def decide(value: float, threshold: float | None, guard: float = VERDICT_GUARD) -> Verdict:
    if threshold is not None and value > threshold + guard:
        return Verdict.ENTANGLED_DETECTED
    return Verdict.INCONCLUSIVE


# --- local unitaries -------------------------------------------------------

def givens_unitary(params: np.ndarray, n: int) -> np.ndarray:
    """Unitary from ``n*n`` reals.

    The first ``n*(n-1)`` entries are (angle, phase) pairs for the rotations
    on coordinate pairs ``p < q`` in lexicographic order; the last ``n`` are
    row phases applied on the left.
    """
    u = np.diag(np.exp(1j * np.asarray(params[n * (n - 1):], dtype=float))).astype(complex)
    idx = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            theta, phi = params[idx], params[idx + 1]
            idx += 2
            c, s, e = math.cos(theta), math.sin(theta), complex(math.cos(phi), math.sin(phi))
            up = u[:, p].copy()
            u[:, p] = c * up + e * s * u[:, q]
            u[:, q] = -e.conjugate() * s * up + c * u[:, q]
    return u


def _product_columns(locals_: Sequence[np.ndarray]) -> np.ndarray:
    """D x N matrix whose column j is the tensor product of the local column j."""
    x = locals_[0]
    n = x.shape[1]
    for u in locals_[1:]:
        x = (x[:, None, :] * u[None, :, :]).reshape(-1, n)
    return x


@dataclass(frozen=True, eq=False)
class SeparableBasisSet:
    shape: TensorShape
    locals: tuple

    def __post_init__(self):
        locs = tuple(np.array(u, dtype=complex) for u in self.locals)
        if len(locs) != self.shape.k:
            raise ShapeMismatch(f"need {self.shape.k} local unitaries, got {len(locs)}")
        eye = np.eye(self.shape.n)
        for u in locs:
            if u.shape != (self.shape.n, self.shape.n):
                raise ShapeMismatch(f"local unitary must be {self.shape.n}x{self.shape.n}, got {u.shape}")
            err = np.max(np.abs(u.conj().T @ u - eye))
            if err > UNITARY_TOL:
                raise NotUnitary(f"|U^dagger U - I| = {err:.2e}")
            u.setflags(write=False)
        object.__setattr__(self, "locals", locs)

    @classmethod
    def computational(cls, shape: TensorShape) -> "SeparableBasisSet":
        return cls(shape, tuple(np.eye(shape.n) for _ in range(shape.k)))

    @classmethod
    def from_params(cls, params, shape: TensorShape) -> "SeparableBasisSet":
        m = shape.n**2
        return cls(shape, tuple(givens_unitary(params[i * m:(i + 1) * m], shape.n) for i in range(shape.k)))

    def vectors(self) -> np.ndarray:
        """The ``N`` product vectors as columns of a D x N matrix."""
        return _product_columns(self.locals)


@dataclass(frozen=True)
class GramMatrix2:
    """Overlaps of the two conditional vectors: ``G11``, ``G22`` and ``|G12|^2``."""

    g11: float
    g22: float
    g12_abs2: float

    def __post_init__(self):
        if min(self.g11, self.g22, self.g12_abs2) < 0:
            raise ValidationError("Gram entries must be nonnegative")

    @property
    def radicand(self) -> float:
        return self.g11 * self.g22 - self.g12_abs2


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 2000
    objective_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValidationError("restarts and max_iters must be >= 1")


@dataclass(frozen=True, eq=False)
class CollectReport:
    value: float
    basis: SeparableBasisSet
    restarts_converged: int
    verdict: Verdict
    threshold: float | None = None
    bound: float | None = None
    extra: dict = field(default_factory=dict)


# --- functionals -----------------------------------------------------------

def _check_shape(state_shape: TensorShape, basis: SeparableBasisSet):
    if state_shape != basis.shape:
        raise ShapeMismatch(f"state shape {state_shape} does not match basis shape {basis.shape}")


def _log_pure(amps: np.ndarray, x: np.ndarray) -> float:
    a = np.abs(x.conj().T @ amps)
    if a.min() < FLOOR:
        return -math.inf
    return 2.0 * float(np.sum(np.log(a)))


def _log_mixed(mat: np.ndarray, x: np.ndarray) -> float:
    a = np.abs(x.conj().T @ mat @ x)
    if a.min() < FLOOR:
        return -math.inf
    return float(np.sum(np.log(a))) / x.shape[1]


def product_functional_pure(psi: PureState, basis: SeparableBasisSet) -> float:
    """``prod_j |<psi|chi_j>|^2`` for the product vectors of ``basis``."""
    _check_shape(psi.shape, basis)
    return math.exp(_log_pure(psi.amplitudes, basis.vectors()))


def product_functional_mixed(rho: DensityMatrix, basis: SeparableBasisSet) -> float:
    """``(prod_{j,k} <chi_j|rho|chi_k>)^(1/N)``.

    For Hermitian ``rho`` the product equals
    ``prod_j rho_jj * prod_{j<k} |rho_jk|^2``, which is what is evaluated.
    """
    _check_shape(rho.shape, basis)
    return math.exp(_log_mixed(rho.mat, basis.vectors()))


# --- optimizer ---------------------------------------------------------------

def _threads() -> int:
    try:
        return max(1, int(os.environ.get("COLLECT_THREADS", "1")))
    except ValueError:
        return 1


def _multistart(kind: int, data: np.ndarray, k: int, n: int, nparams: int, cfg: OptimizerConfig):
    """Maximize a compiled objective from ``cfg.restarts`` seeded starts.

    Each restart re-seeds the simplex around its incumbent until a pass stops
    improving.  Returns ``(best_x, best_log_value, n_converged)``; ties go to
    the lowest restart index.
    """
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    data = np.array(data, dtype=np.complex128, order="C")  # writable: one compiled signature

    def one(i):
        x = np.random.default_rng(seeds[i]).uniform(0.0, 2 * np.pi, nparams)
        prev = math.inf
        converged = False
        for _ in range(_MAX_PASSES):
            x, f, ok, _ = _kernels.nelder_mead(kind, x, data, k, n, cfg.max_iters, _XATOL,
                                               cfg.objective_tol, _STEP)
            if prev - f <= cfg.objective_tol:
                converged = bool(ok)
                break
            prev = f
        return -f, x, converged

    workers = min(_threads(), cfg.restarts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(cfg.restarts)))
    else:
        results = [one(i) for i in range(cfg.restarts)]

    best_val, best_x = -math.inf, results[0][1]
    for val, x, _ in results:
        if val > best_val:
            best_val, best_x = val, x
    return best_x, best_val, sum(r[2] for r in results)


def _to_value(logv: float) -> float:
    return 0.0 if logv <= -_kernels.PENALTY / 2 else math.exp(logv)


def collectibility_pure_max(psi: PureState, cfg: OptimizerConfig | None = None) -> CollectReport:
    """Maximal pure-state collectibility and the separability verdict.

    The verdict compares against ``N**(-N*K)``, the largest value a product
    state can reach.  ``value`` is a lower bound on the true maximum.
    """
    cfg = cfg or OptimizerConfig()
    k, n = psi.k, psi.n
    amps = psi.amplitudes
    x, logv, nconv = _multistart(_kernels.PURE, amps[:, None], k, n, k * n * n, cfg)
    value = _to_value(logv)
    threshold = float(n) ** (-n * k)
    return CollectReport(
        value=value,
        basis=SeparableBasisSet.from_params(x, psi.shape),
        restarts_converged=nconv,
        verdict=decide(value, threshold),
        threshold=threshold,
        bound=float(n) ** (-n),
    )


def collectibility_mixed_max(rho: DensityMatrix, cfg: OptimizerConfig | None = None) -> CollectReport:
    """Maximal mixed-state collectibility.

    Checked against the PPT bound (two parties, or qubits with any K); a
    detection therefore certifies a non-PPT state.  ``bound`` holds the
    purity-dependent upper limit valid for every state.
    """
    from .bounds import BoundQuery, ppt_bound, r_bound  # bounds does not import collect

    cfg = cfg or OptimizerConfig()
    k, n = rho.k, rho.n
    mat = rho.mat
    x, logv, nconv = _multistart(_kernels.MIXED, mat, k, n, k * n * n, cfg)
    value = _to_value(logv)
    try:
        threshold = ppt_bound(rho.shape)
    except ValidationError:
        threshold = None
    p = min(max(purity(rho), 1.0 / rho.d), 1.0)
    bound = r_bound(BoundQuery(rho.d, n, 1.0, p)).r_n
    return CollectReport(
        value=value,
        basis=SeparableBasisSet.from_params(x, rho.shape),
        restarts_converged=nconv,
        verdict=decide(value, threshold),
        threshold=threshold,
        bound=bound,
    )


# --- K-qubit collectibility from the Gram matrix ------------------------------

def collectibility_Ya(gram: GramMatrix2, tol: float = 1e-12) -> float:
    """``(sqrt(G11 G22) + sqrt(G11 G22 - |G12|^2))^2 / 4``.

    A radicand in ``[-tol, 0)`` is treated as zero; below that the Gram data
    are inconsistent and :class:`NegativeRadicand` is raised.
    """
    rad = gram.radicand
    if rad < -tol:
        raise NegativeRadicand(f"G11*G22 - |G12|^2 = {rad:.3e}")
    return 0.25 * (math.sqrt(gram.g11 * gram.g22) + math.sqrt(max(rad, 0.0))) ** 2


def _downstream_locals(psi: PureState, downstream) -> tuple:
    locs = downstream.locals if isinstance(downstream, SeparableBasisSet) else tuple(downstream)
    if len(locs) != psi.k - 1:
        raise ShapeMismatch(f"need {psi.k - 1} downstream unitaries, got {len(locs)}")
    return tuple(np.asarray(u, dtype=complex) for u in locs)


def gram_from_pure(psi: PureState, downstream) -> GramMatrix2:
    """Gram matrix of ``phi_j = (<a_j^1| (x) ... (x) <a_j^{K-1}|) psi``.

    ``downstream`` holds the local unitaries of subsystems 1..K-1, either as
    a :class:`SeparableBasisSet` with ``K-1`` factors or a plain sequence.
    """
    if psi.n != 2:
        raise NotQubits(f"Gram construction needs qubits, got N={psi.n}")
    if psi.k < 2:
        raise ShapeMismatch("need at least two subsystems")
    locs = _downstream_locals(psi, downstream)
    y = _product_columns(locs)  # 2^(K-1) x 2
    phis = psi.amplitudes.reshape(2, -1) @ y.conj()  # column j is phi_j
    g = phis.conj().T @ phis
    return GramMatrix2(float(g[0, 0].real), float(g[1, 1].real), float(abs(g[0, 1]) ** 2))


def collectibility_Ya_max(psi: PureState, cfg: OptimizerConfig | None = None) -> CollectReport:
    """Y_a additionally maximized over the downstream bases.

    The returned basis carries an identity placeholder for subsystem 0,
    whose optimum is already taken in closed form.
    """
    if psi.n != 2:
        raise NotQubits(f"Y_a needs qubits, got N={psi.n}")
    if psi.k < 2:
        raise ShapeMismatch("need at least two subsystems")
    cfg = cfg or OptimizerConfig()
    k = psi.k
    x, logv, nconv = _multistart(_kernels.YA, psi.amplitudes[:, None], k, 2, 4 * (k - 1), cfg)
    value = _to_value(logv)
    locs = [np.eye(2)] + [givens_unitary(x[4 * i:4 * (i + 1)], 2) for i in range(k - 1)]
    threshold = 2.0 ** (-2 * k)
    return CollectReport(
        value=value,
        basis=SeparableBasisSet(psi.shape, tuple(locs)),
        restarts_converged=nconv,
        verdict=decide(value, threshold),
        threshold=threshold,
        bound=0.25,
    )
