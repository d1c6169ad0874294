"""Finite-dimensional quantum states on ``K`` subsystems of local dimension ``N``.

Conventions
-----------
- Subsystems are numbered from 0, leftmost tensor factor first.
- Composite indices are row-major: ``i = sum_k i_k * N**(K-1-k)``, i.e. the
  order produced by ``np.kron``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    BadSubset,
    HermiticityViolation,
    NegativeEigenvalue,
    NormViolation,
    NotBipartite,
    ShapeMismatch,
    TraceViolation,
    ValidationError,
)

DEFAULT_TOL = 1e-9
MAX_DIM = 4096


@dataclass(frozen=True)
class TensorShape:
    k: int
    n: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValidationError(f"number of subsystems must be >= 1, got {self.k}")
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError(f"local dimension must be >= 2, got {self.n}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "n", int(self.n))
        if self.d > MAX_DIM:
            raise ValidationError(f"total dimension {self.d} exceeds {MAX_DIM}")

    @property
    def d(self) -> int:
        return self.n**self.k


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density operator. Build through :func:`validate_density`."""

    shape: TensorShape
    mat: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "mat", _frozen(self.mat))

    @property
    def k(self) -> int:
        return self.shape.k

    @property
    def n(self) -> int:
        return self.shape.n

    @property
    def d(self) -> int:
        return self.shape.d

    @classmethod
    def from_pure(cls, psi: "PureState") -> "DensityMatrix":
        v = psi.amplitudes
        return cls(psi.shape, np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class PureState:
    shape: TensorShape
    amplitudes: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amps.size != self.shape.d:
            raise ShapeMismatch(f"expected {self.shape.d} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > self.tol:
            raise NormViolation(f"state norm {norm:.12g} differs from 1")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_array(cls, amplitudes, k: int, n: int, normalize: bool = False) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(TensorShape(k, n), amps)

    @property
    def k(self) -> int:
        return self.shape.k

    @property
    def n(self) -> int:
        return self.shape.n

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.n,) * self.k)


@dataclass(frozen=True, eq=False)
class SchmidtData:
    lambdas: np.ndarray
    left: np.ndarray
    right: np.ndarray


def validate_density(mat, shape: TensorShape, tol: float = DEFAULT_TOL, trace: float = 1.0) -> DensityMatrix:
    """Check that ``mat`` is a density matrix on ``shape`` and wrap it.

    Eigenvalues in ``[-tol, 0)`` are clipped to zero and the result is
    rescaled to the requested trace; anything further out raises.
    """
    m = np.asarray(mat, dtype=complex)
    d = shape.d
    if m.shape != (d, d):
        raise ShapeMismatch(f"expected a {d}x{d} matrix, got {m.shape}")
    herm_err = np.max(np.abs(m - m.conj().T)) if d else 0.0
    if herm_err > tol:
        raise HermiticityViolation(f"max |M - M^dagger| = {herm_err:.3e}")
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if abs(tr - trace) > tol:
        raise TraceViolation(f"trace {tr:.12g} differs from {trace}")
    evals, evecs = np.linalg.eigh(m)
    if evals[0] < -tol:
        raise NegativeEigenvalue(evals[0], tol)
    if evals[0] < 0:
        evals = np.clip(evals, 0.0, None)
        m = (evecs * evals) @ evecs.conj().T
        m *= trace / np.trace(m).real
    return DensityMatrix(shape, m, tol)


def _pt_array(mat: np.ndarray, k: int, n: int, subset: Iterable[int]) -> np.ndarray:
    t = np.asarray(mat).reshape((n,) * (2 * k))
    axes = list(range(2 * k))
    for s in subset:
        axes[s], axes[k + s] = axes[k + s], axes[s]
    return t.transpose(axes).reshape(n**k, n**k)


def partial_transpose(rho: DensityMatrix, subset) -> np.ndarray:
    """Transpose the indices of the subsystems in ``subset`` (0-based).

    >>> rho = validate_density(np.eye(4) / 4, TensorShape(2, 2))
    >>> np.allclose(partial_transpose(rho, {0}), np.eye(4) / 4)
    True
    """
    sub = {int(subset)} if np.isscalar(subset) else {int(s) for s in subset}
    if not sub or len(sub) >= rho.k or min(sub) < 0 or max(sub) >= rho.k:
        raise BadSubset(f"subset must be a nonempty proper subset of 0..{rho.k - 1}, got {sorted(sub)}")
    return _pt_array(rho.mat, rho.k, rho.n, sorted(sub))


def purity(rho: DensityMatrix) -> float:
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho.mat) ** 2))


def schmidt(psi: PureState) -> SchmidtData:
    """Schmidt coefficients (squared singular values) of a bipartite pure state."""
    if psi.k != 2:
        raise NotBipartite(f"Schmidt decomposition needs K=2, got K={psi.k}")
    u, s, vh = np.linalg.svd(psi.tensor())
    return SchmidtData(lambdas=s**2, left=u, right=vh.T)


def trace_norm(mat: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(mat))))


def negativity(psi: PureState) -> float:
    """Normalized negativity ``(||(|psi><psi|)^{T_B}||_1 - 1) / (N - 1)``."""
    if psi.k != 2:
        raise NotBipartite(f"negativity needs K=2, got K={psi.k}")
    v = psi.amplitudes
    pt = _pt_array(np.outer(v, v.conj()), 2, psi.n, [1])
    return (trace_norm(pt) - 1.0) / (psi.n - 1)


# --- state files -----------------------------------------------------------

def _pairs_to_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValidationError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _complex_to_pairs(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def state_from_dict(obj: dict, tol: float = DEFAULT_TOL) -> PureState | DensityMatrix:
    """Parse ``{"k", "n", "matrix"}`` or ``{"k", "n", "amplitudes"}``."""
    if not isinstance(obj, dict) or "k" not in obj or "n" not in obj:
        raise ValidationError("state object needs integer fields 'k' and 'n'")
    shape = TensorShape(int(obj["k"]), int(obj["n"]))
    if "amplitudes" in obj:
        amps = _pairs_to_complex(obj["amplitudes"])
        if amps.ndim != 1:
            raise ShapeMismatch("'amplitudes' must be a list of [re, im] pairs")
        return PureState(shape, amps, tol)
    if "matrix" in obj:
        mat = _pairs_to_complex(obj["matrix"])
        return validate_density(mat, shape, tol)
    raise ValidationError("state object needs 'matrix' or 'amplitudes'")


def state_to_dict(state: PureState | DensityMatrix) -> dict:
    out = {"k": state.shape.k, "n": state.shape.n}
    if isinstance(state, PureState):
        out["amplitudes"] = _complex_to_pairs(state.amplitudes)
    else:
        out["matrix"] = _complex_to_pairs(state.mat)
    return out


def load_state(path, tol: float = DEFAULT_TOL) -> PureState | DensityMatrix:
    with open(path) as fh:
        obj = json.load(fh)
    return state_from_dict(obj, tol)


def save_state(state: PureState | DensityMatrix, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_dict(state), fh)
