"""Random states and unitaries for sampling-based checks."""

from __future__ import annotations

from functools import reduce
from itertools import combinations

import numpy as np
from scipy.stats import unitary_group

from .qcore import DensityMatrix, PureState, TensorShape, _pt_array, validate_density


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(n, random_state=rng)


def random_pure(shape: TensorShape, rng: np.random.Generator) -> PureState:
    v = rng.normal(size=shape.d) + 1j * rng.normal(size=shape.d)
    return PureState(shape, v / np.linalg.norm(v))


def random_product_pure(shape: TensorShape, rng: np.random.Generator) -> PureState:
    parts = []
    for _ in range(shape.k):
        v = rng.normal(size=shape.n) + 1j * rng.normal(size=shape.n)
        parts.append(v / np.linalg.norm(v))
    return PureState(shape, reduce(np.kron, parts))


def _ginibre_density(d: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_density(shape: TensorShape, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Hilbert-Schmidt random state (induced measure when ``rank`` < D)."""
    return validate_density(_ginibre_density(shape.d, rank or shape.d, rng), shape)


def random_separable(shape: TensorShape, rng: np.random.Generator, terms: int = 4) -> DensityMatrix:
    """Convex mixture of ``terms`` product states with random local mixedness."""
    weights = rng.dirichlet(np.ones(terms))
    mat = np.zeros((shape.d, shape.d), dtype=complex)
    for w in weights:
        locs = [_ginibre_density(shape.n, int(rng.integers(1, shape.n + 1)), rng) for _ in range(shape.k)]
        mat += w * reduce(np.kron, locs)
    return validate_density(mat, shape)


def random_ppt(shape: TensorShape, rng: np.random.Generator, max_tries: int = 100_000) -> DensityMatrix:
    """Rejection-sample a state that is PPT across every bipartition."""
    cuts = [c for r in range(1, shape.k // 2 + 1) for c in combinations(range(shape.k), r)]
    for _ in range(max_tries):
        rho = random_density(shape, rng)
        if all(np.linalg.eigvalsh(_pt_array(rho.mat, shape.k, shape.n, c))[0] >= 0 for c in cuts):
            return rho
    raise RuntimeError("no PPT state found")
