import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from collectibility import (
    OptimizerConfig,
    PureState,
    SeparableBasisSet,
    TensorShape,
    WernerSpec,
    collectibility_mixed_max,
    collectibility_pure_max,
    negativity_collectibility,
    product_functional_mixed,
    renyi_half,
    saturating_basis,
    schur_theta,
    thresholds_two_qubit,
    werner_collectibility,
    werner_state,
)
from collectibility.errors import BadLambda, BadParams, NotBipartite
from collectibility.qcore import _pt_array
from collectibility.randstates import random_pure, random_unitary
from collectibility.werner import (
    alpha_c_numeric,
    alpha_t_numeric,
    pure_collectibility,
    saturation_residual,
    schmidt_vector_state,
)

from _oracles import fd_theta


def random_lambdas(rng, n):
    return rng.dirichlet(np.ones(n))


# --- states ---------------------------------------------------------------------

def test_alpha_zero_is_maximally_mixed():
    rho = werner_state(WernerSpec(3, np.ones(3) / 3, 0.0))
    assert np.allclose(rho.mat, np.eye(9) / 9)


def test_alpha_one_product_lambda_is_projector():
    rho = werner_state(WernerSpec(2, [1.0, 0.0], 1.0))
    expected = np.zeros((4, 4))
    expected[0, 0] = 1
    assert np.allclose(rho.mat, expected)


def test_separability_boundary_at_one_third():
    rho = werner_state(WernerSpec(2, [0.5, 0.5], 1 / 3))
    assert np.linalg.eigvalsh(_pt_array(rho.mat, 2, 2, [1]))[0] == pytest.approx(0.0, abs=1e-15)


def test_local_rotations_are_applied(rng):
    u, v = random_unitary(2, rng), random_unitary(2, rng)
    base = werner_state(WernerSpec(2, [0.7, 0.3], 0.6))
    rot = werner_state(WernerSpec(2, [0.7, 0.3], 0.6, u, v))
    w = np.kron(u, v)
    assert np.allclose(rot.mat, w @ base.mat @ w.conj().T)


@pytest.mark.parametrize("n, lam, alpha", [(2, [0.5, 0.4], 0.5), (2, [1.2, -0.2], 0.5), (2, [0.5, 0.5], 1.5), (3, [0.5, 0.5], 0.5)])
def test_spec_validation(n, lam, alpha):
    with pytest.raises(BadLambda):
        WernerSpec(n, lam, alpha)


# --- analytic collectibility ------------------------------------------------------------

@pytest.mark.parametrize("lam, alpha, expected", [
    ([0.5, 0.5], 1.0, 0.25),
    ([0.5, 0.5], 0.5, 0.09375),
    ([1.0, 0.0], 1.0, 1 / 16),
])
def test_werner_collectibility_examples(lam, alpha, expected):
    assert werner_collectibility(WernerSpec(2, lam, alpha)) == pytest.approx(expected)


def test_werner_half_matches_optimizer():
    rho = werner_state(WernerSpec(2, [0.5, 0.5], 0.5))
    assert collectibility_mixed_max(rho).value == pytest.approx(0.09375, abs=1e-6)


@pytest.mark.parametrize("lam", [0.0, 0.1, 0.25, 0.4, 0.5])
def test_werner_grid_against_optimizer(lam):
    for alpha in np.linspace(0, 1, 5):
        spec = WernerSpec(2, [lam, 1 - lam], alpha)
        got = collectibility_mixed_max(werner_state(spec), OptimizerConfig(restarts=8)).value
        assert got == pytest.approx(werner_collectibility(spec), abs=1e-5)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_saturating_basis_reaches_formula(n, rng):
    u, v = saturating_basis(n)
    for _ in range(10):
        spec = WernerSpec(n, random_lambdas(rng, n), rng.uniform())
        basis = SeparableBasisSet(TensorShape(2, n), (u, v))
        assert product_functional_mixed(werner_state(spec), basis) == pytest.approx(werner_collectibility(spec), rel=1e-10)


@pytest.mark.parametrize("n", [2, 3])
def test_random_bases_stay_below_formula(n, rng):
    for _ in range(200):
        spec = WernerSpec(n, random_lambdas(rng, n), rng.uniform())
        basis = SeparableBasisSet(TensorShape(2, n), (random_unitary(n, rng), random_unitary(n, rng)))
        assert product_functional_mixed(werner_state(spec), basis) <= werner_collectibility(spec) + 1e-9


def test_pure_collectibility_is_schmidt_value(rng):
    for n in (2, 3):
        lam = random_lambdas(rng, n)
        psi = PureState.from_array(schmidt_vector_state(lam), 2, n)
        assert pure_collectibility(lam) == pytest.approx(collectibility_pure_max(psi, OptimizerConfig(restarts=8)).value, abs=1e-7)


@pytest.mark.parametrize("lam, expected", [([0.5, 0.5], math.log(2)), ([1.0, 0.0], 0.0), ([0.8, 0.2], 0.58779)])
def test_renyi_half(lam, expected):
    assert renyi_half(lam) == pytest.approx(expected, abs=1e-5)


def test_renyi_half_relates_to_pure_collectibility(rng):
    for n in (2, 3, 5):
        lam = random_lambdas(rng, n)
        assert pure_collectibility(lam) == pytest.approx(math.exp(n * renyi_half(lam)) / n ** (2 * n))


# --- thresholds -----------------------------------------------------------------------

def test_thresholds_at_half():
    th = thresholds_two_qubit(0.5)
    assert th.omega == pytest.approx(0.5)
    assert th.alpha_t == pytest.approx(1 / 3)
    # closed form at omega = 1/2 simplifies to (sqrt(3) - 1) / 2
    assert th.alpha_c == pytest.approx((math.sqrt(3) - 1) / 2, abs=1e-15)
    assert th.alpha_c == pytest.approx(0.3660, abs=5e-5)


def test_thresholds_for_product_state():
    th = thresholds_two_qubit(0.0)
    assert (th.omega, th.alpha_t, th.alpha_c) == (0.0, 1.0, 1.0)


def test_thresholds_reject_bad_lambda():
    with pytest.raises(BadLambda):
        thresholds_two_qubit(1.5)


@pytest.mark.parametrize("lam", np.linspace(0.02, 0.98, 20))
def test_thresholds_match_bisection(lam):
    th = thresholds_two_qubit(lam)
    assert th.omega == pytest.approx(math.sqrt(lam * (1 - lam)))
    assert alpha_c_numeric(lam) == pytest.approx(th.alpha_c, abs=1e-8)
    assert alpha_t_numeric(lam) == pytest.approx(th.alpha_t, abs=1e-8)
    assert th.alpha_t < th.alpha_c


# --- negativity relation ------------------------------------------------------------------

@pytest.mark.parametrize("amps, expected", [
    ([1, 0, 0, 1], 0.25),
    ([1, 0, 0, 0], 1 / 16),
    ([math.sqrt(0.8), 0, 0, math.sqrt(0.2)], 0.2025),
])
def test_negativity_collectibility_examples(amps, expected):
    psi = PureState.from_array(amps, 2, 2, normalize=True)
    assert negativity_collectibility(psi) == pytest.approx(expected, abs=1e-12)


def test_negativity_collectibility_needs_two_parties():
    with pytest.raises(NotBipartite):
        negativity_collectibility(PureState.from_array(np.eye(8)[0], 3, 2))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_negativity_collectibility_equals_schmidt_value(n, rng):
    for _ in range(50):
        psi = random_pure(TensorShape(2, n), rng)
        s = np.linalg.svd(psi.tensor(), compute_uv=False)
        assert negativity_collectibility(psi) == pytest.approx(pure_collectibility(s**2), abs=1e-12)


# --- Schur concavity -----------------------------------------------------------------------

def test_theta_symmetric_point():
    assert schur_theta([0.7, 0.7, 0.2], 0.3, 2.0, 0, 1) == 0.0


@pytest.mark.parametrize("x, b, q, j, k", [([1, 2], 0.1, 2, 0, 1), ([3, 1, 1], 1, 4, 0, 1)])
def test_theta_examples_match_finite_differences(x, b, q, j, k):
    x = np.asarray(x, dtype=float)
    theta = schur_theta(x, b, q, j, k)
    fd, scale = fd_theta(x, b, q, j, k)
    assert theta < 0
    assert abs(theta - fd) <= 1e-6 * max(abs(theta), scale)


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.floats(0.05, 3.0), min_size=2, max_size=5),
    st.floats(0.0, 2.0),
    st.floats(1.0, 5.0),
    st.data(),
)
def test_theta_is_nonpositive_and_matches_gradient(xs, b, q, data):
    x = np.array(xs)
    j = data.draw(st.integers(0, x.size - 1))
    k = data.draw(st.integers(0, x.size - 1).filter(lambda i: i != j))
    theta = schur_theta(x, b, q, j, k)
    assert theta <= 1e-12
    fd, scale = fd_theta(x, b, q, j, k)
    assert abs(theta - fd) <= 1e-6 * max(abs(theta), scale)


@pytest.mark.parametrize("args", [([-1, 1], 0.1, 2, 0, 1), ([1, 1], -0.1, 2, 0, 1), ([1, 1], 0.1, 0.5, 0, 1),
                                  ([1, 1], 0.1, 2, 0, 0), ([1, 1], 0.1, 2, 0, 2)])
def test_theta_rejects_bad_params(args):
    with pytest.raises(BadParams):
        schur_theta(*args)


# --- saturating basis -------------------------------------------------------------------------

@pytest.mark.parametrize("lam", [[0.8, 0.2], [1 / 3, 1 / 3, 1 / 3], [1.0, 0.0]])
def test_saturation_residual(lam):
    u, v = saturating_basis(len(lam))
    assert saturation_residual(u, v, lam) < 1e-12


def test_saturation_both_sides_half():
    u, v = saturating_basis(2)
    assert np.abs((u * v) @ np.sqrt([1.0, 0.0])) == pytest.approx([0.5, 0.5])
    assert np.allclose(u.conj().T @ u, np.eye(2))


def test_saturating_basis_rejects_small_n():
    with pytest.raises(BadParams):
        saturating_basis(1)
