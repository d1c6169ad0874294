"""Acceptance criteria.  Each test carries an ``acceptance`` marker; the
terminal summary prints one PASS/FAIL line per criterion."""

import math
import time

import numpy as np
import pytest

from collectibility import (
    BoundQuery,
    DensityMatrix,
    OptimizerConfig,
    PureState,
    TensorShape,
    Verdict,
    WernerSpec,
    collectibility_mixed_max,
    collectibility_pure_max,
    maximizer_matrix,
    negativity_collectibility,
    r_bound,
    schur_theta,
    thresholds_two_qubit,
    validate_density,
    werner_collectibility,
    werner_state,
)
from collectibility.bounds import block_product
from collectibility.cli import main
from collectibility.pseudopure import (
    AXIS_X,
    AXIS_Z,
    bob_purity_bound,
    depolarized_singlet,
    detection_threshold,
    random_axis_pair,
    simulate_clicks,
    witness,
    witness_from_clicks,
)
from collectibility.randstates import random_density, random_pure, random_separable, random_unitary
from collectibility.werner import alpha_c_numeric, alpha_t_numeric

from _oracles import fd_theta

PURITY_TABLE = [
    ("K=2", 2, 2, 0.2500, 0.3333, 0.3456),
    ("K=2", 2, 3, 0.1111, 0.1250, 0.1728),
    ("K=2", 2, 4, 0.0625, 0.0667, 0.1033),
    ("N=2", 2, 2, 0.2500, 0.3333, 0.3456),
    ("N=2", 3, 2, 0.1250, 0.1429, 0.1599),
    ("N=2", 4, 2, 0.0625, 0.0667, 0.0808),
]


def detail(record_property, text):
    record_property("detail", text)


@pytest.mark.acceptance(1, "critical-purity table")
def test_purity_table(capsys, record_property):
    start = time.perf_counter()
    assert main(["crit-table"]) == 0
    elapsed = time.perf_counter() - start
    lines = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")][1:]
    got = {(f[0], int(f[1]), int(f[2])): tuple(map(float, f[3:])) for f in (l.split(",") for l in lines)}
    worst = max(abs(a - b) for panel, k, n, *ref in PURITY_TABLE for a, b in zip(got[(panel, k, n)], ref))
    detail(record_property, f"18 values, max deviation {worst:.1e}, {elapsed:.2f} s")
    assert worst <= 5e-5
    assert elapsed < 5


@pytest.mark.acceptance(2, "pure-state anchors")
def test_pure_anchors(record_property):
    start = time.perf_counter()
    bell = collectibility_pure_max(PureState.from_array([1, 0, 0, 1], 2, 2, normalize=True))
    prod = collectibility_pure_max(PureState.from_array([1, 0, 0, 0], 2, 2))
    elapsed = time.perf_counter() - start
    detail(record_property, f"Bell {bell.value:.8f}, |00> {prod.value:.8f}, {elapsed:.1f} s")
    assert bell.value == pytest.approx(0.25, abs=1e-5)
    assert prod.value == pytest.approx(1 / 16, abs=1e-5)
    assert elapsed < 30


@pytest.mark.acceptance(3, "Werner cross-validation")
def test_werner_cross_validation(record_property):
    start = time.perf_counter()
    worst = 0.0
    for lam in np.linspace(0.0, 0.5, 5):
        for alpha in np.linspace(0.0, 1.0, 5):
            spec = WernerSpec(2, [lam, 1 - lam], alpha)
            num = collectibility_mixed_max(werner_state(spec)).value
            worst = max(worst, abs(num - werner_collectibility(spec)))
    th = thresholds_two_qubit(0.5)
    err_c = abs(alpha_c_numeric(0.5) - th.alpha_c)
    err_t = abs(alpha_t_numeric(0.5) - 1 / 3)
    elapsed = time.perf_counter() - start
    detail(record_property, f"grid max error {worst:.1e}, alpha_C error {err_c:.1e}, "
                            f"alpha_T error {err_t:.1e}, {elapsed:.1f} s")
    assert worst <= 1e-5
    assert err_c <= 1e-8
    assert err_t <= 1e-8
    assert elapsed < 300


@pytest.mark.acceptance(4, "negativity identity")
def test_negativity_identity(record_property):
    rng = np.random.default_rng(4)
    worst = 0.0
    for n in (2, 3):
        for _ in range(100):
            psi = random_pure(TensorShape(2, n), rng)
            got = collectibility_pure_max(psi, OptimizerConfig(restarts=8)).value
            worst = max(worst, abs(got - negativity_collectibility(psi)))
    detail(record_property, f"200 states, max error {worst:.1e}")
    assert worst <= 1e-5


@pytest.mark.acceptance(5, "bound attainability and dominance")
def test_bound_attainability_and_dominance(record_property):
    rng = np.random.default_rng(5)
    worst_sat = 0.0
    for _ in range(100):
        d = int(rng.integers(2, 17))
        q = BoundQuery(d, int(rng.integers(1, d + 1)), 1.0, rng.uniform(1 / d, 1))
        m = maximizer_matrix(q, rng.uniform(0, 2 * np.pi, (q.n, q.n))).matrix
        worst_sat = max(worst_sat, abs(block_product(m, q.n) - r_bound(q).r_n))
    excess = -math.inf
    for _ in range(500):
        d = int(rng.integers(2, 17))
        rho = random_density(TensorShape(1, d), rng, rank=int(rng.integers(1, d + 1)))
        u = random_unitary(d, rng)
        mat = u @ rho.mat @ u.conj().T
        p = min(max(float(np.sum(np.abs(mat) ** 2)), 1 / d), 1.0)
        for n in range(1, d + 1):
            excess = max(excess, block_product(mat, n) - r_bound(BoundQuery(d, n, 1.0, p)).r_n)
    detail(record_property, f"saturation error {worst_sat:.1e}, largest excess over r_N {excess:.1e}")
    assert worst_sat <= 1e-9
    assert excess <= 1e-9


@pytest.mark.acceptance(6, "separable soundness of the witness")
def test_separable_soundness(record_property):
    rng = np.random.default_rng(6)
    shape = TensorShape(2, 2)
    w_min, violations, bob_violations = math.inf, 0, 0
    for _ in range(500):
        rho = random_separable(shape, rng, terms=int(rng.integers(1, 6)))
        for _ in range(10):
            a, b = random_axis_pair(rng)
            rep = witness(rho, a, b)
            w = min(rep.primary.w, rep.dual.w)
            w_min = min(w_min, w)
            violations += w < -1e-9
            check = bob_purity_bound(rho, a, b)
            bob_violations += not (check.holds and check.holds_dual)
    bell = witness(DensityMatrix.from_pure(PureState.from_array([1, 0, 0, 1], 2, 2, normalize=True)))
    detail(record_property, f"min W {w_min:.1e}, {violations} witness and {bob_violations} purity-bound "
                            f"violations, Bell W {bell.w:.10f}")
    assert violations == 0
    assert bob_violations == 0
    assert bell.w == pytest.approx(-0.25, abs=1e-9)


@pytest.mark.acceptance(7, "depolarized-singlet threshold")
def test_depolarized_threshold(record_property):
    p_star = detection_threshold(depolarized_singlet, 0.0, 2 / 3)
    grid = np.linspace(0.0, 2 / 3, 2001)
    verdicts = [witness(depolarized_singlet(p)).verdict for p in grid]
    flips = sum(a is not b for a, b in zip(verdicts, verdicts[1:]))
    detail(record_property, f"p* = {p_star:.4f}, {flips} verdict flip(s) on [0, 2/3]")
    assert 0 < p_star < 2 / 3
    assert flips == 1
    assert verdicts[0] is Verdict.ENTANGLED_DETECTED


@pytest.mark.acceptance(8, "statistical convergence")
@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_statistical_convergence(record_property):
    start = time.perf_counter()
    bell = DensityMatrix.from_pure(PureState.from_array([1, 0, 0, 1], 2, 2, normalize=True))
    mixed = validate_density(np.eye(4) / 4, TensorShape(2, 2))

    def detected(rho, seed):
        ss_n, ss_p = np.random.SeedSequence(seed).spawn(2)
        rep = witness_from_clicks(simulate_clicks(rho, AXIS_Z, 1_000_000, ss_n, "n"),
                                  simulate_clicks(rho, AXIS_X, 1_000_000, ss_p, "nprime"))
        return rep.verdict is Verdict.ENTANGLED_DETECTED

    hits = sum(detected(bell, s) for s in range(100))
    false_alarms = sum(detected(mixed, 1000 + s) for s in range(100))
    elapsed = time.perf_counter() - start
    detail(record_property, f"Bell detected {hits}/100, I/4 flagged {false_alarms}/100, {elapsed:.1f} s")
    assert hits >= 99
    assert false_alarms == 0
    assert elapsed < 120


@pytest.mark.acceptance(9, "Schur concavity")
def test_schur_concavity(record_property):
    rng = np.random.default_rng(9)
    worst_theta, worst_rel = -math.inf, 0.0
    for _ in range(1000):
        m = int(rng.integers(2, 6))
        x = rng.uniform(0.05, 3.0, m)
        b, q = rng.uniform(0, 2), rng.uniform(1, 5)
        j, k = rng.choice(m, 2, replace=False)
        theta = schur_theta(x, b, q, int(j), int(k))
        fd, scale = fd_theta(x, b, q, int(j), int(k))
        worst_theta = max(worst_theta, theta)
        worst_rel = max(worst_rel, abs(theta - fd) / max(abs(theta), scale))
    detail(record_property, f"max theta {worst_theta:.1e}, max relative FD difference {worst_rel:.1e}")
    assert worst_theta <= 1e-12
    assert worst_rel <= 1e-6
