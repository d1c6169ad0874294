"""Two-qubit entanglement test from remote purities (the "pseudopure" test).

Alice measures her qubit along two orthogonal Bloch axes ``n`` and ``n'``.
Each outcome leaves Bob with a conditional state; the outcome probabilities,
the purities of the conditional states and their pairwise overlaps are the
only data the test uses.  In the optical setup the overlaps come from
Hong-Ou-Mandel coincidences, ``p_ij(+,+) = (1 - Tr(sigma_i sigma_j)) / 2``,
which :func:`simulate_clicks` samples and :func:`witness_from_clicks` inverts.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import bisect

from .collect import GramMatrix2, Verdict, collectibility_Ya
from .errors import (
    AxesNotComplementary,
    DegenerateBranch,
    InsufficientCounts,
    NotTwoQubits,
    ValidationError,
)
from .qcore import DensityMatrix, TensorShape, validate_density

EXACT_GUARD = 1e-9
ORTHO_TOL = 1e-9
DEGENERATE_P = 1e-12
MIN_EVENTS = 10
BRANCHES = ((1, 1), (2, 2), (1, 2))

_PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]],
    dtype=complex,
)


@dataclass(frozen=True)
class MeasurementAxis:
    theta: float
    phi: float

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Projectors onto the +1 and -1 eigenvectors of ``n . sigma``."""
        ns = np.tensordot(self.vector, _PAULI, axes=1)
        eye = np.eye(2)
        return 0.5 * (eye + ns), 0.5 * (eye - ns)

    @classmethod
    def from_vector(cls, v) -> "MeasurementAxis":
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        return cls(math.acos(max(-1.0, min(1.0, v[2]))), math.atan2(v[1], v[0]))


AXIS_Z = MeasurementAxis(0.0, 0.0)
AXIS_X = MeasurementAxis(math.pi / 2, 0.0)


def random_axis_pair(rng: np.random.Generator) -> tuple[MeasurementAxis, MeasurementAxis]:
    """Uniformly oriented orthonormal pair of Bloch axes."""
    a = rng.normal(size=3)
    a /= np.linalg.norm(a)
    b = rng.normal(size=3)
    b -= a * (a @ b)
    return MeasurementAxis.from_vector(a), MeasurementAxis.from_vector(b)


def _check_complementary(n: MeasurementAxis, nprime: MeasurementAxis):
    dot = float(n.vector @ nprime.vector)
    if abs(dot) > ORTHO_TOL:
        raise AxesNotComplementary(f"axes are not orthogonal (n . n' = {dot:.3e})")


def _check_two_qubits(rho: DensityMatrix):
    if rho.shape != TensorShape(2, 2):
        raise NotTwoQubits(f"need two qubits, got K={rho.k}, N={rho.n}")


# --- conditional states ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConditionalDecomposition:
    """Bob's conditional states after Alice measures along ``axis``.

    ``sigma_plus``/``sigma_minus`` are ``None`` for a branch whose probability
    is below ``DEGENERATE_P``.
    """

    p_plus: float
    p_minus: float
    sigma_plus: np.ndarray | None
    sigma_minus: np.ndarray | None
    axis: MeasurementAxis

    @property
    def degenerate(self) -> tuple[bool, bool]:
        return self.sigma_plus is None, self.sigma_minus is None

    @property
    def a_plus(self) -> np.ndarray:
        return np.zeros((2, 2)) if self.sigma_plus is None else self.p_plus * self.sigma_plus

    @property
    def a_minus(self) -> np.ndarray:
        return np.zeros((2, 2)) if self.sigma_minus is None else self.p_minus * self.sigma_minus

    @property
    def rho_b(self) -> np.ndarray:
        return self.a_plus + self.a_minus


def condition_on_axis(rho: DensityMatrix, axis: MeasurementAxis, strict: bool = False) -> ConditionalDecomposition:
    """Split ``rho`` by the outcome of Alice's measurement along ``axis``.

    With ``strict=True`` an empty branch raises :class:`DegenerateBranch`
    instead of being flagged.
    """
    _check_two_qubits(rho)
    t = rho.mat.reshape(2, 2, 2, 2)  # (a, b, a', b')
    out = []
    for proj in axis.projectors():
        # Tr_A[(P x I) rho]
        blk = np.einsum("ca,abcd->bd", proj, t)
        blk = 0.5 * (blk + blk.conj().T)
        p = float(np.trace(blk).real)
        if p < DEGENERATE_P:
            if strict:
                raise DegenerateBranch(f"branch probability {p:.3e}")
            out.append((max(p, 0.0), None))
        else:
            out.append((p, blk / p))
    (pp, sp), (pm, sm) = out
    return ConditionalDecomposition(pp, pm, sp, sm, axis)


@dataclass(frozen=True)
class GramObservables:
    """Measurable data for one axis: probabilities, purities and overlap.

    An empty branch is stored with purity 1 and overlap 0, so its Gram
    entries vanish and it contributes no impurity.
    """

    p_plus: float
    p_minus: float
    purity_plus: float
    purity_minus: float
    overlap: float
    degenerate: tuple = (False, False)

    @property
    def g_pp(self) -> float:
        return self.p_plus * math.sqrt(self.purity_plus)

    @property
    def g_mm(self) -> float:
        return self.p_minus * math.sqrt(self.purity_minus)

    @property
    def g_pm_abs2(self) -> float:
        return self.p_plus * self.p_minus * self.overlap

    @property
    def eps_plus(self) -> float:
        return 1.0 - self.purity_plus

    @property
    def eps_minus(self) -> float:
        return 1.0 - self.purity_minus

    def as_gram(self) -> GramMatrix2:
        return GramMatrix2(self.g_pp, self.g_mm, self.g_pm_abs2)


def gram_observables(dec: ConditionalDecomposition) -> GramObservables:
    dp, dm = dec.degenerate
    pur_p = 1.0 if dp else float(np.real(np.trace(dec.sigma_plus @ dec.sigma_plus)))
    pur_m = 1.0 if dm else float(np.real(np.trace(dec.sigma_minus @ dec.sigma_minus)))
    # Tr of a product of PSD matrices is >= 0; drop round-off below zero
    overlap = 0.0 if (dp or dm) else max(float(np.real(np.trace(dec.sigma_plus @ dec.sigma_minus))), 0.0)
    return GramObservables(dec.p_plus, dec.p_minus, pur_p, pur_m, overlap, (dp, dm))


def overlap_from_coincidence(p_cc: float) -> float:
    """``Tr(sigma_i sigma_j) = 1 - 2 p_ij(+,+)``."""
    return 1.0 - 2.0 * p_cc


def coincidence_from_overlap(overlap: float) -> float:
    return 0.5 * (1.0 - overlap)


# --- purity budget -------------------------------------------------------------

def eta(eps_plus: float, eps_minus: float, p_plus: float, p_minus: float, eps_prime: float) -> float:
    """Noise budget ``8 p+ p- sqrt(eps+ eps-) + 2 eps'``."""
    return 8.0 * p_plus * p_minus * math.sqrt(max(eps_plus, 0.0) * max(eps_minus, 0.0)) + 2.0 * eps_prime


@dataclass(frozen=True)
class PurityBudget:
    eps_plus: float
    eps_minus: float
    eps_plus_prime: float
    eps_minus_prime: float
    eps_prime_max: float
    eta: float
    eta_dual: float


def _budget(obs: GramObservables, obs_p: GramObservables) -> PurityBudget:
    eps_p_max = max(obs_p.eps_plus, obs_p.eps_minus)
    eps_max = max(obs.eps_plus, obs.eps_minus)
    return PurityBudget(
        eps_plus=obs.eps_plus,
        eps_minus=obs.eps_minus,
        eps_plus_prime=obs_p.eps_plus,
        eps_minus_prime=obs_p.eps_minus,
        eps_prime_max=eps_p_max,
        eta=eta(obs.eps_plus, obs.eps_minus, obs.p_plus, obs.p_minus, eps_p_max),
        eta_dual=eta(obs_p.eps_plus, obs_p.eps_minus, obs_p.p_plus, obs_p.p_minus, eps_max),
    )


def remote_purities(dec_n: ConditionalDecomposition, dec_nprime: ConditionalDecomposition) -> PurityBudget:
    """Impurities ``eps = 1 - Tr(sigma^2)`` of all four conditional states and both budgets."""
    _check_complementary(dec_n.axis, dec_nprime.axis)
    return _budget(gram_observables(dec_n), gram_observables(dec_nprime))


# --- witness -------------------------------------------------------------------

@dataclass(frozen=True)
class InequalityCheck:
    """One orientation of the separability inequality.

    ``lhs = G++ G-- - |G+-|^2`` must not exceed
    ``rhs = (eta + (G++ + G--)^2 - 1) / 2`` for separable states;
    ``w = rhs - lhs`` is the witness value.
    """

    lhs: float
    rhs: float
    w: float
    eta: float
    ya: float
    ya_bound: float
    g_pp: float
    g_mm: float
    g_pm_abs2: float


def _inequality(obs: GramObservables, eta_value: float, clamp: bool = False) -> InequalityCheck:
    gpp, gmm, gpm2 = obs.g_pp, obs.g_mm, obs.g_pm_abs2
    lhs = gpp * gmm - gpm2
    rhs = 0.5 * (eta_value + (gpp + gmm) ** 2 - 1.0)
    gram = obs.as_gram()
    ya = collectibility_Ya(gram, tol=math.inf if clamp else 1e-12)
    ya_bound = (math.sqrt(2.0 * gpp * gmm) + math.sqrt(max(2.0 * rhs, 0.0))) ** 2 / 8.0
    return InequalityCheck(lhs, rhs, rhs - lhs, eta_value, ya, ya_bound, gpp, gmm, gpm2)


@dataclass(frozen=True, eq=False)
class WitnessReport:
    primary: InequalityCheck
    dual: InequalityCheck
    budget: PurityBudget
    verdict: Verdict
    guard: float
    degenerate: dict = field(default_factory=dict)
    stderr: dict | None = None
    warnings: tuple = ()

    @property
    def lhs(self) -> float:
        return self.primary.lhs

    @property
    def rhs(self) -> float:
        return self.primary.rhs

    @property
    def w(self) -> float:
        return self.primary.w

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "guard": self.guard,
            "primary": asdict(self.primary),
            "dual": asdict(self.dual),
            "budget": asdict(self.budget),
            "degenerate_branches": self.degenerate,
            "warnings": list(self.warnings),
        }
        for side in ("primary", "dual"):
            crit = criteria_Ya_mixed(self, side)
            out[side]["ya_criterion"] = {
                "value": crit.value,
                "threshold": crit.threshold,
                "verdict": crit.verdict.value,
            }
        if self.stderr is not None:
            out["stderr"] = dict(self.stderr)
        return out


def _report(obs: GramObservables, obs_p: GramObservables, guard_primary: float, guard_dual: float,
            clamp: bool = False, stderr=None, warns=()) -> WitnessReport:
    budget = _budget(obs, obs_p)
    primary = _inequality(obs, budget.eta, clamp)
    dual = _inequality(obs_p, budget.eta_dual, clamp)
    violated = primary.w < -guard_primary or dual.w < -guard_dual
    return WitnessReport(
        primary=primary,
        dual=dual,
        budget=budget,
        verdict=Verdict.ENTANGLED_DETECTED if violated else Verdict.INCONCLUSIVE,
        guard=guard_primary,
        degenerate={"n": list(obs.degenerate), "nprime": list(obs_p.degenerate)},
        stderr=stderr,
        warnings=tuple(warns),
    )


def witness(rho: DensityMatrix, axis_n: MeasurementAxis = AXIS_Z, axis_nprime: MeasurementAxis = AXIS_X,
            guard: float = EXACT_GUARD) -> WitnessReport:
    """Evaluate the separability inequality and its dual on an exact state.

    Entanglement is reported when either orientation is violated by more
    than ``guard``.
    """
    _check_two_qubits(rho)
    _check_complementary(axis_n, axis_nprime)
    obs = gram_observables(condition_on_axis(rho, axis_n))
    obs_p = gram_observables(condition_on_axis(rho, axis_nprime))
    return _report(obs, obs_p, guard, guard)


@dataclass(frozen=True)
class YaCriterion:
    value: float
    threshold: float
    verdict: Verdict


def ya_threshold(eta_value: float) -> float:
    """``1/16 + (eta/2 + sqrt(eta/2)) / 4``."""
    h = 0.5 * eta_value
    return 1.0 / 16 + 0.25 * (h + math.sqrt(max(h, 0.0)))


def criteria_Ya_mixed(report: WitnessReport, side: str = "primary") -> YaCriterion:
    """Collectibility criterion with the threshold raised by the noise budget."""
    chk = report.primary if side == "primary" else report.dual
    thr = ya_threshold(chk.eta)
    guard = report.guard
    if report.stderr is not None:
        guard = report.stderr.get("guard_sigmas", 3.0) * report.stderr.get(f"{side}_ya_margin", 0.0)
    verdict = Verdict.ENTANGLED_DETECTED if chk.ya > thr + guard else Verdict.INCONCLUSIVE
    return YaCriterion(chk.ya, thr, verdict)


@dataclass(frozen=True)
class BobPurityCheck:
    lhs: float
    rhs: float
    holds: bool
    rhs_dual: float
    holds_dual: bool


def bob_purity_bound(rho: DensityMatrix, axis_n: MeasurementAxis = AXIS_Z,
                     axis_nprime: MeasurementAxis = AXIS_X, tol: float = 1e-12) -> BobPurityCheck:
    """Compare ``Tr(rho_B^2)`` with ``1 - eta`` and with ``1 - eta_dual``.

    Both inequalities hold for every separable state; entangled states may
    break them.
    """
    _check_two_qubits(rho)
    dec_n = condition_on_axis(rho, axis_n)
    budget = remote_purities(dec_n, condition_on_axis(rho, axis_nprime))
    rb = dec_n.rho_b
    lhs = float(np.real(np.trace(rb @ rb)))
    rhs, rhs_d = 1.0 - budget.eta, 1.0 - budget.eta_dual
    return BobPurityCheck(lhs, rhs, lhs >= rhs - tol, rhs_d, lhs >= rhs_d - tol)


def depolarized_singlet(p: float) -> DensityMatrix:
    """``(1-p)|Psi+><Psi+| + p I/4`` with ``|Psi+> = (|01> + |10>)/sqrt(2)``."""
    psi = np.array([0, 1, 1, 0]) / math.sqrt(2)
    return validate_density((1 - p) * np.outer(psi, psi) + p * np.eye(4) / 4, TensorShape(2, 2))


def witness_margin(rho: DensityMatrix, axis_n: MeasurementAxis = AXIS_Z,
                   axis_nprime: MeasurementAxis = AXIS_X) -> float:
    """Smaller of the two witness values; negative means entanglement is seen."""
    rep = witness(rho, axis_n, axis_nprime)
    return min(rep.primary.w, rep.dual.w)


def detection_threshold(family: Callable[[float], DensityMatrix], lo: float, hi: float,
                        xtol: float = 1e-12) -> float:
    """Bisect for the parameter where the witness stops detecting ``family(p)``.

    Needs detection at ``lo`` and none at ``hi``.
    """

    def f(p):
        return witness_margin(family(p)) + EXACT_GUARD

    if f(lo) >= 0 or f(hi) < 0:
        raise ValidationError("detection must hold at lo and fail at hi")
    return float(bisect(f, lo, hi, xtol=xtol))


# --- simulated coincidence experiment --------------------------------------------

@dataclass(frozen=True)
class ClickRecord:
    """Counts for one Alice axis over ``shots`` two-copy runs.

    ``pairs[(i, j)]`` counts runs where copy 1 gave outcome ``i`` and copy 2
    gave ``j`` (1 is "+", 2 is "-"); the (1, 2) entry pools both orders.
    ``coincidences`` counts double clicks after the beam splitter for those
    runs.  ``marginal_1``/``marginal_2`` are the per-copy outcome counts
    ``(n_plus, n_minus)``.
    """

    axis: str
    shots: int
    pairs: dict
    coincidences: dict
    marginal_1: tuple
    marginal_2: tuple

    def __post_init__(self):
        counts = [*self.pairs.values(), *self.coincidences.values(), *self.marginal_1, *self.marginal_2]
        if self.shots < 1 or any(c < 0 or c > self.shots for c in counts):
            raise ValidationError("click counts must lie in [0, shots]")
        for key in BRANCHES:
            if self.coincidences[key] > self.pairs[key]:
                raise ValidationError(f"more coincidences than runs in branch {key}")

    def rows(self) -> list[dict]:
        out = []
        for i, j in BRANCHES:
            out.append({
                "axis": self.axis,
                "branch_i": i,
                "branch_j": j,
                "coincidence_count": self.coincidences[(i, j)],
                "marginal_count_1": self.marginal_1[i - 1],
                "marginal_count_2": self.marginal_2[j - 1],
                "shots": self.shots,
                "pair_count": self.pairs[(i, j)],
            })
        return out


CSV_COLUMNS = ("axis", "branch_i", "branch_j", "coincidence_count", "marginal_count_1",
               "marginal_count_2", "shots", "pair_count")


def simulate_clicks(rho: DensityMatrix, axis: MeasurementAxis, shots: int, seed=0,
                    label: str = "n") -> ClickRecord:
    """Sample the two-copy experiment with ideal detectors.

    ``seed`` may be an int or a ``numpy.random.SeedSequence``.
    """
    _check_two_qubits(rho)
    if shots < 1:
        raise ValidationError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    dec = condition_on_axis(rho, axis)
    sig = (dec.sigma_plus, dec.sigma_minus)
    pp = min(max(dec.p_plus, 0.0), 1.0)
    n11, n12, n21, n22 = (int(c) for c in rng.multinomial(shots, [pp * pp, pp * (1 - pp), (1 - pp) * pp, (1 - pp) ** 2]))

    def p_cc(i, j):
        a, b = sig[i - 1], sig[j - 1]
        if a is None or b is None:
            return 0.0
        return min(max(coincidence_from_overlap(float(np.real(np.trace(a @ b)))), 0.0), 1.0)

    c11 = int(rng.binomial(n11, p_cc(1, 1)))
    c22 = int(rng.binomial(n22, p_cc(2, 2)))
    c12 = int(rng.binomial(n12, p_cc(1, 2))) + int(rng.binomial(n21, p_cc(2, 1)))
    return ClickRecord(
        axis=label,
        shots=shots,
        pairs={(1, 1): n11, (2, 2): n22, (1, 2): n12 + n21},
        coincidences={(1, 1): c11, (2, 2): c22, (1, 2): c12},
        marginal_1=(n11 + n12, n21 + n22),
        marginal_2=(n11 + n21, n12 + n22),
    )


def write_click_csv(records: Iterable[ClickRecord], fh, header_lines: Iterable[str] = ()) -> None:
    for line in header_lines:
        fh.write(f"# {line}\n")
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerows(rec.rows())


def read_click_csv(lines: Iterable[str]) -> dict[str, ClickRecord]:
    """Parse click rows (``#`` lines skipped) into records keyed by axis label."""
    reader = csv.DictReader(line for line in lines if not line.lstrip().startswith("#"))
    missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValidationError(f"click CSV lacks columns {sorted(missing)}")
    grouped: dict[str, dict] = {}
    for row in reader:
        key = (int(row["branch_i"]), int(row["branch_j"]))
        if key == (2, 1):
            key = (1, 2)
        if key not in BRANCHES:
            raise ValidationError(f"unknown branch {key}")
        g = grouped.setdefault(row["axis"], {"rows": {}, "shots": int(row["shots"])})
        if int(row["shots"]) != g["shots"]:
            raise ValidationError(f"inconsistent shots for axis {row['axis']}")
        g["rows"][key] = row
    out = {}
    for label, g in grouped.items():
        rows = g["rows"]
        if set(rows) != set(BRANCHES):
            raise ValidationError(f"axis {label} needs rows for branches {BRANCHES}")
        out[label] = ClickRecord(
            axis=label,
            shots=g["shots"],
            pairs={k: int(r["pair_count"]) for k, r in rows.items()},
            coincidences={k: int(r["coincidence_count"]) for k, r in rows.items()},
            marginal_1=(int(rows[(1, 1)]["marginal_count_1"]), int(rows[(2, 2)]["marginal_count_1"])),
            marginal_2=(int(rows[(1, 1)]["marginal_count_2"]), int(rows[(2, 2)]["marginal_count_2"])),
        )
    return out


def _estimates(rec: ClickRecord, warns: list) -> tuple[np.ndarray, np.ndarray]:
    """Point estimates and binomial standard errors of (p+, Tr s+^2, Tr s-^2, Tr s+s-)."""
    for key in BRANCHES:
        if rec.pairs[key] < MIN_EVENTS:
            raise InsufficientCounts(f"axis {rec.axis}: branch {key} has {rec.pairs[key]} < {MIN_EVENTS} events")
    trials = 2 * rec.shots
    p = (rec.marginal_1[0] + rec.marginal_2[0]) / trials
    est, se = [p], [math.sqrt(p * (1 - p) / trials)]
    for key in BRANCHES:
        n = rec.pairs[key]
        c = rec.coincidences[key] / n
        v = overlap_from_coincidence(c)
        if v < 0.0:
            warns.append(f"axis {rec.axis}: estimated overlap for branch {key} is {v:.4g}; clamped to 0")
            v = 0.0
        est.append(min(v, 1.0))
        se.append(2.0 * math.sqrt(c * (1 - c) / n))
    return np.array(est), np.array(se)


def _obs_from_estimates(e) -> GramObservables:
    return GramObservables(e[0], 1.0 - e[0], e[1], e[2], e[3])


def witness_from_clicks(rec_n: ClickRecord, rec_nprime: ClickRecord, guard_sigmas: float = 3.0) -> WitnessReport:
    """Witness from coincidence counts, with propagated binomial standard errors.

    Each estimate is shifted by one standard error (kept inside [0, 1]) and
    the resulting secant slopes give the first-order error of every reported
    quantity.  Entanglement is declared only when a witness value is below
    zero by more than ``guard_sigmas`` standard errors.
    """
    if rec_n.shots != rec_nprime.shots:
        raise ValidationError("records for the two axes must share the shot count")
    warns: list[str] = []
    e1, s1 = _estimates(rec_n, warns)
    e2, s2 = _estimates(rec_nprime, warns)
    est, se = np.concatenate([e1, e2]), np.concatenate([s1, s2])

    def outputs(v):
        rep = _report(_obs_from_estimates(v[:4]), _obs_from_estimates(v[4:]), 0.0, 0.0, clamp=True)
        out = {}
        for side in ("primary", "dual"):
            chk = getattr(rep, side)
            out.update({f"{side}_lhs": chk.lhs, f"{side}_rhs": chk.rhs, f"{side}_w": chk.w,
                        f"{side}_ya_margin": chk.ya - ya_threshold(chk.eta)})
        return out

    var = dict.fromkeys(outputs(est), 0.0)
    for i in range(est.size):
        if se[i] == 0.0:
            continue
        up, dn = est.copy(), est.copy()
        up[i] = min(est[i] + se[i], 1.0)
        dn[i] = max(est[i] - se[i], 0.0)
        if up[i] == dn[i]:
            continue
        fu, fd = outputs(up), outputs(dn)
        for key in var:
            var[key] += ((fu[key] - fd[key]) / (up[i] - dn[i]) * se[i]) ** 2
    stderr = {k: math.sqrt(v) for k, v in var.items()}
    stderr["guard_sigmas"] = guard_sigmas
    for w in warns:
        warnings.warn(w, RuntimeWarning, stacklevel=2)
    rad_warn = []
    for side, e in (("primary", e1), ("dual", e2)):
        g = _obs_from_estimates(e).as_gram()
        if g.radicand < 0:
            rad_warn.append(f"{side}: G++G-- - |G+-|^2 = {g.radicand:.3e} < 0; clamped to 0")
    return _report(
        _obs_from_estimates(e1),
        _obs_from_estimates(e2),
        guard_sigmas * stderr["primary_w"],
        guard_sigmas * stderr["dual_w"],
        clamp=True,
        stderr=stderr,
        warns=warns + rad_warn,
    )
