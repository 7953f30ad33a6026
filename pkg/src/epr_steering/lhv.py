"""Finite hidden-variable models.

Two families:

* :class:`DiscreteLhvModel` holds per-lambda outcome distributions for named
  local observables and synthesizes joint probability tables from them.
* :class:`Cat2MomentModel` is a local-hidden-state model at the level of
  moments: one side is described by classical per-lambda moments, the other
  (the steered side) by an actual number-diagonal density operator.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ConditioningOnNullEvent, InvalidArgument
from .fock import LocalBasis, ladder
from .measurement import NULL_EVENT, ProbTable, spectral_decompose
from .states import DensityOperator, SeparableSpec, local_state
from .witnesses import Moments

log = logging.getLogger(__name__)

WEIGHT_TOL = 1e-12
BOUND_TOL = 1e-9


def _check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or len(w) == 0:
        raise InvalidArgument("weights must be a non-empty 1-d sequence")
    if np.any(w <= 0) or np.any(w > 1 + WEIGHT_TOL):
        raise InvalidArgument("each weight must lie in (0, 1]")
    if abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise InvalidArgument(f"weights sum to {w.sum()!r}, not 1")
    return w


# discrete outcome models


@dataclass(frozen=True)
class LocalObservable:
    """Outcome values and a (n_lambda, n_outcomes) table of P(outcome | lambda)."""

    values: np.ndarray
    probs: np.ndarray


@dataclass(frozen=True, eq=False)
class DiscreteLhvModel:
    weights: np.ndarray
    obs_a: Mapping[str, LocalObservable]
    obs_b: Mapping[str, LocalObservable]

    def __post_init__(self):
        w = _check_weights(self.weights)
        object.__setattr__(self, "weights", w)
        for side in (self.obs_a, self.obs_b):
            for name, ob in side.items():
                probs = np.asarray(ob.probs, dtype=float)
                if probs.shape != (len(w), len(ob.values)):
                    raise InvalidArgument(f"{name}: probability table has shape {probs.shape}")
                if np.any(probs < -WEIGHT_TOL):
                    raise InvalidArgument(f"{name}: negative probability")
                if np.max(np.abs(probs.sum(axis=1) - 1.0)) > WEIGHT_TOL:
                    raise InvalidArgument(f"{name}: a per-lambda distribution does not sum to 1")

    @property
    def n_lambda(self) -> int:
        return len(self.weights)


def _lookup(side: Mapping[str, LocalObservable], name: str, label: str) -> LocalObservable:
    if name not in side:
        raise InvalidArgument(f"observable {name!r} not defined on {label}")
    return side[name]


def lhv_joint_probability(model: DiscreteLhvModel, obs_a: str, obs_b: str) -> ProbTable:
    """P(alpha, beta) = sum_lambda P(lambda) P(alpha|lambda) P(beta|lambda)."""
    a = _lookup(model.obs_a, obs_a, "A")
    b = _lookup(model.obs_b, obs_b, "B")
    joint = np.einsum("l,li,lj->ij", model.weights, a.probs, b.probs)
    return ProbTable(np.asarray(a.values, float), np.asarray(b.values, float), joint)


def no_signaling_from_tables(tables: Mapping[tuple[str, str], np.ndarray]) -> tuple[bool, float]:
    """Check that each party's marginal ignores the other party's setting.

    ``tables`` maps (A setting, B setting) to a raw joint array, so corrupted
    tables that no model could produce can be checked too.
    """
    dev = 0.0
    settings_a = sorted({k[0] for k in tables})
    settings_b = sorted({k[1] for k in tables})
    for sa in settings_a:
        margs = [np.asarray(tables[sa, sb]).sum(axis=1) for sb in settings_b if (sa, sb) in tables]
        dev = max(dev, max(float(np.max(np.abs(m - margs[0]))) for m in margs))
    for sb in settings_b:
        margs = [np.asarray(tables[sa, sb]).sum(axis=0) for sa in settings_a if (sa, sb) in tables]
        dev = max(dev, max(float(np.max(np.abs(m - margs[0]))) for m in margs))
    return dev <= 1e-10, dev


def no_signaling_check(model: DiscreteLhvModel) -> tuple[bool, float]:
    tables = {
        (na, nb): lhv_joint_probability(model, na, nb).joint for na in model.obs_a for nb in model.obs_b
    }
    return no_signaling_from_tables(tables)


def _born_table(factors: Sequence[DensityOperator], obs) -> LocalObservable:
    dec = spectral_decompose(obs)
    probs = np.array([[np.trace(p @ f.matrix).real for p in dec.projectors] for f in factors])
    probs = np.clip(probs, 0.0, None)
    return LocalObservable(dec.eigenvalues, probs / probs.sum(axis=1, keepdims=True))


def cat1_model_from_separable(spec: SeparableSpec, obs_a: Mapping[str, np.ndarray],
                              obs_b: Mapping[str, np.ndarray]) -> DiscreteLhvModel:
    """One hidden variable per separable term; outcome tables from the Born rule."""
    rho_a = [t[1] for t in spec.terms]
    rho_b = [t[2] for t in spec.terms]
    return DiscreteLhvModel(
        spec.weights,
        {k: _born_table(rho_a, v) for k, v in obs_a.items()},
        {k: _born_table(rho_b, v) for k, v in obs_b.items()},
    )


def hvt_variance_gap(model: DiscreteLhvModel, name: str, side: str = "A") -> float:
    """Variance over the whole ensemble minus the lambda-averaged variance (>= 0)."""
    ob = _lookup(model.obs_a if side == "A" else model.obs_b, name, side)
    v = np.asarray(ob.values, float)
    means = ob.probs @ v
    second = ob.probs @ v**2
    w = model.weights
    total = w @ second - (w @ means) ** 2
    averaged = w @ (second - means**2)
    return float(total - averaged)


def cauchy_gap(weights, c) -> float:
    """sum P C - (sum P sqrt C)^2 for nonnegative C (>= 0)."""
    w = _check_weights(weights)
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise InvalidArgument("C must be nonnegative")
    return float(w @ c - (w @ np.sqrt(c)) ** 2)


# moment-level local-hidden-state models


@dataclass(frozen=True, eq=False)
class Cat2MomentModel:
    """Local-hidden-state model for a two-mode system.

    The ``x, p, x2, p2, u, v`` arrays are the classical per-lambda moments of
    the untrusted side; ``lhs`` are the per-lambda states of the steered side.
    ``steered='B'`` (default) means the classical moments describe mode A.
    """

    weights: np.ndarray
    x: np.ndarray
    p: np.ndarray
    x2: np.ndarray
    p2: np.ndarray
    u: np.ndarray
    v: np.ndarray
    lhs: tuple[DensityOperator, ...]
    steered: str = "B"

    def __post_init__(self):
        w = _check_weights(self.weights)
        object.__setattr__(self, "weights", w)
        n = len(w)
        for name in ("x", "p", "x2", "p2", "u", "v"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise InvalidArgument(f"{name} must have one entry per lambda")
            if not np.all(np.isfinite(arr)):
                raise InvalidArgument(f"{name} has non-finite entries")
            object.__setattr__(self, name, arr)
        if self.steered not in ("A", "B"):
            raise InvalidArgument("steered must be 'A' or 'B'")
        if np.any(self.x2 < self.x**2 - WEIGHT_TOL) or np.any(self.p2 < self.p**2 - WEIGHT_TOL):
            raise InvalidArgument("a second moment is below the square of its mean")
        if np.any(self.classical_number < -WEIGHT_TOL):
            raise InvalidArgument("classical side has negative boson number")
        if len(self.lhs) != n:
            raise InvalidArgument("need one hidden state per lambda")
        object.__setattr__(self, "lhs", tuple(self.lhs))
        for r in self.lhs:
            if not isinstance(r, DensityOperator) or not isinstance(r.basis, LocalBasis):
                raise InvalidArgument("hidden states must be single-mode density operators")
            off = r.matrix - np.diag(np.diag(r.matrix))
            if np.max(np.abs(off), initial=0.0) > WEIGHT_TOL:
                raise InvalidArgument("hidden states must be number-diagonal")

    @property
    def n_lambda(self) -> int:
        return len(self.weights)

    @property
    def classical_number(self) -> np.ndarray:
        return 0.5 * (self.x2 + self.p2) - self.v

    def lhs_number_moments(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-lambda <n> and <n^2> of the hidden states."""
        n1, n2 = [], []
        for r in self.lhs:
            diag = np.diag(r.matrix).real
            k = np.arange(len(diag))
            n1.append(diag @ k)
            n2.append(diag @ k**2)
        return np.array(n1), np.array(n2)


def _frame(model: Cat2MomentModel):
    w = model.weights
    nc = model.classical_number
    nq, nq2 = model.lhs_number_moments()
    return w, nc, nq, nq2


def _side_numbers(model: Cat2MomentModel, nc_mean, nq_mean):
    if model.steered == "B":
        return nc_mean, nq_mean
    return nq_mean, nc_mean


def cat2_quadrature_variances(model: Cat2MomentModel, thetas: Sequence[float]) -> np.ndarray:
    """Predicted variance of X_theta(+) (equal to X_theta(-)) for each theta.

    The hidden state contributes <x_theta> = 0 and <x_theta^2> = <n> + 1/2,
    so the cross terms that distinguish the two signs vanish.  P_theta is
    X at theta + pi/2.
    """
    w, nc, nq, _ = _frame(model)
    t = np.asarray(thetas, dtype=float)[:, None]
    c, s = np.cos(t), np.sin(t)
    second = model.x2 * c**2 + model.p2 * s**2 + model.u * np.sin(2 * t) + nq + 0.5
    mean = model.x * c + model.p * s
    return 0.5 * (second @ w) - 0.5 * (mean @ w) ** 2


def cat2_predicted_moments(model: Cat2MomentModel, theta_points: int = 64) -> Moments:
    """Moments implied by the model, in the record the witnesses consume.

    ``var_sx``/``var_sy`` are built from the quadrature expansion of S_x^2 and
    S_y^2 with the hidden-state values <x^2> = <p^2> = <n> + 1/2, <U> = 0,
    <V> = 1/2.  ``var_sz`` is a lower bound (law of total variance, with the
    classical side's number fluctuation dropped).
    """
    w, nc, nq, nq2 = _frame(model)
    nc_mean, nq_mean = float(w @ nc), float(w @ nq)
    n_a, n_b = _side_numbers(model, nc_mean, nq_mean)
    sz = 0.5 * (n_b - n_a)
    # same value for S_x^2 and S_y^2
    var_s = float(w @ (0.25 * (model.x2 + model.p2) * (nq + 0.5) - 0.25 * model.v))
    sz_lambda = 0.5 * (nq - nc) if model.steered == "B" else 0.5 * (nc - nq)
    var_sz = float(w @ (0.25 * (nq2 - nq**2)) + w @ sz_lambda**2 - (w @ sz_lambda) ** 2)
    thetas = np.linspace(0.0, np.pi, theta_points, endpoint=False)
    qv = cat2_quadrature_variances(model, np.concatenate([thetas, thetas + np.pi / 2]))
    k = int(np.argmin(qv))
    theta = float(np.concatenate([thetas, thetas])[k])
    return Moments(
        sx=0.0,
        sy=0.0,
        sz=sz,
        var_sx=var_s,
        var_sy=var_s,
        var_sz=max(var_sz, 0.0),
        n=nc_mean + nq_mean,
        n_a=n_a,
        n_b=n_b,
        n_ab=float(w @ (nc * nq)),
        quad_min=float(qv[k]),
        quad_argmin=(theta, "+", "P" if k >= theta_points else "X"),
    )


@dataclass(frozen=True)
class BoundEntry:
    name: str
    lhs: float
    rhs: float
    slack: float
    holds: bool


@dataclass
class BoundReport:
    entries: list[BoundEntry] = field(default_factory=list)

    def add(self, name: str, lhs: float, rhs: float, slack: float | None = None):
        s = lhs - rhs if slack is None else slack
        self.entries.append(BoundEntry(name, float(lhs), float(rhs), float(s), bool(s >= -BOUND_TOL)))

    @property
    def violations(self) -> list[BoundEntry]:
        return [e for e in self.entries if not e.holds]

    @property
    def min_slack(self) -> float:
        return min(e.slack for e in self.entries)

    def get(self, name: str) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def verify_cat2_bounds(model: Cat2MomentModel, theta_points: int = 64) -> BoundReport:
    """Check every inequality a local-hidden-state model must satisfy.

    Each entry reads ``lhs >= rhs`` (slack = lhs - rhs), except the
    quadrature entry, which is an equality scored as ``-|lhs - rhs|``.
    """
    m = cat2_predicted_moments(model, theta_points)
    w, nc, nq, _ = _frame(model)
    # N_A N_B + 1/2 N_(steered side)
    hz_floor = m.n_ab + 0.5 * (m.n_b if model.steered == "B" else m.n_a)
    var_floor = 0.5 * m.n_ab + 0.25 * (m.n_a + m.n_b)
    sgn = 1.0 if model.steered == "B" else -1.0
    gen_hz = m.var_sx + m.var_sy - 0.25 * m.n + sgn * 0.5 * m.sz
    r = BoundReport()
    r.add("var_sx_floor", m.var_sx, var_floor)
    r.add("var_sy_floor", m.var_sy, var_floor)
    r.add("sz_mean", 0.25 * (m.n_a + m.n_b), 0.5 * abs(m.sz))
    r.add("spin_squeezing_sx", m.var_sx, 0.5 * abs(m.sz))
    r.add("spin_squeezing_sy", m.var_sy, 0.5 * abs(m.sz))
    r.add("spin_squeezing_sz", m.var_sz, 0.5 * max(abs(m.sx), abs(m.sy)))
    r.add("hz", m.var_sx + m.var_sy, 0.5 * m.n)
    r.add("generalized_hz_chain", gen_hz, hz_floor)
    r.add("generalized_hz", gen_hz, 0.0)
    r.add("generalized_hz_floor", hz_floor, 0.0)
    quad_ref = 0.5 * m.n + 0.5
    r.add("quadrature_value", m.quad_min, quad_ref, -abs(m.quad_min - quad_ref))
    r.add("quadrature_squeezing", m.quad_min, 0.5)
    corr = m.sx**2 + m.sy**2
    r.add("strong_correlation", hz_floor, corr)
    q_means = np.array([local_quadrature_moments(rho)[:2] for rho in model.lhs])
    key_rhs = 0.25 * float(w @ ((model.x**2 + model.p**2) * (q_means**2).sum(axis=1)))
    r.add("key_inequality", key_rhs, corr)
    return r


@dataclass(frozen=True)
class Cat2Ranges:
    """Sampling window for :func:`sample_cat2_model`.

    The default ``v_window`` pins <V> at 1/2 and ``centered`` balances the
    ensemble so the quadrature moments match those of a physical mode.  Both
    can be relaxed to probe models that no quantum state can underlie.
    """

    max_first: float = 2.0
    max_slack: float = 3.0
    u_window: tuple[float, float] = (-5.0, 5.0)
    v_window: tuple[float, float] = (0.5, 0.5)
    max_n_classical: float = 12.0
    b_n_max: int = 4
    centered: bool = True
    max_tries: int = 1000


def sample_cat2_model(seed, n_lambda: int, ranges: Cat2Ranges = Cat2Ranges(),
                      steered: str = "B") -> Cat2MomentModel:
    """Random finite-lambda model; deterministic for a given seed."""
    rg = ranges
    if n_lambda < 1:
        raise InvalidArgument("n_lambda must be positive")
    if rg.max_first < 0 or rg.max_slack < 0 or rg.b_n_max < 0:
        raise InvalidArgument("ranges must be nonnegative")
    if rg.v_window[0] > rg.v_window[1] or rg.u_window[0] > rg.u_window[1]:
        raise InvalidArgument("window bounds are reversed")
    # a lambda with zero first moments needs slack >= <V> to keep N >= 0
    if rg.max_slack < rg.v_window[0] or rg.max_n_classical < max(0.0, -rg.v_window[1]):
        raise InvalidArgument("ranges admit no model with nonnegative boson number")
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(n_lambda))
    x = rng.uniform(-rg.max_first, rg.max_first, n_lambda)
    p = rng.uniform(-rg.max_first, rg.max_first, n_lambda)
    u = rng.uniform(*rg.u_window, n_lambda)
    v = rng.uniform(*rg.v_window, n_lambda)
    if rg.centered:
        x, p, u = x - w @ x, p - w @ p, u - w @ u
    x2 = np.empty(n_lambda)
    p2 = np.empty(n_lambda)
    rejected = 0
    for k in range(n_lambda):
        for _ in range(rg.max_tries):
            x2[k] = x[k] ** 2 + rng.uniform(0, rg.max_slack)
            p2[k] = p[k] ** 2 + rng.uniform(0, rg.max_slack)
            n_cl = 0.5 * (x2[k] + p2[k]) - v[k]
            if 0.0 <= n_cl <= rg.max_n_classical:
                break
            rejected += 1
        else:
            raise InvalidArgument("ranges too tight: rejection sampling did not terminate")
    if rg.centered:
        # raise the smaller side uniformly so that <x^2> = <p^2> over the ensemble
        d = w @ x2 - w @ p2
        if d > 0:
            p2 = p2 + d
        else:
            x2 = x2 - d
    rate = rejected / (rejected + n_lambda)
    log.debug("cat2 sampler: %d rejected of %d draws (rate %.3f)", rejected, rejected + n_lambda, rate)
    lhs = tuple(local_state(rg.b_n_max + 1, rng.dirichlet(np.ones(rg.b_n_max + 1))) for _ in range(n_lambda))
    model = Cat2MomentModel(w, x, p, x2, p2, u, v, lhs, steered)
    object.__setattr__(model, "_rejection_rate", rate)
    return model


def rejection_rate(model: Cat2MomentModel) -> float:
    return getattr(model, "_rejection_rate", 0.0)


def lhs_conditional_state(model: Cat2MomentModel, p_given_lambda, normalize: bool = True):
    """Hidden states reweighted by P(alpha | lambda) for one untrusted-side outcome.

    With ``normalize=False`` the unnormalized matrix is returned, whose trace
    is the outcome probability.
    """
    pa = np.asarray(p_given_lambda, dtype=float)
    if pa.shape != (model.n_lambda,):
        raise InvalidArgument("need one conditional probability per lambda")
    if np.any(pa < 0) or np.any(pa > 1):
        raise InvalidArgument("conditional probabilities must lie in [0, 1]")
    weights = model.weights * pa
    total = weights.sum()
    if total <= NULL_EVENT:
        raise ConditioningOnNullEvent(f"outcome has probability {total}")
    m = sum(wk * r.matrix for wk, r in zip(weights, model.lhs))
    if not normalize:
        return m
    return DensityOperator(model.lhs[0].basis, m / total)


def local_quadrature_moments(rho: DensityOperator) -> tuple[float, float, float, float]:
    """<x>, <p>, <x^2>, <p^2> of a single-mode state (exact below the top level)."""
    a = ladder(rho.basis.dim)
    x = (a + a.conj().T) / np.sqrt(2)
    p = (a - a.conj().T) / (np.sqrt(2) * 1j)
    vals = [np.trace(op @ rho.matrix).real for op in (x, p, x @ x, p @ p)]
    return tuple(float(v) for v in vals)


def lhs_side_gap(rho: DensityOperator) -> float:
    """<x^2>+<p^2>-1 - (<x>^2+<p>^2), nonnegative for any state with a quantum side."""
    x, p, x2, p2 = local_quadrature_moments(rho)
    return x2 + p2 - 1.0 - (x**2 + p**2)


def classical_side_gap(model: Cat2MomentModel) -> np.ndarray:
    """Per-lambda x2+p2 - (x^2+p^2), nonnegative for any classical side."""
    return model.x2 + model.p2 - model.x**2 - model.p**2
