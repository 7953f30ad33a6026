"""Steering and entanglement tests for two-mode states.

Every test works from a :class:`Moments` record, built either from a
density operator (:func:`moments`) or from a hidden-variable model's
predicted moments.  Each record carries ``value``, ``bound`` and a
``margin`` whose sign convention is uniform: ``margin > epsilon`` means
the inequality respected by Category-1/2 states is violated.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from .errors import InvalidArgument, VacuousTest
from .fock import OperatorSet, build_operator_set, default_theta_grid, expectations, quadrature_variances
from .states import DensityOperator, check_ssr

EPSILON = 1e-9

STEERABLE = "steerable"
ENTANGLED = "entangled"
INCONCLUSIVE = "inconclusive"


@dataclass
class Moments:
    """Spin/number moments the tests need.

    For hidden-variable records ``var_sz`` is a lower bound rather than the
    exact variance.  A test that does not fire on a lower bound cannot fire
    on the true value, so certification stays sound.
    """

    sx: float
    sy: float
    sz: float
    var_sx: float
    var_sy: float
    var_sz: float
    n: float
    n_a: float
    n_b: float
    n_ab: float
    quad_min: float
    quad_argmin: tuple = ()

    @property
    def adag_b_sq(self) -> float:
        return self.sx**2 + self.sy**2


@dataclass
class WitnessRecord:
    name: str
    value: float
    bound: float
    margin: float
    verdict: str
    steered: str | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class WitnessReport:
    records: list[WitnessRecord]
    ssr_warning: bool
    summary: str
    entangled: bool
    steerable: bool

    def fired(self) -> list[WitnessRecord]:
        return [r for r in self.records if r.verdict != INCONCLUSIVE]

    def get(self, name: str, steered: str | None = None) -> WitnessRecord:
        for r in self.records:
            if r.name == name and r.steered == steered:
                return r
        raise KeyError((name, steered))

    def to_dict(self) -> dict:
        return {
            "records": [asdict(r) for r in self.records],
            "ssr_warning": self.ssr_warning,
            "summary": self.summary,
            "entangled": self.entangled,
            "steerable": self.steerable,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WitnessReport":
        return cls(
            records=[WitnessRecord(**r) for r in d["records"]],
            ssr_warning=d["ssr_warning"],
            summary=d["summary"],
            entangled=d["entangled"],
            steerable=d["steerable"],
        )


def moments(rho: DensityOperator, ops: OperatorSet | None = None, theta_points: int = 64) -> Moments:
    """Exact quantum moments of ``rho`` (one batched trace per operator family)."""
    if ops is None:
        ops = build_operator_set(rho.basis)
    if rho.basis != ops.basis:
        raise InvalidArgument("state and operator set live on different bases")
    names = ("sx", "sy", "sz", "sx2", "sy2", "sz2", "n", "n_a", "n_b", "n_ab")
    stack = np.array([getattr(ops, k).matrix for k in names])
    vals = dict(zip(names, expectations(stack, rho.matrix)))
    labels, qvar = quadrature_variances(ops, rho.matrix, default_theta_grid(theta_points))
    k = int(np.argmin(qvar))
    theta, sign, is_p = labels[k]
    return Moments(
        sx=vals["sx"],
        sy=vals["sy"],
        sz=vals["sz"],
        var_sx=max(vals["sx2"] - vals["sx"] ** 2, 0.0),
        var_sy=max(vals["sy2"] - vals["sy"] ** 2, 0.0),
        var_sz=max(vals["sz2"] - vals["sz"] ** 2, 0.0),
        n=vals["n"],
        n_a=vals["n_a"],
        n_b=vals["n_b"],
        n_ab=vals["n_ab"],
        quad_min=float(qvar[k]),
        quad_argmin=(float(theta), "+" if sign > 0 else "-", "P" if is_p else "X"),
    )


def _m(state, ops, theta_points=64) -> Moments:
    if isinstance(state, Moments):
        return state
    return moments(state, ops, theta_points)


def _verdict(margin: float, kind: str, eps: float) -> str:
    return kind if margin > eps else INCONCLUSIVE


def _check_steered(steered: str):
    if steered not in ("A", "B"):
        raise InvalidArgument(f"steered subsystem must be 'A' or 'B', got {steered!r}")


def bloch_vector_test(state, ops=None, eps: float = EPSILON) -> WitnessRecord:
    m = _m(state, ops)
    value = max(abs(m.sx), abs(m.sy))
    return WitnessRecord("bloch_vector", value, 0.0, value, _verdict(value, STEERABLE, eps))


_PAIRS = [("x", "y", "z"), ("y", "x", "z"), ("y", "z", "x"), ("z", "y", "x"), ("z", "x", "y"), ("x", "z", "y")]


def spin_squeezing_test(state, ops=None, eps: float = EPSILON) -> list[WitnessRecord]:
    """One record per ordered pair: ``S_alpha`` squeezed against ``S_beta``.

    Fires when ``var(S_alpha) < |<S_gamma>|/2 < var(S_beta)``; the margin is
    the smaller of the two gaps.
    """
    m = _m(state, ops)
    mean = {"x": m.sx, "y": m.sy, "z": m.sz}
    var = {"x": m.var_sx, "y": m.var_sy, "z": m.var_sz}
    out = []
    for alpha, beta, gamma in _PAIRS:
        bound = 0.5 * abs(mean[gamma])
        margin = min(bound - var[alpha], var[beta] - bound)
        out.append(
            WitnessRecord(
                f"spin_squeezing_{alpha}{beta}",
                var[alpha],
                bound,
                margin,
                _verdict(margin, STEERABLE, eps),
                extra={"var_beta": var[beta]},
            )
        )
    return out


def hz_test(state, ops=None, eps: float = EPSILON) -> WitnessRecord:
    m = _m(state, ops)
    if m.n <= eps:
        raise VacuousTest("<N> vanishes; the Hillery-Zubairy ratio is undefined")
    value = m.var_sx + m.var_sy - 0.5 * m.n
    e_hz = (m.var_sx + m.var_sy) / (0.5 * m.n)
    return WitnessRecord("hz", value, 0.0, -value, _verdict(-value, STEERABLE, eps), extra={"E_HZ": e_hz})


def generalized_hz_test(state, ops=None, steered: str = "B", eps: float = EPSILON) -> WitnessRecord:
    _check_steered(steered)
    m = _m(state, ops)
    sgn = 1.0 if steered == "B" else -1.0
    value = m.var_sx + m.var_sy - 0.25 * m.n + sgn * 0.5 * m.sz
    extra = {}
    if m.n > eps:
        trusted_share = (m.n_a if steered == "B" else m.n_b) / m.n
        extra = {"E_HZ": (m.var_sx + m.var_sy) / (0.5 * m.n), "ratio_bound": trusted_share}
    return WitnessRecord("generalized_hz", value, 0.0, -value, _verdict(-value, STEERABLE, eps), steered, extra)


def quad_squeeze_test(state, ops=None, theta_points: int = 64, eps: float = EPSILON) -> WitnessRecord:
    m = _m(state, ops, theta_points)
    margin = 0.5 - m.quad_min
    return WitnessRecord(
        "quadrature_squeezing",
        m.quad_min,
        0.5,
        margin,
        _verdict(margin, STEERABLE, eps),
        extra={"cat2_value": 0.5 * m.n + 0.5, "argmin": list(m.quad_argmin), "theta_points": theta_points},
    )


def correlation_tests(state, ops=None, steered: str = "B", eps: float = EPSILON) -> list[WitnessRecord]:
    _check_steered(steered)
    m = _m(state, ops)
    c = m.adag_b_sq
    weak = WitnessRecord("weak_correlation", c, 0.0, c, _verdict(c, STEERABLE, eps))
    ent_bound = m.n_ab
    strong_ent = WitnessRecord("strong_correlation_entanglement", c, ent_bound, c - ent_bound,
                               _verdict(c - ent_bound, ENTANGLED, eps))
    steer_bound = m.n_ab + 0.5 * (m.n_b if steered == "B" else m.n_a)
    strong_steer = WitnessRecord("strong_correlation_steering", c, steer_bound, c - steer_bound,
                                 _verdict(c - steer_bound, STEERABLE, eps), steered)
    return [weak, strong_ent, strong_steer]


def category_inequality_panel(state, ops=None, steered: str = "B", eps: float = EPSILON) -> list[WitnessRecord]:
    _check_steered(steered)
    m = _m(state, ops)
    var_sum = m.var_sx + m.var_sy
    sgn = 1.0 if steered == "B" else -1.0
    cat1 = var_sum - 0.5 * m.n
    cat2 = var_sum - 0.25 * m.n + sgn * 0.5 * m.sz
    cat3 = var_sum + 0.25
    return [
        WitnessRecord("category1_inequality", cat1, 0.0, -cat1, _verdict(-cat1, ENTANGLED, eps)),
        WitnessRecord("category2_inequality", cat2, 0.0, -cat2, _verdict(-cat2, STEERABLE, eps), steered),
        # holds for every quantum state, so never a verdict
        WitnessRecord("category3_inequality", cat3, 0.0, -cat3, INCONCLUSIVE),
    ]


def summarize(records: Iterable[WitnessRecord]) -> tuple[str, bool, bool]:
    verdicts = {r.verdict for r in records}
    steerable = STEERABLE in verdicts
    entangled = steerable or ENTANGLED in verdicts
    summary = STEERABLE if steerable else ENTANGLED if entangled else INCONCLUSIVE
    return summary, entangled, steerable


def evaluate_moments(m: Moments, eps: float = EPSILON, theta_points: int = 64,
                     steered: Iterable[str] = ("A", "B")) -> list[WitnessRecord]:
    records = [bloch_vector_test(m, eps=eps)]
    records += spin_squeezing_test(m, eps=eps)
    try:
        records.append(hz_test(m, eps=eps))
    except VacuousTest:
        records.append(WitnessRecord("hz", 0.0, 0.0, 0.0, INCONCLUSIVE, extra={"vacuous": True}))
    rec = quad_squeeze_test(m, theta_points=theta_points, eps=eps)
    records.append(rec)
    shared_done = False
    for s in steered:
        records.append(generalized_hz_test(m, steered=s, eps=eps))
        corr = correlation_tests(m, steered=s, eps=eps)
        panel = category_inequality_panel(m, steered=s, eps=eps)
        if not shared_done:
            records += corr[:2] + [panel[0], panel[2]]
            shared_done = True
        records += [corr[2], panel[1]]
    return records


def evaluate_all(rho: DensityOperator, eps: float = EPSILON, theta_points: int = 64,
                 steered: Iterable[str] = ("A", "B")) -> WitnessReport:
    """Run every test (both steered-subsystem choices by default)."""
    ops = build_operator_set(rho.basis)
    m = moments(rho, ops, theta_points)
    records = evaluate_moments(m, eps, theta_points, steered)
    summary, entangled, steerable = summarize(records)
    ssr = check_ssr(rho)
    return WitnessReport(records, not ssr["global"], summary, entangled, steerable)


def sign_eps(x: float, eps: float = EPSILON) -> int:
    """Three-way sign with an ``eps`` dead band."""
    return 1 if x > eps else -1 if x < -eps else 0


def ssr_quadrature_minimum(m: Moments) -> float:
    """Closed-form minimum two-mode quadrature variance for global-SSR states."""
    return 0.5 * m.n + 0.5 - abs(m.sx)


def isclose(a: float, b: float, tol: float) -> bool:
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)
