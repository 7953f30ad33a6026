import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epr_steering import InvalidArgument, UnsupportedBasis
from epr_steering.fock import (
    Operator,
    build_operator_set,
    commutator,
    default_theta_grid,
    expectation,
    fock,
    make_basis,
    quadrature_variances,
    qudit,
    two_mode_quadrature,
    variance,
)
from epr_steering.states import density, mixture, pure_state

import oracles


def guarded(basis):
    return np.diag(basis.guard_mask().astype(float))


def close_on_guard(lhs, rhs, basis, tol=1e-10):
    p = guarded(basis)
    return np.max(np.abs((lhs - rhs) @ p)) <= tol


def test_make_basis_examples():
    b = fock(1, 1)
    assert b.dim == 4
    assert [b.labels(i) for i in range(4)] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert qudit(2, 2).dim == 4
    assert fock(20, 20).dim == 441


@pytest.mark.parametrize("kind,sizes", [("fock", (-1, 2)), ("qudit", (0, 2)), ("fock", (2, -3)), ("spin", (1, 1))])
def test_make_basis_rejects_bad_sizes(kind, sizes):
    with pytest.raises(InvalidArgument):
        make_basis(kind, sizes)


@given(st.integers(0, 6), st.integers(0, 6))
def test_index_map_bijective(na, nb):
    b = fock(na, nb)
    assert b.dim == (na + 1) * (nb + 1)
    flat = [b.index(i, j) for i, j in b]
    assert flat == list(range(b.dim))
    assert all(b.labels(k) == ij for k, ij in zip(flat, b))


def test_operator_set_rejects_qudit():
    with pytest.raises(UnsupportedBasis):
        build_operator_set(qudit(3, 3))


def test_hermitian_members_are_hermitian():
    ops = build_operator_set(fock(5, 4))
    members = ops.hermitian_members()
    assert {"sx", "sy", "sz", "x_a", "p_b", "u_a", "v_b", "n", "sx2"} <= set(members)
    for op in members.values():
        assert np.max(np.abs(op.matrix - op.matrix.conj().T)) <= 1e-12


def test_number_difference_is_twice_sz():
    ops = build_operator_set(fock(4, 6))
    assert np.array_equal(ops.n_minus.matrix, 2 * ops.sz.matrix)


def test_ladder_operators_match_untruncated_oracle():
    b = fock(4, 3)
    ops = build_operator_set(b)
    for name in ("a", "ad", "b", "bd"):
        ref = oracles.matrix_of(oracles.LADDER[name], 4, 3)
        # lowering operators are exact everywhere, raising ones below the top level
        assert close_on_guard(getattr(ops, name).matrix, ref, b, 0)


def test_spin_operators_match_oracle():
    b = fock(4, 4)
    ops = build_operator_set(b)
    for mine, poly in zip((ops.sx, ops.sy, ops.sz), oracles.spin_polys()):
        assert close_on_guard(mine.matrix, oracles.matrix_of(poly, 4, 4), b, 1e-14)


def test_canonical_commutators_on_guard():
    b = fock(3, 3)
    ops = build_operator_set(b)
    eye = np.eye(b.dim)
    assert close_on_guard(commutator(ops.x_a, ops.p_a).matrix, 1j * eye, b)
    assert close_on_guard(commutator(ops.x_b, ops.p_b).matrix, 1j * eye, b)
    assert close_on_guard(ops.v_a.matrix, 0.5 * eye, b)
    assert close_on_guard(ops.v_b.matrix, 0.5 * eye, b)


def test_commutator_fails_at_top_level():
    # the truncation artifact the guard band exists for
    b = fock(3, 3)
    ops = build_operator_set(b)
    c = commutator(ops.x_a, ops.p_a).matrix
    top = b.index(3, 0)
    assert abs(c[top, top] - 1j) > 1


def test_casimir_on_low_number_sectors():
    b = fock(4, 4)
    ops = build_operator_set(b)
    lhs = ops.sx2.matrix + ops.sy2.matrix + ops.sz2.matrix
    half_n = ops.n.matrix / 2
    rhs = half_n @ (half_n + np.eye(b.dim))
    cols = np.diag((b.total_number() <= 4).astype(float))
    assert np.max(np.abs((lhs - rhs) @ cols)) <= 1e-10


def test_spin_and_number_in_quadrature_form():
    b = fock(6, 6)
    o = build_operator_set(b)
    xa, pa, xb, pb = (m.matrix for m in (o.x_a, o.p_a, o.x_b, o.p_b))
    assert close_on_guard(o.sx.matrix, (xa @ xb + pa @ pb) / 2, b)
    assert close_on_guard(o.sy.matrix, (pa @ xb - xa @ pb) / 2, b)
    assert close_on_guard(o.sz.matrix, (xb @ xb + pb @ pb - xa @ xa - pa @ pa) / 4, b)
    assert close_on_guard(o.n_a.matrix, (xa @ xa + pa @ pa) / 2 - o.v_a.matrix, b)
    assert close_on_guard(o.n_b.matrix, (xb @ xb + pb @ pb) / 2 - o.v_b.matrix, b)


def test_spin_squares_in_quadrature_form():
    b = fock(6, 6)
    o = build_operator_set(b)
    xa, pa, xb, pb = (m.matrix for m in (o.x_a, o.p_a, o.x_b, o.p_b))
    ua, ub, va, vb = (m.matrix for m in (o.u_a, o.u_b, o.v_a, o.v_b))
    sx2 = (xa @ xa @ xb @ xb + pa @ pa @ pb @ pb) / 4 + (ua @ ub - va @ vb) / 2
    sy2 = (pa @ pa @ xb @ xb + xa @ xa @ pb @ pb) / 4 - (ua @ ub + va @ vb) / 2
    assert close_on_guard(o.sx2.matrix, sx2, b)
    assert close_on_guard(o.sy2.matrix, sy2, b)


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.1, 2.9])
@pytest.mark.parametrize("sign", [1, -1])
def test_two_mode_quadrature_square(theta, sign):
    b = fock(6, 6)
    o = build_operator_set(b)
    X, P = two_mode_quadrature(o, theta, sign)
    c, s = np.cos(theta), np.sin(theta)
    xa, pa, xb, pb = (m.matrix for m in (o.x_a, o.p_a, o.x_b, o.p_b))
    ua, ub = o.u_a.matrix, o.u_b.matrix
    xa_t2 = c * c * xa @ xa + s * s * pa @ pa + 2 * s * c * ua
    xb_t2 = c * c * xb @ xb + s * s * pb @ pb + 2 * s * c * ub
    cross = (c * xa + s * pa) @ (c * xb + s * pb)
    rhs = (xa_t2 + xb_t2 + 2 * sign * cross) / 2
    assert close_on_guard(X.matrix @ X.matrix, rhs, b)
    X2, _ = two_mode_quadrature(o, theta + np.pi / 2, sign)
    assert np.max(np.abs(P.matrix - X2.matrix)) <= 1e-12
    assert close_on_guard(commutator(X, P).matrix, 1j * np.eye(b.dim), b)


def test_two_mode_quadrature_examples():
    b = fock(3, 3)
    o = build_operator_set(b)
    X, _ = two_mode_quadrature(o, 0.0, +1)
    assert np.allclose(X.matrix, (o.x_a.matrix + o.x_b.matrix) / np.sqrt(2), atol=1e-14)
    Xq, _ = two_mode_quadrature(o, np.pi / 2, +1)
    _, P0 = two_mode_quadrature(o, 0.0, +1)
    assert np.max(np.abs(Xq.matrix - P0.matrix)) <= 1e-12
    vac = pure_state(b, [(0, 0, 1.0)])
    Xm, _ = two_mode_quadrature(o, 0.3, -1)
    assert abs(expectation(Xm @ Xm, vac) - 0.5) <= 1e-12
    with pytest.raises(InvalidArgument):
        two_mode_quadrature(o, np.nan)


def test_quadrature_variances_match_dense_operators():
    # covariance shortcut versus explicit X, P matrices
    b = fock(4, 4)
    o = build_operator_set(b)
    rng = np.random.default_rng(3)
    rho = density(b, oracles.random_density(b.dim, rng, rank=3))
    thetas = default_theta_grid(12)
    labels, var = quadrature_variances(o, rho.matrix, thetas)
    for (theta, sign, is_p), v in zip(labels, var):
        X, P = two_mode_quadrature(o, theta, int(sign))
        assert abs(variance(P if is_p else X, rho) - v) <= 1e-10


def test_expectation_examples():
    b = fock(2, 2)
    o = build_operator_set(b)
    psi = pure_state(b, [(0, 1, 1.0), (1, 0, 1.0)])
    assert abs(expectation(o.identity, psi) - 1) <= 1e-12
    assert abs(expectation(o.sx, psi) - 0.5) <= 1e-12
    assert abs(expectation(o.n, pure_state(b, [(2, 0, 1.0)])) - 2) <= 1e-12
    assert variance(o.sx, psi) <= 1e-12
    assert abs(variance(o.sy, psi) - 0.25) <= 1e-12


def test_expectation_errors():
    o = build_operator_set(fock(2, 2))
    other = pure_state(fock(1, 1), [(0, 0, 1.0)])
    with pytest.raises(InvalidArgument):
        expectation(o.sx, other)
    with pytest.raises(InvalidArgument):
        variance(o.a, pure_state(fock(2, 2), [(0, 0, 1.0)]))
    with pytest.raises(InvalidArgument):
        Operator(fock(1, 1), np.array([[0, 1], [0, 0]]), hermitian=True)


def test_variance_zero_on_rank_one_support():
    b = fock(2, 2)
    o = build_operator_set(b)
    rho = pure_state(b, [(1, 1, 1.0)])
    for op in (o.n, o.sz, o.n_ab):
        assert variance(op, rho) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_mixed_state_variance_concave(seed, n_terms):
    b = fock(3, 3)
    o = build_operator_set(b)
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(n_terms))
    parts = [density(b, oracles.random_density(b.dim, rng, rank=2)) for _ in range(n_terms)]
    rho = mixture(list(zip(w, parts)))
    for op in (o.sx, o.sz, o.x_a, o.n_ab):
        avg = sum(wk * variance(op, r) for wk, r in zip(w, parts))
        assert variance(op, rho) >= avg - 1e-10
