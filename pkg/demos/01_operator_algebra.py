"""
Two-mode operator algebra on a truncated Fock space
===================================================

Build the spin and quadrature operators for two bosonic modes and check the
identities that the witnesses rely on. Truncation spoils identities on the
top Fock levels, so every comparison is made on the guarded subspace.
"""
import numpy as np

from epr_steering.fock import build_operator_set, commutator, fock, two_mode_quadrature

basis = fock(6, 6)
ops = build_operator_set(basis)
guard = np.diag(basis.guard_mask().astype(float))
print(f"basis dim {basis.dim}, guarded columns {int(guard.trace())}")


def guarded_error(lhs, rhs):
    return np.max(np.abs((lhs - rhs) @ guard))


# spin operators written with single-mode quadratures
xa, pa, xb, pb = (m.matrix for m in (ops.x_a, ops.p_a, ops.x_b, ops.p_b))
print("S_x from quadratures:", guarded_error(ops.sx.matrix, (xa @ xb + pa @ pb) / 2))
print("S_y from quadratures:", guarded_error(ops.sy.matrix, (pa @ xb - xa @ pb) / 2))

# Casimir: S^2 = (N/2)(N/2 + 1)
half_n = ops.n.matrix / 2
casimir = ops.sx2.matrix + ops.sy2.matrix + ops.sz2.matrix
print("Casimir:", guarded_error(casimir, half_n @ (half_n + np.eye(basis.dim))))

# canonical commutators, single-mode and two-mode
print("[x_A, p_A] = i:", guarded_error(commutator(ops.x_a, ops.p_a).matrix, 1j * np.eye(basis.dim)))
X, P = two_mode_quadrature(ops, 0.4, -1)
print("[X, P] = i:", guarded_error(commutator(X, P).matrix, 1j * np.eye(basis.dim)))

# the top level is where truncation shows up
c = commutator(ops.x_a, ops.p_a).matrix
top = basis.index(6, 0)
print("[x_A, p_A] on |6,0>:", np.round(c[top, top], 3))
