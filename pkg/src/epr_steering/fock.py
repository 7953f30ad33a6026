"""Truncated two-mode Fock space and the operator algebra built on it.

Every operator is a dense complex matrix on the product space
``H_A (x) H_B`` with row-major flat index ``i_a * dim_b + i_b`` (mode A is
the slow axis).  Operators are built from the truncated ladder matrices
``a|n> = sqrt(n)|n-1>``; identities that need the canonical commutator only
hold on the *guarded* subspace ``n_A <= n_max_a - GUARD``,
``n_B <= n_max_b - GUARD``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import InvalidArgument, UnsupportedBasis

# absolute tolerance for complex scalar / matrix entry equality
ATOL = 1e-12
GUARD = 2


@dataclass(frozen=True)
class LocalBasis:
    """Basis of a single subsystem: a Fock mode or a plain qudit."""

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in ("fock", "qudit"):
            raise InvalidArgument(f"unknown basis kind {self.kind!r}")
        if self.dim < 1:
            raise InvalidArgument(f"dimension must be positive, got {self.dim}")

    @property
    def n_max(self) -> int:
        return self.dim - 1


@dataclass(frozen=True)
class BipartiteBasis:
    kind: str
    dim_a: int
    dim_b: int

    def __post_init__(self):
        if self.kind not in ("fock", "qudit"):
            raise InvalidArgument(f"unknown basis kind {self.kind!r}")
        if self.dim_a < 1 or self.dim_b < 1:
            raise InvalidArgument(f"dimensions must be positive, got {self.dim_a}x{self.dim_b}")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    @property
    def n_max_a(self) -> int:
        return self.dim_a - 1

    @property
    def n_max_b(self) -> int:
        return self.dim_b - 1

    @property
    def a(self) -> LocalBasis:
        return LocalBasis(self.kind, self.dim_a)

    @property
    def b(self) -> LocalBasis:
        return LocalBasis(self.kind, self.dim_b)

    def index(self, i_a: int, i_b: int) -> int:
        if not (0 <= i_a < self.dim_a and 0 <= i_b < self.dim_b):
            raise InvalidArgument(f"label ({i_a}, {i_b}) out of range for {self}")
        return i_a * self.dim_b + i_b

    def labels(self, flat: int) -> tuple[int, int]:
        if not 0 <= flat < self.dim:
            raise InvalidArgument(f"flat index {flat} out of range")
        return divmod(flat, self.dim_b)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        for i_a in range(self.dim_a):
            for i_b in range(self.dim_b):
                yield i_a, i_b

    def total_number(self) -> np.ndarray:
        """n_A + n_B for every flat index (fock only)."""
        self._require_fock()
        na, nb = np.divmod(np.arange(self.dim), self.dim_b)
        return na + nb

    def guard_mask(self, guard: int = GUARD) -> np.ndarray:
        """Boolean mask of flat indices inside the guarded subspace."""
        self._require_fock()
        na, nb = np.divmod(np.arange(self.dim), self.dim_b)
        return (na <= self.n_max_a - guard) & (nb <= self.n_max_b - guard)

    def _require_fock(self):
        if self.kind != "fock":
            raise UnsupportedBasis(f"operation needs a fock basis, got {self.kind}")


def make_basis(kind: str, sizes: tuple[int, int]) -> BipartiteBasis:
    """Build a bipartite basis.

    For ``kind="fock"`` the sizes are the truncations ``(n_max_a, n_max_b)``
    (so ``dim_a = n_max_a + 1``); for ``kind="qudit"`` they are the local
    dimensions.
    """
    s_a, s_b = (int(s) for s in sizes)
    if kind == "fock":
        if s_a < 0 or s_b < 0:
            raise InvalidArgument(f"fock truncation must be >= 0, got {sizes}")
        return BipartiteBasis("fock", s_a + 1, s_b + 1)
    if kind == "qudit":
        if s_a < 1 or s_b < 1:
            raise InvalidArgument(f"qudit dimensions must be >= 1, got {sizes}")
        return BipartiteBasis("qudit", s_a, s_b)
    raise InvalidArgument(f"unknown basis kind {kind!r}")


def fock(n_max_a: int, n_max_b: int) -> BipartiteBasis:
    return make_basis("fock", (n_max_a, n_max_b))


def qudit(d_a: int, d_b: int) -> BipartiteBasis:
    return make_basis("qudit", (d_a, d_b))


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense operator on a (bipartite or local) basis."""

    basis: BipartiteBasis | LocalBasis
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape != (self.basis.dim, self.basis.dim):
            raise InvalidArgument(f"matrix shape {m.shape} does not match basis dim {self.basis.dim}")
        if self.hermitian and np.max(np.abs(m - m.conj().T), initial=0.0) > ATOL:
            raise InvalidArgument("operator flagged Hermitian is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, Operator):
            if other.basis != self.basis:
                raise InvalidArgument("basis mismatch")
            return other.matrix
        return np.asarray(other)

    def __add__(self, other):
        return Operator(self.basis, self.matrix + self._coerce(other))

    def __sub__(self, other):
        return Operator(self.basis, self.matrix - self._coerce(other))

    def __neg__(self):
        return Operator(self.basis, -self.matrix, self.hermitian)

    def __mul__(self, scalar):
        if isinstance(scalar, Operator):
            return NotImplemented
        return Operator(self.basis, self.matrix * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Operator(self.basis, self.matrix / scalar)

    def __matmul__(self, other):
        return Operator(self.basis, self.matrix @ self._coerce(other))

    def dag(self) -> "Operator":
        return Operator(self.basis, self.matrix.conj().T, self.hermitian)

    def as_hermitian(self) -> "Operator":
        """Re-flag as Hermitian (checked), symmetrising away rounding noise."""
        m = self.matrix
        if np.max(np.abs(m - m.conj().T), initial=0.0) > ATOL:
            raise InvalidArgument("operator is not Hermitian")
        return Operator(self.basis, 0.5 * (m + m.conj().T), True)


def commutator(x: Operator, y: Operator) -> Operator:
    return x @ y - y @ x


def ladder(dim: int) -> np.ndarray:
    """Truncated annihilation matrix on ``dim`` Fock levels."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def lift_a(basis: BipartiteBasis, local: np.ndarray) -> np.ndarray:
    return np.kron(local, np.eye(basis.dim_b))


def lift_b(basis: BipartiteBasis, local: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(basis.dim_a), local)


@dataclass(frozen=True, eq=False)
class OperatorSet:
    """Every operator of the two-mode algebra on one Fock basis.

    Spin and number operators come from the ladder form (exact on any
    truncation since they conserve total number); the auxiliary
    ``u_*``/``v_*`` operators come from their quadrature definitions so the
    guarded identities can be checked against them.
    """

    basis: BipartiteBasis
    identity: Operator
    a: Operator
    ad: Operator
    b: Operator
    bd: Operator
    x_a: Operator
    p_a: Operator
    x_b: Operator
    p_b: Operator
    u_a: Operator
    u_b: Operator
    v_a: Operator
    v_b: Operator
    sx: Operator
    sy: Operator
    sz: Operator
    n_a: Operator
    n_b: Operator
    n: Operator
    n_minus: Operator
    sx2: Operator
    sy2: Operator
    sz2: Operator
    n_ab: Operator = field(repr=False)

    def hermitian_members(self) -> dict[str, Operator]:
        return {k: v for k, v in vars(self).items() if isinstance(v, Operator) and v.hermitian}


def _h(basis, m) -> Operator:
    m = np.asarray(m, dtype=complex)
    return Operator(basis, 0.5 * (m + m.conj().T), True)


@lru_cache(maxsize=32)
def build_operator_set(basis: BipartiteBasis) -> OperatorSet:
    basis._require_fock()
    la, lb = ladder(basis.dim_a), ladder(basis.dim_b)
    a = lift_a(basis, la)
    b = lift_b(basis, lb)
    ad, bd = a.conj().T, b.conj().T
    r2 = np.sqrt(2.0)
    x_a, p_a = (a + ad) / r2, (a - ad) / (r2 * 1j)
    x_b, p_b = (b + bd) / r2, (b - bd) / (r2 * 1j)
    n_a, n_b = ad @ a, bd @ b
    sx = (bd @ a + ad @ b) / 2
    sy = (bd @ a - ad @ b) / 2j
    sz = 0.5 * (n_b - n_a)
    op = lambda m: Operator(basis, m)  # noqa: E731
    return OperatorSet(
        basis=basis,
        identity=_h(basis, np.eye(basis.dim)),
        a=op(a),
        ad=op(ad),
        b=op(b),
        bd=op(bd),
        x_a=_h(basis, x_a),
        p_a=_h(basis, p_a),
        x_b=_h(basis, x_b),
        p_b=_h(basis, p_b),
        u_a=_h(basis, (x_a @ p_a + p_a @ x_a) / 2),
        u_b=_h(basis, (x_b @ p_b + p_b @ x_b) / 2),
        v_a=_h(basis, (x_a @ p_a - p_a @ x_a) / 2j),
        v_b=_h(basis, (x_b @ p_b - p_b @ x_b) / 2j),
        sx=_h(basis, sx),
        sy=_h(basis, sy),
        sz=_h(basis, sz),
        n_a=_h(basis, n_a),
        n_b=_h(basis, n_b),
        n=_h(basis, n_a + n_b),
        n_minus=_h(basis, n_b - n_a),
        sx2=_h(basis, sx @ sx),
        sy2=_h(basis, sy @ sy),
        sz2=_h(basis, sz @ sz),
        n_ab=_h(basis, n_a @ n_b),
    )


def two_mode_quadrature(ops: OperatorSet, theta: float, sign: int = +1) -> tuple[Operator, Operator]:
    """Two-mode quadratures ``X_theta(+-)`` and ``P_theta(+-) = X_{theta+pi/2}(+-)``.

    ``X_theta(+-) = (x_A cos + p_A sin +- (x_B cos + p_B sin)) / sqrt(2)``.
    """
    if not np.isfinite(theta):
        raise InvalidArgument(f"theta must be finite, got {theta}")
    if sign not in (+1, -1):
        raise InvalidArgument(f"sign must be +1 or -1, got {sign}")
    basis = ops.basis
    return (
        _h(basis, _quad_matrix(ops, theta, sign)),
        _h(basis, _quad_matrix(ops, theta + np.pi / 2, sign)),
    )


def _quad_matrix(ops: OperatorSet, theta: float, sign: int) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return (c * ops.x_a.matrix + s * ops.p_a.matrix + sign * (c * ops.x_b.matrix + s * ops.p_b.matrix)) / np.sqrt(2)


def default_theta_grid(points: int = 64) -> np.ndarray:
    if points < 1:
        raise InvalidArgument("theta grid must be non-empty")
    return np.linspace(0.0, np.pi, points, endpoint=False)


def quadrature_directions(thetas) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient vectors of ``X``/``P`` in the basis ``(x_A, p_A, x_B, p_B)``.

    Returns ``(labels, vectors)``; ``labels`` rows are ``(theta, sign, is_p)``.
    """
    labels, vecs = [], []
    for theta in thetas:
        for sign in (+1, -1):
            for is_p in (0, 1):
                t = theta + is_p * np.pi / 2
                c, s = np.cos(t), np.sin(t)
                labels.append((theta, sign, is_p))
                vecs.append(np.array([c, s, sign * c, sign * s]) / np.sqrt(2))
    return np.array(labels), np.array(vecs)


def quadrature_moments(ops: OperatorSet, rho_matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Means and symmetrized second moments of ``(x_A, p_A, x_B, p_B)``.

    Since ``X = v . q`` as matrices, ``<X^2> = v^T M v`` holds exactly in the
    truncated space, so a grid of quadratures costs only these 14 traces.
    """
    q = [ops.x_a.matrix, ops.p_a.matrix, ops.x_b.matrix, ops.p_b.matrix]
    mean = expectations(np.array(q), rho_matrix)
    second = np.empty((4, 4))
    for i in range(4):
        for j in range(i, 4):
            second[i, j] = second[j, i] = np.einsum("ij,ji->", q[i] @ q[j], rho_matrix).real
    return mean, second


def quadrature_variances(ops: OperatorSet, rho_matrix: np.ndarray, thetas) -> tuple[np.ndarray, np.ndarray]:
    """``(labels, variances)`` of every ``X_theta(+-)`` and ``P_theta(+-)`` on the grid."""
    labels, vecs = quadrature_directions(thetas)
    mean, second = quadrature_moments(ops, rho_matrix)
    cov = second - np.outer(mean, mean)
    var = np.einsum("ki,ij,kj->k", vecs, cov, vecs)
    return labels, np.maximum(var, 0.0)


def _rho_matrix(op: Operator, rho) -> np.ndarray:
    from .states import DensityOperator

    if isinstance(rho, DensityOperator):
        if rho.basis != op.basis:
            raise InvalidArgument("operator and state live on different bases")
        return rho.matrix
    raise InvalidArgument(f"expected a DensityOperator, got {type(rho).__name__}")


def expectation(op: Operator, rho) -> complex:
    """``Tr(op rho)``; snapped to real when ``op`` is Hermitian."""
    m = _rho_matrix(op, rho)
    val = complex(np.einsum("ij,ji->", op.matrix, m))
    if op.hermitian:
        if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
            raise InvalidArgument(f"Hermitian expectation has imaginary part {val.imag}")
        return complex(val.real, 0.0)
    return val


def variance(op: Operator, rho) -> float:
    if not op.hermitian:
        raise InvalidArgument("variance needs a Hermitian operator")
    mean = expectation(op, rho).real
    second = expectation(op @ op, rho).real
    return max(second - mean * mean, 0.0)


def expectations(stack: np.ndarray, rho_matrix: np.ndarray) -> np.ndarray:
    """Batched ``Tr(M_k rho)`` for a ``(K, d, d)`` stack of Hermitian operators."""
    return np.einsum("kij,ji->k", stack, rho_matrix).real
