"""Density operators and the state families used by the witness suite."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, TruncationTooSmall, UnsupportedBasis
from .fock import ATOL, GUARD, BipartiteBasis, LocalBasis

PSD_TOL = 1e-10


def partial_trace(matrix: np.ndarray, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    t = matrix.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise InvalidArgument(f"keep must be 'A' or 'B', got {keep!r}")


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Validated density matrix: Hermitian, unit trace, positive semidefinite."""

    basis: BipartiteBasis | LocalBasis
    matrix: np.ndarray
    ssr_status: str = "unchecked"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise InvalidArgument(f"density matrix shape {m.shape} does not match basis dim {self.basis.dim}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > ATOL:
            raise InvalidArgument("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > ATOL:
            raise InvalidArgument(f"density matrix trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(m)[0] < -PSD_TOL:
            raise InvalidArgument("density matrix has a negative eigenvalue")
        if self.ssr_status not in ("global_compliant", "noncompliant", "unchecked"):
            raise InvalidArgument(f"bad ssr_status {self.ssr_status!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def is_bipartite(self) -> bool:
        return isinstance(self.basis, BipartiteBasis)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def _ssr_status(basis, matrix) -> str:
    if isinstance(basis, BipartiteBasis) and basis.kind == "fock":
        total = basis.total_number()
        off = total[:, None] != total[None, :]
        return "global_compliant" if np.max(np.abs(matrix[off]), initial=0.0) <= ATOL else "noncompliant"
    return "unchecked"


def density(basis, matrix, renormalize: bool = False) -> DensityOperator:
    """Wrap a matrix as a DensityOperator, computing its SSR status."""
    m = np.asarray(matrix, dtype=complex)
    if renormalize:
        m = m / np.trace(m).real
    return DensityOperator(basis, m, _ssr_status(basis, m))


def check_ssr(rho: DensityOperator) -> dict[str, bool]:
    basis = rho.basis
    if not (isinstance(basis, BipartiteBasis) and basis.kind == "fock"):
        raise UnsupportedBasis("SSR checks need a two-mode fock basis")
    total = basis.total_number()
    off = total[:, None] != total[None, :]
    out = {"global": bool(np.max(np.abs(rho.matrix[off]), initial=0.0) <= ATOL)}
    for side in ("A", "B"):
        red = partial_trace(rho.matrix, basis.dim_a, basis.dim_b, side)
        out[f"local_{side}"] = bool(np.max(np.abs(red - np.diag(np.diag(red))), initial=0.0) <= ATOL)
    return out


def pure_state(basis: BipartiteBasis, amplitudes: Sequence[tuple[int, int, complex]]) -> DensityOperator:
    """``|psi><psi|`` for ``psi = sum c |i_a, i_b>`` (normalised here)."""
    if not amplitudes:
        raise InvalidArgument("pure_state needs at least one amplitude")
    psi = np.zeros(basis.dim, dtype=complex)
    for i_a, i_b, c in amplitudes:
        psi[basis.index(int(i_a), int(i_b))] += complex(c)
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise InvalidArgument("state vector is zero")
    psi /= norm
    return density(basis, np.outer(psi, psi.conj()))


def local_state(dim: int, matrix_or_diag, kind: str = "fock") -> DensityOperator:
    """Single-mode density operator from a diagonal (1-D) or full matrix (2-D)."""
    arr = np.asarray(matrix_or_diag, dtype=complex)
    if arr.ndim == 1:
        if arr.shape[0] > dim:
            raise InvalidArgument(f"diagonal of length {arr.shape[0]} exceeds dimension {dim}")
        arr = np.diag(np.concatenate([arr, np.zeros(dim - arr.shape[0])]))
    return DensityOperator(LocalBasis(kind, dim), arr)


def mixture(terms: Sequence[tuple[float, DensityOperator]]) -> DensityOperator:
    if not terms:
        raise InvalidArgument("mixture needs at least one term")
    weights = np.array([float(w) for w, _ in terms])
    if np.any(weights <= 0):
        raise InvalidArgument("mixture weights must be positive")
    if abs(weights.sum() - 1.0) > ATOL:
        raise InvalidArgument(f"mixture weights sum to {weights.sum()!r}, expected 1")
    basis = terms[0][1].basis
    if any(r.basis != basis for _, r in terms):
        raise InvalidArgument("mixture components live on different bases")
    m = sum(w * r.matrix for w, r in zip(weights, (r for _, r in terms)))
    return density(basis, m)


@dataclass(frozen=True, eq=False)
class SeparableSpec:
    """``sum_R P_R rho_A^R (x) rho_B^R``."""

    terms: tuple[tuple[float, DensityOperator, DensityOperator], ...]
    local_ssr: bool = True

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise InvalidArgument("separable spec needs at least one term")
        weights = np.array([w for w, _, _ in terms], dtype=float)
        if np.any(weights <= 0) or np.any(weights > 1):
            raise InvalidArgument("separable weights must lie in (0, 1]")
        if abs(weights.sum() - 1.0) > ATOL:
            raise InvalidArgument(f"separable weights sum to {weights.sum()!r}, expected 1")
        dims = {(ra.basis.dim, rb.basis.dim) for _, ra, rb in terms}
        if len(dims) != 1:
            raise InvalidArgument("separable factors must share dimensions")
        for _, ra, rb in terms:
            for r in (ra, rb):
                if not isinstance(r.basis, LocalBasis):
                    raise InvalidArgument("separable factors must be single-mode states")
                if self.local_ssr and np.max(np.abs(r.matrix - np.diag(np.diag(r.matrix))), initial=0.0) > ATOL:
                    raise InvalidArgument("factor is not number-diagonal but local SSR enforcement is on")
        object.__setattr__(self, "terms", terms)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _, _ in self.terms])

    @property
    def basis(self) -> BipartiteBasis:
        _, ra, rb = self.terms[0]
        return BipartiteBasis(ra.basis.kind, ra.basis.dim, rb.basis.dim)


def separable_state(spec: SeparableSpec) -> DensityOperator:
    m = sum(w * np.kron(ra.matrix, rb.matrix) for w, ra, rb in spec.terms)
    return density(spec.basis, m)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_ssr_state(basis: BipartiteBasis, seed, max_total_n: int) -> DensityOperator:
    """Dirichlet mixture over total-number sectors of Haar-random sector states.

    Sector states only use labels inside the guarded subspace.
    """
    basis._require_fock()
    limit = min(basis.n_max_a, basis.n_max_b) - GUARD
    if max_total_n > limit or max_total_n < 0:
        raise InvalidArgument(f"max_total_n must lie in [0, {limit}] for this truncation and guard")
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(max_total_n + 1))
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    for total, w in enumerate(weights):
        idx = [basis.index(k, total - k) for k in range(total + 1)]
        v = rng.normal(size=len(idx)) + 1j * rng.normal(size=len(idx))
        v /= np.linalg.norm(v)
        m[np.ix_(idx, idx)] += w * np.outer(v, v.conj())
    return density(basis, m)


def random_separable_ssr_state(basis: BipartiteBasis, seed, n_terms: int) -> tuple[DensityOperator, SeparableSpec]:
    """Random Category-1 state: number-diagonal factors inside the guarded subspace."""
    basis._require_fock()
    if n_terms < 1:
        raise InvalidArgument("n_terms must be >= 1")
    rng = _rng(seed)
    levels_a = max(basis.n_max_a - GUARD, 0) + 1
    levels_b = max(basis.n_max_b - GUARD, 0) + 1
    weights = rng.dirichlet(np.ones(n_terms))
    # Dirichlet draws can underflow to exactly zero for a single component
    weights = np.maximum(weights, 1e-15)
    weights /= weights.sum()
    terms = []
    for w in weights:
        ra = local_state(basis.dim_a, rng.dirichlet(np.ones(levels_a)))
        rb = local_state(basis.dim_b, rng.dirichlet(np.ones(levels_b)))
        terms.append((float(w), ra, rb))
    spec = SeparableSpec(tuple(terms))
    return separable_state(spec), spec


class Category(str, enum.Enum):
    CAT1_SEPARABLE = "Cat1_separable"
    CAT2_LHS_ENTANGLED = "Cat2_LHS_entangled"
    CAT3_STEERABLE = "Cat3_steerable"
    CAT3_OR_4_STEERABLE = "Cat3_or_4_steerable"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class WernerSpec:
    d: int
    eta: float
    phi: float = field(init=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise InvalidArgument(f"Werner dimension must be an integer >= 2, got {self.d}")
        phi = (1.0 - (self.d + 1) * self.eta) / self.d
        if not -1.0 - ATOL <= phi <= 1.0 + ATOL:
            raise InvalidArgument(f"phi = {phi} outside [-1, 1]; eta = {self.eta} gives no positive Werner state")
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_phi(cls, d: int, phi: float) -> "WernerSpec":
        return cls(d, (1.0 - d * phi) / (d + 1))


def flip_operator(d: int) -> np.ndarray:
    v = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            v[j * d + i, i * d + j] = 1.0
    return v


def werner_state(spec: WernerSpec) -> DensityOperator:
    d, eta = spec.d, spec.eta
    m = (d - 1 + eta) / (d - 1) * np.eye(d * d) / d**2 - eta / (d - 1) * flip_operator(d) / d
    return density(BipartiteBasis("qudit", d, d), m)


def werner_boundaries(d: int) -> tuple[float, float]:
    """Separable/LHS and LHS/steerable thresholds in eta."""
    return 1.0 / (d + 1), 1.0 - 1.0 / d


def werner_classify(d: int, eta: float, tol: float = ATOL) -> Category:
    WernerSpec(d, eta)
    lower, upper = werner_boundaries(d)
    if abs(eta - lower) <= tol or abs(eta - upper) <= tol:
        return Category.BOUNDARY
    if eta < lower:
        return Category.CAT1_SEPARABLE
    if eta < upper:
        return Category.CAT2_LHS_ENTANGLED
    # no Bell threshold is available for d = 2
    return Category.CAT3_STEERABLE if d >= 3 else Category.CAT3_OR_4_STEERABLE


def tmsv_tail_weight(r: float, n_max: int) -> float:
    return np.tanh(abs(r)) ** (2 * n_max) / np.cosh(r) ** 2


def two_mode_squeezed_vacuum(basis: BipartiteBasis, r: float, tail_tol: float = 1e-8) -> DensityOperator:
    """Truncated ``sech r sum_n tanh^n r |n, n>`` (renormalised)."""
    basis._require_fock()
    n_max = min(basis.n_max_a, basis.n_max_b)
    if r != 0 and tmsv_tail_weight(r, n_max) > tail_tol:
        raise TruncationTooSmall(f"truncation n_max={n_max} too small for r={r}")
    psi = np.zeros(basis.dim, dtype=complex)
    t = np.tanh(r)
    for k in range(n_max + 1):
        psi[basis.index(k, k)] = t**k / np.cosh(r)
    psi /= np.linalg.norm(psi)
    return density(basis, np.outer(psi, psi.conj()))
