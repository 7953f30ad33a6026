"""Projective measurements: spectral projectors, joint and conditional statistics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningOnNullEvent, InvalidArgument
from .fock import ATOL, BipartiteBasis, LocalBasis, Operator
from .states import DensityOperator, density, partial_trace

NULL_EVENT = 1e-14


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    projectors: tuple[np.ndarray, ...]
    multiplicities: tuple[int, ...]

    def __len__(self):
        return len(self.projectors)

    def reconstruct(self) -> np.ndarray:
        return sum(v * p for v, p in zip(self.eigenvalues, self.projectors))


def _as_matrix(obs) -> np.ndarray:
    if isinstance(obs, Operator):
        return obs.matrix
    return np.asarray(obs, dtype=complex)


def spectral_decompose(obs, group_tol: float = 1e-8) -> SpectralDecomposition:
    """Eigenvalues (ascending) and projectors, merging near-degenerate levels.

    Eigenvalues closer than ``group_tol`` times the spectral range (or
    ``group_tol`` absolute for a flat spectrum) share one projector.
    """
    m = _as_matrix(obs)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgument("observable must be a square matrix")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > ATOL * max(1.0, np.max(np.abs(m), initial=0.0)):
        raise InvalidArgument("observable is not Hermitian")
    if group_tol <= 0:
        raise InvalidArgument("group_tol must be positive")
    vals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    span = vals[-1] - vals[0]
    tol = group_tol * span if span > 0 else group_tol
    groups: list[list[int]] = [[0]]
    for k in range(1, len(vals)):
        if vals[k] - vals[groups[-1][-1]] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    eigenvalues, projectors = [], []
    for g in groups:
        v = vecs[:, g]
        projectors.append(v @ v.conj().T)
        eigenvalues.append(float(np.mean(vals[g])))
    return SpectralDecomposition(np.array(eigenvalues), tuple(projectors), tuple(len(g) for g in groups))


@dataclass(frozen=True, eq=False)
class ProbTable:
    alphas: np.ndarray
    betas: np.ndarray
    joint: np.ndarray

    def __post_init__(self):
        j = np.asarray(self.joint, dtype=float)
        if j.shape != (len(self.alphas), len(self.betas)):
            raise InvalidArgument("joint table shape does not match outcome lists")
        if np.min(j, initial=0.0) < -1e-12:
            raise InvalidArgument("joint table has negative entries")
        j = np.clip(j, 0.0, None)
        if abs(j.sum() - 1.0) > 1e-10:
            raise InvalidArgument(f"joint table sums to {j.sum()!r}")
        object.__setattr__(self, "joint", j)

    @property
    def marginal_a(self) -> np.ndarray:
        return self.joint.sum(axis=1)

    @property
    def marginal_b(self) -> np.ndarray:
        return self.joint.sum(axis=0)

    def mean_product(self) -> float:
        return float(self.alphas @ self.joint @ self.betas)

    def conditional_b(self, alpha_index: int) -> np.ndarray:
        p = self.marginal_a[alpha_index]
        if p <= NULL_EVENT:
            raise ConditioningOnNullEvent(f"P(alpha) = {p}")
        return self.joint[alpha_index] / p


def _local_dims(rho: DensityOperator) -> tuple[int, int]:
    if not isinstance(rho.basis, BipartiteBasis):
        raise InvalidArgument("state must be bipartite")
    return rho.basis.dim_a, rho.basis.dim_b


def _check_local(obs: np.ndarray, dim: int, side: str):
    if obs.shape != (dim, dim):
        raise InvalidArgument(f"observable on {side} has shape {obs.shape}, expected {(dim, dim)}")


def joint_probability_table(rho: DensityOperator, obs_a, obs_b) -> ProbTable:
    """``P(alpha, beta) = Tr((Pi_alpha (x) Pi_beta) rho)`` for local observables."""
    dim_a, dim_b = _local_dims(rho)
    ma, mb = _as_matrix(obs_a), _as_matrix(obs_b)
    _check_local(ma, dim_a, "A")
    _check_local(mb, dim_b, "B")
    sa, sb = spectral_decompose(ma), spectral_decompose(mb)
    t = rho.matrix.reshape(dim_a, dim_b, dim_a, dim_b)
    joint = np.empty((len(sa), len(sb)))
    for i, pa in enumerate(sa.projectors):
        for j, pb in enumerate(sb.projectors):
            joint[i, j] = np.einsum("ki,lj,ijkl->", pa, pb, t).real
    return ProbTable(sa.eigenvalues, sb.eigenvalues, joint)


def reduce(rho: DensityOperator, keep: str) -> DensityOperator:
    dim_a, dim_b = _local_dims(rho)
    red = partial_trace(rho.matrix, dim_a, dim_b, keep)
    local = rho.basis.a if keep == "A" else rho.basis.b
    return DensityOperator(local, red)


def conditional_state(rho: DensityOperator, obs_a, outcome_index: int) -> DensityOperator:
    """Post-measurement state after outcome ``outcome_index`` of a local A observable."""
    dim_a, dim_b = _local_dims(rho)
    ma = _as_matrix(obs_a)
    _check_local(ma, dim_a, "A")
    dec = spectral_decompose(ma)
    if not 0 <= outcome_index < len(dec):
        raise InvalidArgument(f"outcome index {outcome_index} out of range")
    proj = np.kron(dec.projectors[outcome_index], np.eye(dim_b))
    p = np.trace(proj @ rho.matrix).real
    if p <= NULL_EVENT:
        raise ConditioningOnNullEvent(f"outcome {outcome_index} has probability {p}")
    return density(rho.basis, proj @ rho.matrix @ proj / p, renormalize=True)


def outcome_probabilities(rho: DensityOperator, obs, side: str = "A") -> tuple[np.ndarray, np.ndarray]:
    """Single-observable outcome values and probabilities on one subsystem."""
    red = reduce(rho, side) if isinstance(rho.basis, BipartiteBasis) else rho
    return born(red, obs)


def born(local: DensityOperator, obs) -> tuple[np.ndarray, np.ndarray]:
    if not isinstance(local.basis, LocalBasis):
        raise InvalidArgument("born() expects a single-subsystem state")
    dec = spectral_decompose(obs)
    probs = np.array([np.trace(p @ local.matrix).real for p in dec.projectors])
    return dec.eigenvalues, np.clip(probs, 0.0, None)
