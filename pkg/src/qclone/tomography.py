"""State reconstruction from projective measurements in d+1 MUBs.

A complete MUB set is informationally complete, with the closed-form
reconstruction identity

    rho = sum_{alpha, i} p_i^(alpha) |psi_i^(alpha)><psi_i^(alpha)| - I_d,

exact when the p are true Born probabilities. With finite shot counts the
empirical frequencies make the linear-inversion estimate noisy and possibly
unphysical, so it is projected back to the density-matrix cone by eigenvalue
water-filling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .errors import (
    DimensionMismatch,
    IncompleteCounts,
    InvalidShots,
    NotHermitian,
    NotPositive,
)
from .mubs import MubSet

HERM_TOL = 1e-8


@dataclass(frozen=True)
class MeasurementCounts:
    """Outcome counts per basis: counts[alpha-1, i] over shots_per_basis each."""

    dim: int
    counts: np.ndarray
    shots_per_basis: int


@dataclass(frozen=True)
class TomographyResult:
    raw: np.ndarray
    physical: np.ndarray
    fidelity_to_target: float
    shots: int


def simulate_measurements(
    rho: np.ndarray, mubs: MubSet, shots_per_basis: int, seed: int
) -> MeasurementCounts:
    """Multinomial shot noise for projective measurements in every basis.

    Each basis gets its own generator derived from (seed, basis index), so
    per-basis simulations are independent and the whole set is reproducible.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (mubs.dim, mubs.dim):
        raise DimensionMismatch(f"state {rho.shape} vs basis dim {mubs.dim}")
    if shots_per_basis < 1:
        raise InvalidShots(f"shots_per_basis must be >= 1, got {shots_per_basis}")
    counts = np.empty((mubs.n_bases, mubs.dim), dtype=np.int64)
    for a in range(mubs.n_bases):
        b = mubs.bases[a]
        probs = np.einsum("ij,jk,ik->i", b.conj(), rho, b).real
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
        rng = np.random.default_rng([seed, a])
        counts[a] = rng.multinomial(shots_per_basis, probs)
    return MeasurementCounts(dim=mubs.dim, counts=counts, shots_per_basis=shots_per_basis)


def linear_inversion(counts: MeasurementCounts, mubs: MubSet) -> np.ndarray:
    """Closed-form reconstruction from MUB frequencies (possibly unphysical)."""
    if counts.dim != mubs.dim or counts.counts.shape != (mubs.n_bases, mubs.dim):
        raise IncompleteCounts(
            f"counts shape {counts.counts.shape} does not cover "
            f"{mubs.n_bases} bases of dimension {mubs.dim}"
        )
    freqs = counts.counts / counts.counts.sum(axis=1, keepdims=True)
    rho = -np.eye(mubs.dim, dtype=complex)
    for a in range(mubs.n_bases):
        b = mubs.bases[a]
        rho += np.einsum("i,ij,ik->jk", freqs[a], b, b.conj())
    return rho


def project_to_physical(raw: np.ndarray) -> np.ndarray:
    """Nearest density matrix by eigenvalue water-filling.

    Symmetrizes, then repeatedly clips negative eigenvalues to zero and
    spreads the deficit uniformly over the remaining positive ones; finally
    renormalizes the trace. Acts as the identity on valid density matrices.
    """
    raw = np.asarray(raw, dtype=complex)
    herm_dev = np.abs(raw - raw.conj().T).max()
    if herm_dev > HERM_TOL:
        raise NotHermitian(f"deviation {herm_dev:.3e} > {HERM_TOL:.0e}")
    sym = (raw + raw.conj().T) / 2
    w, v = np.linalg.eigh(sym)
    if w.sum() <= 0:
        raise NotPositive(f"trace {w.sum():.3e} is not positive")
    w = w / w.sum()
    while (w < 0).any():
        deficit = w[w < 0].sum()
        w[w < 0] = 0.0
        pos = w > 0
        w[pos] += deficit / pos.sum()
    w = np.clip(w, 0.0, None)
    w /= w.sum()
    return (v * w) @ v.conj().T


def tomography_pipeline(
    rho_true: np.ndarray,
    mubs: MubSet,
    shots: int,
    seed: int,
    target: np.ndarray,
) -> TomographyResult:
    """Simulate, invert, project, and score against a target state."""
    target = np.asarray(target, dtype=complex)
    if target.shape != (mubs.dim, mubs.dim):
        raise DimensionMismatch(f"target {target.shape} vs dim {mubs.dim}")
    counts = simulate_measurements(rho_true, mubs, shots, seed)
    raw = linear_inversion(counts, mubs)
    physical = project_to_physical(raw)
    fid = qcore.fidelity_state(physical, target)
    return TomographyResult(
        raw=raw, physical=physical, fidelity_to_target=fid, shots=shots
    )
