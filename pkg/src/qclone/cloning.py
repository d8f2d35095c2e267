"""Symmetric 1->2 universal optimal cloning of d-level photonic states.

The cloner interferes the input photon with a maximally mixed partner photon
and post-selects on both photons bunching, i.e. on the projection of the
two-photon state onto the symmetric subspace. The surviving joint state

    joint = P_sym (|psi><psi| (x) I_d/d) P_sym / p,   p = tr[P_sym (...)]

has identical reduced states for both photons: a depolarized copy
s|psi><psi| + (1-s) I_d/d with shrinking factor s = (d+2)/(2(d+1)), hence
single-clone fidelity 1/2 + 1/(1+d) regardless of the input.

Coincidence counting convention
-------------------------------
A detection event is an unordered pair of clone states {i, j}. The apparatus
scans one representative setting per unordered pair; exchange symmetry of the
joint state makes the mirrored setting statistically redundant, so recorded
counts N(i, j) are per-setting counts with N(i, j) = N(j, i) implied. The
normalization reconstructs both orderings:

    n_tot = N(psi, psi) + 2 * sum_{i != psi} N(psi, i)

and the estimated cloning fidelity is
(N(psi,psi) + sum_{i != psi} N(psi,i)) / n_tot, which converges to the
single-clone fidelity above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import qcore
from .errors import (
    BasisNotOrthonormal,
    DimensionMismatch,
    DimensionTooSmall,
    EmptyRecord,
    InvalidArgument,
)
from .qcore import Ket

GRAM_TOL = 1e-8


def optimal_clone_fidelity(d: int) -> float:
    """Single-clone fidelity 1/2 + 1/(1+d) of the optimal symmetric cloner."""
    if d < 2:
        raise DimensionTooSmall(f"d={d}")
    return 0.5 + 1.0 / (1.0 + d)


def estimation_fidelity(d: int) -> float:
    """Best fidelity 2/(1+d) achievable by measure-and-reprepare estimation."""
    if d < 2:
        raise DimensionTooSmall(f"d={d}")
    return 2.0 / (1.0 + d)


def shrinking_factor(d: int) -> float:
    """Weight s = (d+2)/(2(d+1)) of the input projector in a clone."""
    if d < 2:
        raise DimensionTooSmall(f"d={d}")
    return (d + 2.0) / (2.0 * (d + 1.0))


@dataclass(frozen=True)
class CloneOutput:
    """Post-selected two-photon state, its success probability, and one clone."""

    joint: np.ndarray
    success_prob: float
    reduced: np.ndarray


def clone_channel(psi: Ket) -> CloneOutput:
    """Apply the symmetrization cloner to |psi>.

    Returns the normalized post-selected joint state, the bunching probability
    p = (d+1)/(2d), and the reduced single-clone density matrix.
    """
    d = psi.dim
    proj = qcore.symmetric_projector(d)
    pre = qcore.tensor(psi.density(), qcore.maximally_mixed(d))
    unnorm = proj @ pre @ proj
    p = float(np.trace(unnorm).real)
    joint = unnorm / p
    return CloneOutput(joint=joint, success_prob=p, reduced=qcore.partial_trace(joint, keep=1))


def clone_reduced_analytic(psi: Ket) -> np.ndarray:
    """Closed form of one clone: s|psi><psi| + (1-s) I_d/d."""
    return clone_reduced_density(psi.density())


def clone_reduced_density(rho: np.ndarray) -> np.ndarray:
    """Clone channel reduced output for a general input density matrix.

    The channel is linear, so mixing commutes with cloning; this is the map
    rho -> s*rho + (1-s)*I_d/d used for eavesdropping on noisy inputs.
    """
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    s = shrinking_factor(d)
    return s * rho + (1.0 - s) * np.eye(d, dtype=complex) / d


@dataclass(frozen=True)
class HomModel:
    """Two-photon interference quality at the bunching beam splitter.

    visibility is the fitted interference contrast, coherence_width the decay
    scale of indistinguishability with arrival-time delay, delay the actual
    mismatch (same units as coherence_width).
    """

    visibility: float = 1.0
    coherence_width: float = 1.0
    delay: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.visibility <= 1.0:
            raise InvalidArgument(f"visibility {self.visibility} outside [0, 1]")
        if not self.coherence_width > 0.0:
            raise InvalidArgument(f"coherence_width {self.coherence_width} must be > 0")

    def indistinguishability(self) -> float:
        """Effective overlap lambda = v * exp(-(delay/width)^2)."""
        return self.visibility * math.exp(-((self.delay / self.coherence_width) ** 2))


IDEAL_HOM = HomModel()


def hom_effective_joint(psi: Ket, hom: HomModel) -> np.ndarray:
    """Two-photon output state under partial distinguishability.

    Convex mixture lambda * joint_bunched + (1 - lambda) * joint_classical,
    where the classical branch carries no interference and averages the two
    photon orderings so the reduced state stays well defined.
    """
    lam = hom.indistinguishability()
    joint_sym = clone_channel(psi).joint
    d = psi.dim
    mix = qcore.maximally_mixed(d)
    rho = psi.density()
    joint_dist = (qcore.tensor(rho, mix) + qcore.tensor(mix, rho)) / 2.0
    return lam * joint_sym + (1.0 - lam) * joint_dist


def hom_dip_curve(
    hom: HomModel, delays: Sequence[float], base_rate: float
) -> np.ndarray:
    """Cross-port coincidence rate C(tau) = base * (1 - v exp(-(tau/w)^2)).

    Returns an (n, 2) array of (delay, rate) rows.
    """
    taus = np.asarray(delays, dtype=float)
    env = hom.visibility * np.exp(-((taus / hom.coherence_width) ** 2))
    return np.column_stack([taus, base_rate * (1.0 - env)])


def coalescence_enhancement(hom: HomModel) -> float:
    """Same-port coincidence enhancement R = 1 + v exp(-(tau/w)^2), in [1, 2]."""
    return 1.0 + hom.indistinguishability()


def _basis_matrix(basis: Sequence[Ket]) -> np.ndarray:
    b = np.array([k.amps for k in basis])
    gram = b.conj() @ b.T
    dev = np.abs(gram - np.eye(b.shape[0])).max()
    if dev > GRAM_TOL:
        raise BasisNotOrthonormal(f"Gram deviation {dev:.3e} > {GRAM_TOL:.0e}")
    if b.shape[0] != b.shape[1]:
        raise BasisNotOrthonormal(f"need d kets of dimension d, got {b.shape}")
    return b


def joint_detection_prob(psi: Ket, i: Ket, j: Ket) -> float:
    """Probability <ij| joint |ij> of detecting the clone pair in (|i>, |j>)."""
    if not (psi.dim == i.dim == j.dim):
        raise DimensionMismatch(f"dims {psi.dim}, {i.dim}, {j.dim}")
    joint = clone_channel(psi).joint
    vec = np.kron(i.amps, j.amps)
    return float((vec.conj() @ joint @ vec).real)


def ordered_joint_probabilities(
    psi: Ket, basis: Sequence[Ket], hom: HomModel | None = None
) -> np.ndarray:
    """Matrix q[i, j] = <ij| joint |ij> over an orthonormal detection basis."""
    b = _basis_matrix(basis)
    d = psi.dim
    if b.shape[1] != d:
        raise DimensionMismatch(f"basis dim {b.shape[1]} vs ket dim {d}")
    joint = (
        clone_channel(psi).joint if hom is None else hom_effective_joint(psi, hom)
    )
    r = joint.reshape(d, d, d, d)
    q = np.einsum("ia,jb,abce,ic,je->ij", b.conj(), b.conj(), r, b, b)
    return q.real


@dataclass(frozen=True)
class CoincidenceRecord:
    """Coincidence counts from cloning one input, keyed by unordered pair.

    counts maps (i, j) with i <= j to the per-setting count N(i, j); psi_index
    is the basis index of the cloned input (None if the input is not a basis
    element, in which case n_tot is undefined).
    """

    dim: int
    counts: Mapping[tuple[int, int], int]
    n_events: int
    psi_index: int | None = None
    psi: Ket | None = None
    basis: tuple[Ket, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        for (i, j), c in self.counts.items():
            if i > j:
                raise InvalidArgument(f"count key ({i}, {j}) not stored with i <= j")
            if c < 0:
                raise InvalidArgument(f"negative count {c} at ({i}, {j})")

    def count(self, i: int, j: int) -> int:
        """Per-setting count for the unordered pair {i, j}."""
        key = (i, j) if i <= j else (j, i)
        return int(self.counts.get(key, 0))

    @property
    def n_tot(self) -> int:
        """Both-orderings normalization N(psi,psi) + 2 sum_{i!=psi} N(psi,i)."""
        if self.psi_index is None:
            raise InvalidArgument("record input is not a basis element")
        p = self.psi_index
        cross = sum(self.count(p, i) for i in range(self.dim) if i != p)
        return self.count(p, p) + 2 * cross


def simulate_coincidences(
    psi: Ket,
    basis: Sequence[Ket],
    n_events: int,
    seed: int | np.random.SeedSequence,
    hom: HomModel | None = None,
) -> CoincidenceRecord:
    """Sample n_events coincidence detections of the cloned pair.

    One multinomial draw over the d(d+1)/2 unordered setting pairs, with
    probabilities proportional to the ordered joint probabilities (one
    representative ordering per pair). Deterministic for a fixed seed.
    """
    if n_events < 1:
        raise InvalidArgument(f"n_events must be >= 1, got {n_events}")
    q = ordered_joint_probabilities(psi, basis, hom)
    d = psi.dim
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    weights = np.array([q[i, j] for i, j in pairs])
    weights = np.clip(weights, 0.0, None)
    probs = weights / weights.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(n_events, probs)
    counts = {pair: int(c) for pair, c in zip(pairs, draws) if c > 0}
    overlaps = np.abs([k.overlap(psi) for k in basis]) ** 2
    psi_index = int(np.argmax(overlaps)) if overlaps.max() > 1.0 - 1e-9 else None
    return CoincidenceRecord(
        dim=d,
        counts=counts,
        n_events=n_events,
        psi_index=psi_index,
        psi=psi,
        basis=tuple(basis),
    )


def fidelity_from_counts(rec: CoincidenceRecord, psi_index: int) -> float:
    """Counts-based cloning fidelity estimator.

    (N(psi,psi) + sum_{i != psi} N(psi,i)) / n_tot with
    n_tot = N(psi,psi) + 2 sum_{i != psi} N(psi,i).
    """
    if not rec.counts or sum(rec.counts.values()) == 0:
        raise EmptyRecord("no coincidence counts recorded")
    n_self = rec.count(psi_index, psi_index)
    n_cross = sum(rec.count(psi_index, i) for i in range(rec.dim) if i != psi_index)
    n_tot = n_self + 2 * n_cross
    if n_tot == 0:
        raise EmptyRecord(f"no counts involve basis element {psi_index}")
    return (n_self + n_cross) / n_tot


def estimated_clone_distribution(rec: CoincidenceRecord, psi_index: int) -> np.ndarray:
    """Estimated single-clone detection distribution P(i | psi).

    The diagonal entry is the fidelity estimator; off-diagonal entries are
    N(i, psi) / n_tot. Columns of the experiment's probability matrices.
    """
    n_self = rec.count(psi_index, psi_index)
    cross = np.array(
        [rec.count(psi_index, i) for i in range(rec.dim)], dtype=float
    )
    cross[psi_index] = 0.0
    n_tot = n_self + 2.0 * cross.sum()
    if n_tot == 0:
        raise EmptyRecord(f"no counts involve basis element {psi_index}")
    dist = cross / n_tot
    dist[psi_index] = (n_self + cross.sum()) / n_tot
    return dist
