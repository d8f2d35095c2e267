"""Complex linear-algebra substrate for qudit states and two-photon operators.

States are `Ket` objects (normalized complex amplitude vectors); operators are
plain complex numpy arrays. Bipartite operators on two d-level photons use the
row-major composite index convention: the pair (i1, i2) maps to i1*d + i2,
which is exactly numpy's Kronecker-product ordering. Everything is dense —
the largest operator in play is 49x49.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionTooSmall,
    NotBipartite,
    NotHermitian,
    NotPositive,
    ZeroVector,
)

ATOL = 1e-10
PSD_FLOOR = -1e-9


class Ket:
    """Normalized pure state of a d-level system (d >= 2).

    Construction normalizes the supplied amplitudes to unit norm; the stored
    array is read-only so instances can be shared freely.
    """

    __slots__ = ("amps",)

    def __init__(self, amps):
        a = np.asarray(amps, dtype=complex).reshape(-1)
        if a.size < 2:
            raise DimensionTooSmall(f"need at least 2 amplitudes, got {a.size}")
        if np.abs(a).max() < 1e-14:
            raise ZeroVector("all amplitudes are numerically zero")
        a = a / np.linalg.norm(a)
        a.setflags(write=False)
        self.amps = a

    @property
    def dim(self) -> int:
        return self.amps.size

    def density(self) -> np.ndarray:
        """Rank-1 projector |psi><psi|."""
        return np.outer(self.amps, self.amps.conj())

    def overlap(self, other: "Ket") -> complex:
        """Inner product <self|other>."""
        if other.dim != self.dim:
            raise DimensionMismatch(f"{self.dim} vs {other.dim}")
        return complex(np.vdot(self.amps, other.amps))

    def __repr__(self) -> str:
        return f"Ket(dim={self.dim}, amps={np.array2string(self.amps, precision=4)})"


def basis_ket(d: int, index: int) -> Ket:
    """Computational basis state |index> in dimension d (0-based index)."""
    if d < 2:
        raise DimensionTooSmall(f"d={d}")
    amps = np.zeros(d, dtype=complex)
    amps[index] = 1.0
    return Ket(amps)


def haar_random_ket(d: int, rng: np.random.Generator) -> Ket:
    """Haar-distributed random pure state (Gaussian amplitudes, normalized)."""
    return Ket(rng.normal(size=d) + 1j * rng.normal(size=d))


def maximally_mixed(d: int) -> np.ndarray:
    """The d-dimensional maximally mixed state I_d / d."""
    if d < 2:
        raise DimensionTooSmall(f"d={d}")
    return np.eye(d, dtype=complex) / d


def density_from_ket(psi: Ket) -> np.ndarray:
    return psi.density()


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with row-major composite indexing (i1*d2 + i2)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _split_dim(rho12: np.ndarray) -> int:
    n = rho12.shape[0]
    if rho12.ndim != 2 or rho12.shape[0] != rho12.shape[1]:
        raise NotBipartite(f"expected a square matrix, got shape {rho12.shape}")
    d = round(np.sqrt(n))
    if d * d != n:
        raise NotBipartite(f"dimension {n} is not a perfect square")
    return d


def partial_trace(rho12: np.ndarray, keep: int) -> np.ndarray:
    """Trace out one photon of a two-photon operator.

    keep=1 returns Tr_2(rho12); keep=2 returns Tr_1(rho12). The composite
    index convention is row-major, so rho12 reshapes to (d, d, d, d) with
    axes (i1, i2, j1, j2).
    """
    d = _split_dim(np.asarray(rho12))
    r = np.asarray(rho12, dtype=complex).reshape(d, d, d, d)
    if keep == 1:
        return np.einsum("ikjk->ij", r)
    if keep == 2:
        return np.einsum("kikj->ij", r)
    raise DimensionMismatch(f"keep must be 1 or 2, got {keep}")


def swap_operator(d: int) -> np.ndarray:
    """Exchange operator S with S|i>|j> = |j>|i>; involutory, trace d."""
    if d < 2:
        raise DimensionTooSmall(f"d={d}")
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def symmetric_projector(d: int) -> np.ndarray:
    """Projector (I + S)/2 onto the symmetric two-photon subspace.

    Idempotent and Hermitian with rank (and trace) d(d+1)/2.
    """
    n = d * d
    return (np.eye(n, dtype=complex) + swap_operator(d)) / 2


def check_density_matrix(rho: np.ndarray, atol: float = ATOL) -> None:
    """Validate Hermiticity, unit trace, and positivity (floor -1e-9)."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"expected square matrix, got {rho.shape}")
    herm_dev = np.abs(rho - rho.conj().T).max()
    if herm_dev > atol:
        raise NotHermitian(f"Hermiticity deviation {herm_dev:.3e} > {atol:.0e}")
    tr_dev = abs(np.trace(rho) - 1.0)
    if tr_dev > atol:
        raise DimensionMismatch(f"trace deviates from 1 by {tr_dev:.3e}")
    evmin = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
    if evmin < PSD_FLOOR:
        raise NotPositive(f"eigenvalue {evmin:.3e} below {PSD_FLOOR:.0e}")


def fidelity_ket(rho: np.ndarray, psi: Ket) -> float:
    """Overlap <psi|rho|psi> of a density matrix with a pure state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (psi.dim, psi.dim):
        raise DimensionMismatch(f"operator {rho.shape} vs ket dim {psi.dim}")
    val = complex(psi.amps.conj() @ rho @ psi.amps)
    if abs(val.imag) > ATOL:
        raise NotHermitian(f"<psi|rho|psi> has imaginary part {val.imag:.3e}")
    return float(val.real)


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    """Hermitian square root, zeroing eigenvalues at floating-point noise level."""
    w, v = np.linalg.eigh(rho)
    if w.min() < PSD_FLOOR:
        raise NotPositive(f"eigenvalue {w.min():.3e} below {PSD_FLOOR:.0e}")
    w = np.where(w > w.max() * 1e-14, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity_state(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))**2.

    Evaluated as the squared nuclear norm of sqrt(sigma) sqrt(rho), which is
    the same quantity but avoids square-rooting noise-level eigenvalues of
    the sandwiched product. Reduces to <psi|rho|psi> when sigma is pure;
    symmetric in its arguments and confined to [0, 1] up to floating-point
    noise.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"{rho.shape} vs {sigma.shape}")
    sr = _psd_sqrt((rho + rho.conj().T) / 2)
    ss = _psd_sqrt((sigma + sigma.conj().T) / 2)
    return float(np.linalg.svd(ss @ sr, compute_uv=False).sum() ** 2)
