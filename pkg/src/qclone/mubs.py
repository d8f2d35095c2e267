"""Mutually unbiased bases for prime dimensions, plus named states.

A full set of d+1 MUBs exists for prime d: the computational basis plus d
quadratic-phase bases. Two bases are mutually unbiased when every cross-basis
overlap satisfies |<a|b>|^2 = 1/d.

The quadratic-phase family implemented by `mub_vector` uses integer phase
exponents

    phase(n, alpha, j) = (n-1)(d-j+1) - (alpha-2) * sum(m for m in j-2 .. d+1)

applied as exp(2*pi*1j*phase/d), with 1-based n, alpha, j. The inner
arithmetic series is evaluated exactly in integer arithmetic and reduced mod d
before exponentiation, so phases carry no floating-point drift. For odd
primes this family, together with the computational basis, is a complete MUB
set. For d = 2 it degenerates: with only the phases +-1 available, the
alpha = 2 and alpha = 3 bases coincide, so `mub_set(2)` substitutes the
standard qubit triple (computational, diagonal (1, +-1)/sqrt(2), circular
(1, +-1j)/sqrt(2)) to deliver a genuine complete set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionTooSmall,
    EvenDimension,
    IndexOutOfRange,
    NotPrime,
)
from .qcore import Ket


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, int(n**0.5) + 1))


def _require_prime(d: int) -> None:
    if not is_prime(d):
        raise NotPrime(f"d={d} is not prime; only prime dimensions are supported")


def mub_vector(d: int, alpha: int, n: int) -> Ket:
    """Element n of quadratic-phase basis alpha (both 1-based, alpha >= 2).

    Valid MUB family member for odd prime d; see the module docstring for the
    d = 2 degeneracy.
    """
    _require_prime(d)
    if not 2 <= alpha <= d + 1:
        raise IndexOutOfRange(f"alpha={alpha} outside [2, {d + 1}]")
    if not 1 <= n <= d:
        raise IndexOutOfRange(f"n={n} outside [1, {d}]")
    amps = np.empty(d, dtype=complex)
    for j in range(1, d + 1):
        series = sum(range(j - 2, d + 2))
        phase = (n - 1) * (d - j + 1) - (alpha - 2) * series
        amps[j - 1] = np.exp(2j * np.pi * (phase % d) / d)
    return Ket(amps / np.sqrt(d))


@dataclass(frozen=True)
class MubSet:
    """d+1 orthonormal bases, pairwise unbiased; bases[0] is computational.

    bases has shape (d+1, d, d): bases[a, n] are the amplitudes of element n
    of basis a (0-based array indices).
    """

    dim: int
    bases: np.ndarray

    @property
    def n_bases(self) -> int:
        return self.bases.shape[0]

    def ket(self, alpha: int, n: int) -> Ket:
        """Element n of basis alpha, 1-based, alpha=1 the computational basis."""
        if not 1 <= alpha <= self.n_bases:
            raise IndexOutOfRange(f"alpha={alpha} outside [1, {self.n_bases}]")
        if not 1 <= n <= self.dim:
            raise IndexOutOfRange(f"n={n} outside [1, {self.dim}]")
        return Ket(self.bases[alpha - 1, n - 1])

    def basis_kets(self, alpha: int) -> list[Ket]:
        """All d elements of basis alpha (1-based)."""
        return [self.ket(alpha, n) for n in range(1, self.dim + 1)]


def _qubit_triple() -> np.ndarray:
    s = 1.0 / np.sqrt(2.0)
    return np.array(
        [
            [[1, 0], [0, 1]],
            [[s, s], [s, -s]],
            [[s, 1j * s], [s, -1j * s]],
        ],
        dtype=complex,
    )


def mub_set(d: int) -> MubSet:
    """Complete set of d+1 mutually unbiased bases for prime d.

    Rejects non-prime d (including 4 and 6) rather than attempting
    prime-power constructions.
    """
    _require_prime(d)
    if d == 2:
        return MubSet(dim=2, bases=_qubit_triple())
    bases = np.empty((d + 1, d, d), dtype=complex)
    bases[0] = np.eye(d)
    for alpha in range(2, d + 2):
        for n in range(1, d + 1):
            bases[alpha - 1, n - 1] = mub_vector(d, alpha, n).amps
    return MubSet(dim=d, bases=bases)


@dataclass(frozen=True)
class MubVerification:
    """Worst-case deviations of a candidate MUB set from its defining laws."""

    max_orthonormality_deviation: float
    max_unbiasedness_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.max_orthonormality_deviation < self.tol
            and self.max_unbiasedness_deviation < self.tol
        )


def verify_mub(mubs: MubSet, tol: float = 1e-10) -> MubVerification:
    """Check orthonormality of each basis and 1/d cross-basis overlaps.

    Reports max |Gram - I| over all bases and max ||<a|b>|^2 - 1/d| over all
    cross-basis pairs; passes iff both stay below tol.
    """
    d = mubs.dim
    b = mubs.bases
    orth = 0.0
    unb = 0.0
    eye = np.eye(d)
    for a in range(mubs.n_bases):
        gram = b[a].conj() @ b[a].T
        orth = max(orth, float(np.abs(gram - eye).max()))
        for c in range(a + 1, mubs.n_bases):
            overlap2 = np.abs(b[a].conj() @ b[c].T) ** 2
            unb = max(unb, float(np.abs(overlap2 - 1.0 / d).max()))
    return MubVerification(
        max_orthonormality_deviation=orth,
        max_unbiasedness_deviation=unb,
        tol=tol,
    )


def fourier_angle_basis(d: int) -> list[Ket]:
    """Discrete-Fourier basis |phi_n> = d^-1/2 sum_j w^{(n-1)(j-1)} |j>.

    Uses the +1j exponent convention; unbiased with the computational basis
    for every d >= 2 (not only primes).
    """
    if d < 2:
        raise DimensionTooSmall(f"d={d}")
    j = np.arange(d)
    return [
        Ket(np.exp(2j * np.pi * n * j / d) / np.sqrt(d)) for n in range(d)
    ]


def gaussian_state() -> Ket:
    """Seven-dimensional state with amplitudes exp(-(l/2)^2), l = -3..3."""
    labels = np.arange(-3, 4, dtype=float)
    return Ket(np.exp(-((labels / 2.0) ** 2)))


def oam_label(i: int, d: int) -> int:
    """Angular-momentum label l = i - 1 - (d-1)/2 for 1-based index i, odd d."""
    if d % 2 == 0:
        raise EvenDimension(f"d={d}; symmetric labels need odd d")
    if not 1 <= i <= d:
        raise IndexOutOfRange(f"i={i} outside [1, {d}]")
    return i - 1 - (d - 1) // 2


def oam_index(ell: int, d: int) -> int:
    """Inverse of oam_label: 1-based index of the state labeled ell."""
    if d % 2 == 0:
        raise EvenDimension(f"d={d}; symmetric labels need odd d")
    half = (d - 1) // 2
    if not -half <= ell <= half:
        raise IndexOutOfRange(f"ell={ell} outside [-{half}, {half}]")
    return ell + 1 + half
