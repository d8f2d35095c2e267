"""Shared helpers: random states and independent brute-force oracles.

The oracles here deliberately avoid the library's own code paths (explicit
index loops, basis-vector sums, sort-based projections) so tests compare two
independent routes to the same quantity.
"""

import numpy as np
import pytest

from qclone.qcore import Ket


def random_density(d, rng, n_mix=3):
    """Random full-rank density matrix as a mixture of random pure states."""
    rho = np.zeros((d, d), dtype=complex)
    weights = rng.random(n_mix)
    weights /= weights.sum()
    for w in weights:
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        v /= np.linalg.norm(v)
        rho += w * np.outer(v, v.conj())
    return rho


def random_ket(d, rng):
    return Ket(rng.normal(size=d) + 1j * rng.normal(size=d))


def random_unitary(d, rng):
    """Haar-ish unitary via QR of a Ginibre matrix."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def ptrace_oracle(rho12, d, keep):
    """Partial trace by explicit index summation."""
    out = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            for k in range(d):
                if keep == 1:
                    out[i, j] += rho12[i * d + k, j * d + k]
                else:
                    out[i, j] += rho12[k * d + i, k * d + j]
    return out


def sym_projector_oracle(d):
    """Symmetric projector as a sum of symmetrized basis projectors."""
    proj = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(i, d):
            vec = np.zeros(d * d, dtype=complex)
            if i == j:
                vec[i * d + i] = 1.0
            else:
                vec[i * d + j] = 1.0 / np.sqrt(2)
                vec[j * d + i] = 1.0 / np.sqrt(2)
            proj += np.outer(vec, vec.conj())
    return proj


def joint_prob_oracle(psi, basis_kets):
    """Ordered detection probabilities via the independently built projector."""
    d = psi.dim
    proj = sym_projector_oracle(d)
    pre = np.kron(psi.density(), np.eye(d) / d)
    p = np.trace(proj @ pre).real
    joint = proj @ pre @ proj / p
    q = np.zeros((d, d))
    for i, ki in enumerate(basis_kets):
        for j, kj in enumerate(basis_kets):
            vec = np.kron(ki.amps, kj.amps)
            q[i, j] = (vec.conj() @ joint @ vec).real
    return q


def simplex_projection_oracle(v):
    """Euclidean projection onto the probability simplex (sort-based form)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, len(v) + 1)
    valid = u - (css - 1.0) / ks > 0
    k = ks[valid][-1]
    theta = (css[k - 1] - 1.0) / k
    return np.clip(v - theta, 0.0, None)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
