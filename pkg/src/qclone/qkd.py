"""d-level BB84 with an optional clone-and-resend eavesdropper.

Alice encodes uniform symbols in one of two bases (computational or Fourier
angle basis). The channel applies optional depolarizing noise; if Eve is
present she clones each carrier with the optimal symmetric cloner, forwards
one clone to Bob as its exact reduced density matrix, keeps the other, and
measures it in the announced basis after sifting (deferred individual
attack). Bob measures in a uniformly random basis; rounds with matching bases
form the sifted key.

All per-round randomness comes from one seeded generator in a fixed draw
order, so a (config, seed) pair reproduces the transcript byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloning import clone_channel, shrinking_factor
from .errors import (
    InvalidConfig,
    InvalidDigit,
    KeyTooShort,
    NoSiftedRounds,
    OutOfRange,
    UnsupportedDimension,
)
from .mubs import fourier_angle_basis
from .qcore import Ket

#: Error-rate thresholds for security against coherent attacks. Only the two
#: dimensions with published values are tabulated.
COHERENT_ATTACK_BOUNDS = {2: 0.1100, 7: 0.2372}


@dataclass(frozen=True)
class QkdConfig:
    dim: int
    n_rounds: int
    eve_present: bool = False
    channel_error_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidConfig(f"dim must be >= 2, got {self.dim}")
        if self.n_rounds < 1:
            raise InvalidConfig(f"n_rounds must be >= 1, got {self.n_rounds}")
        if not 0.0 <= self.channel_error_rate < 1.0:
            raise InvalidConfig(
                f"channel_error_rate {self.channel_error_rate} outside [0, 1)"
            )


@dataclass(frozen=True)
class QkdTranscript:
    """Per-round protocol data plus sifted keys and error statistics."""

    dim: int
    alice_symbols: np.ndarray
    alice_bases: np.ndarray
    bob_bases: np.ndarray
    bob_symbols: np.ndarray
    eve_symbols: np.ndarray | None
    sifted: np.ndarray
    qber: float
    mutual_information_ab: float

    @property
    def sifted_key_alice(self) -> np.ndarray:
        return self.alice_symbols[self.sifted]

    @property
    def sifted_key_bob(self) -> np.ndarray:
        return self.bob_symbols[self.sifted]

    @property
    def sifted_key_eve(self) -> np.ndarray | None:
        if self.eve_symbols is None:
            return None
        return self.eve_symbols[self.sifted]


def protocol_bases(d: int) -> list[np.ndarray]:
    """The two encoding bases as (d, d) arrays of row kets."""
    comp = np.eye(d, dtype=complex)
    fourier = np.array([k.amps for k in fourier_angle_basis(d)])
    return [comp, fourier]


def conditional_distributions(cfg: QkdConfig) -> np.ndarray:
    """Born probabilities P[a_basis, b_basis, a_symbol, b_symbol] for Bob.

    Depolarizing noise and the cloning attack compose into a single
    depolarizing map with signal weight c = (1 - eps) * (s if Eve else 1),
    so P = c * |<b|a>|^2 + (1 - c)/d.
    """
    d = cfg.dim
    bases = protocol_bases(d)
    c = 1.0 - cfg.channel_error_rate
    if cfg.eve_present:
        c *= shrinking_factor(d)
    p = np.empty((2, 2, d, d))
    for ba in range(2):
        for bb in range(2):
            overlap2 = np.abs(bases[bb].conj() @ bases[ba].T) ** 2
            p[ba, bb] = c * overlap2.T + (1.0 - c) / d
    return p


def eve_conditional_distributions(cfg: QkdConfig) -> np.ndarray:
    """Born probabilities Q[a_basis, a_symbol, e_symbol] for Eve's clone.

    Eve measures in the announced preparation basis, so her clone looks like
    a depolarized copy of Alice's symbol in that same basis.
    """
    d = cfg.dim
    c = (1.0 - cfg.channel_error_rate) * shrinking_factor(d)
    q = np.full((2, d, d), (1.0 - c) / d)
    q[:, np.arange(d), np.arange(d)] += c
    return q


@dataclass(frozen=True)
class EveAttack:
    """States produced by cloning one carrier: Bob's copy and Eve's copy."""

    forwarded: np.ndarray
    kept: np.ndarray

    def measure_kept(self, basis: np.ndarray, rng: np.random.Generator) -> int:
        """Projective measurement of Eve's clone in a (d, d) row-ket basis."""
        probs = np.einsum("ij,jk,ik->i", basis.conj(), self.kept, basis).real
        probs = np.clip(probs, 0.0, None)
        return int(rng.choice(len(probs), p=probs / probs.sum()))


def eve_clone_attack(psi: Ket) -> EveAttack:
    """Clone one carrier; both reduced copies are identical (symmetric cloner)."""
    reduced = clone_channel(psi).reduced
    return EveAttack(forwarded=reduced, kept=reduced.copy())


def _sample_from_rows(rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF draw per row: rows (n, d) of probabilities, u (n,) uniforms."""
    cdf = np.cumsum(rows, axis=1)
    cdf[:, -1] = 1.0
    return (u[:, None] <= cdf).argmax(axis=1)


def run_bb84(cfg: QkdConfig) -> QkdTranscript:
    """Run the full protocol and compute sifted-key statistics."""
    d = cfg.dim
    n = cfg.n_rounds
    rng = np.random.default_rng(cfg.seed)
    alice_symbols = rng.integers(0, d, size=n)
    alice_bases = rng.integers(0, 2, size=n)
    bob_bases = rng.integers(0, 2, size=n)

    p = conditional_distributions(cfg)
    rows = p[alice_bases, bob_bases, alice_symbols]
    bob_symbols = _sample_from_rows(rows, rng.random(n))

    eve_symbols = None
    if cfg.eve_present:
        q = eve_conditional_distributions(cfg)
        eve_rows = q[alice_bases, alice_symbols]
        eve_symbols = _sample_from_rows(eve_rows, rng.random(n))

    sifted = alice_bases == bob_bases
    if not sifted.any():
        raise NoSiftedRounds("no rounds with matching bases")
    errors = bob_symbols[sifted] != alice_symbols[sifted]
    e = float(errors.mean())
    return QkdTranscript(
        dim=d,
        alice_symbols=alice_symbols,
        alice_bases=alice_bases,
        bob_bases=bob_bases,
        bob_symbols=bob_symbols,
        eve_symbols=eve_symbols,
        sifted=sifted,
        qber=e,
        mutual_information_ab=mutual_information(d, e),
    )


def qber(transcript: QkdTranscript) -> float:
    """Fraction of sifted rounds where Bob's symbol differs from Alice's."""
    if not transcript.sifted.any():
        raise NoSiftedRounds("transcript has no sifted rounds")
    return float(
        (transcript.sifted_key_bob != transcript.sifted_key_alice).mean()
    )


def mutual_information(d: int, e: float) -> float:
    """Alice-Bob mutual information in bits at symbol error rate e.

    log2(d) + (1-e) log2(1-e) + e log2(e/(d-1)), with 0*log(0) = 0. Equals
    log2(d) at e = 0 and vanishes at the uniform-error point e = (d-1)/d.
    """
    if d < 2:
        raise OutOfRange(f"d must be >= 2, got {d}")
    if not 0.0 <= e <= 1.0:
        raise OutOfRange(f"error rate {e} outside [0, 1]")
    val = np.log2(d)
    if e > 0.0:
        val += e * np.log2(e / (d - 1))
    if e < 1.0:
        val += (1.0 - e) * np.log2(1.0 - e)
    return float(val)


def security_bound_coh(d: int) -> float:
    """Tabulated coherent-attack error bound (available for d = 2 and 7)."""
    try:
        return COHERENT_ATTACK_BOUNDS[d]
    except KeyError:
        raise UnsupportedDimension(
            f"no tabulated coherent-attack bound for d={d}"
        ) from None


@dataclass(frozen=True)
class DitMessage:
    """Byte payload encoded as base-d symbols, most-significant digit first."""

    base: int
    symbols: np.ndarray
    n_bytes: int

    def __post_init__(self):
        s = self.symbols
        if s.size and (s.min() < 0 or s.max() >= self.base):
            raise InvalidDigit(f"symbols outside [0, {self.base})")


def digits_per_byte(d: int) -> int:
    """Base-d digits needed to span one byte: ceil(log_d 256)."""
    k = 1
    while d**k < 256:
        k += 1
    return k


def image_to_dits(data: bytes, d: int) -> DitMessage:
    """Encode bytes as fixed-width base-d digit groups."""
    if d < 2:
        raise OutOfRange(f"base must be >= 2, got {d}")
    k = digits_per_byte(d)
    vals = np.frombuffer(data, dtype=np.uint8).astype(np.int64)
    digits = np.empty((len(vals), k), dtype=np.int64)
    for pos in range(k - 1, -1, -1):
        digits[:, pos] = vals % d
        vals = vals // d
    return DitMessage(base=d, symbols=digits.reshape(-1), n_bytes=len(data))


def dits_to_image(msg: DitMessage) -> bytes:
    """Decode fixed-width base-d digit groups back to bytes."""
    d = msg.base
    k = digits_per_byte(d)
    symbols = np.asarray(msg.symbols)
    if symbols.size != msg.n_bytes * k:
        raise InvalidDigit(
            f"{symbols.size} symbols cannot encode {msg.n_bytes} bytes"
        )
    if symbols.size and (symbols.min() < 0 or symbols.max() >= d):
        raise InvalidDigit(f"symbols outside [0, {d})")
    groups = symbols.reshape(-1, k)
    vals = np.zeros(len(groups), dtype=np.int64)
    for pos in range(k):
        vals = vals * d + groups[:, pos]
    if vals.size and vals.max() > 255:
        raise InvalidDigit("digit group decodes above 255")
    return vals.astype(np.uint8).tobytes()


def otp_encrypt(msg: DitMessage, key: np.ndarray) -> DitMessage:
    """One-time pad: c_i = (m_i + k_i) mod d. Key must cover the message."""
    key = np.asarray(key)
    if key.size < msg.symbols.size:
        raise KeyTooShort(f"key {key.size} < message {msg.symbols.size}")
    cipher = (msg.symbols + key[: msg.symbols.size]) % msg.base
    return DitMessage(base=msg.base, symbols=cipher, n_bytes=msg.n_bytes)


def otp_decrypt(msg: DitMessage, key: np.ndarray) -> DitMessage:
    """Inverse of otp_encrypt: m_i = (c_i - k_i) mod d."""
    key = np.asarray(key)
    if key.size < msg.symbols.size:
        raise KeyTooShort(f"key {key.size} < message {msg.symbols.size}")
    plain = (msg.symbols - key[: msg.symbols.size]) % msg.base
    return DitMessage(base=msg.base, symbols=plain, n_bytes=msg.n_bytes)


def probability_matrix(
    cfg: QkdConfig,
    basis_pair: tuple[int, int],
    method: str = "analytic",
    transcript: QkdTranscript | None = None,
) -> np.ndarray:
    """Conditional matrix P[b_symbol, a_symbol] for one basis combination.

    method="analytic" evaluates the Born probabilities; method="simulated"
    bins conditional frequencies from a transcript (running the protocol
    first when none is supplied).
    """
    ba, bb = basis_pair
    if ba not in (0, 1) or bb not in (0, 1):
        raise OutOfRange(f"basis_pair {basis_pair} entries must be 0 or 1")
    if method == "analytic":
        return conditional_distributions(cfg)[ba, bb].T.copy()
    if method != "simulated":
        raise OutOfRange(f"method must be 'analytic' or 'simulated', got {method!r}")
    t = transcript if transcript is not None else run_bb84(cfg)
    d = cfg.dim
    mask = (t.alice_bases == ba) & (t.bob_bases == bb)
    mat = np.zeros((d, d))
    for a in range(d):
        sel = mask & (t.alice_symbols == a)
        n_a = int(sel.sum())
        if n_a:
            mat[:, a] = np.bincount(t.bob_symbols[sel], minlength=d) / n_a
    return mat
