"""Spatial-modulation framing: activation patterns and the bits <-> frame map.

Conventions
-----------
Antenna indices and channel-use indices are 0-based. Channel use ``i`` with
active antenna ``j`` owns row ``i * n_t + j`` of the activation matrix.

Each channel use carries ``log2(n_t)`` antenna bits (natural binary, MSB
first) followed by ``bits_per_symbol`` modulation bits. The per-use words are
concatenated for ``i = 0 .. p-1``.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from prppsm.modem import Alphabet, bits_to_int, int_to_bits


@dataclass(frozen=True)
class SmConfig:
    """Transmitter geometry. One RF chain is implied."""

    n_t: int
    p: int
    alphabet: Alphabet

    def __post_init__(self):
        if self.n_t < 1 or self.n_t & (self.n_t - 1):
            raise ValueError(f"n_t must be a power of two >= 1, got {self.n_t}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")

    @property
    def antenna_bits(self) -> int:
        return self.n_t.bit_length() - 1

    @property
    def bits_per_use(self) -> int:
        return self.antenna_bits + self.alphabet.bits_per_symbol

    @property
    def bits_per_frame(self) -> int:
        return self.p * self.bits_per_use

    @property
    def num_hypotheses(self) -> int:
        return (self.n_t * self.alphabet.size) ** self.p


@dataclass(frozen=True)
class ActivationPattern:
    """Active antenna for every channel use of a frame."""

    antennas: tuple

    def __post_init__(self):
        object.__setattr__(self, "antennas", tuple(int(j) for j in self.antennas))

    def __len__(self):
        return len(self.antennas)

    def validate(self, cfg: SmConfig):
        if len(self.antennas) != cfg.p:
            raise ValueError(f"pattern length {len(self.antennas)} != p={cfg.p}")
        if any(j < 0 or j >= cfg.n_t for j in self.antennas):
            raise ValueError(f"antenna index out of range for n_t={cfg.n_t}")

    def support(self, n_t: int) -> tuple:
        """Row indices of the non-zero rows of the activation matrix."""
        return tuple(i * n_t + j for i, j in enumerate(self.antennas))


@dataclass(frozen=True)
class SmFrame:
    """The transmit hypothesis: activation pattern plus symbol indices.

    ``symbols`` holds indices into the configured alphabet rather than
    complex values, so frames compare and hash exactly.
    """

    pattern: ActivationPattern
    symbols: tuple

    def __post_init__(self):
        if not isinstance(self.pattern, ActivationPattern):
            object.__setattr__(self, "pattern", ActivationPattern(self.pattern))
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if len(self.symbols) != len(self.pattern):
            raise ValueError("pattern and symbol vector lengths differ")

    @property
    def antennas(self) -> tuple:
        return self.pattern.antennas

    def validate(self, cfg: SmConfig):
        self.pattern.validate(cfg)
        if any(s < 0 or s >= cfg.alphabet.size for s in self.symbols):
            raise ValueError("symbol index out of range")

    def symbol_values(self, alphabet: Alphabet) -> np.ndarray:
        return alphabet.symbols[list(self.symbols)]


def build_activation_matrix(cfg: SmConfig, pattern: ActivationPattern) -> np.ndarray:
    """Dense ``(p*n_t, p)`` 0/1 activation matrix, one 1 per column."""
    pattern.validate(cfg)
    a = np.zeros((cfg.p * cfg.n_t, cfg.p), dtype=np.complex128)
    a[pattern.support(cfg.n_t), np.arange(cfg.p)] = 1.0
    return a


def apply_pattern(cfg: SmConfig, pattern: ActivationPattern, v) -> np.ndarray:
    """Place ``v[i]`` on the active antenna slot of use ``i``."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (cfg.p,):
        raise ValueError(f"expected length {cfg.p}, got {v.shape}")
    pattern.validate(cfg)
    out = np.zeros(cfg.p * cfg.n_t, dtype=np.complex128)
    out[list(pattern.support(cfg.n_t))] = v
    return out


def bits_to_frame(cfg: SmConfig, bits) -> SmFrame:
    bits = np.asarray(bits).ravel()
    if bits.size != cfg.bits_per_frame:
        raise ValueError(f"expected {cfg.bits_per_frame} bits, got {bits.size}")
    words = bits.reshape(cfg.p, cfg.bits_per_use)
    nab = cfg.antenna_bits
    antennas = [bits_to_int(w[:nab]) for w in words]
    symbols = [bits_to_int(w[nab:]) for w in words]
    return SmFrame(ActivationPattern(antennas), symbols)


def frame_to_bits(cfg: SmConfig, frame: SmFrame) -> np.ndarray:
    frame.validate(cfg)
    nab = cfg.antenna_bits
    nsb = cfg.alphabet.bits_per_symbol
    out = [
        np.concatenate([int_to_bits(j, nab), int_to_bits(s, nsb)])
        for j, s in zip(frame.antennas, frame.symbols)
    ]
    return np.concatenate(out).astype(np.int8)


def enumerate_sm_set(cfg: SmConfig) -> list:
    """All single-use SM vectors, antenna-major then symbol order."""
    if cfg.p != 1:
        raise ValueError("the SM signal set is defined for p == 1")
    out = []
    for j, sym in product(range(cfg.n_t), cfg.alphabet.symbols):
        x = np.zeros(cfg.n_t, dtype=np.complex128)
        x[j] = sym
        out.append(x)
    return out
