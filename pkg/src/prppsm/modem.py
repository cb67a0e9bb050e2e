"""Modulation alphabets, Gray bit mapping and nearest-point demapping.

Symbols in an :class:`Alphabet` are stored so that the symbol at index ``k``
carries the bit word whose natural-binary (MSB first) value is ``k``. The
geometry is arranged around that rule so adjacent points differ in one bit.
All alphabets are scaled to unit average energy.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Alphabet:
    name: str
    symbols: np.ndarray

    def __post_init__(self):
        size = len(self.symbols)
        if size < 2 or size & (size - 1):
            raise ValueError(f"alphabet size must be a power of two >= 2, got {size}")
        self.symbols.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def bits_per_symbol(self) -> int:
        return self.size.bit_length() - 1

    def __eq__(self, other):
        return (
            isinstance(other, Alphabet)
            and self.name == other.name
            and np.array_equal(self.symbols, other.symbols)
        )

    def __hash__(self):
        return hash((self.name, self.symbols.tobytes()))


def _gray(n):
    return n ^ (n >> 1)


def _gray_pam(levels):
    """Amplitudes ``-(L-1) .. L-1`` indexed by their Gray label."""
    out = np.empty(levels)
    for pos in range(levels):
        out[_gray(pos)] = 2 * pos - (levels - 1)
    return out


def _normalize(points):
    points = np.asarray(points, dtype=np.complex128)
    return points / np.sqrt(np.mean(np.abs(points) ** 2))


def _qam(bits_i, bits_q):
    # bits_i label the in-phase level (MSBs), bits_q the quadrature (LSBs).
    re = _gray_pam(2**bits_i)
    # larger quadrature amplitude first so that a zero bit maps to +1 for 1-bit Q
    im = -_gray_pam(2**bits_q)
    if bits_i == 1:
        re = -re
    pts = np.empty(2 ** (bits_i + bits_q), dtype=np.complex128)
    for a in range(2**bits_i):
        for b in range(2**bits_q):
            pts[(a << bits_q) | b] = re[a] + 1j * im[b]
    return pts


def _psk(order):
    pts = np.empty(order, dtype=np.complex128)
    for pos in range(order):
        pts[_gray(pos)] = np.exp(2j * np.pi * pos / order)
    return pts


def make_alphabet(name: str) -> Alphabet:
    """Build a unit-energy alphabet by name.

    Recognized names (case-insensitive): ``BPSK``, ``QAM4`` (alias ``QPSK``),
    ``QAM8`` (rectangular 4x2 grid), any square ``QAM<M>``, and ``PSK<M>``.

    >>> make_alphabet("bpsk").symbols
    array([ 1.+0.j, -1.+0.j])
    """
    key = name.strip().upper().replace("-", "").replace("_", "")
    if key in ("BPSK", "PSK2", "QAM2"):
        return Alphabet("BPSK", np.array([1.0 + 0j, -1.0 + 0j]))
    if key in ("QPSK", "4QAM"):
        key = "QAM4"
    if key == "8QAM":
        key = "QAM8"
    if key.startswith("QAM") and key[3:].isdigit():
        order = int(key[3:])
        bits = order.bit_length() - 1
        if order < 4 or order != 1 << bits:
            raise ValueError(f"unsupported QAM order {order}")
        bits_q = bits // 2
        bits_i = bits - bits_q
        return Alphabet(f"QAM{order}", _normalize(_qam(bits_i, bits_q)))
    if key.startswith("PSK") and key[3:].isdigit():
        order = int(key[3:])
        if order < 2 or order & (order - 1):
            raise ValueError(f"unsupported PSK order {order}")
        return Alphabet(f"PSK{order}", _psk(order))
    raise ValueError(f"unknown alphabet {name!r}")


def bits_to_int(bits) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> (width - 1 - k)) & 1 for k in range(width)], dtype=np.int8)


def map_bits(alphabet: Alphabet, bits) -> complex:
    bits = np.asarray(bits)
    if bits.shape != (alphabet.bits_per_symbol,):
        raise ValueError(
            f"{alphabet.name} needs {alphabet.bits_per_symbol} bits, got {bits.size}"
        )
    return complex(alphabet.symbols[bits_to_int(bits)])


def quantize(alphabet: Alphabet, z) -> np.ndarray:
    """Indices of the nearest alphabet points, elementwise.

    Ties go to the lowest symbol index (``argmin`` returns the first hit).
    """
    z = np.asarray(z, dtype=np.complex128)
    dist = np.abs(z[..., None] - alphabet.symbols) ** 2
    return np.argmin(dist, axis=-1)


def demap_symbol(alphabet: Alphabet, z: complex):
    """Nearest-point decision for one received value.

    Returns
    -------
    index : int
    bits : ndarray of int8
    """
    idx = int(quantize(alphabet, z))
    return idx, int_to_bits(idx, alphabet.bits_per_symbol)
