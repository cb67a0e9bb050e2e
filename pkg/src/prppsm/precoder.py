"""Pseudo-random phase precoders and the effective transmit operators.

Phase generation
----------------
Phases come from numpy's PCG64 bit generator seeded through
``numpy.random.SeedSequence(seed)``. Raw 64-bit outputs are consumed one per
matrix entry in row-major order and mapped to ``[0, 2*pi)`` as
``(u >> 11) * 2**-53 * 2*pi``. Both PCG64 and SeedSequence are fixed,
documented algorithms, so the sequence is identical on every platform; see
``docs/precoder_format.md`` for a frozen test vector.
"""

from dataclasses import dataclass

import numpy as np

from prppsm.numerics import as_matrix, matmul

SQUARE = "square"
RECTANGULAR = "rectangular"


@dataclass(frozen=True)
class PrecoderMatrix:
    matrix: np.ndarray
    seed: int
    kind: str

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def p(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]


def phase_stream(seed: int, count: int) -> np.ndarray:
    """First ``count`` phases in ``[0, 2*pi)`` for ``seed``."""
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    bitgen = np.random.PCG64(np.random.SeedSequence(seed))
    raw = bitgen.random_raw(count)
    unit = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return 2.0 * np.pi * unit


def generate_precoder(p: int, cols: int, seed: int) -> PrecoderMatrix:
    """``p x cols`` matrix with entries ``exp(j*theta) / sqrt(p)``.

    ``cols == p`` gives the square PRPP precoder; ``cols == p * n_t`` the
    rectangular PRPP-SM precoder.
    """
    if p < 1 or cols < p or cols % p:
        raise ValueError(f"cols must be a positive multiple of p, got p={p}, cols={cols}")
    theta = phase_stream(seed, p * cols).reshape(p, cols)
    matrix = np.exp(1j * theta) / np.sqrt(p)
    return PrecoderMatrix(matrix, int(seed), SQUARE if cols == p else RECTANGULAR)


def unit_precoder(n_t: int) -> PrecoderMatrix:
    """All-ones ``1 x n_t`` precoder: turns the PRPP-SM model into plain SM."""
    return PrecoderMatrix(np.ones((1, n_t), dtype=np.complex128), 0, RECTANGULAR)


def _mat(P):
    return P.matrix if isinstance(P, PrecoderMatrix) else as_matrix(P)


def effective_matrix_prpp(D, P) -> np.ndarray:
    """``G = D P`` for the square-precoded single-antenna system."""
    P = _mat(P)
    if P.shape[0] != P.shape[1]:
        raise ValueError("PRPP needs a square precoder")
    return matmul(D, P)


def effective_matrix_prppsm(D, A, P) -> np.ndarray:
    """``D A P A``: both antenna index and symbols go through the precoder."""
    A = as_matrix(A)
    return matmul(matmul(matmul(D, A), _mat(P)), A)


def effective_matrix_ablation(D, A, P) -> np.ndarray:
    """``D A P`` with a square ``P``: only the symbols are precoded."""
    P = _mat(P)
    if P.shape[0] != P.shape[1]:
        raise ValueError("the symbol-only variant needs a square precoder")
    return matmul(matmul(D, as_matrix(A)), P)
