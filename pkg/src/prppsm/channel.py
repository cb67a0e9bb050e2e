"""i.i.d. Rayleigh flat fading, block-diagonal channel assembly and AWGN.

SNR convention: with unit-energy alphabets the average received SNR per
receive antenna is ``1 / sigma2``, so ``sigma2 = 10 ** (-snr_db / 10)``.
"""

from dataclasses import dataclass

import numpy as np

from prppsm.numerics import as_matrix, as_vector

# purpose tags for per-trial random substreams
STREAM_BITS = 0
STREAM_CHANNEL = 1
STREAM_NOISE = 2
STREAM_PRECODER = 3
STREAM_INIT = 4


def substream(master_seed: int, snr_index: int, trial_index: int, purpose: int):
    """Independent generator keyed by (seed, SNR point, trial, purpose).

    Keying on the trial rather than on a shared sequential generator keeps
    results identical no matter how trials are spread over workers.
    """
    ss = np.random.SeedSequence([master_seed, snr_index, trial_index, purpose])
    return np.random.Generator(np.random.PCG64(ss))


def snr_to_sigma2(snr_db: float) -> float:
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    return float(10.0 ** (-snr_db / 10.0))


@dataclass(frozen=True)
class ChannelConfig:
    n_t: int
    n_r: int
    p: int
    snr_db: float

    def __post_init__(self):
        if min(self.n_t, self.n_r, self.p) < 1:
            raise ValueError("n_t, n_r and p must be positive")
        if not np.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite")

    @property
    def sigma2(self) -> float:
        return snr_to_sigma2(self.snr_db)


@dataclass(frozen=True)
class ChannelRealization:
    """Per-use channel matrices ``blocks[i]`` (each ``n_r x n_t``) and noise variance."""

    blocks: np.ndarray
    sigma2: float

    def __post_init__(self):
        if self.blocks.ndim != 3:
            raise ValueError("blocks must have shape (p, n_r, n_t)")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        self.blocks.setflags(write=False)

    @property
    def p(self) -> int:
        return self.blocks.shape[0]

    @property
    def n_r(self) -> int:
        return self.blocks.shape[1]

    @property
    def n_t(self) -> int:
        return self.blocks.shape[2]


def complex_normal(rng, shape, variance=1.0):
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def draw_channel(cfg: ChannelConfig, rng, awgn_only: bool = False) -> ChannelRealization:
    """Draw ``p`` independent ``n_r x n_t`` CN(0, 1) channel matrices.

    ``awgn_only`` replaces every gain by 1; it exists to check the noise path
    against the AWGN closed form.
    """
    shape = (cfg.p, cfg.n_r, cfg.n_t)
    if awgn_only:
        blocks = np.ones(shape, dtype=np.complex128)
    else:
        blocks = complex_normal(rng, shape)
    return ChannelRealization(blocks, cfg.sigma2)


def assemble_D(r: ChannelRealization) -> np.ndarray:
    """Block-diagonal ``(p*n_r, p*n_t)`` matrix ``diag(H_0, ..., H_{p-1})``."""
    p, n_r, n_t = r.blocks.shape
    D = np.zeros((p * n_r, p * n_t), dtype=np.complex128)
    for i in range(p):
        D[i * n_r:(i + 1) * n_r, i * n_t:(i + 1) * n_t] = r.blocks[i]
    return D


def blocks_from_D(D, p: int) -> np.ndarray:
    """Inverse of :func:`assemble_D` (off-block entries are ignored)."""
    D = as_matrix(D)
    rows, cols = D.shape
    if rows % p or cols % p:
        raise ValueError(f"D of shape {D.shape} is not block-diagonal with {p} blocks")
    n_r, n_t = rows // p, cols // p
    return np.stack(
        [D[i * n_r:(i + 1) * n_r, i * n_t:(i + 1) * n_t] for i in range(p)]
    )


def transmit(r: ChannelRealization, effective, x, rng) -> np.ndarray:
    """``y = effective @ x + n`` with ``n ~ CN(0, sigma2 I)``."""
    effective = as_matrix(effective)
    x = as_vector(x)
    if effective.shape[1] != x.shape[0]:
        raise ValueError(f"effective matrix {effective.shape} vs x of length {x.shape[0]}")
    clean = effective @ x
    return clean + complex_normal(rng, clean.shape, r.sigma2)
