"""Receivers for SM, PRPP and PRPP-SM frames.

Two transmit models are supported through ``kind``:

``"prpp_sm"``
    ``y = D A P A x`` with a ``p x p*n_t`` precoder. The activation pattern
    picks one precoder column per channel use, so antenna bits are spread
    over the whole frame. With ``n_t == 1`` this is plain PRPP, and with
    ``p == 1`` and :func:`prppsm.precoder.unit_precoder` it is plain SM.
``"ablation"``
    ``y = D A P x`` with a square precoder: only the symbols are precoded.

The dense products in :func:`ml_cost` are the reference semantics. Searches
use an equivalent per-use expansion of the residual,
``sum_k |y_k|^2 - 2 Re(conj(z_k) h_k^H y_k) + |z_k|^2 |h_k|^2`` where
``z = M x`` is the precoded stream and ``h_k`` the active antenna's channel
column for use ``k``. ``tests/test_detectors.py`` checks the two agree.
"""

from dataclasses import dataclass, field

import numpy as np

from prppsm.channel import blocks_from_D
from prppsm.modem import quantize
from prppsm.numerics import as_vector, solve_regularized
from prppsm.precoder import PrecoderMatrix
from prppsm.smcodec import ActivationPattern, SmConfig, SmFrame, build_activation_matrix

PRPP_SM = "prpp_sm"
ABLATION = "ablation"
KINDS = (PRPP_SM, ABLATION)

ML_CAP = 2**20
_ML_CHUNK = 2**15


class MLInfeasibleError(ValueError):
    """Exhaustive search was requested over more hypotheses than allowed."""


@dataclass(frozen=True)
class DetectionResult:
    hypothesis: SmFrame
    cost: float
    iterations: int = 0
    neighbors_evaluated: int = 0
    trace: tuple = field(default=(), compare=False)


def _precoder_array(P):
    return P.matrix if isinstance(P, PrecoderMatrix) else np.asarray(P, dtype=np.complex128)


def _check_kind(kind):
    if kind not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}")


def effective_matrix(D, P, cfg: SmConfig, pattern: ActivationPattern, kind=PRPP_SM):
    """Dense effective channel for one activation pattern (reference path)."""
    _check_kind(kind)
    A = build_activation_matrix(cfg, pattern)
    P = _precoder_array(P)
    if kind == PRPP_SM:
        return D @ A @ P @ A
    return D @ A @ P


def ml_cost(y, D, P, h: SmFrame, cfg: SmConfig, kind=PRPP_SM) -> float:
    """``||y - D A P A x||^2`` (or ``||y - D A P x||^2`` for the ablation)."""
    y = as_vector(y)
    G = effective_matrix(D, P, cfg, h.pattern, kind)
    if G.shape[0] != y.shape[0]:
        raise ValueError(f"y has length {y.shape[0]}, model produces {G.shape[0]}")
    r = y - G @ h.symbol_values(cfg.alphabet)
    return float(np.vdot(r, r).real)


def sm_cost(y, H, x) -> float:
    """Single-use SM residual ``||y - H x||^2``."""
    r = as_vector(y) - np.asarray(H, dtype=np.complex128) @ as_vector(x)
    return float(np.vdot(r, r).real)


def _precoder_columns(P, cfg: SmConfig, kind):
    """``cols[i, j]``: precoder column used by use ``i`` when antenna ``j`` is active."""
    p, n_t = cfg.p, cfg.n_t
    if kind == PRPP_SM:
        return P.T.reshape(p, n_t, p)
    return np.broadcast_to(P.T[:, None, :], (p, n_t, p))


def _streams(cols, alph, antennas, symbols):
    """Precoded streams ``z`` for a batch of hypotheses, shape ``(B, p)``."""
    p = cols.shape[0]
    sel = cols[np.arange(p), antennas]  # (B, p_i, p_k)
    return np.einsum("bi,bik->bk", alph[symbols], sel)


class _Model:
    """Fast residual evaluation for one received frame."""

    def __init__(self, y, D, P, cfg: SmConfig, kind):
        _check_kind(kind)
        self.cfg = cfg
        self.kind = kind
        self.alph = cfg.alphabet.symbols
        y = as_vector(y)
        P = _precoder_array(P)
        p, n_t = cfg.p, cfg.n_t
        expect_cols = p * n_t if kind == PRPP_SM else p
        if P.shape != (p, expect_cols):
            raise ValueError(f"precoder shape {P.shape} != {(p, expect_cols)} for {kind}")
        blocks = blocks_from_D(D, p)
        if blocks.shape[2] != n_t or blocks.shape[0] * blocks.shape[1] != y.shape[0]:
            raise ValueError("D, y and the SM configuration are inconsistent")
        yb = y.reshape(p, -1)
        # a[k, j] = |h_kj|^2, b[k, j] = h_kj^H y_k
        self.a = np.sum(np.abs(blocks) ** 2, axis=1)
        self.b = np.einsum("krj,kr->kj", blocks.conj(), yb)
        self.c = float(np.vdot(y, y).real)
        self.cols = _precoder_columns(P, cfg, kind)

    def stream(self, antennas, symbols):
        return _streams(self.cols, self.alph, antennas, symbols)

    def costs_from_stream(self, antennas, z):
        k = np.arange(self.cfg.p)
        a = self.a[k, antennas]
        b = self.b[k, antennas]
        terms = (z.real**2 + z.imag**2) * a - 2.0 * (z.conj() * b).real
        return self.c + terms.sum(axis=-1)

    def costs(self, antennas, symbols):
        antennas = np.atleast_2d(antennas)
        symbols = np.atleast_2d(symbols)
        return self.costs_from_stream(antennas, self.stream(antennas, symbols))


def _digits(values, base, width):
    out = np.empty((len(values), width), dtype=np.int64)
    v = values.copy()
    for w in range(width - 1, -1, -1):
        out[:, w] = v % base
        v //= base
    return out


def _enumerate(cfg: SmConfig, start, stop):
    """Hypotheses ``start .. stop-1`` in search order.

    Patterns are the outer loop and symbols the inner loop; both count in
    natural order with channel use 0 most significant.
    """
    idx = np.arange(start, stop, dtype=np.int64)
    m_p = cfg.alphabet.size ** cfg.p
    return _digits(idx // m_p, cfg.n_t, cfg.p), _digits(idx % m_p, cfg.alphabet.size, cfg.p)


class HypothesisTable:
    """Precoded streams of every hypothesis for a fixed precoder.

    The streams depend only on the precoder, so a simulation with a static
    precoder can build this once and reuse it for every frame.
    """

    def __init__(self, P, cfg: SmConfig, kind=PRPP_SM, cap=ML_CAP):
        _check_kind(kind)
        total = cfg.num_hypotheses
        if total > cap:
            raise MLInfeasibleError(
                f"{total} hypotheses exceeds the exhaustive-search cap {cap}; use LSD"
            )
        self.cfg = cfg
        self.kind = kind
        self.precoder = _precoder_array(P)
        self.antennas, self.symbols = _enumerate(cfg, 0, total)
        cols = _precoder_columns(self.precoder, cfg, kind)
        alph = cfg.alphabet.symbols
        self.z = np.concatenate(
            [
                _streams(cols, alph, self.antennas[s:s + _ML_CHUNK], self.symbols[s:s + _ML_CHUNK])
                for s in range(0, total, _ML_CHUNK)
            ]
        )
        # grouped as (pattern, symbol vector, use) for the per-frame contraction
        n_pat = cfg.n_t ** cfg.p
        shape = (n_pat, total // n_pat, cfg.p)
        self.pattern_antennas = self.antennas[:: total // n_pat]
        self.z_energy = (self.z.real**2 + self.z.imag**2).reshape(shape)
        self.z_re = np.ascontiguousarray(self.z.real).reshape(shape)
        self.z_im = np.ascontiguousarray(self.z.imag).reshape(shape)

    def costs(self, model):
        """Residual of every hypothesis, in enumeration order."""
        k = np.arange(self.cfg.p)
        a = model.a[k, self.pattern_antennas]
        b = model.b[k, self.pattern_antennas]
        terms = (
            np.einsum("nsk,nk->ns", self.z_energy, a)
            - 2.0 * np.einsum("nsk,nk->ns", self.z_re, b.real)
            - 2.0 * np.einsum("nsk,nk->ns", self.z_im, b.imag)
        )
        return model.c + terms.ravel()

    def matches(self, P, cfg, kind):
        return (
            cfg == self.cfg
            and kind == self.kind
            and np.array_equal(_precoder_array(P), self.precoder)
        )


def _frame(antennas, symbols):
    return SmFrame(ActivationPattern(antennas), symbols)


def detect_ml(y, D, P, cfg: SmConfig, kind=PRPP_SM, cap=ML_CAP, table=None) -> DetectionResult:
    """Exhaustive minimization over all ``(n_t * |A|) ** p`` hypotheses.

    Ties resolve to the first hypothesis in enumeration order.

    Raises
    ------
    MLInfeasibleError
        If the hypothesis count exceeds ``cap``.
    """
    total = cfg.num_hypotheses
    if total > cap:
        raise MLInfeasibleError(
            f"{total} hypotheses exceeds the exhaustive-search cap {cap}; use LSD"
        )
    model = _Model(y, D, P, cfg, kind)
    if table is not None:
        if not table.matches(P, cfg, kind):
            raise ValueError("hypothesis table was built for a different model")
        best = int(np.argmin(table.costs(model)))
        ant, sym = table.antennas[best], table.symbols[best]
    else:
        best_cost = np.inf
        ant = sym = None
        for start in range(0, total, _ML_CHUNK):
            a_chunk, s_chunk = _enumerate(cfg, start, min(start + _ML_CHUNK, total))
            costs = model.costs(a_chunk, s_chunk)
            i = int(np.argmin(costs))
            if costs[i] < best_cost:
                best_cost = costs[i]
                ant, sym = a_chunk[i], s_chunk[i]
    h = _frame(ant, sym)
    return DetectionResult(h, ml_cost(y, D, P, h, cfg, kind), 0, total)


def _neighbor_moves(cfg: SmConfig, antenna: int, symbol: int):
    """Ordered (antenna, symbol) replacements at one channel use.

    Antenna-only changes first, then symbol-only, then both.
    """
    others_j = [j for j in range(cfg.n_t) if j != antenna]
    others_s = [s for s in range(cfg.alphabet.size) if s != symbol]
    moves = [(j, symbol) for j in others_j]
    moves += [(antenna, s) for s in others_s]
    moves += [(j, s) for j in others_j for s in others_s]
    return moves


def neighborhood(h: SmFrame, cfg: SmConfig) -> list:
    """All hypotheses that differ from ``h`` at exactly one channel use.

    A neighbor changes the antenna, the symbol, or both at a single use.
    There are ``p * (n_t * |A| - 1)`` of them, listed by use, then
    antenna-only / symbol-only / both, each in natural index order.
    """
    h.validate(cfg)
    out = []
    for i, (j0, s0) in enumerate(zip(h.antennas, h.symbols)):
        for j, s in _neighbor_moves(cfg, j0, s0):
            ant = list(h.antennas)
            sym = list(h.symbols)
            ant[i], sym[i] = j, s
            out.append(_frame(ant, sym))
    return out


def _effective_dense(D, P, cfg, antennas, kind):
    return effective_matrix(D, P, cfg, ActivationPattern(antennas), kind)


def mmse_initial(y, D, P, cfg: SmConfig, sigma2: float, kind=PRPP_SM) -> SmFrame:
    """Two-stage MMSE starting point for local search.

    The first stage estimates the ``p*n_t`` antenna-domain vector from ``D``
    alone and keeps the strongest antenna of each use (ties to the lower
    index). The second stage solves the MMSE problem for the effective
    matrix of that pattern and quantizes each entry to the alphabet.
    """
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    v = solve_regularized(D, y, sigma2)
    antennas = np.argmax(np.abs(v.reshape(cfg.p, cfg.n_t)), axis=1)
    F = _effective_dense(D, P, cfg, antennas, kind)
    soft = solve_regularized(F, y, sigma2)
    return _frame(antennas, quantize(cfg.alphabet, soft))


def detect_lsd(y, D, P, cfg: SmConfig, sigma2=None, init=None, kind=PRPP_SM) -> DetectionResult:
    """Best-improvement local search over :func:`neighborhood`.

    Each iteration evaluates every neighbor of the current hypothesis and
    moves to the cheapest one only if it is strictly cheaper than the
    current hypothesis; otherwise the current hypothesis is returned.

    Parameters
    ----------
    sigma2 : float, optional
        Noise variance; required when ``init`` is not given.
    init : SmFrame, optional
        Starting hypothesis. Defaults to :func:`mmse_initial`.
    """
    if init is None:
        if sigma2 is None:
            raise ValueError("sigma2 is required for the MMSE starting point")
        init = mmse_initial(y, D, P, cfg, sigma2, kind)
    init.validate(cfg)
    model = _Model(y, D, P, cfg, kind)
    p, n_t, m = cfg.p, cfg.n_t, cfg.alphabet.size
    alph = cfg.alphabet.symbols
    ant = np.array(init.antennas)
    sym = np.array(init.symbols)
    uses = np.arange(p)

    z = model.stream(ant[None], sym[None])[0]
    cost = float(model.costs_from_stream(ant[None], z[None])[0])
    trace = [cost]
    iterations = 0
    evaluated = 0
    while True:
        # candidate streams for every (use i, antenna j, symbol s) replacement
        old = model.cols[uses, ant] * alph[sym][:, None]  # (p_i, p_k)
        new = model.cols[:, :, None, :] * alph[None, None, :, None]  # (p_i, n_t, m, p_k)
        zc = z + new - old[:, None, None, :]
        a_cur = model.a[uses, ant]
        b_cur = model.b[uses, ant]
        a_nb = np.broadcast_to(a_cur, (p, n_t, p)).copy()
        b_nb = np.broadcast_to(b_cur, (p, n_t, p)).copy()
        a_nb[uses, :, uses] = model.a
        b_nb[uses, :, uses] = model.b
        terms = (zc.real**2 + zc.imag**2) * a_nb[:, :, None, :] - 2.0 * (
            zc.conj() * b_nb[:, :, None, :]
        ).real
        costs = model.c + terms.sum(axis=-1)  # (p, n_t, m)

        order_i, order_j, order_s = [], [], []
        for i in range(p):
            for j, s in _neighbor_moves(cfg, int(ant[i]), int(sym[i])):
                order_i.append(i)
                order_j.append(j)
                order_s.append(s)
        flat = costs[order_i, order_j, order_s]
        evaluated += flat.size
        if flat.size == 0:
            break
        best = int(np.argmin(flat))
        if not flat[best] < cost:
            break
        i = order_i[best]
        ant[i], sym[i] = order_j[best], order_s[best]
        z = model.stream(ant[None], sym[None])[0]
        cost = float(model.costs_from_stream(ant[None], z[None])[0])
        trace.append(cost)
        iterations += 1

    h = _frame(ant, sym)
    return DetectionResult(h, ml_cost(y, D, P, h, cfg, kind), iterations, evaluated, tuple(trace))


def detect_mmse(y, D, P, cfg: SmConfig, sigma2: float, kind=PRPP_SM) -> DetectionResult:
    """The MMSE starting point on its own, with no search."""
    h = mmse_initial(y, D, P, cfg, sigma2, kind)
    return DetectionResult(h, ml_cost(y, D, P, h, cfg, kind))


def detect_symbol_flip(y, G, alphabet, init=None, sigma2=None) -> DetectionResult:
    """Coordinate local search on ``y = G s + n`` over symbol vectors.

    Stand-in for likelihood ascent search: every iteration takes the single
    symbol substitution that lowers ``||y - G s||^2`` the most, and stops at
    a local minimum. The result's hypothesis uses an all-zero pattern
    (single antenna).

    Parameters
    ----------
    init : array_like of int, optional
        Starting symbol indices. Defaults to the quantized MMSE estimate,
        which needs ``sigma2``.
    """
    y = as_vector(y)
    G = np.asarray(G, dtype=np.complex128)
    alph = alphabet.symbols
    if init is None:
        if sigma2 is None:
            raise ValueError("sigma2 is required for the MMSE starting point")
        init = quantize(alphabet, solve_regularized(G, y, sigma2))
    sym = np.array(init, dtype=np.int64)
    n = G.shape[1]
    if sym.shape != (n,):
        raise ValueError(f"init must have length {n}")

    col_energy = np.sum(np.abs(G) ** 2, axis=0)
    # skip the no-op substitution at each coordinate
    mask = np.ones((n, alphabet.size), dtype=bool)
    r = y - G @ alph[sym]
    cost = float(np.vdot(r, r).real)
    trace = [cost]
    iterations = 0
    evaluated = 0
    while True:
        mask[:] = True
        mask[np.arange(n), sym] = False
        delta = alph[None, :] - alph[sym][:, None]  # (n, m)
        corr = G.conj().T @ r
        gain = -2.0 * (delta.conj() * corr[:, None]).real + np.abs(delta) ** 2 * col_energy[:, None]
        gain = np.where(mask, gain, np.inf)
        evaluated += n * (alphabet.size - 1)
        best = int(np.argmin(gain))
        i, s = divmod(best, alphabet.size)
        if not gain[i, s] < 0.0:
            break
        sym[i] = s
        r = y - G @ alph[sym]
        cost = float(np.vdot(r, r).real)
        trace.append(cost)
        iterations += 1

    h = _frame(np.zeros(n, dtype=np.int64), sym)
    return DetectionResult(h, cost, iterations, evaluated, tuple(trace))
