"""Frame-level simulation and SNR sweeps.

Every random draw of a frame comes from a substream keyed by
``(master_seed, snr_index, trial_index, purpose)``, and sweeps reduce frame
results in trial order. A sweep therefore returns the same numbers whether it
runs on one worker or many.
"""

import csv
import functools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from prppsm import channel as chan
from prppsm.detectors import (
    ABLATION,
    PRPP_SM,
    DetectionResult,
    HypothesisTable,
    detect_lsd,
    detect_ml,
    detect_mmse,
    detect_symbol_flip,
    effective_matrix,
)
from prppsm.harness.scenario import Scenario
from prppsm.precoder import generate_precoder, unit_precoder
from prppsm.smcodec import ActivationPattern, SmConfig, SmFrame, bits_to_frame, frame_to_bits

CSV_COLUMNS = (
    "snr_db",
    "frames",
    "bits",
    "bit_errors",
    "ber",
    "avg_iterations",
    "avg_neighbor_evals",
)


@dataclass(frozen=True)
class FrameOutcome:
    tx_bits: np.ndarray
    rx_bits: np.ndarray
    detection: DetectionResult
    antenna_bit_errors: int
    symbol_bit_errors: int

    @property
    def bit_errors(self) -> int:
        return self.antenna_bit_errors + self.symbol_bit_errors


@dataclass
class BerPoint:
    snr_db: float
    frames: int = 0
    bits: int = 0
    bit_errors: int = 0
    ber: float = 0.0
    avg_iterations: float = 0.0
    avg_neighbor_evals: float = 0.0
    antenna_bit_errors: int = 0
    symbol_bit_errors: int = 0


@dataclass
class BerCurve:
    scenario: dict
    digest: str
    points: list
    elapsed_s: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def snr_db(self):
        return np.array([pt.snr_db for pt in self.points])

    @property
    def ber(self):
        return np.array([pt.ber for pt in self.points])

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for pt in self.points:
                w.writerow([repr(getattr(pt, c)) if isinstance(getattr(pt, c), float)
                            else getattr(pt, c) for c in CSV_COLUMNS])

    def write_sidecar(self, path):
        payload = {
            "scenario": self.scenario,
            "digest": self.digest,
            "elapsed_s": self.elapsed_s,
            "points": [asdict(pt) for pt in self.points],
            **self.meta,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)

    def save(self, csv_path):
        """Write the CSV and a ``.json`` sidecar next to it."""
        csv_path = str(csv_path)
        self.write_csv(csv_path)
        stem = csv_path[:-4] if csv_path.endswith(".csv") else csv_path
        self.write_sidecar(stem + ".json")


def read_csv(path) -> BerCurve:
    points = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            points.append(
                BerPoint(
                    snr_db=float(row["snr_db"]),
                    frames=int(row["frames"]),
                    bits=int(row["bits"]),
                    bit_errors=int(row["bit_errors"]),
                    ber=float(row["ber"]),
                    avg_iterations=float(row["avg_iterations"]),
                    avg_neighbor_evals=float(row["avg_neighbor_evals"]),
                )
            )
    return BerCurve({}, "", points)


_TABLES = {}


def _model_kind(scn: Scenario):
    return ABLATION if scn.scheme == "prpp_sm_ablation" else PRPP_SM


def _precoder(scn: Scenario, snr_index: int, trial_index: int):
    cols = scn.p * scn.n_t if scn.scheme == "prpp_sm" else scn.p
    if scn.precoder_per_frame:
        rng = chan.substream(scn.master_seed, snr_index, trial_index, chan.STREAM_PRECODER)
        return generate_precoder(scn.p, cols, int(rng.integers(0, 2**63)))
    return _static_precoder(scn.p, cols, scn.precoder_seed)


@functools.lru_cache(maxsize=64)
def _static_precoder(p, cols, seed):
    return generate_precoder(p, cols, seed)


def _ml_table(scn: Scenario, P, cfg: SmConfig, kind):
    # only worth caching for a static precoder
    if scn.precoder_per_frame:
        return None
    key = (scn.scheme, scn.n_t, scn.p, scn.alphabet, P.seed, kind)
    table = _TABLES.get(key)
    if table is None:
        table = HypothesisTable(P, cfg, kind, cap=scn.ml_cap)
        _TABLES[key] = table
    return table


def _detect(scn, cfg, y, D, P, sigma2, truth, init_rng, kind, table=None):
    if scn.detector == "ml":
        return detect_ml(y, D, P, cfg, kind, cap=scn.ml_cap, table=table)
    if scn.detector == "mmse_only":
        return detect_mmse(y, D, P, cfg, sigma2, kind)
    if scn.detector == "symbol_flip_las":
        # single antenna: the model is y = D P x
        G = effective_matrix(D, P, cfg, ActivationPattern([0] * cfg.p), kind)
        return detect_symbol_flip(y, G, cfg.alphabet, sigma2=sigma2)
    init = None
    if scn.lsd_init == "truth":
        init = truth
    elif scn.lsd_init == "random":
        init = SmFrame(
            ActivationPattern(init_rng.integers(0, cfg.n_t, cfg.p)),
            init_rng.integers(0, cfg.alphabet.size, cfg.p),
        )
    return detect_lsd(y, D, P, cfg, sigma2, init=init, kind=kind)


def _split_errors(cfg: SmConfig, tx, rx):
    wrong = (tx != rx).reshape(cfg.p, cfg.bits_per_use)
    n_ant = cfg.antenna_bits
    return int(wrong[:, :n_ant].sum()), int(wrong[:, n_ant:].sum())


def run_frame(scn: Scenario, snr_index: int, trial_index: int) -> FrameOutcome:
    """Simulate one frame at ``scn.snr_db_list[snr_index]``.

    Returns the transmitted and detected bits together with the detector's
    result. The outcome depends only on the scenario and the two indices.
    """
    snr_db = scn.snr_db_list[snr_index]
    cfg = scn.sm_config()
    seed = scn.master_seed

    def rng(purpose):
        return chan.substream(seed, snr_index, trial_index, purpose)

    tx_bits = rng(chan.STREAM_BITS).integers(0, 2, cfg.bits_per_frame).astype(np.int8)
    frame = bits_to_frame(cfg, tx_bits)
    ch_cfg = chan.ChannelConfig(scn.n_t, scn.n_r, scn.p, snr_db)
    realization = chan.draw_channel(ch_cfg, rng(chan.STREAM_CHANNEL), awgn_only=scn.awgn_only)
    noise_rng = rng(chan.STREAM_NOISE)
    init_rng = rng(chan.STREAM_INIT)

    if scn.scheme == "sm":
        detection = _run_plain_sm(scn, cfg, frame, realization, noise_rng, init_rng)
    else:
        kind = _model_kind(scn)
        P = _precoder(scn, snr_index, trial_index)
        D = chan.assemble_D(realization)
        G = effective_matrix(D, P, cfg, frame.pattern, kind)
        y = chan.transmit(realization, G, frame.symbol_values(cfg.alphabet), noise_rng)
        table = _ml_table(scn, P, cfg, kind) if scn.detector == "ml" else None
        detection = _detect(
            scn, cfg, y, D, P, realization.sigma2, frame, init_rng, kind, table
        )

    rx_bits = frame_to_bits(cfg, detection.hypothesis)
    ant_err, sym_err = _split_errors(cfg, tx_bits, rx_bits)
    return FrameOutcome(tx_bits, rx_bits, detection, ant_err, sym_err)


def _run_plain_sm(scn, cfg, frame, realization, noise_rng, init_rng):
    """``p`` independent single-use SM transmissions ``y = H x + n``."""
    one = SmConfig(cfg.n_t, 1, cfg.alphabet)
    P = unit_precoder(cfg.n_t)
    table = _ml_table(scn.with_changes(p=1), P, one, PRPP_SM) if scn.detector == "ml" else None
    ants, syms = [], []
    cost = 0.0
    iterations = evaluated = 0
    for i in range(cfg.p):
        sub = SmFrame(ActivationPattern([frame.antennas[i]]), [frame.symbols[i]])
        H = realization.blocks[i]
        r1 = chan.ChannelRealization(H[None], realization.sigma2)
        G = effective_matrix(H, P, one, sub.pattern)
        y = chan.transmit(r1, G, sub.symbol_values(cfg.alphabet), noise_rng)
        res = _detect(scn, one, y, H, P, realization.sigma2, sub, init_rng, PRPP_SM, table)
        ants.append(res.hypothesis.antennas[0])
        syms.append(res.hypothesis.symbols[0])
        cost += res.cost
        iterations += res.iterations
        evaluated += res.neighbors_evaluated
    return DetectionResult(SmFrame(ActivationPattern(ants), syms), cost, iterations, evaluated)


def _run_trials(args):
    scn, snr_index, start, stop = args
    out = []
    for t in range(start, stop):
        o = run_frame(scn, snr_index, t)
        out.append(
            (o.antenna_bit_errors, o.symbol_bit_errors, o.detection.iterations,
             o.detection.neighbors_evaluated)
        )
    return out


def _simulate_point(scn: Scenario, snr_index: int, pool, workers: int, batch: int):
    pt = BerPoint(snr_db=scn.snr_db_list[snr_index])
    bits_per_frame = scn.bits_per_frame
    iterations = evaluated = 0
    next_trial = 0
    done = False
    while not done:
        stop = min(next_trial + batch * workers, scn.max_frames)
        chunks = [
            (scn, snr_index, s, min(s + batch, stop)) for s in range(next_trial, stop, batch)
        ]
        results = pool.map(_run_trials, chunks) if pool is not None else map(_run_trials, chunks)
        # ordered reduction: stop at exactly the same frame for any worker count
        for chunk in results:
            for ant_err, sym_err, it, ev in chunk:
                if done:
                    break
                pt.frames += 1
                pt.antenna_bit_errors += ant_err
                pt.symbol_bit_errors += sym_err
                iterations += it
                evaluated += ev
                done = (
                    pt.antenna_bit_errors + pt.symbol_bit_errors >= scn.min_bit_errors
                    or pt.frames >= scn.max_frames
                )
        next_trial = stop
    pt.bits = pt.frames * bits_per_frame
    pt.bit_errors = pt.antenna_bit_errors + pt.symbol_bit_errors
    pt.ber = pt.bit_errors / pt.bits
    pt.avg_iterations = iterations / pt.frames
    pt.avg_neighbor_evals = evaluated / pt.frames
    return pt


def run_sweep(scn: Scenario, workers: int = 1, batch: int = 64, progress=None) -> BerCurve:
    """BER at every SNR of the scenario.

    Each point runs frames until ``min_bit_errors`` errors have accumulated
    or ``max_frames`` frames were simulated.

    Parameters
    ----------
    workers : int
        Worker processes. Results do not depend on this value.
    batch : int
        Frames per work unit.
    progress : callable, optional
        Called with each finished :class:`BerPoint`.
    """
    if workers < 1 or batch < 1:
        raise ValueError("workers and batch must be positive")
    start = time.perf_counter()
    points = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for k in range(len(scn.snr_db_list)):
            pt = _simulate_point(scn, k, pool, workers, batch)
            points.append(pt)
            if progress is not None:
                progress(pt)
    finally:
        if pool is not None:
            pool.shutdown()
    return BerCurve(
        scenario=scn.to_dict(),
        digest=scn.digest(),
        points=points,
        elapsed_s=time.perf_counter() - start,
        meta={"bpcu": scn.bpcu, "workers": workers},
    )
