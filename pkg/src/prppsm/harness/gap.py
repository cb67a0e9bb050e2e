"""SNR gap between two BER curves at a target BER."""

import numpy as np


class GapError(ValueError):
    """The target BER is not bracketed by a curve."""


def _points(curve):
    if hasattr(curve, "snr_db") and hasattr(curve, "ber"):
        snr, ber = curve.snr_db, curve.ber
    else:
        snr, ber = zip(*curve)
    return np.asarray(snr, dtype=float), np.asarray(ber, dtype=float)


def snr_at_ber(curve, target_ber: float) -> float:
    """SNR where the curve first falls through ``target_ber``.

    Interpolates linearly in (SNR dB, log10 BER) between the first pair of
    consecutive points that bracket the target. Points with zero measured
    errors carry no slope information and are skipped.
    """
    if not 0 < target_ber < 1:
        raise GapError("target BER must lie in (0, 1)")
    snr, ber = _points(curve)
    keep = ber > 0
    snr, ber = snr[keep], ber[keep]
    log_t = np.log10(target_ber)
    log_b = np.log10(ber)
    for k in range(len(snr) - 1):
        hi, lo = log_b[k], log_b[k + 1]
        if hi >= log_t >= lo and hi != lo:
            return float(snr[k] + (log_t - hi) * (snr[k + 1] - snr[k]) / (lo - hi))
    for k in range(len(snr)):
        if log_b[k] == log_t:
            return float(snr[k])
    raise GapError(
        f"BER {target_ber:g} is outside the curve range [{ber.min():.3g}, {ber.max():.3g}]"
        if len(ber) else "curve has no points with errors"
    )


def measure_gap(curve_a, curve_b, target_ber: float = 1e-2) -> float:
    """SNR of ``curve_a`` minus SNR of ``curve_b`` at ``target_ber`` (dB).

    Positive when ``curve_b`` reaches the target at a lower SNR.
    """
    return snr_at_ber(curve_a, target_ber) - snr_at_ber(curve_b, target_ber)
