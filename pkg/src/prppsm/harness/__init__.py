"""Monte Carlo BER engine, scenario files and command-line entry point."""

from prppsm.harness.scenario import Scenario, load_scenario, scenario_from_dict
from prppsm.harness.engine import BerCurve, BerPoint, run_frame, run_sweep
from prppsm.harness.gap import GapError, measure_gap, snr_at_ber

__all__ = [
    "BerCurve",
    "BerPoint",
    "GapError",
    "Scenario",
    "load_scenario",
    "measure_gap",
    "run_frame",
    "run_sweep",
    "scenario_from_dict",
    "snr_at_ber",
]
