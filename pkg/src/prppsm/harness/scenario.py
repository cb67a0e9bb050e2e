"""Scenario definitions and their YAML key/value file format."""

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import yaml

from prppsm.detectors import ML_CAP
from prppsm.modem import make_alphabet
from prppsm.smcodec import SmConfig

SCHEMES = ("sm", "prpp", "prpp_sm", "prpp_sm_ablation")
DETECTORS = ("ml", "lsd", "symbol_flip_las", "mmse_only")
LSD_INITS = ("mmse", "random", "truth")


@dataclass(frozen=True)
class Scenario:
    """One simulated system plus its SNR sweep and stopping rule.

    ``n_rf = 1`` throughout: every scheme drives a single RF chain.
    """

    scheme: str
    n_t: int
    n_r: int
    p: int
    alphabet: str
    detector: str
    snr_db_list: tuple
    min_bit_errors: int = 200
    max_frames: int = 100_000
    master_seed: int = 0
    precoder_seed: int = 0
    precoder_per_frame: bool = False
    lsd_init: str = "mmse"
    awgn_only: bool = False
    ml_cap: int = ML_CAP
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "snr_db_list", tuple(float(s) for s in self.snr_db_list))
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.detector not in DETECTORS:
            raise ValueError(f"detector must be one of {DETECTORS}, got {self.detector!r}")
        if self.lsd_init not in LSD_INITS:
            raise ValueError(f"lsd_init must be one of {LSD_INITS}, got {self.lsd_init!r}")
        if self.min_bit_errors < 1:
            raise ValueError("min_bit_errors must be at least 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be at least 1")
        if not self.snr_db_list:
            raise ValueError("snr_db_list is empty")
        if any(b <= a for a, b in zip(self.snr_db_list, self.snr_db_list[1:])):
            raise ValueError("snr_db_list must be strictly increasing")
        if self.n_r < 1:
            raise ValueError("n_r must be positive")
        if self.scheme == "prpp" and self.n_t != 1:
            raise ValueError("the prpp scheme has a single transmit antenna (n_t = 1)")
        if self.detector == "symbol_flip_las" and self.n_t != 1:
            raise ValueError("symbol_flip_las only searches symbols; it needs n_t = 1")
        if self.scheme == "sm" and self.detector not in ("ml", "lsd"):
            raise ValueError("plain SM is detected per channel use with ml or lsd")
        # validates n_t, p and the alphabet name
        self.sm_config()

    def sm_config(self) -> SmConfig:
        return SmConfig(self.n_t, self.p, make_alphabet(self.alphabet))

    @property
    def bpcu(self) -> int:
        return self.sm_config().bits_per_use

    @property
    def bits_per_frame(self) -> int:
        return self.sm_config().bits_per_frame

    def with_changes(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["snr_db_list"] = list(self.snr_db_list)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def scenario_from_dict(d: dict) -> Scenario:
    d = dict(d)
    known = {f.name for f in dataclasses.fields(Scenario)}
    unknown = sorted(set(d) - known)
    if unknown:
        raise ValueError(f"unknown scenario keys: {unknown}")
    if "snr_db_list" not in d:
        raise ValueError("scenario needs snr_db_list")
    return Scenario(**d)


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a mapping of scenario keys")
    data.setdefault("name", Path(path).stem)
    return scenario_from_dict(data)
