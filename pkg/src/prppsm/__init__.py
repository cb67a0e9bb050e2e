"""Pseudo-random phase precoded spatial modulation (PRPP-SM) link simulator."""

from prppsm.modem import Alphabet, make_alphabet
from prppsm.smcodec import ActivationPattern, SmConfig, SmFrame
from prppsm.precoder import PrecoderMatrix, generate_precoder
from prppsm.channel import ChannelConfig, ChannelRealization, draw_channel
from prppsm.detectors import DetectionResult, detect_lsd, detect_ml

__version__ = "0.1.0"

__all__ = [
    "ActivationPattern",
    "Alphabet",
    "ChannelConfig",
    "ChannelRealization",
    "DetectionResult",
    "PrecoderMatrix",
    "SmConfig",
    "SmFrame",
    "detect_lsd",
    "detect_ml",
    "draw_channel",
    "generate_precoder",
    "make_alphabet",
]
