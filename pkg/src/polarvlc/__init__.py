"""Polar-coded dimmable visible light communication: codec, framing and link simulation."""

from .channel import (ChannelParams, OOKChannel, demodulate_llr, ebn0_to_snr, q_function,
                      snr_to_sigma, transmit, uncoded_ber)
from .codec import decode, decode_batch, encode, encode_batch, hard_decision
from .construct import CodeSpec, ReliabilityProfile, compute_reliability, construct, select_info_set
from .errors import ConfigError, DimmingRangeError, ParameterError, UndefinedStatisticError
from .frame import (DimmingPlan, InterleaverMap, assemble_frame, deinterleave, disassemble_frame,
                    interleave, plan_dimming, run_length_histogram)
from .metrics import TrialLedger, WeightHistogram, efficiency_table, record_codeword, summarize_ber

__version__ = "0.1.0"
