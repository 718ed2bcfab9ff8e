"""Soft-decision decoding of orthogonal space-time block codes.

Link-level building blocks (Gray constellations with bitwise LLRs, the
SISO/Alamouti/G3/G4 designs and their combiners, a Rayleigh block-fading
channel, a punctured 133/171 convolutional code with a Viterbi decoder) and
a Monte-Carlo BER harness tying them together.
"""

from .channel import ChannelBlock, NoiseSpec, apply, draw_channel, draw_channels, make_streams
from .constellation import (Constellation, LlrWord, demap_hard, llr_approx, llr_exact,
                            make_constellation, map_bits, weight_llr)
from .errors import ConfigError, DegenerateChannelError, GapRangeError
from .harness import BerPoint, SimConfig, ebn0_of, gap_at_ber, run_point, sweep
from .stbc import (CombinerOutput, OrthogonalDesign, channel_energy, combine, combined_snr,
                   design, encode, energy_loss_bound_db, max_rate_bound, orthogonality_defect)

__version__ = "0.1.0"
