"""Slow-transform polar codes for hidden Markov channels.

Successive-cancellation and list decoding over finite-state channels, built
on cyclic exponential arrays for copy-on-write path storage.
"""

from .cea import Cea, CeaError, copies_per_cycle
from .geometry import PhaseClass, SlowParams, bit_reverse, classify_phase, phase_classes
from .hmm import HmmProcess, gilbert_elliott, memoryless_bsc, sample, sample_channel
from .oracle import BudgetExceeded, OracleInstance
from .sc import ScDecoder, sc_run
from .scl import ListConfig, SclDecoder, reference_list_decode, scl_run
from .shaping import CrcBits, FrozenZeros, ShapingRule, with_crc
from .transform import forward, generator_matrix, inverse

__all__ = [
    "BudgetExceeded", "Cea", "CeaError", "CrcBits", "FrozenZeros", "HmmProcess",
    "ListConfig", "OracleInstance", "PhaseClass", "ScDecoder", "SclDecoder",
    "ShapingRule", "SlowParams", "bit_reverse", "classify_phase", "copies_per_cycle",
    "forward", "generator_matrix", "gilbert_elliott", "inverse", "memoryless_bsc",
    "phase_classes", "reference_list_decode", "sample", "sample_channel", "sc_run",
    "scl_run", "with_crc",
]
