"""Hybrid channel hopping for cognitive radio rendezvous.

A deterministic channel-hopping protocol (CRSEQ, Jump-Stay or a modular
baseline) is interleaved with random hopping under a neighbor-discovery
wake-up schedule, giving a bounded time to rendezvous with an average
close to that of pure random hopping.
"""

from .core import (ADVERSARIAL, UNIFORM, ChannelId, ChannelSet, ChSequence, ClockDrift,
                   PeriodicSequence, RandomSequence, RendezvousSlotSet, SlotIndex,
                   first_rendezvous, rendezvous_slots)
from .interleave import (HybridProtocol, HybridSequence, PaddedChannelSet, PaddingError,
                         awake_subsequence_offsets, hybrid_sequence, pad_channels)
from .metrics import (MetricReport, attr, diversity_rate, evaluate_pair, mttr,
                      predict_hybrid_attr)
from .protocols import (PROTOCOLS, NodeId, ProtocolDescriptor, crseq, detect_period, jumpstay,
                        modular_baseline, random_ch)
from .pumodel import ChannelAvailability, PuTrafficConfig, pu_trace
from .simulator import ExperimentConfig, ExperimentResult, check_trend, run_cell, run_pair, sweep
from .wakeup import (InfeasibleScheduleError, OverlapCertificate, WakeUpSchedule, duty_cycle,
                     generate_schedule, rotate, verify_discovery)

__version__ = "0.1.0"
