"""Commitment over noisy channels: checks, capacity regions, protocol."""

__version__ = "0.1.0"

from .channel import (BroadcastChannel, Dmc, MacChannel, RedundancyReport,
                      injectivity_check, load_channel, mac_non_redundancy,
                      non_redundancy_check, push_forward, save_channel,
                      small_alphabet_equivalence)
from .capacity import (InputDistribution, SetFunction, broadcast_capacity,
                       corner_point, entropy_set_function, in_region,
                       single_user_capacity, sum_rate_capacity,
                       verify_polymatroid)
from .hashing import LinearHash, SymbolCodec
from .infotheory import (JointPmf, Pmf, RateVector, conditional_entropy,
                         conditional_min_entropy, entropy, lhl_bound,
                         mi_from_distance, mutual_information,
                         smoothing_defect, variational_distance)
from .protocol import (FlipK, ProtocolParams, Resample, binding_attack,
                       broadcast_rate, certified_concealment_bound,
                       commit_broadcast, commit_mac, concealment_probe,
                       honest_claim, reveal_broadcast, reveal_mac,
                       select_rates, transcript_json, parse_transcript)
from .typicality import (conditionally_typical, default_eps, empirical_joint,
                         jointly_typical)
