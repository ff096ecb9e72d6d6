"""Two-user uplink RSMA / NOMA / FDMA HARQ simulator with closed-form
next-round error probabilities and independent numerical oracles."""
from .analytic import ErrorPair, HarqKind, ThresholdSet
from .channel import ChannelDraw, RngStream, UserProfile, db_to_linear
from .engine import HarqConfig, Scheme, TrialOutcome
from .kernels import BACKEND
from .optimizer import RetransmissionPlan, select_alpha
from .rsma import AlphaBounds, Case, RetransmissionCase, SinrTriple

__all__ = [
    "AlphaBounds", "BACKEND", "Case", "ChannelDraw", "ErrorPair", "HarqConfig", "HarqKind",
    "RetransmissionCase", "RetransmissionPlan", "RngStream", "Scheme", "SinrTriple", "ThresholdSet",
    "TrialOutcome", "UserProfile", "db_to_linear", "select_alpha",
]
__version__ = "0.1.0"
