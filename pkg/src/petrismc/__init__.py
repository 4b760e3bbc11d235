"""Statistical model checking of stochastic high-level Petri nets."""

from .errors import PetriSMCError
from .models import Model, counter_model, load_model, race_model
from .sampling import RandomStream, derive_stream
from .shlpn import Marking, Net, NetBuilder, TokenKind, firings, step
from .smc import (
    ChernoffBound,
    Expectation,
    FixedRuns,
    Sprt,
    VerificationResult,
    chernoff_sample_size,
    estimate_chernoff,
    estimate_expectation,
    estimate_fixed,
    run_query,
    sprt,
)
from .trace import ExecutionTrace, Observer, TemporalResolution, run_trace

__version__ = "0.1.0"

__all__ = [
    "PetriSMCError", "Model", "counter_model", "load_model", "race_model", "RandomStream",
    "derive_stream", "Marking", "Net", "NetBuilder", "TokenKind", "firings", "step",
    "ChernoffBound", "Expectation", "FixedRuns", "Sprt", "VerificationResult",
    "chernoff_sample_size", "estimate_chernoff", "estimate_expectation", "estimate_fixed",
    "run_query", "sprt", "ExecutionTrace", "Observer", "TemporalResolution", "run_trace",
]
