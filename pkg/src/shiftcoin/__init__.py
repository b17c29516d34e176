"""Factorization of banded unitaries into shift and coin protocols."""

from .cells import CellStructure, SiteLabel
from .compiler import (
    CompileResult,
    compile_class,
    compile_walk,
    embed_site_pair,
    lower_site_pair,
)
from .decoupling import DecoupleResult, Window, decouple
from .errors import (
    NonIntegerFlowError,
    NonUnitaryError,
    RankMismatchError,
    ShiftCoinError,
    SkeletonMismatchError,
    StageError,
)
from .flow import crossing_flow, walk_index
from .protocol import CoinItem, Protocol, ShiftItem, protocol_stats
from .serialize import (
    protocol_from_json,
    protocol_to_json,
    walk_from_json,
    walk_to_json,
)
from .twolevel import TwoLevelDecomposition, TwoLevelFactor, decompose_block
from .vm import ProtocolRunner, VerifyReport, evaluate, verify
from .walks import (
    GROVER_COIN,
    BandedUnitary,
    build_partial_shift,
    build_three_state_walk,
    haar_unitary,
    measure_bandwidth,
    random_banded_unitary,
    regroup,
    shift_operator,
)

__version__ = "0.1.0"

__all__ = [
    "BandedUnitary",
    "CellStructure",
    "CoinItem",
    "CompileResult",
    "DecoupleResult",
    "GROVER_COIN",
    "NonIntegerFlowError",
    "NonUnitaryError",
    "Protocol",
    "ProtocolRunner",
    "RankMismatchError",
    "ShiftCoinError",
    "ShiftItem",
    "SiteLabel",
    "SkeletonMismatchError",
    "StageError",
    "TwoLevelDecomposition",
    "TwoLevelFactor",
    "VerifyReport",
    "Window",
    "build_partial_shift",
    "build_three_state_walk",
    "compile_class",
    "compile_walk",
    "crossing_flow",
    "decompose_block",
    "decouple",
    "embed_site_pair",
    "evaluate",
    "haar_unitary",
    "lower_site_pair",
    "measure_bandwidth",
    "protocol_from_json",
    "protocol_stats",
    "protocol_to_json",
    "random_banded_unitary",
    "regroup",
    "shift_operator",
    "verify",
    "walk_from_json",
    "walk_index",
    "walk_to_json",
]
