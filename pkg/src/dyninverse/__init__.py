"""Dynamic matrix inverse over prime fields and truncated polynomial rings."""
from .algebra import DetTracker, LinearSystem, ProductChain, RankTracker
from .dyninv import ColumnInverse, Deamortized, ElementInverse, SingularSafe
from .errors import (FAIL, DimensionMismatch, DynInverseError, NonUnit, NotUnipotent, PreconditionViolated,
                     ScheduleViolation, Singular, Unreachable, UnsupportedUpdate, ZeroInverse)
from .field import DEFAULT_PRIME, PolyRing, PrimeField
from .lookahead import CombinedLookAhead, LookAheadSchedule, OnlineRank, online_bipartite_matching, online_rank
from .polymat import DistanceOracle, DivisionFreeDet, PolyInverse

__all__ = [
    "DetTracker", "LinearSystem", "ProductChain", "RankTracker",
    "ColumnInverse", "Deamortized", "ElementInverse", "SingularSafe",
    "FAIL", "DimensionMismatch", "DynInverseError", "NonUnit", "NotUnipotent", "PreconditionViolated",
    "ScheduleViolation", "Singular", "Unreachable", "UnsupportedUpdate", "ZeroInverse",
    "DEFAULT_PRIME", "PolyRing", "PrimeField",
    "CombinedLookAhead", "LookAheadSchedule", "OnlineRank", "online_bipartite_matching", "online_rank",
    "DistanceOracle", "DivisionFreeDet", "PolyInverse",
]
__version__ = "0.1.0"
