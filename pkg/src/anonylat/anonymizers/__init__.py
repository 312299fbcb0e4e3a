"""The four k-anonymisation algorithms and their shared output model."""

from .clustering import cb_anonymise
from .mondrian import mondrian_anonymise
from .ola import OlaResult, ola_anonymise, ola_search
from .partition import (
    ALGORITHMS,
    AlgoParams,
    EquivalenceClass,
    Partition,
    build_partition,
    generalised_table_from_partition,
    partition_violation,
    verify_k_anonymity,
)
from .tdg import tdg_anonymise

ANONYMISERS = {
    "ola": ola_anonymise,
    "mondrian": mondrian_anonymise,
    "tdg": tdg_anonymise,
    "cb": cb_anonymise,
}

__all__ = [
    "ALGORITHMS",
    "ANONYMISERS",
    "AlgoParams",
    "EquivalenceClass",
    "OlaResult",
    "Partition",
    "build_partition",
    "cb_anonymise",
    "generalised_table_from_partition",
    "mondrian_anonymise",
    "ola_anonymise",
    "ola_search",
    "partition_violation",
    "tdg_anonymise",
    "verify_k_anonymity",
]
