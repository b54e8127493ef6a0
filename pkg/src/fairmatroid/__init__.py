"""
Fair allocation of indivisible goods under matroid-rank valuations.

The prioritized egalitarian (PE) mechanism, brute-force oracles for the
fairness and welfare notions it is measured against, and audits for
truthfulness, gradualness and index-obliviousness.
"""
from fairmatroid.errors import (
    CapabilityError,
    FairDivisionError,
    InputError,
    InvariantViolation,
    ParetoViolation,
    PreconditionError,
    UnsupportedKindError,
)
from fairmatroid.fairness import is_ef1, is_mms, mms_profile
from fairmatroid.instances import Allocation, Instance, values
from fairmatroid.matroid import (
    BinaryXOS,
    Explicit,
    Graphic,
    Partition,
    Permutation,
    Uniform,
    Zero,
    validate_matroid_rank,
)
from fairmatroid.mechanisms import (
    Mechanism,
    cleanup_non_wasteful,
    get_mechanism,
    lorenz_dominating_oracle,
    pe_mechanism,
    serial_dictatorship,
)
from fairmatroid.presets import preset

__version__ = "0.1.0"

__all__ = [
    "is_ef1",
    "is_mms",
    "mms_profile",
    "Allocation",
    "BinaryXOS",
    "CapabilityError",
    "Explicit",
    "FairDivisionError",
    "Graphic",
    "InputError",
    "Instance",
    "InvariantViolation",
    "Mechanism",
    "ParetoViolation",
    "Partition",
    "Permutation",
    "PreconditionError",
    "Uniform",
    "UnsupportedKindError",
    "Zero",
    "cleanup_non_wasteful",
    "get_mechanism",
    "lorenz_dominating_oracle",
    "pe_mechanism",
    "preset",
    "serial_dictatorship",
    "validate_matroid_rank",
    "values",
]
