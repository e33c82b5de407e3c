"""Deficient perfect numbers: verification, search, and case-elimination proofs."""

from .arith import (
    Factorization,
    abundancy,
    abundancy_sup,
    decimal_prefix,
    f_value,
    factorize,
    is_prime,
    multiplicative_order,
    sigma,
    sigma_of,
    sigma_prime_power,
    sigma_ratio,
)
from .cases import CaseSpec, ElimStep, ProofTrace, Slot, TraceSchemaError, target
from .classify import Classification, DpnRecord, classify
from .eliminator import (
    Budget,
    ForcingOutcome,
    bound_prime_slot,
    eliminate,
    feasible_d_values,
    g_value,
    prove_theorem_1,
    prove_theorem_2,
    q_can_divide_sigma_even_exp,
    r1_abundancy_eliminate,
    r3_fg_gap_eliminate,
    r4_order_parity_eliminate,
    r5_sigma_forcing,
)
from .trace import TraceCheckError, check_trace

__version__ = "0.1.0"

__all__ = [
    "Factorization", "abundancy", "abundancy_sup", "decimal_prefix", "f_value",
    "factorize", "is_prime", "multiplicative_order", "sigma", "sigma_of",
    "sigma_prime_power", "sigma_ratio",
    "CaseSpec", "ElimStep", "ProofTrace", "Slot", "TraceSchemaError", "target",
    "Classification", "DpnRecord", "classify",
    "Budget", "ForcingOutcome", "bound_prime_slot", "eliminate",
    "feasible_d_values", "g_value", "prove_theorem_1", "prove_theorem_2",
    "q_can_divide_sigma_even_exp", "r1_abundancy_eliminate",
    "r3_fg_gap_eliminate", "r4_order_parity_eliminate", "r5_sigma_forcing",
    "TraceCheckError", "check_trace",
    "__version__",
]
