"""Kloosterman and Gauss sums over finite fields, classically and by simulated quantum circuits."""

from .characters import AddChar, MultChar, canonical_psi, eval_chi, eval_psi, mult_char, quadratic_char
from .estimation import EstimationParams, estimate_kloosterman, kappa
from .field import FiniteField, field_for_q, make_field, prime_powers_upto
from .qsim import Kind, Register, Simulator, StateVector, rotation_data
from .sums import gauss_sum, kloosterman, kloosterman_all, kloosterman_table, norm_constant, salie_sum

__version__ = "0.1.0"

__all__ = [
    "AddChar",
    "MultChar",
    "canonical_psi",
    "eval_chi",
    "eval_psi",
    "mult_char",
    "quadratic_char",
    "EstimationParams",
    "estimate_kloosterman",
    "kappa",
    "FiniteField",
    "field_for_q",
    "make_field",
    "prime_powers_upto",
    "Kind",
    "Register",
    "Simulator",
    "StateVector",
    "rotation_data",
    "gauss_sum",
    "kloosterman",
    "kloosterman_all",
    "kloosterman_table",
    "norm_constant",
    "salie_sum",
]
