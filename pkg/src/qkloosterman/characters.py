"""Additive and multiplicative characters of a finite field.

Both kinds are stored by integer exponents so that evaluation is one exact
integer reduction followed by a single complex exponential:

* ``AddChar`` keeps ``k_i`` with ``psi(b_i) = exp(2 pi i k_i / p)``, so
  ``psi(sum c_i b_i) = exp(2 pi i (sum c_i k_i mod p) / p)``.
* ``MultChar`` keeps ``m`` with ``chi = chi_1**m`` and
  ``chi(a) = exp(2 pi i m dlog(a) / (q - 1))``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .field import FieldError, FiniteField

ROOT_TOL = 1e-12


class CharacterError(ValueError):
    pass


def _root(k: int, n: int) -> complex:
    return cmath.exp(2j * math.pi * (k % n) / n)


@dataclass(frozen=True)
class AddChar:
    p: int
    exponents: tuple[int, ...]

    @property
    def nontrivial(self) -> bool:
        return any(k % self.p for k in self.exponents)

    @property
    def values_on_basis(self) -> list[complex]:
        return [_root(k, self.p) for k in self.exponents]

    @classmethod
    def from_values(cls, field: FiniteField, values) -> AddChar:
        """Build psi from its values on the power basis (p-th roots of unity)."""
        values = [complex(v) for v in values]
        if len(values) != field.r:
            raise CharacterError(f"need {field.r} basis values, got {len(values)}")
        exps = []
        for v in values:
            k = round(cmath.phase(v) * field.p / (2 * math.pi)) % field.p
            if abs(v - _root(k, field.p)) > ROOT_TOL:
                raise CharacterError(f"{v} is not a {field.p}-th root of unity")
            exps.append(k)
        return cls(field.p, tuple(exps))

    def exponent(self, field: FiniteField, x: int) -> int:
        return sum(c * k for c, k in zip(field.coeffs(x), self.exponents)) % self.p

    def __call__(self, field: FiniteField, x: int) -> complex:
        return _root(self.exponent(field, x), self.p)

    def table(self, field: FiniteField) -> np.ndarray:
        """psi(x) for every element, indexed by encoding."""
        x = np.arange(field.q, dtype=np.int64)
        expo = np.zeros(field.q, dtype=np.int64)
        place = 1
        for k in self.exponents:
            expo += (x // place % field.p) * k
            place *= field.p
        return np.exp(2j * np.pi * (expo % self.p) / self.p)

    def to_json(self) -> dict:
        return {"type": "add", "values": [[v.real, v.imag] for v in self.values_on_basis]}


@dataclass(frozen=True)
class MultChar:
    m: int
    n: int  # q - 1

    def __post_init__(self):
        if self.n < 1:
            raise CharacterError("character group order must be positive")
        object.__setattr__(self, "m", self.m % self.n)

    @property
    def trivial(self) -> bool:
        return self.m == 0

    def __mul__(self, other: MultChar) -> MultChar:
        if self.n != other.n:
            raise CharacterError("characters of different fields")
        return MultChar(self.m + other.m, self.n)

    def inverse(self) -> MultChar:
        return MultChar(-self.m, self.n)

    def to_json(self) -> dict:
        return {"type": "mult", "m": self.m}


def canonical_psi(field: FiniteField) -> AddChar:
    """The trace character psi(x) = exp(2 pi i Tr(x) / p)."""
    return AddChar(field.p, tuple(field.trace(field.p**i) for i in range(field.r)))


def trivial_psi(field: FiniteField) -> AddChar:
    return AddChar(field.p, (0,) * field.r)


def eval_psi(field: FiniteField, psi: AddChar, x: int) -> complex:
    return psi(field, x)


def mult_char(field: FiniteField, m: int) -> MultChar:
    return MultChar(m, field.order)


def eval_chi(field: FiniteField, chi: MultChar, a: int) -> complex:
    if a == 0:
        raise CharacterError("multiplicative characters are undefined at 0")
    return _root(chi.m * field.dlog(a), field.order)


def chi_table(field: FiniteField, chi: MultChar) -> np.ndarray:
    """chi(a_1^d) for d = 0..q-2, i.e. indexed by discrete log."""
    d = np.arange(field.order, dtype=np.int64)
    return np.exp(2j * np.pi * ((chi.m * d) % field.order) / field.order)


def quadratic_char(field: FiniteField) -> MultChar:
    if field.p == 2:
        raise CharacterError("even q has no character of order 2")
    return MultChar(field.order // 2, field.order)


def require_nontrivial(psi: AddChar) -> None:
    if not psi.nontrivial:
        raise CharacterError("a non-trivial additive character is required")


__all__ = [
    "AddChar",
    "MultChar",
    "CharacterError",
    "FieldError",
    "canonical_psi",
    "trivial_psi",
    "eval_psi",
    "eval_chi",
    "chi_table",
    "mult_char",
    "quadratic_char",
    "require_nontrivial",
]
