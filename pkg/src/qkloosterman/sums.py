"""Brute-force character sums: the ground truth for everything else.

Every sum here is a direct enumeration over field elements using literal
field arithmetic.  Functions on F^x are arrays indexed by discrete log
``d`` (entry d is the value at ``a_1**d``); functions on the character group
are arrays indexed by the exponent ``m`` of ``chi_1**m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .characters import AddChar, MultChar, chi_table, eval_chi, quadratic_char, require_nontrivial
from .field import FieldError, FiniteField


class InvariantViolation(ArithmeticError):
    """A computed value breaks an identity that must hold exactly."""


@dataclass(frozen=True)
class SumRecord:
    q: int
    d_a: int
    m_chi: int
    value: complex

    @property
    def angle(self) -> float:
        return math.atan2(self.value.imag, self.value.real)

    def check(self, field: FiniteField, tol: float | None = None) -> None:
        """Raise InvariantViolation unless the Weil bound and conjugate symmetry hold."""
        if tol is None:
            tol = 1e-9 if self.q <= 1024 else 1e-6
        bound = 2 * math.sqrt(self.q)
        if abs(self.value) > bound * (1 + tol) + tol:
            raise InvariantViolation(f"|Kl| = {abs(self.value)} exceeds Weil bound {bound}")
        a = field.exp_a1(self.d_a)
        twist = eval_chi(field, MultChar(self.m_chi, field.order), field.neg(a))
        if abs(self.value - twist * self.value.conjugate()) > tol * max(1.0, bound):
            raise InvariantViolation(f"Kl(a={a}, m={self.m_chi}) fails conjugate symmetry")

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "m_chi": self.m_chi,
            "d_a": self.d_a,
            "re": self.value.real,
            "im": self.value.imag,
            "abs": abs(self.value),
            "angle": self.angle,
        }


def _nonzero_by_log(field: FiniteField) -> np.ndarray:
    return np.asarray(field.exp_table, dtype=np.int64)


def kloosterman(field: FiniteField, psi: AddChar, a: int, chi: MultChar) -> complex:
    """Kl_psi(a, chi) = sum over x != 0 of chi(x) psi(x + a/x)."""
    require_nontrivial(psi)
    if a == 0:
        raise FieldError("Kloosterman sums are defined for a != 0")
    xs = _nonzero_by_log(field)  # x = a1^j
    d_a = field.dlog(a)
    ys = field.exp_table[(d_a - np.arange(field.order)) % field.order]  # y = a / x
    total = psi.table(field)[field.add_vec(xs, ys)] * chi_table(field, chi)
    return complex(total.sum())


def kloosterman_table(field: FiniteField, psi: AddChar, chi: MultChar) -> np.ndarray:
    """Kl(a_1^d, chi) for d = 0..q-2, each by direct enumeration over x."""
    require_nontrivial(psi)
    n = field.order
    table = psi.table(field)
    chi_vals = chi_table(field, chi)
    xs = _nonzero_by_log(field)
    j = np.arange(n)
    out = np.empty(n, dtype=complex)
    for d in range(n):
        ys = field.exp_table[(d - j) % n]
        out[d] = np.dot(table[field.add_vec(xs, ys)], chi_vals)
    return out


def kloosterman_all(field: FiniteField, psi: AddChar, max_q: int = 2048) -> np.ndarray:
    """Full table Kl[m, d] over every character and every a.

    Each entry is still a direct (q-1)-term sum; the sums for all characters
    share the matrix of values psi(x + a/x) and are batched as a matrix product.
    """
    require_nontrivial(psi)
    if field.q > max_q:
        raise FieldError(f"full Kloosterman table capped at q <= {max_q}")
    n = field.order
    j = np.arange(n)
    d = j[:, None]
    xs = field.exp_table[j][None, :]
    ys = field.exp_table[(d - j[None, :]) % n]
    values = psi.table(field)[field.add_vec(xs, ys)]  # [d, j]
    chars = np.exp(2j * np.pi * ((j[:, None] * j[None, :]) % n) / n)  # [j, m]
    return (values @ chars).T


def gauss_sum(field: FiniteField, psi: AddChar, chi: MultChar) -> complex:
    """G_psi(chi) = sum over a != 0 of chi(a) psi(a)."""
    require_nontrivial(psi)
    return complex(np.dot(psi.table(field)[_nonzero_by_log(field)], chi_table(field, chi)))


def gauss_sums(field: FiniteField, psi: AddChar) -> np.ndarray:
    """G_psi(chi_1^m) for m = 0..q-2."""
    return np.array([gauss_sum(field, psi, MultChar(m, field.order)) for m in range(field.order)])


def salie_sum(field: FiniteField, psi: AddChar, a: int) -> complex:
    """Closed form of Kl(a, chi_2): G(chi_2) * sum of psi(y) over y^2 = 4a."""
    if a == 0:
        raise FieldError("Salie sums are defined for a != 0")
    chi2 = quadratic_char(field)
    target = field.mul(field.element([4]), a)
    roots = [y for y in range(1, field.q) if field.mul(y, y) == target]
    return gauss_sum(field, psi, chi2) * sum((psi(field, y) for y in roots), 0j)


def _check_len(f: np.ndarray, n: int | None) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1 or (n is not None and len(f) != n):
        raise ValueError(f"expected a table of length {n}, got shape {f.shape}")
    return f


def _char_matrix(n: int) -> np.ndarray:
    k = np.arange(n)
    return np.exp(2j * np.pi * ((k[:, None] * k[None, :]) % n) / n)


def mult_fourier(f, n: int | None = None) -> np.ndarray:
    """(Mf)(chi_1^m) = sum_d chi_1^m(a_1^d) f(a_1^d)."""
    f = _check_len(f, n)
    return _char_matrix(len(f)) @ f


def mult_fourier_inverse(phi, n: int | None = None) -> np.ndarray:
    phi = _check_len(phi, n)
    return _char_matrix(len(phi)).conj() @ phi / len(phi)


def convolve(f, g) -> np.ndarray:
    """(f * g)(a) = sum over xy = a of f(x) g(y), on tables indexed by log."""
    f = _check_len(f, None)
    g = _check_len(g, len(f))
    n = len(f)
    j = np.arange(n)
    return np.array([np.dot(f, g[(d - j) % n]) for d in range(n)])


def gamma_fn(field: FiniteField, psi: AddChar, chi: MultChar, chi2: MultChar) -> complex:
    """Fourier transform of a -> Kl(a, chi) at chi2, i.e. G(chi chi2) G(chi2)."""
    return gauss_sum(field, psi, chi * chi2) * gauss_sum(field, psi, chi2)


def L_chi(q: int, chi: MultChar) -> int:
    return 1 if chi.trivial else q


def M_chi(q: int, chi: MultChar) -> int:
    return q * q - 2 * q if chi.trivial else q * q - 3 * q + 1


def norm_constant(q: int, chi: MultChar) -> int:
    """N_chi = sum_a |Kl(a, chi)|^2 in closed form."""
    return q * q - q - 1 if chi.trivial else q * q - 2 * q


def sum_records(field: FiniteField, psi: AddChar, chi: MultChar, check: bool = True) -> list[SumRecord]:
    values = kloosterman_table(field, psi, chi)
    records = [SumRecord(field.q, d, chi.m, complex(v)) for d, v in enumerate(values)]
    if check:
        for rec in records:
            rec.check(field)
    return records
