"""Finite fields GF(p^r) in a fixed power basis.

Elements are encoded as integers ``sum(c_i * p**i)`` where ``c_i`` is the
coefficient of ``x**i`` modulo the defining polynomial.  The encoding doubles
as the basis label of the additive register in the simulator, and ordering by
encoding is what "smallest" means when choosing a modulus or a generator.

Discrete logarithms come from a precomputed table; the field is immutable
after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

MAX_Q = 2**20


class FieldError(ValueError):
    """Invalid field parameters or an undefined field operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, r)`` with ``q == p**r`` or None if q is not a prime power."""
    if q < 2:
        return None
    factors = prime_factors(q)
    if len(factors) != 1:
        return None
    p = factors[0]
    r = 0
    while q > 1:
        q //= p
        r += 1
    return p, r


def prime_powers_upto(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if prime_power(q) is not None]


# Polynomials over F_p are lists of coefficients, lowest degree first, with no
# trailing zeros (the zero polynomial is []).


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    inv_lead = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(a: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(f: list[int], p: int) -> bool:
    """Rabin-style test for a monic polynomial of degree >= 1 over F_p."""
    r = len(f) - 1
    if r == 1:
        return True
    x = [0, 1]
    xp = x
    for _ in range(r // 2):
        xp = _ppowmod(xp, p, f, p)
        if len(_pgcd(f, _psub(xp, x, p), p)) > 1:
            return False
    return True


def _decode(x: int, p: int, r: int) -> list[int]:
    out = []
    for _ in range(r):
        x, c = divmod(x, p)
        out.append(c)
    return out


def _encode(coeffs, p: int) -> int:
    x = 0
    for c in reversed(list(coeffs)):
        x = x * p + int(c)
    return x


@dataclass(frozen=True, eq=False)
class FiniteField:
    """GF(p^r) with power basis, generator ``a1`` and discrete-log table.

    ``exp_table[d]`` is the encoding of ``a1**d``; ``log_table[x]`` is the
    discrete log of the element encoded by x (``-1`` at x = 0).
    """

    p: int
    r: int
    modulus: tuple[int, ...]  # c_0..c_{r-1}; the x^r coefficient is 1
    a1: int
    exp_table: np.ndarray = dc_field(repr=False)
    log_table: np.ndarray = dc_field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.r

    @property
    def order(self) -> int:
        """Size of the multiplicative group, q - 1."""
        return self.q - 1

    def __eq__(self, other):
        if not isinstance(other, FiniteField):
            return NotImplemented
        return (self.p, self.r, self.modulus, self.a1) == (other.p, other.r, other.modulus, other.a1)

    def __hash__(self):
        return hash((self.p, self.r, self.modulus, self.a1))

    # -- element conversion -------------------------------------------------

    def element(self, coeffs) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.r:
            raise FieldError(f"expected at most {self.r} coefficients, got {len(coeffs)}")
        return _encode([c % self.p for c in coeffs], self.p)

    def coeffs(self, x: int) -> list[int]:
        self._check(x)
        return _decode(x, self.p, self.r)

    def elements(self) -> range:
        return range(self.q)

    def _check(self, x: int) -> None:
        if not 0 <= x < self.q:
            raise FieldError(f"{x} is not an element encoding of GF({self.q})")

    # -- arithmetic ---------------------------------------------------------

    def add(self, x: int, y: int) -> int:
        self._check(x)
        self._check(y)
        if self.r == 1:
            return (x + y) % self.p
        cx, cy = _decode(x, self.p, self.r), _decode(y, self.p, self.r)
        return _encode([(a + b) % self.p for a, b in zip(cx, cy)], self.p)

    def neg(self, x: int) -> int:
        self._check(x)
        return _encode([(-c) % self.p for c in _decode(x, self.p, self.r)], self.p)

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        self._check(x)
        self._check(y)
        if x == 0 or y == 0:
            return 0
        return int(self.exp_table[(self.log_table[x] + self.log_table[y]) % self.order])

    def inv(self, x: int) -> int:
        self._check(x)
        if x == 0:
            raise FieldError("zero has no multiplicative inverse")
        return int(self.exp_table[(-self.log_table[x]) % self.order])

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def power(self, x: int, e: int) -> int:
        self._check(x)
        if x == 0:
            if e <= 0:
                raise FieldError("0 cannot be raised to a non-positive power")
            return 0
        return int(self.exp_table[(self.log_table[x] * e) % self.order])

    def exp_a1(self, d: int) -> int:
        return int(self.exp_table[d % self.order])

    def dlog(self, x: int) -> int:
        self._check(x)
        if x == 0:
            raise FieldError("discrete logarithm of zero is undefined")
        return int(self.log_table[x])

    def trace(self, x: int) -> int:
        """Absolute trace sum_i x^(p^i), returned as an integer in [0, p)."""
        self._check(x)
        total = 0
        y = x
        for _ in range(self.r):
            total = self.add(total, y)
            y = self.power(y, self.p) if y else 0
        if total >= self.p:
            raise FieldError(f"trace of {x} left the prime field; modulus is not irreducible")
        return total

    # -- vectorised helpers over arrays of encodings ------------------------

    def add_vec(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if self.r == 1:
            return (x + y) % self.p
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
        place = 1
        for _ in range(self.r):
            out += ((x // place + y // place) % self.p) * place
            place *= self.p
        return out

    def neg_vec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        out = np.zeros_like(x)
        place = 1
        for _ in range(self.r):
            out += ((-(x // place)) % self.p) * place
            place *= self.p
        return out

    def trace_table(self) -> np.ndarray:
        """Trace of every element, indexed by encoding (F_p-linear extension)."""
        basis_traces = [self.trace(self.p**i) for i in range(self.r)]
        x = np.arange(self.q, dtype=np.int64)
        out = np.zeros(self.q, dtype=np.int64)
        place = 1
        for t in basis_traces:
            out += (x // place % self.p) * t
            place *= self.p
        return out % self.p

    def descriptor(self) -> dict:
        return {
            "p": self.p,
            "r": self.r,
            "q": self.q,
            "modulus": list(self.modulus),
            "a1": _decode(self.a1, self.p, self.r),
        }

    def format_element(self, x: int) -> str:
        terms = []
        for i, c in enumerate(_decode(x, self.p, self.r)):
            if c == 0:
                continue
            mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(mono if c == 1 and i > 0 else (str(c) if i == 0 else f"{c}*{mono}"))
        return " + ".join(reversed(terms)) or "0"


def _find_modulus(p: int, r: int) -> list[int]:
    for code in range(p**r):
        f = _decode(code, p, r) + [1]
        if r > 1 and f[0] == 0:
            continue
        if is_irreducible(f, p):
            return f
    raise FieldError(f"no irreducible polynomial of degree {r} over F_{p}")  # unreachable


def _mul_matrix(c: int, f: list[int], p: int, r: int) -> np.ndarray:
    """r x r matrix over F_p of multiplication by the element c."""
    poly = _trim(_decode(c, p, r))
    mat = np.zeros((r, r), dtype=np.int64)
    for i in range(r):
        col = _pmod(_pmul(poly, [0] * i + [1], p), f, p)
        mat[: len(col), i] = col
    return mat


@lru_cache(maxsize=64)
def make_field(p: int, r: int = 1) -> FiniteField:
    """Build GF(p^r) deterministically.

    The modulus is the monic irreducible polynomial of degree r whose lower
    coefficients have the smallest encoding ``sum(c_i p^i)``; ``a1`` is the
    generator of the multiplicative group with the smallest encoding.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if not isinstance(r, int) or r < 1:
        raise FieldError(f"extension degree must be >= 1, got {r}")
    if p**r > MAX_Q:
        raise FieldError(f"q = {p}^{r} exceeds the supported maximum {MAX_Q}")
    q = p**r
    f = _find_modulus(p, r)
    n = q - 1
    cofactors = [n // ell for ell in prime_factors(n)] if n > 1 else []

    a1 = None
    for g in range(1, q):
        poly = _trim(_decode(g, p, r))
        if all(_ppowmod(poly, e, f, p) != [1] for e in cofactors):
            a1 = g
            break
    assert a1 is not None

    # exp table by doubling: exp[B:2B] = exp[0:B] * a1^B, done as a linear map
    exp_table = np.zeros(n, dtype=np.int64)
    exp_table[0] = 1
    places = p ** np.arange(r, dtype=np.int64)
    filled = 1
    while filled < n:
        step = _encode(_ppowmod(_trim(_decode(a1, p, r)), filled, f, p) + [0] * r, p)
        mat = _mul_matrix(step, f, p, r)
        block = exp_table[: min(filled, n - filled)]
        digits = (block[:, None] // places) % p
        exp_table[filled : filled + len(block)] = ((digits @ mat.T) % p) @ places
        filled += len(block)

    log_table = np.full(q, -1, dtype=np.int64)
    log_table[exp_table] = np.arange(n, dtype=np.int64)
    if np.any(log_table[1:] < 0):
        raise FieldError("generator search produced a non-bijective exponent table")
    exp_table.setflags(write=False)
    log_table.setflags(write=False)
    return FiniteField(p=p, r=r, modulus=tuple(f[:-1]), a1=a1, exp_table=exp_table, log_table=log_table)


def field_for_q(q: int) -> FiniteField:
    pr = prime_power(q)
    if pr is None:
        raise FieldError(f"{q} is not a prime power")
    return make_field(*pr)
