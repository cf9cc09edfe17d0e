"""Prime fields F_p and extension fields F_{p^m}.

Elements are encoded as integers ``0 <= a < p**m``.  The base-p digits of
``a`` (least significant first) are the coefficients of the residue
polynomial in the generator ``t``, so the prime subfield is ``{0, ..., p-1}``
inside every extension.  Arithmetic methods on :class:`FieldSpec` accept
Python ints or numpy integer arrays and act elementwise; this is what the
linear algebra layer uses.  :class:`FieldElem` is the boxed scalar used at
API boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

# Above this order extension fields skip the dense addition table.
_ADD_TABLE_MAX = 729


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


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _digits(a: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        out.append(a % p)
        a //= p
    return out


def _poly_rem(num: list[int], den: list[int], p: int) -> list[int]:
    """Remainder of ``num`` by the monic ``den`` (coefficient lists, low first)."""
    num = list(num)
    dd = len(den) - 1
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k] % p
        if c:
            for i in range(dd + 1):
                num[k - dd + i] = (num[k - dd + i] - c * den[i]) % p
    rem = [x % p for x in num[:dd]]
    return rem + [0] * (dd - len(rem))


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= m // 2."""
    m = len(modulus) - 1
    for deg in range(1, m // 2 + 1):
        for k in range(p**deg):
            divisor = _digits(k, p, deg) + [1]
            if not any(_poly_rem(list(modulus), divisor, p)):
                return False
    return True


def least_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree ``m`` over F_p.

    Candidates ``t^m + a_{m-1} t^{m-1} + ... + a_0`` are ordered by the
    tuple ``(a_{m-1}, ..., a_0)``.
    """
    if m == 1:
        return (0, 1)
    # digits of k, least significant first, are (a_0, ..., a_{m-1}); so k
    # increasing is lexicographic order on (a_{m-1}, ..., a_0)
    best = None
    for k in range(p**m):
        coeffs = _digits(k, p, m) + [1]
        if coeffs[0] == 0:
            continue
        if _is_irreducible(coeffs, p):
            best = tuple(coeffs)
            break
    assert best is not None
    return best


class FieldSpec:
    """The field F_{p^m} presented as F_p[t]/(modulus)."""

    def __init__(self, p: int, m: int, modulus: Sequence[int]):
        self.p = p
        self.m = m
        self.modulus = tuple(int(c) for c in modulus)
        self.order = p**m
        self._key = (p, m, self.modulus)
        if m == 1:
            self._inv_table = np.zeros(p, dtype=np.int64)
            for a in range(1, p):
                self._inv_table[a] = pow(a, p - 2, p)
            return
        q = self.order
        self._pow_p = np.array([p**i for i in range(m)], dtype=np.int64)
        self._digit_table = np.array([_digits(a, p, m) for a in range(q)], dtype=np.int64)
        self._build_log_tables()
        self._add_table = None
        if q <= _ADD_TABLE_MAX:
            d = self._digit_table
            self._add_table = ((d[:, None, :] + d[None, :, :]) % p) @ self._pow_p
        self._neg_table = ((-self._digit_table) % p) @ self._pow_p

    def _mul_slow(self, a: int, b: int) -> int:
        prod = _poly_mul(_digits(a, self.p, self.m), _digits(b, self.p, self.m), self.p)
        rem = _poly_rem(prod, list(self.modulus), self.p)
        return sum(c * self.p**i for i, c in enumerate(rem))

    def _build_log_tables(self) -> None:
        q = self.order
        factors = _prime_factors(q - 1)
        gen = None
        for g in range(2, q):
            if all(self._pow_slow(g, (q - 1) // r) != 1 for r in factors):
                gen = g
                break
        if gen is None:  # q == 2 cannot happen for m > 1
            gen = 1
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._mul_slow(x, gen)
        exp[q - 1:] = exp[: q - 1]
        self._exp, self._log = exp, log
        self.generator = gen

    def _pow_slow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_slow(result, base)
            base = self._mul_slow(base, base)
            e >>= 1
        return result

    # -- identity -----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldSpec) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"F{self.order}"

    @property
    def is_prime_field(self) -> bool:
        return self.m == 1

    # -- elementwise arithmetic on encoded values ---------------------------
    def add(self, a, b):
        if self.m == 1:
            return (a + b) % self.p
        if self._add_table is not None:
            return self._add_table[a, b]
        d = self._digit_table
        return ((d[a] + d[b]) % self.p) @ self._pow_p

    def neg(self, a):
        if self.m == 1:
            return (-a) % self.p
        return self._neg_table[a]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.m == 1:
            return (a * b) % self.p
        a = np.asarray(a)
        b = np.asarray(b)
        q1 = self.order - 1
        out = self._exp[(self._log[a] + self._log[b]) % q1]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if self.m == 1:
            return self._inv_table[a]
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def power(self, a, e: int):
        """``a**e`` elementwise; negative ``e`` uses the inverse."""
        a = np.asarray(a, dtype=np.int64)
        if e < 0:
            a = self.inv(a)
            e = -e
        if e == 0:
            return np.ones_like(a)
        if self.m == 1:
            result = np.ones_like(a)
            base = a.copy()
            while e:
                if e & 1:
                    result = (result * base) % self.p
                base = (base * base) % self.p
                e >>= 1
            return result
        q1 = self.order - 1
        out = self._exp[(self._log[a] * e) % q1]
        return np.where(a == 0, 0, out)

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if A.shape[1] != B.shape[0]:
            raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
        if self.m == 1:
            return (A @ B) % self.p
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for k in range(A.shape[1]):
            col = A[:, k]
            if not col.any():
                continue
            out = self.add(out, self.mul(col[:, None], B[k][None, :]))
        return out

    def random(self, rng: np.random.Generator, shape=(), nonzero: bool = False):
        lo = 1 if nonzero else 0
        return rng.integers(lo, self.order, size=shape, dtype=np.int64)

    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple(_digits(int(a), self.p, self.m))

    def from_coeffs(self, coeffs: Iterable[int]) -> int:
        coeffs = [int(c) % self.p for c in coeffs]
        if len(coeffs) > self.m:
            raise ValueError(f"too many coefficients for {self!r}")
        return sum(c * self.p**i for i, c in enumerate(coeffs))

    def elem(self, a) -> "FieldElem":
        if isinstance(a, FieldElem):
            if a.spec != self:
                raise ValueError("element belongs to a different field")
            return a
        a = int(a)
        if not 0 <= a < self.order:
            raise ValueError(f"{a} is not an encoded element of {self!r}")
        return FieldElem(self, a)

    def elements(self) -> range:
        return range(self.order)


@lru_cache(maxsize=None)
def field_make(p: int, m: int = 1) -> FieldSpec:
    """Build F_{p^m} with the lexicographically least irreducible modulus."""
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"characteristic {p} is not prime")
    if m < 1:
        raise ValueError(f"extension degree must be >= 1, got {m}")
    return FieldSpec(int(p), int(m), least_irreducible(int(p), int(m)))


@dataclass(frozen=True)
class FieldElem:
    """A boxed element of a :class:`FieldSpec`."""

    spec: FieldSpec
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.coeffs(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.spec != self.spec:
                raise ValueError(f"mixed fields {self.spec!r} and {other.spec!r}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.spec.p
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return FieldElem(self.spec, int(self.spec.add(self.value, b)))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return FieldElem(self.spec, int(self.spec.sub(self.value, b)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._other(other)
        return FieldElem(self.spec, int(self.spec.mul(self.value, b)))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(self.spec, int(self.spec.neg(self.value)))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.spec, int(self.spec.inv(self.value)))

    def __truediv__(self, other):
        b = self._other(other)
        return self * FieldElem(self.spec, int(self.spec.inv(b)))

    def __pow__(self, e: int):
        return FieldElem(self.spec, int(self.spec.power(self.value, e)))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElem):
            return self.spec == other.spec and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.spec.p and (
                self.spec.m == 1 or self.value < self.spec.p
            )
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.spec, self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        if self.spec.m == 1:
            return f"{self.value}"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                terms.append(f"{c}{mono}" if c != 1 or not mono else mono)
        return " + ".join(terms[::-1]) or "0"


def field_arith(a: FieldElem, b: FieldElem | None, op: str) -> FieldElem:
    """Dispatch ``add | mul | inv | neg | sub`` on boxed elements."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown operation {op!r}")


def embedding(small: FieldSpec, big: FieldSpec) -> np.ndarray:
    out = _embedding(small, big)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def _embedding(small: FieldSpec, big: FieldSpec) -> np.ndarray:
    """Lookup array sending encodings of ``small`` to encodings in ``big``.

    Requires ``small.m`` to divide ``big.m``; the image of ``t`` is the
    smallest root of ``small.modulus`` in ``big``.
    """
    if small == big:
        return np.arange(small.order, dtype=np.int64)
    if small.p != big.p or big.m % small.m:
        raise ValueError(f"{small!r} does not embed in {big!r}")
    if small.m == 1:
        return np.arange(small.p, dtype=np.int64)
    xs = np.arange(big.order, dtype=np.int64)
    val = np.zeros_like(xs)
    for c in reversed(small.modulus):  # Horner
        val = big.add(big.mul(val, xs), c)
    roots = np.nonzero(val == 0)[0]
    theta = int(roots[0])
    powers = [1]
    for _ in range(small.m - 1):
        powers.append(int(big.mul(powers[-1], theta)))
    out = np.zeros(small.order, dtype=np.int64)
    for a in range(small.order):
        acc = 0
        for c, pw in zip(small.coeffs(a), powers):
            if c:
                acc = int(big.add(acc, big.mul(c, pw)))
        out[a] = acc
    return out
