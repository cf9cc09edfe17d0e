"""q-integers, q-factorials and q-binomials at a concrete root of unity."""

from __future__ import annotations

from functools import lru_cache

from .field import FieldElem, FieldSpec, field_make


def _val(spec: FieldSpec, q) -> int:
    if isinstance(q, FieldElem):
        if q.spec != spec:
            raise ValueError("q lives in a different field")
        return q.value
    q = int(q)
    return q if 0 <= q < spec.order else q % spec.p


def _q_int_raw(spec: FieldSpec, q: int, n: int) -> int:
    acc, pw = 0, 1
    for _ in range(n):
        acc = int(spec.add(acc, pw))
        pw = int(spec.mul(pw, q))
    return acc


def is_distinguished_root(q, N: int, spec: FieldSpec | None = None) -> bool:
    """True iff [N]_q = 0 and [1]_q, ..., [N-1]_q are all nonzero."""
    if N < 2:
        raise ValueError("N must be at least 2")
    if spec is None:
        if not isinstance(q, FieldElem):
            raise ValueError("pass a FieldElem or an explicit field")
        spec = q.spec
    qv = _val(spec, q)
    if _q_int_raw(spec, qv, N) != 0:
        return False
    return all(_q_int_raw(spec, qv, n) != 0 for n in range(1, N))


class QContext:
    """A field together with a distinguished primitive ``N``-th root ``q``."""

    __slots__ = ("spec", "q", "N", "qinv", "_binom")

    def __init__(self, spec: FieldSpec, q, N: int):
        qv = _val(spec, q)
        if not is_distinguished_root(qv, N, spec):
            raise ValueError(f"q={qv} is not a distinguished primitive {N}-th root in {spec!r}")
        self.spec = spec
        self.q = qv
        self.N = int(N)
        self.qinv = int(spec.inv(qv))
        self._binom: dict[tuple[int, int], int] = {}

    def __eq__(self, other) -> bool:
        return isinstance(other, QContext) and (self.spec, self.q, self.N) == (other.spec, other.q, other.N)

    def __hash__(self) -> int:
        return hash((self.spec, self.q, self.N))

    def __repr__(self) -> str:
        return f"QContext({self.spec!r}, q={self.q}, N={self.N})"

    def qpow(self, e: int) -> int:
        """``q**e`` for any integer ``e``."""
        return int(self.spec.power(self.q, e % self.N))

    def binom(self, n: int, m: int) -> int:
        """Encoded q-binomial via the defining recurrence."""
        if m < 0 or m > n:
            raise ValueError(f"q-binomial needs 0 <= m <= n, got ({n}, {m})")
        key = (n, m)
        if key in self._binom:
            return self._binom[key]
        if m == 0 or m == n:
            v = 1
        else:
            # binom(n, m) = binom(n-1, m-1) + q^m binom(n-1, m)
            v = int(self.spec.add(self.binom(n - 1, m - 1),
                                  self.spec.mul(self.qpow(m), self.binom(n - 1, m))))
        self._binom[key] = v
        return v


def default_context(p: int, N: int | None = None, m: int = 1) -> QContext:
    """The standard contexts: q = 1 when N = p, q = -1 when N = 2."""
    return _default_context(p, p if N is None else N, m)


@lru_cache(maxsize=None)
def _default_context(p: int, N: int, m: int) -> QContext:
    F = field_make(p, m)
    if N == p:
        return QContext(F, 1, N)
    if N == 2:
        return QContext(F, p - 1, 2)
    raise ValueError(f"no default root for N={N} in characteristic {p}")


def q_integer(n: int, ctx: QContext) -> FieldElem:
    if n < 0:
        raise ValueError("q-integers are defined for n >= 0")
    return FieldElem(ctx.spec, _q_int_raw(ctx.spec, ctx.q, n))


def q_factorial(n: int, ctx: QContext) -> FieldElem:
    if n < 0:
        raise ValueError("q-factorials are defined for n >= 0")
    acc = 1
    for k in range(1, n + 1):
        acc = int(ctx.spec.mul(acc, _q_int_raw(ctx.spec, ctx.q, k)))
    return FieldElem(ctx.spec, acc)


def q_binomial(n: int, m: int, ctx: QContext) -> FieldElem:
    return FieldElem(ctx.spec, ctx.binom(n, m))


def q_binomial_factorial(n: int, m: int, ctx: QContext) -> FieldElem:
    """Factorial formula, with [N]!/[N]! read as 1 (only n = N needs it)."""
    if m < 0 or m > n or n > ctx.N:
        raise ValueError("factorial formula needs 0 <= m <= n <= N")
    if n == ctx.N and m in (0, n):
        return FieldElem(ctx.spec, 1)
    num = q_factorial(n, ctx)
    den = q_factorial(n - m, ctx) * q_factorial(m, ctx)
    return num / den


def verify_q_identity(s: int, t: int, m: int, ctx: QContext) -> bool:
    """Compare both sides of the binomial convolution identity at (s, t, m)."""
    if not (0 <= s <= t < m <= ctx.N):
        raise ValueError(f"need 0 <= s <= t < m <= N, got s={s}, t={t}, m={m}, N={ctx.N}")
    F = ctx.spec
    acc = 0
    for i in range(s, t + 1):
        term = F.mul(ctx.binom(m - 1 - i, m - 1 - t), ctx.binom(i, s))
        term = F.mul(term, ctx.qpow(-i * (s + 1)))
        acc = int(F.add(acc, term))
    lhs = int(F.mul(ctx.qpow((s + 1) * t), acc))
    rhs = ctx.binom(m, m + s - t)
    return lhs == rhs
