"""Table-driven arithmetic in small finite fields F_{p^k}.

Elements are dense indices ``0 .. p^k - 1``.  The index of the polynomial
``a_0 + a_1 t + ... + a_{k-1} t^{k-1}`` is ``sum(a_i * p**i)``, so in F_4 the
literals ``0, 1, t, t+1`` are the indices ``0, 1, 2, 3``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_FIELD_SIZE = 4**6

# Exhaustive table verification against schoolbook polynomial arithmetic is
# done up to this size; larger fields verify the exp/log chain instead.
_EXHAUSTIVE_CHECK_SIZE = 729


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _digits(index: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        out.append(index % p)
        index //= p
    return out


def _undigits(digits: Sequence[int], p: int) -> int:
    out = 0
    for d in reversed(digits):
        out = out * p + d
    return out


def _polymulmod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int], p: int) -> list[int]:
    """Multiply coefficient lists (low to high) modulo a monic ``modulus``."""
    k = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for top in range(len(prod) - 1, k - 1, -1):
        c = prod[top]
        if c:
            for i in range(k + 1):
                prod[top - k + i] = (prod[top - k + i] - c * modulus[i]) % p
    out = prod[:k]
    return out + [0] * (k - len(out))


def _has_factor(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1 .. deg/2."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in range(p**d):
            div = _digits(low, p, d) + [1]
            rem = list(poly)
            for top in range(deg, d - 1, -1):
                c = rem[top]
                if c:
                    for i in range(d + 1):
                        rem[top - d + i] = (rem[top - d + i] - c * div[i]) % p
            if not any(rem[:d]):
                return True
    return False


def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree ``k`` over F_p.

    Candidates are ordered by their coefficient tuple read from the
    ``t^{k-1}`` coefficient downwards.  Returned low to high, leading 1 last.
    """
    if k == 1:
        return (0, 1)
    for low in range(p**k):
        poly = _digits(low, p, k) + [1]
        if poly[0] == 0:
            continue
        if not _has_factor(poly, p):
            return tuple(poly)
    raise FieldError(f"no irreducible of degree {k} over F_{p}")  # pragma: no cover


class FieldCtx:
    """The field F_{p^k} with dense addition/multiplication tables.

    Contexts are interned by :func:`make_field`; compare them with ``is``.
    """

    def __init__(self, p: int, k: int):
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = least_irreducible(p, k)
        q = self.q
        digits = np.array([_digits(i, p, k) for i in range(q)], dtype=np.int64).reshape(q, k)
        self.digits = digits
        weights = p ** np.arange(k, dtype=np.int64)
        dtype = np.int16
        add = np.zeros((q, q), dtype=np.int32)
        for i in range(k):
            col = digits[:, i].astype(np.int32)
            add += ((col[:, None] + col[None, :]) % p) * int(weights[i])
        self.add_table = add.astype(dtype)
        self.neg_table = (((-digits) % p) @ weights).astype(dtype)
        self.sub_table = self.add_table[:, self.neg_table]

        self.generator, self.exp_table, self.log_table = self._build_exp_log()
        logs = self.log_table.astype(np.int64)
        mul = self.exp_table[(logs[:, None] + logs[None, :]) % (q - 1)].astype(dtype)
        mul[0, :] = 0
        mul[:, 0] = 0
        self.mul_table = mul
        inv = np.full(q, -1, dtype=dtype)
        inv[1:] = self.exp_table[(-logs[1:]) % (q - 1)]
        self.inv_table = inv
        self.frob_table = self.pow_table(p)
        self._verify()
        for arr in (self.add_table, self.neg_table, self.sub_table, self.mul_table,
                    self.inv_table, self.frob_table, self.exp_table, self.log_table, self.digits):
            arr.setflags(write=False)
        # plain-list copies for scalar hot paths (Groebner bases over F_q)
        if q <= 64:
            self.addl = self.add_table.tolist()
            self.subl = self.sub_table.tolist()
            self.mull = self.mul_table.tolist()
            self.negl = self.neg_table.tolist()
            self.invl = self.inv_table.tolist()

    def _build_exp_log(self):
        p, k, q, mod = self.p, self.k, self.q, self.modulus
        exp = np.zeros(q - 1, dtype=np.int64)
        for cand in range(1, q):
            cdig = _digits(cand, p, k)
            cur = [1] + [0] * (k - 1)
            seen = 0
            for i in range(q - 1):
                exp[i] = _undigits(cur, p)
                if i and exp[i] == 1:
                    break
                cur = _polymulmod(cur, cdig, mod, p)
                seen = i + 1
            if seen == q - 1 and _undigits(cur, p) == 1:
                log = np.zeros(q, dtype=np.int64)
                log[exp] = np.arange(q - 1)
                return cand, exp, log
        raise FieldError("no primitive element")  # pragma: no cover

    def _verify(self) -> None:
        p, k, q, mod = self.p, self.k, self.q, self.modulus
        if q <= _EXHAUSTIVE_CHECK_SIZE:
            d = self.digits
            prod = np.zeros((q, q, 2 * k - 1), dtype=np.int64)
            for i in range(k):
                for j in range(k):
                    prod[:, :, i + j] += d[:, None, i] * d[None, :, j]
            for top in range(2 * k - 2, k - 1, -1):
                c = prod[:, :, top] % p
                for i in range(k + 1):
                    prod[:, :, top - k + i] -= c * mod[i]
            weights = p ** np.arange(k, dtype=np.int64)
            expected = (prod[:, :, :k] % p) @ weights
            if not np.array_equal(expected, self.mul_table):
                raise FieldError(f"multiplication table mismatch in F_{q}")
        else:
            gd = _digits(self.generator, p, k)
            for i in range(q - 2):
                nxt = _undigits(_polymulmod(self.digits[self.exp_table[i]].tolist(), gd, mod, p), p)
                if nxt != self.exp_table[i + 1]:
                    raise FieldError(f"exp chain mismatch in F_{q}")

    # -- scalar operations on indices ---------------------------------------
    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.sub_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def power(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        return int(self.exp_table[(int(self.log_table[a]) * e) % (self.q - 1)])

    def pow_table(self, e: int) -> np.ndarray:
        """Array ``a -> a**e`` over all elements (``0**0 == 1``)."""
        out = np.zeros(self.q, dtype=self.exp_table.dtype)
        out[1:] = self.exp_table[(self.log_table[1:] * e) % (self.q - 1)]
        out[0] = 1 if e == 0 else 0
        return out

    def element(self, index: int) -> "FieldElement":
        return FieldElement(self, int(index))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, i) for i in range(self.q)]

    def prime_index(self, n: int) -> int:
        """Index of the image of the integer ``n`` in the prime field."""
        return n % self.p

    def extension(self, d: int) -> "FieldCtx":
        return make_field(self.p, self.k * d)

    # -- literals ------------------------------------------------------------
    def format(self, a: int) -> str:
        """Field literal for an index (``t+1`` style for extensions)."""
        a = int(a)
        if self.k == 1:
            return str(a)
        terms = []
        for i, c in reversed(list(enumerate(self.digits[a].tolist()))):
            if not c:
                continue
            mono = "1" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}" if i == 0 else f"{c}*{mono}")
        return "+".join(terms) if terms else "0"

    def parse(self, text: str) -> int:
        """Inverse of :meth:`format`; also accepts ``(c0,c1,..)`` coefficient tuples."""
        s = text.replace(" ", "")
        if s.startswith("(") and s.endswith(")"):
            coeffs = [int(c) % self.p for c in s[1:-1].split(",") if c]
            if len(coeffs) > self.k:
                raise FieldError(f"too many coefficients for F_{self.q}: {text!r}")
            return _undigits(coeffs + [0] * (self.k - len(coeffs)), self.p)
        if s.lstrip("-").isdigit() and self.k == 1:
            return int(s) % self.p
        digits = [0] * self.k
        for term in s.replace("-", "+-").split("+"):
            if not term:
                continue
            sign = -1 if term.startswith("-") else 1
            term = term.lstrip("-")
            coeff, _, mono = term.rpartition("*") if "*" in term else ("", "", term)
            if mono.isdigit():
                coeff, mono = mono, "1"
            c = int(coeff) if coeff else 1
            if mono == "1":
                e = 0
            elif mono == "t":
                e = 1
            elif mono.startswith("t^"):
                e = int(mono[2:])
            else:
                raise FieldError(f"bad field literal {text!r}")
            if e >= self.k:
                raise FieldError(f"bad field literal {text!r} for F_{self.q}")
            digits[e] = (digits[e] + sign * c) % self.p
        return _undigits(digits, self.p)

    def __repr__(self) -> str:
        return f"FieldCtx(F_{self.q})"

    def __reduce__(self):
        return make_field, (self.p, self.k)


@dataclass(frozen=True)
class FieldElement:
    """Convenience wrapper around an index; arithmetic requires one context."""

    ctx: FieldCtx
    index: int

    def _check(self, other: "FieldElement") -> None:
        if other.ctx is not self.ctx:
            raise FieldError("elements of different fields")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.ctx, self.ctx.add(self.index, other.index))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.ctx, self.ctx.sub(self.index, other.index))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.ctx, self.ctx.mul(self.index, other.index))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.neg(self.index))

    def __pow__(self, e: int) -> "FieldElement":
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElement(self.ctx, self.ctx.power(self.index, e))

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.ctx, self.ctx.div(self.index, other.index))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.index))

    def __bool__(self) -> bool:
        return self.index != 0

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f"{self.ctx.format(self.index)}"


def make_field(p: int, k: int = 1) -> FieldCtx:
    """Return the (interned) context for F_{p^k}."""
    return _make_field(int(p), int(k))


@functools.lru_cache(maxsize=None)
def _make_field(p: int, k: int) -> FieldCtx:
    if not _is_prime(p):
        raise FieldError(f"{p} is not prime")
    if p not in (2, 3):
        raise FieldError(f"characteristic {p} unsupported")
    if k < 1 or p**k > MAX_FIELD_SIZE:
        raise FieldError(f"F_{p}^{k} unsupported (size limit {MAX_FIELD_SIZE})")
    return FieldCtx(p, k)


def field_of_size(q: int) -> FieldCtx:
    for p in (2, 3):
        k, n = 0, 1
        while n < q:
            n *= p
            k += 1
        if n == q and k >= 1:
            return make_field(p, k)
    raise FieldError(f"unsupported field size {q}")


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


@functools.lru_cache(maxsize=None)
def embedding(source: FieldCtx, target: FieldCtx) -> np.ndarray:
    """Index map of the embedding F_{p^k} -> F_{p^{kd}}.

    The source generator ``t`` goes to the least-index root of the source
    modulus in the target.
    """
    if source.p != target.p or target.k % source.k:
        raise FieldError(f"cannot embed F_{source.q} into F_{target.q}")
    if source is target:
        return np.arange(source.q)
    if source.k == 1:
        return np.arange(source.q)  # prime field indices coincide
    mod = source.modulus
    p = target.p
    root = None
    for r in range(target.q):
        acc = 0
        for c in reversed(mod):
            acc = target.add(target.mul(acc, r), c % p)
        if acc == 0:
            root = r
            break
    assert root is not None
    powers = [1]
    for _ in range(source.k - 1):
        powers.append(target.mul(powers[-1], root))
    out = np.zeros(source.q, dtype=np.int64)
    for a in range(source.q):
        acc = 0
        for i, c in enumerate(source.digits[a].tolist()):
            for _ in range(c):
                acc = target.add(acc, powers[i])
        out[a] = acc
    out.setflags(write=False)
    return out


def embed(a: FieldElement | int, target: FieldCtx, source: FieldCtx | None = None):
    """Embed an element into an extension field.

    Accepts a :class:`FieldElement` (returns one) or a bare index together
    with ``source`` (returns an index).
    """
    if isinstance(a, FieldElement):
        return FieldElement(target, int(embedding(a.ctx, target)[a.index]))
    if source is None:
        raise FieldError("bare index needs a source field")
    return int(embedding(source, target)[a])


def frobenius(a: FieldElement, q: int) -> FieldElement:
    """Return ``a**q``."""
    return FieldElement(a.ctx, a.ctx.power(a.index, q))


def frobenius_array(ctx: FieldCtx, q: int) -> np.ndarray:
    return ctx.pow_table(q)


def subfield_indices(ctx: FieldCtx, sub: FieldCtx) -> np.ndarray:
    """Indices of ``ctx`` lying in the image of ``sub``."""
    return np.asarray(embedding(sub, ctx))


def as_indices(values: Iterable[FieldElement | int]) -> list[int]:
    return [v.index if isinstance(v, FieldElement) else int(v) for v in values]
