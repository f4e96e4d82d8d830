"""Homogeneous forms and univariate polynomials over a small finite field.

Monomials of a fixed degree are ordered graded-lexicographically with the
first variable largest, so for cubics in ``x, y, z, w`` the basis starts
``x^3, x^2y, x^2z, x^2w, xy^2, ...`` and ends ``zw^2, w^3``.  All dense
coefficient vectors, serialized forms and "first in order" tie-breaks use
this order.
"""

from __future__ import annotations

import functools
import itertools
import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ff import FieldCtx, FieldError, embedding, field_of_size
from .linalg import DimensionError, MatrixFq, _rref

VARIABLE_NAMES = {
    1: ("x",),
    2: ("x", "y"),
    3: ("x", "y", "z"),
    4: ("x", "y", "z", "w"),
    5: ("v", "w", "x", "y", "z"),
}


def variable_names(n: int) -> tuple[str, ...]:
    return VARIABLE_NAMES.get(n, tuple(f"x{i}" for i in range(n)))


@functools.lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of degree ``d`` in ``n`` variables, largest first."""

    def rec(n_left: int, d_left: int):
        if n_left == 1:
            yield (d_left,)
            return
        for e in range(d_left, -1, -1):
            for rest in rec(n_left - 1, d_left - e):
                yield (e,) + rest

    return tuple(rec(n, d))


@functools.lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict[tuple[int, ...], int]:
    return {m: i for i, m in enumerate(monomials(n, d))}


def num_monomials(n: int, d: int) -> int:
    return len(monomials(n, d))


def format_monomial(exps: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class Form:
    """A homogeneous form with a dense coefficient vector (indices into ``ctx``)."""

    ctx: FieldCtx
    n: int
    d: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(coeffs) != num_monomials(self.n, self.d):
            raise DimensionError(
                f"{len(coeffs)} coefficients for degree {self.d} in {self.n} variables")
        if any(c < 0 or c >= self.ctx.q for c in coeffs):
            raise FieldError("coefficient outside the field")
        object.__setattr__(self, "coeffs", coeffs)

    # -- construction ---------------------------------------------------------
    @classmethod
    def zero(cls, ctx: FieldCtx, n: int, d: int) -> "Form":
        return cls(ctx, n, d, (0,) * num_monomials(n, d))

    @classmethod
    def from_terms(cls, ctx: FieldCtx, n: int, d: int, terms: dict) -> "Form":
        index = monomial_index(n, d)
        coeffs = [0] * len(index)
        for exps, c in terms.items():
            if sum(exps) != d:
                raise DimensionError(f"monomial {exps} is not of degree {d}")
            i = index[tuple(exps)]
            coeffs[i] = ctx.add(coeffs[i], c)
        return cls(ctx, n, d, tuple(coeffs))

    @classmethod
    def variable(cls, ctx: FieldCtx, n: int, i: int) -> "Form":
        exps = [0] * n
        exps[i] = 1
        return cls.from_terms(ctx, n, 1, {tuple(exps): 1})

    # -- basic queries --------------------------------------------------------
    @property
    def monomials(self) -> tuple[tuple[int, ...], ...]:
        return monomials(self.n, self.d)

    def terms(self) -> dict[tuple[int, ...], int]:
        return {m: c for m, c in zip(self.monomials, self.coeffs) if c}

    def coefficient(self, exps: Sequence[int]) -> int:
        return self.coeffs[monomial_index(self.n, self.d)[tuple(exps)]]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    # -- arithmetic -------------------------------------------------------------
    def _same(self, other: "Form") -> None:
        if other.ctx is not self.ctx or other.n != self.n:
            raise DimensionError("forms in different rings")

    def __add__(self, other: "Form") -> "Form":
        self._same(other)
        if other.d != self.d:
            raise DimensionError("adding forms of different degrees")
        t = self.ctx.add_table
        return Form(self.ctx, self.n, self.d, tuple(int(t[a, b]) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Form") -> "Form":
        self._same(other)
        if other.d != self.d:
            raise DimensionError("subtracting forms of different degrees")
        t = self.ctx.sub_table
        return Form(self.ctx, self.n, self.d, tuple(int(t[a, b]) for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Form":
        return self.scale(self.ctx.neg(1))

    def scale(self, c: int) -> "Form":
        m = self.ctx.mul_table
        return Form(self.ctx, self.n, self.d, tuple(int(m[c, a]) for a in self.coeffs))

    def __mul__(self, other: "Form") -> "Form":
        self._same(other)
        ctx = self.ctx
        out: dict[tuple[int, ...], int] = defaultdict(int)
        for m1, c1 in self.terms().items():
            for m2, c2 in other.terms().items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = ctx.add(out[m], ctx.mul(c1, c2))
        return Form.from_terms(ctx, self.n, self.d + other.d, dict(out))

    def normalized(self) -> "Form":
        """Scalar multiple whose first nonzero coefficient is 1."""
        for c in self.coeffs:
            if c:
                return self.scale(self.ctx.inv(c))
        return self

    # -- presentation -----------------------------------------------------------
    def to_string(self, names: Sequence[str] | None = None) -> str:
        names = names or variable_names(self.n)
        parts = []
        for m, c in self.terms().items():
            mono = format_monomial(m, names)
            lit = self.ctx.format(c)
            if mono == "1":
                parts.append(lit)
            elif c == 1:
                parts.append(mono)
            elif "+" in lit:
                parts.append(f"({lit})*{mono}")
            else:
                parts.append(f"{lit}*{mono}")
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.to_string()

    def serialize(self) -> str:
        lits = ",".join(self.ctx.format(c) for c in self.coeffs)
        return f"q={self.ctx.q} n={self.n} d={self.d} coeffs={lits}"


def deserialize(line: str) -> Form:
    fields = dict(part.split("=", 1) for part in line.split())
    try:
        ctx = field_of_size(int(fields["q"]))
        n, d = int(fields["n"]), int(fields["d"])
        coeffs = [ctx.parse(tok) for tok in fields["coeffs"].split(",")]
    except KeyError as exc:
        raise ValueError(f"malformed form line {line!r}") from exc
    return Form(ctx, n, d, tuple(coeffs))


# -- evaluation ---------------------------------------------------------------

def _field_of(F: Form, field: FieldCtx | None) -> tuple[FieldCtx, np.ndarray]:
    field = field or F.ctx
    emb = embedding(F.ctx, field)
    return field, np.asarray(emb)[list(F.coeffs)]


def eval_vector(P: Sequence[int], n: int, d: int, field: FieldCtx) -> np.ndarray:
    """Values of the degree-``d`` basis monomials at ``P`` (indices in ``field``)."""
    if len(P) != n:
        raise DimensionError(f"point has {len(P)} coordinates, expected {n}")
    return monomial_values(np.asarray([P], dtype=np.int64), d, field)[0]


def monomial_values(points: np.ndarray, d: int, field: FieldCtx) -> np.ndarray:
    """Matrix of basis-monomial values, one row per point."""
    pts = np.asarray(points, dtype=np.int64)
    M, n = pts.shape
    pows = [np.asarray(field.pow_table(e)) for e in range(d + 1)]
    mons = monomials(n, d)
    out = np.empty((M, len(mons)), dtype=np.int64)
    mul = field.mul_table
    for j, exps in enumerate(mons):
        acc = np.ones(M, dtype=np.int64)
        for i, e in enumerate(exps):
            if e:
                acc = mul[acc, pows[e][pts[:, i]]]
        out[:, j] = acc
    return out


def dot(field: FieldCtx, c: Sequence[int] | np.ndarray, v: np.ndarray) -> np.ndarray | int:
    """``sum c_j v_j`` in ``field``; ``v`` may carry leading batch axes."""
    c = np.asarray(c, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    acc = np.zeros(v.shape[:-1], dtype=np.int64)
    for j in np.nonzero(c)[0]:
        acc = field.add_table[acc, field.mul_table[c[j], v[..., j]]]
    return int(acc) if acc.ndim == 0 else acc.astype(np.int64)


def evaluate(F: Form, P: Sequence[int], field: FieldCtx | None = None) -> int:
    """Value of ``F`` at the coordinates ``P`` (indices of ``field``, default ``F.ctx``)."""
    field, coeffs = _field_of(F, field)
    if len(P) != F.n:
        raise DimensionError(f"point has {len(P)} coordinates, expected {F.n}")
    return int(dot(field, coeffs, eval_vector(P, F.n, F.d, field)))


def evaluate_many(F: Form, points: np.ndarray, field: FieldCtx | None = None) -> np.ndarray:
    field, coeffs = _field_of(F, field)
    pts = np.asarray(points, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != F.n:
        raise DimensionError("points must be an (M, n) array")
    return dot(field, coeffs, monomial_values(pts, F.d, field))


# -- linear substitution ----------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _substitution_plan(n: int, d: int):
    """For each source monomial: its variable sequence and, per ordered choice
    of target variables, the target monomial index."""
    index = monomial_index(n, d)
    plan = []
    for exps in monomials(n, d):
        seq = tuple(i for i, e in enumerate(exps) for _ in range(e))
        choices = []
        for js in itertools.product(range(n), repeat=d):
            tgt = [0] * n
            for j in js:
                tgt[j] += 1
            choices.append((js, index[tuple(tgt)]))
        plan.append((seq, choices))
    return plan


def substitute_batch(ctx: FieldCtx, coeffs: np.ndarray, mats: np.ndarray, n: int, d: int) -> np.ndarray:
    """Coefficient vectors of ``F(g x)`` for a stack of matrices ``g``.

    ``coeffs`` is either one coefficient vector or one per matrix.
    """
    mats = np.asarray(mats, dtype=np.int64)
    B = mats.shape[0]
    if mats.shape[1:] != (n, n):
        raise DimensionError(f"expected {n}x{n} matrices")
    coeffs = np.asarray(coeffs, dtype=np.int64)
    per_row = coeffs.ndim == 2
    plan = _substitution_plan(n, d)
    N = len(plan)
    if ctx.k == 1:
        p = ctx.p
        out = np.zeros((B, N), dtype=np.int64)
        for s, (seq, choices) in enumerate(plan):
            c = coeffs[:, s] if per_row else coeffs[s]
            if not per_row and c == 0:
                continue
            for js, t in choices:
                prod = c * mats[:, seq[0], js[0]]
                for a, j in zip(seq[1:], js[1:]):
                    prod = prod * mats[:, a, j]
                out[:, t] += prod
            if s % 8 == 7:
                out %= p
        return out % p
    mul, add = ctx.mul_table, ctx.add_table
    out = np.zeros((B, N), dtype=np.int64)
    for s, (seq, choices) in enumerate(plan):
        c = coeffs[:, s] if per_row else coeffs[s]
        if not per_row and c == 0:
            continue
        for js, t in choices:
            prod = mats[:, seq[0], js[0]]
            for a, j in zip(seq[1:], js[1:]):
                prod = mul[prod, mats[:, a, j]]
            out[:, t] = add[out[:, t], mul[c, prod]]
    return out.astype(np.int64)


def substitute_linear(F: Form, g: MatrixFq) -> Form:
    """The form ``x -> F(g x)``."""
    if g.ctx is not F.ctx:
        raise DimensionError("matrix over a different field")
    if g.shape != (F.n, F.n):
        raise DimensionError(f"expected a {F.n}x{F.n} matrix")
    out = substitute_batch(F.ctx, F.array(), g.entries[None], F.n, F.d)[0]
    return Form(F.ctx, F.n, F.d, tuple(out.tolist()))


def partials(F: Form) -> list[Form]:
    """Formal partial derivatives (degree ``d - 1``)."""
    if F.d < 1:
        raise DimensionError("derivative of a constant form")
    ctx = F.ctx
    out = []
    for i in range(F.n):
        terms: dict[tuple[int, ...], int] = {}
        for m, c in F.terms().items():
            if m[i] == 0:
                continue
            e = list(m)
            e[i] -= 1
            terms[tuple(e)] = ctx.add(terms.get(tuple(e), 0), ctx.mul(c, ctx.prime_index(m[i])))
        out.append(Form.from_terms(ctx, F.n, F.d - 1, terms))
    return out


# -- canonical cubic modulo a quadric ------------------------------------------------

KILLED_CUBIC_MONOMIALS = ((2, 1, 0, 0), (1, 2, 0, 0), (0, 0, 3, 0), (0, 0, 0, 3))
X_CUBED = (3, 0, 0, 0)


class NotInA(ValueError):
    """The cubic vanishes at (1:0:0:0) after reduction."""


@functools.lru_cache(maxsize=None)
def _reduction_data(Q: Form) -> tuple[np.ndarray, tuple[int, ...]]:
    """Correction cubics ``R_k`` with ``F - sum_k F_k R_k`` killing the
    monomials ``x^2y, xy^2, z^3, w^3``; ``R_k`` are linear multiples of Q."""
    ctx = Q.ctx
    if Q.n != 4 or Q.d != 2:
        raise DimensionError("expected a quadratic form in four variables")
    index = monomial_index(4, 3)
    multiples = [Form.variable(ctx, 4, i) * Q for i in range(4)]
    killed = [index[m] for m in KILLED_CUBIC_MONOMIALS]
    # M[k][l] = coefficient of killed monomial k in x_l * Q
    M = np.array([[mq.coeffs[k] for mq in multiples] for k in killed], dtype=np.int64)
    aug = np.concatenate([M, np.eye(4, dtype=np.int64)], axis=1)
    red, rank, pivots = _rref(ctx, aug)
    if pivots[:4] != [0, 1, 2, 3]:
        raise ValueError("quadric does not allow the canonical cubic reduction")
    Minv = red[:, 4:]
    corrections = []
    for k in range(4):
        acc = Form.zero(ctx, 4, 3)
        for l in range(4):
            if Minv[l, k]:
                acc = acc + multiples[l].scale(int(Minv[l, k]))
        corrections.append(acc.coeffs)
    return np.array(corrections, dtype=np.int64), tuple(killed)


def reduce_cubic_batch(ctx: FieldCtx, coeffs: np.ndarray, Q: Form) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized canonical reduction.  Returns ``(reduced, ok)`` where rows
    with a vanishing ``x^3`` coefficient are flagged ``ok == False``."""
    R, killed = _reduction_data(Q)
    out = np.array(coeffs, dtype=np.int64, copy=True)
    if out.ndim == 1:
        out = out[None]
    sub, mul = ctx.sub_table, ctx.mul_table
    orig = out[:, list(killed)].copy()
    for k in range(4):
        out = sub[out, mul[orig[:, k][:, None], R[k][None, :]]].astype(np.int64)
    lead = out[:, 0]
    ok = lead != 0
    scale = np.where(ok, ctx.inv_table[lead], 0)
    out = mul[scale[:, None], out].astype(np.int64)
    return out, ok


def reduce_cubic_canonical(F: Form, Q: Form) -> Form:
    """Normal form of ``F`` modulo linear multiples of ``Q`` and scaling:
    coefficients of ``x^2y, xy^2, z^3, w^3`` are zero and ``x^3`` is 1."""
    if F.n != 4 or F.d != 3:
        raise DimensionError("expected a cubic form in four variables")
    out, ok = reduce_cubic_batch(F.ctx, F.array(), Q)
    if not ok[0]:
        raise NotInA("x^3 coefficient vanishes; the cubic passes through (1:0:0:0)")
    return Form(F.ctx, 4, 3, tuple(out[0].tolist()))


# -- univariate polynomials -----------------------------------------------------------

@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial, coefficients low to high, trimmed."""

    ctx: FieldCtx
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(a) for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_dict(cls, ctx: FieldCtx, terms: dict[int, int]) -> "UniPoly":
        deg = max(terms, default=-1)
        c = [0] * (deg + 1)
        for e, a in terms.items():
            c[e] = ctx.add(c[e], a)
        return cls(ctx, tuple(c))

    @classmethod
    def x(cls, ctx: FieldCtx) -> "UniPoly":
        return cls(ctx, (0, 1))

    @classmethod
    def const(cls, ctx: FieldCtx, a: int) -> "UniPoly":
        return cls(ctx, (a,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, e: int) -> int:
        return self.coeffs[e] if 0 <= e < len(self.coeffs) else 0

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self.ctx, tuple(self.ctx.add(self.coeff(i), other.coeff(i)) for i in range(n)))

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self.ctx, tuple(self.ctx.sub(self.coeff(i), other.coeff(i)) for i in range(n)))

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        ctx = self.ctx
        if self.is_zero() or other.is_zero():
            return UniPoly(ctx, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = ctx.add(out[i + j], ctx.mul(a, b))
        return UniPoly(ctx, tuple(out))

    def __pow__(self, e: int) -> "UniPoly":
        out = UniPoly.const(self.ctx, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def scale(self, a: int) -> "UniPoly":
        return UniPoly(self.ctx, tuple(self.ctx.mul(a, c) for c in self.coeffs))

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self.scale(self.ctx.inv(self.lead()))

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        ctx = self.ctx
        rem = list(self.coeffs)
        dq = other.degree
        inv_lead = ctx.inv(other.lead())
        quot = [0] * max(len(rem) - dq, 0)
        for top in range(len(rem) - 1, dq - 1, -1):
            c = rem[top]
            if c:
                f = ctx.mul(c, inv_lead)
                quot[top - dq] = f
                for i, b in enumerate(other.coeffs):
                    rem[top - dq + i] = ctx.sub(rem[top - dq + i], ctx.mul(f, b))
        return UniPoly(ctx, tuple(quot)), UniPoly(ctx, tuple(rem[:dq]))

    def __call__(self, a: int, field: FieldCtx | None = None) -> int:
        field = field or self.ctx
        emb = embedding(self.ctx, field)
        acc = 0
        for c in reversed(self.coeffs):
            acc = field.add(field.mul(acc, a), int(emb[c]))
        return acc

    def evaluate_all(self, field: FieldCtx | None = None) -> np.ndarray:
        """Values at every element of ``field`` (index order)."""
        field = field or self.ctx
        emb = np.asarray(embedding(self.ctx, field))
        xs = np.arange(field.q)
        acc = np.zeros(field.q, dtype=np.int64)
        for c in reversed(self.coeffs):
            acc = field.add_table[field.mul_table[acc, xs], emb[c]]
        return acc.astype(np.int64)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for e in range(self.degree, -1, -1):
            c = self.coeffs[e]
            if not c:
                continue
            mono = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
            lit = self.ctx.format(c)
            if "+" in lit and mono:
                lit = f"({lit})"
            parts.append(lit if not mono else (mono if c == 1 else f"{lit}*{mono}"))
        return " + ".join(parts)


def uni_derivative(P: UniPoly) -> UniPoly:
    ctx = P.ctx
    return UniPoly(ctx, tuple(ctx.mul(c, ctx.prime_index(e)) for e, c in enumerate(P.coeffs) if e > 0))


def uni_gcd(P: UniPoly, Q: UniPoly) -> UniPoly:
    """Monic greatest common divisor."""
    if P.is_zero() and Q.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    a, b = P, Q
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


# -- parsing human-readable polynomials ----------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z])|(\*\*|[-+*^()]))")


class ParseError(ValueError):
    pass


class _Parser:
    """Recursive descent over ``+ -``, juxtaposition or ``*``, ``^``/``**``.

    Produces a sparse dict ``{exponents: coefficient}``.  The letter ``t``
    stands for the generator of the coefficient field.
    """

    def __init__(self, text: str, ctx: FieldCtx, names: Sequence[str]):
        self.ctx = ctx
        self.names = list(names)
        self.n = len(names)
        self.toks: list[tuple[str, str]] = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character at {text[pos:]!r}")
            num, name, op = m.groups()
            self.toks.append(("num", num) if num else ("name", name) if name else ("op", op))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> dict:
        out = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input near token {self.peek()[1]!r}")
        return out

    def _add(self, a: dict, b: dict, sign: int = 1) -> dict:
        ctx = self.ctx
        out = dict(a)
        for m, c in b.items():
            c = c if sign > 0 else ctx.neg(c)
            out[m] = ctx.add(out.get(m, 0), c)
        return {m: c for m, c in out.items() if c}

    def _mul(self, a: dict, b: dict) -> dict:
        ctx = self.ctx
        out: dict = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                out[m] = ctx.add(out.get(m, 0), ctx.mul(c1, c2))
        return {m: c for m, c in out.items() if c}

    def expr(self) -> dict:
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        out = self._add({}, self.term(), sign)
        while self.peek() in (("op", "+"), ("op", "-")):
            sign = 1 if self.take()[1] == "+" else -1
            out = self._add(out, self.term(), sign)
        return out

    def term(self) -> dict:
        out = self.power()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                out = self._mul(out, self.power())
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                out = self._mul(out, self.power())
            else:
                return out

    def power(self) -> dict:
        base = self.atom()
        if self.peek() in (("op", "^"), ("op", "**")):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer")
            out = {(0,) * self.n: 1}
            for _ in range(int(val)):
                out = self._mul(out, base)
            return out
        return base

    def atom(self) -> dict:
        kind, val = self.take()
        zero = (0,) * self.n
        if kind == "num":
            c = int(val) % self.ctx.p
            return {zero: c} if c else {}
        if kind == "name":
            if val in self.names:
                e = [0] * self.n
                e[self.names.index(val)] = 1
                return {tuple(e): 1}
            if val == "t":
                if self.ctx.k < 2:
                    raise ParseError(f"generator t is not available over F_{self.ctx.q}")
                return {zero: self.ctx.p}
            raise ParseError(f"unknown variable {val!r}")
        if (kind, val) == ("op", "("):
            out = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("missing closing parenthesis")
            return out
        raise ParseError(f"unexpected token {val!r}")


def parse_polynomial(text: str, ctx: FieldCtx, names: Sequence[str]) -> dict:
    """Sparse ``{exponents: coefficient}`` for an arbitrary polynomial."""
    return _Parser(text, ctx, names).parse()


def parse_form(text: str, ctx: FieldCtx, n: int | None = None,
               names: Sequence[str] | None = None) -> Form:
    """Parse a homogeneous polynomial such as ``"vw + x^2 + t*x*y + y^2"``.

    Without ``n``/``names`` the variable set is the smallest standard one
    (``x,y,z,w`` or ``v,w,x,y,z``) containing every letter used.
    """
    if names is None:
        if n is None:
            letters = set(re.findall(r"[A-Za-z]", text)) - {"t"}
            n = 5 if "v" in letters else 4 if "w" in letters else 3 if "z" in letters else 2
        names = variable_names(n)
    terms = parse_polynomial(text, ctx, names)
    degrees = {sum(m) for m in terms}
    if len(degrees) > 1:
        raise ParseError(f"polynomial is not homogeneous: degrees {sorted(degrees)}")
    if not terms:
        raise ParseError("zero polynomial")
    d = degrees.pop()
    return Form.from_terms(ctx, len(names), d, terms)


def parse_unipoly(text: str, ctx: FieldCtx, var: str = "x") -> UniPoly:
    terms = parse_polynomial(text, ctx, (var,))
    return UniPoly.from_dict(ctx, {m[0]: c for m, c in terms.items()})


def forms_to_array(forms: Iterable[Form]) -> np.ndarray:
    return np.array([f.coeffs for f in forms], dtype=np.int64)
