"""Quadratic forms: bilinear form, orthogonal groups, and type classification.

A quadratic form in ``n`` variables is a degree-2 :class:`~curveforge.poly.Form`;
its dense coefficient vector is exactly ``c_{i,j}`` for ``i <= j`` in the order
``c_{1,1}, c_{1,2}, ..., c_{1,n}, c_{2,2}, ...``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .ff import FieldCtx
from .linalg import MatrixFq, batch_is_invertible, batch_matmul, enumerate_gl, gl_order
from .poly import Form, monomial_index, monomial_values, monomials, partials, substitute_batch

QuadraticForm = Form


class QuadraticFormError(ValueError):
    pass


def _check_quadratic(Q: Form) -> None:
    if Q.d != 2:
        raise QuadraticFormError(f"expected a quadratic form, got degree {Q.d}")


def upper_coefficients(Q: Form) -> np.ndarray:
    """``c[i, j]`` for ``i <= j``; zero below the diagonal."""
    _check_quadratic(Q)
    c = np.zeros((Q.n, Q.n), dtype=np.int64)
    for exps, a in zip(Q.monomials, Q.coeffs):
        idx = [i for i, e in enumerate(exps) for _ in range(e)]
        c[idx[0], idx[1]] = a
    return c


def from_upper(ctx: FieldCtx, upper) -> Form:
    upper = np.asarray(upper, dtype=np.int64)
    n = upper.shape[0]
    terms = {}
    for i in range(n):
        for j in range(i, n):
            if upper[i, j]:
                e = [0] * n
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = int(upper[i, j])
    return Form.from_terms(ctx, n, 2, terms)


@functools.lru_cache(maxsize=None)
def all_vectors(ctx: FieldCtx, n: int) -> np.ndarray:
    """Every vector of F_q^n; row ``i`` has base-q digits of ``i``, first coordinate most significant."""
    q = ctx.q
    idx = np.arange(q**n, dtype=np.int64)
    out = np.zeros((q**n, n), dtype=np.int64)
    for pos in range(n - 1, -1, -1):
        out[:, pos] = idx % q
        idx //= q
    out.setflags(write=False)
    return out


def vector_index(ctx: FieldCtx, vecs: np.ndarray) -> np.ndarray:
    vecs = np.asarray(vecs, dtype=np.int64)
    out = np.zeros(vecs.shape[:-1], dtype=np.int64)
    for pos in range(vecs.shape[-1]):
        out = out * ctx.q + vecs[..., pos]
    return out


def values_on_all_vectors(Q: Form) -> np.ndarray:
    from .poly import dot

    vals = monomial_values(all_vectors(Q.ctx, Q.n), Q.d, Q.ctx)
    return dot(Q.ctx, Q.array(), vals)


def bilinear(Q: Form, x: Sequence[int], y: Sequence[int]) -> int:
    """``<x, y> = Q(x + y) - Q(x) - Q(y)``."""
    from .poly import evaluate

    ctx = Q.ctx
    s = [ctx.add(a, b) for a, b in zip(x, y)]
    return ctx.sub(ctx.sub(evaluate(Q, s), evaluate(Q, x)), evaluate(Q, y))


@functools.lru_cache(maxsize=8)
def bilinear_table(Q: Form) -> np.ndarray:
    """``T[u, v] = <u, v>`` over all vector indices (``q^n x q^n``)."""
    ctx, n = Q.ctx, Q.n
    vecs = all_vectors(ctx, n)
    N = len(vecs)
    vals = values_on_all_vectors(Q)
    sum_idx = np.zeros((N, N), dtype=np.int64)
    for pos in range(n):
        col = vecs[:, pos]
        sum_idx = sum_idx * ctx.q + ctx.add_table[col[:, None], col[None, :]]
    tab = ctx.sub_table[ctx.sub_table[vals[sum_idx], vals[:, None]], vals[None, :]]
    tab = tab.astype(np.int8)
    tab.setflags(write=False)
    return tab


# -- the quadratic relation system ---------------------------------------------------

@dataclass(frozen=True)
class Relation:
    """``sum coeff * g[r1][s1] * g[r2][s2] = rhs`` (0-based indices)."""

    monomial: tuple[int, int]  # (i, j) with i <= j: the x_i x_j coefficient
    terms: tuple[tuple[int, tuple[int, int], tuple[int, int]], ...]
    rhs: int

    def columns(self) -> set[int]:
        return {s for _, (r1, s1), (r2, s2) in self.terms for s in (s1, s2)}

    def to_string(self, ctx: FieldCtx) -> str:
        parts = []
        for c, (r1, s1), (r2, s2) in self.terms:
            mono = f"g{r1 + 1}{s1 + 1}*g{r2 + 1}{s2 + 1}" if (r1, s1) != (r2, s2) else f"g{r1 + 1}{s1 + 1}^2"
            parts.append(mono if c == 1 else f"{ctx.format(c)}*{mono}")
        lhs = " + ".join(parts) if parts else "0"
        return f"{lhs} = {ctx.format(self.rhs)}"


def quadratic_relations(Q: Form) -> list[Relation]:
    """The ``n(n+1)/2`` equations in the entries of ``g`` expressing ``Q(g x) = Q(x)``.

    The ``x_i^2`` relation is ``Q(g_{.i}) = c_{i,i}`` and the ``x_i x_j`` relation
    is ``<g_{.i}, g_{.j}> = c_{i,j}``.
    """
    ctx, n = Q.ctx, Q.n
    c = upper_coefficients(Q)
    out = []
    for i in range(n):
        for j in range(i, n):
            acc: dict[tuple[tuple[int, int], tuple[int, int]], int] = {}

            def put(u, v, coef):
                key = (min(u, v), max(u, v))
                acc[key] = ctx.add(acc.get(key, 0), coef)

            for a in range(n):
                for b in range(a, n):
                    if not c[a, b]:
                        continue
                    if i == j:
                        put((a, i), (b, i), int(c[a, b]))
                    else:
                        put((a, i), (b, j), int(c[a, b]))
                        put((a, j), (b, i), int(c[a, b]))
            terms = tuple(sorted(((coef, u, v) for (u, v), coef in acc.items() if coef),
                                 key=lambda t: (t[1][1], t[1][0], t[2][1], t[2][0])))
            out.append(Relation((i, j), terms, int(c[i, j])))
    return out


# -- level sets and orthogonal groups ---------------------------------------------------

def level_set(Q: Form, c: int) -> np.ndarray:
    """All vectors ``v`` with ``Q(v) = c``, as rows in vector-index order."""
    _check_quadratic(Q)
    vals = values_on_all_vectors(Q)
    return all_vectors(Q.ctx, Q.n)[vals == c]


def _level_indices(Q: Form, c: int) -> np.ndarray:
    return np.nonzero(values_on_all_vectors(Q) == c)[0]


@dataclass(eq=False)
class OrthogonalGroup:
    """Matrices ``g`` (acting on column vectors) with ``Q(g x) = Q(x)``."""

    form: Form
    matrices: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.matrices)

    def __len__(self) -> int:
        return len(self.matrices)

    def __iter__(self) -> Iterator[MatrixFq]:
        for m in self.matrices:
            yield MatrixFq(self.form.ctx, m)

    def projective_order(self) -> int:
        """Order of ``O(Q)/{+-1}``."""
        ctx = self.form.ctx
        if ctx.p == 2:
            return self.order
        return self.order // 2

    def table_order(self) -> int:
        """Order in the tabulated convention.

        For a form in all ``n`` variables this is ``|O(Q)/{+-1}|``. For a cone
        over a form in the first ``m < n`` variables the scaling block ``C`` is
        taken unimodular, i.e. ``|O(Q)| / (q - 1)^{[n - m > 0]}``; over F_3 the
        two readings agree.
        """
        m = involved_variables(self.form)
        if m < self.form.n:
            return self.order // (self.form.ctx.q - 1)
        return self.projective_order()

    def contains(self, g) -> bool:
        g = np.asarray(g.entries if isinstance(g, MatrixFq) else g)
        return bool(np.any(np.all(self.matrices == g[None], axis=(1, 2))))


def iter_orthogonal_group(Q: Form, chunk: int = 4096) -> Iterator[np.ndarray]:
    """Column-prefix search for ``O(Q)``, yielding stacks of matrices.

    Column ``i`` runs over the level set ``Q(v) = c_{i,i}`` in vector-index
    order and is pruned as soon as ``<g_{.j}, g_{.i}> != c_{j,i}`` for some
    ``j < i``; complete candidates are kept if invertible.
    """
    _check_quadratic(Q)
    if Q.is_zero():
        raise QuadraticFormError("zero form")
    ctx, n = Q.ctx, Q.n
    c = upper_coefficients(Q)
    vecs = all_vectors(ctx, n)
    T = bilinear_table(Q)
    levels = [_level_indices(Q, int(c[i, i])) for i in range(n)]

    def extend(prefix: np.ndarray, i: int) -> np.ndarray:
        S = levels[i]
        if len(prefix) == 0 or len(S) == 0:
            return np.zeros((0, i + 1), dtype=np.int64)
        ok = np.ones((len(prefix), len(S)), dtype=bool)
        for j in range(i):
            ok &= T[prefix[:, j]][:, S] == c[j, i]
        r, s = np.nonzero(ok)
        return np.concatenate([prefix[r], S[s][:, None]], axis=1)

    def rec(prefix: np.ndarray, i: int):
        if i == n:
            mats = vecs[prefix].transpose(0, 2, 1)
            yield mats[batch_is_invertible(ctx, mats)]
            return
        for start in range(0, len(prefix), chunk):
            nxt = extend(prefix[start:start + chunk], i)
            if len(nxt):
                yield from rec(nxt, i + 1)

    first = levels[0][:, None]
    for start in range(0, len(first), 1):
        yield from (m for m in rec(first[start:start + 1], 1) if len(m))


def orthogonal_group(Q: Form) -> OrthogonalGroup:
    parts = list(iter_orthogonal_group(Q))
    mats = np.concatenate(parts) if parts else np.zeros((0, Q.n, Q.n), dtype=np.int64)
    return OrthogonalGroup(Q, mats.astype(np.int8))


def orthogonal_group_naive(Q: Form) -> OrthogonalGroup:
    """Filter all of ``GL_n(F_q)``; a test oracle for tiny ``n`` and ``q``."""
    gl = enumerate_gl(Q.ctx, Q.n)
    images = substitute_batch(Q.ctx, Q.array(), gl, Q.n, 2)
    keep = np.all(images == Q.array()[None], axis=1)
    return OrthogonalGroup(Q, gl[keep].astype(np.int8))


def involved_variables(Q: Form) -> int:
    """Smallest ``m`` such that ``Q`` only involves ``x_1 .. x_m``."""
    m = 0
    for exps, a in zip(Q.monomials, Q.coeffs):
        if a:
            m = max(m, max(i for i, e in enumerate(exps) if e) + 1)
    return m


def restrict(Q: Form, m: int) -> Form:
    """``Q`` as a form in its first ``m`` variables (which must be all it uses)."""
    if involved_variables(Q) > m:
        raise QuadraticFormError(f"form involves variables beyond the first {m}")
    terms = {exps[:m]: a for exps, a in Q.terms().items()}
    return Form.from_terms(Q.ctx, m, 2, terms)


def orthogonal_group_block(Q: Form, m: int | None = None) -> OrthogonalGroup:
    """``O(Q)`` for a form in the first ``m`` of ``n`` variables, assembled as
    ``[[A, 0], [B, C]]`` with ``A`` in ``O(Q|_U)``, ``B`` arbitrary, ``C`` invertible."""
    n = Q.n
    used = involved_variables(Q)
    m = used if m is None else m
    if used > m:
        raise QuadraticFormError(f"form involves variables beyond the first {m}")
    if m == n:
        return orthogonal_group(Q)
    ctx, q = Q.ctx, Q.ctx.q
    A = orthogonal_group(restrict(Q, m)).matrices.astype(np.int64)
    k = n - m
    Bs = all_vectors(ctx, k * m).reshape(-1, k, m)
    Cs = enumerate_gl(ctx, k)
    total = len(A) * len(Bs) * len(Cs)
    out = np.zeros((total, n, n), dtype=np.int8)
    ia, ib, ic = np.meshgrid(np.arange(len(A)), np.arange(len(Bs)), np.arange(len(Cs)), indexing="ij")
    ia, ib, ic = ia.ravel(), ib.ravel(), ic.ravel()
    out[:, :m, :m] = A[ia]
    out[:, m:, :m] = Bs[ib]
    out[:, m:, m:] = Cs[ic]
    assert total == len(A) * q ** (m * k) * gl_order(q, k)
    return OrthogonalGroup(Q, out)


def check_group_axioms(G: OrthogonalGroup, sample: int | None = None, seed: int = 0) -> bool:
    """Identity present, closure under products and inverses; ``Q o g = Q``.

    With ``sample`` set, closure is checked on that many random pairs.
    """
    ctx, n = G.form.ctx, G.form.n
    mats = G.matrices.astype(np.int64)
    keys = set(vector_index(ctx, mats.reshape(len(mats), -1)).tolist())
    if int(vector_index(ctx, np.eye(n, dtype=np.int64).reshape(-1))) not in keys:
        return False
    images = substitute_batch(ctx, G.form.array(), mats, n, 2)
    if not np.all(images == G.form.array()[None]):
        return False
    if sample is None:
        a = np.repeat(np.arange(len(mats)), len(mats))
        b = np.tile(np.arange(len(mats)), len(mats))
    else:
        rng = np.random.default_rng(seed)
        a = rng.integers(0, len(mats), sample)
        b = rng.integers(0, len(mats), sample)
    for start in range(0, len(a), 1 << 16):
        prods = batch_matmul(ctx, mats[a[start:start + (1 << 16)]], mats[b[start:start + (1 << 16)]])
        pk = vector_index(ctx, prods.reshape(len(prods), -1))
        if not all(k in keys for k in pk.tolist()):
            return False
    # inverses: each g has some h with g h = 1
    inv_keys = []
    for g in (mats if sample is None else mats[:sample]):
        inv_keys.append(int(vector_index(ctx, MatrixFq(ctx, g).inverse().entries.reshape(-1))))
    return all(k in keys for k in inv_keys)


# -- type classification ----------------------------------------------------------------

@dataclass(frozen=True)
class TypeClass:
    sing_dim: int  # dimension of the singular locus of V(Q); -1 if empty
    point_count: int  # rational points of V(Q)
    label: str


def nondegenerate_count(q: int, m: int, kind: str) -> int:
    """Points of a nondegenerate quadric in P^m."""
    if m % 2 == 0:
        return (q**m - 1) // (q - 1)
    h = (m + 1) // 2
    if kind == "hyperbolic":
        return (q**h - 1) * (q ** (h - 1) + 1) // (q - 1)
    return (q**h + 1) * (q ** (h - 1) - 1) // (q - 1)


_NAMED = {
    (4, 4, "elliptic"): "nonsplit-rank-4",
    (4, 4, "hyperbolic"): "split-rank-4",
    (4, 3, "parabolic"): "rank-3",
    (5, 4, "elliptic"): "III",
    (5, 5, "parabolic"): "IV",
}


def type_label(n: int, q: int, sing_dim: int, count: int) -> str:
    """Name for the invariant pair: a cone over a nondegenerate quadric."""
    s = sing_dim
    vertex = (q ** (s + 1) - 1) // (q - 1) if s >= 0 else 0
    m = n - 2 - s
    if m < 0:
        return f"degenerate-{s}-{count}"
    base, rem = divmod(count - vertex, q ** (s + 1))
    kinds = ["parabolic"] if m % 2 == 0 else ["hyperbolic", "elliptic"]
    for kind in kinds:
        if rem == 0 and base == nondegenerate_count(q, m, kind):
            rank = m + 1
            return _NAMED.get((n, rank, kind), f"rank-{rank}-{kind}")
    return f"unknown-{s}-{count}"


def point_count(Q: Form) -> int:
    vals = values_on_all_vectors(Q)
    return (int(np.count_nonzero(vals == 0)) - 1) // (Q.ctx.q - 1)


def classify(Q: Form) -> TypeClass:
    """Singular-locus dimension (Groebner basis of ``Q`` and its partials)
    plus the rational point count of ``V(Q)``."""
    from .ideals import Ideal, projective_dimension

    _check_quadratic(Q)
    if Q.is_zero():
        raise QuadraticFormError("zero form")
    gens = [Q] + [f for f in partials(Q) if not f.is_zero()]
    s = projective_dimension(Ideal(gens))
    count = point_count(Q)
    return TypeClass(s, count, type_label(Q.n, Q.ctx.q, s, count))


def classify_batch(ctx: FieldCtx, coeffs: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(sing_dim, point_count)`` for many quadratic forms at once.

    The singular locus of a quadric is a linear space defined over F_q, so its
    dimension follows from how many rational points it has.
    """
    from .geometry import projective_points

    coeffs = np.asarray(coeffs, dtype=np.int64)
    pts = projective_points(n - 1, ctx)
    q = ctx.q
    Qvals = _values_matrix(ctx, coeffs, monomial_values(pts, 2, ctx))
    on = Qvals == 0
    counts = on.sum(axis=1)
    sing = on.copy()
    # partial derivative i evaluated at the points is linear in the coefficients
    for i in range(n):
        lin = _partial_values_basis(ctx, n, i, pts)
        sing &= _values_matrix(ctx, coeffs, lin) == 0
    nsing = sing.sum(axis=1)
    dims = np.full(len(coeffs), -1, dtype=np.int64)
    for s in range(n):
        dims[nsing == (q ** (s + 1) - 1) // (q - 1)] = s
    return dims, counts.astype(np.int64)


@functools.lru_cache(maxsize=None)
def _partial_basis_cached(ctx: FieldCtx, n: int, i: int, key: bytes, shape: tuple) -> np.ndarray:
    pts = np.frombuffer(key, dtype=np.int64).reshape(shape)
    mons = monomials(n, 2)
    out = np.zeros((len(pts), len(mons)), dtype=np.int64)
    for j, exps in enumerate(mons):
        e = exps[i]
        if e == 0:
            continue
        rest = list(exps)
        rest[i] -= 1
        vals = monomial_values(pts, 1, ctx)[:, monomial_index(n, 1)[tuple(rest)]]
        out[:, j] = ctx.mul_table[ctx.prime_index(e), vals]
    return out


def _partial_values_basis(ctx: FieldCtx, n: int, i: int, pts: np.ndarray) -> np.ndarray:
    """``[d(m_j)/dx_i (P)]`` for each point and degree-2 basis monomial."""
    pts = np.ascontiguousarray(pts, dtype=np.int64)
    return _partial_basis_cached(ctx, n, i, pts.tobytes(), pts.shape)


def _values_matrix(ctx: FieldCtx, coeffs: np.ndarray, basis_vals: np.ndarray) -> np.ndarray:
    """``coeffs @ basis_vals.T`` over the field (both as index arrays)."""
    if ctx.k == 1:
        return (coeffs @ basis_vals.T) % ctx.p
    out = np.zeros((len(coeffs), len(basis_vals)), dtype=np.int64)
    for j in range(coeffs.shape[1]):
        out = ctx.add_table[out, ctx.mul_table[coeffs[:, j][:, None], basis_vals[:, j][None, :]]]
    return out


def projectively_equal(a: Form, b: Form) -> bool:
    return a.normalized() == b.normalized()
