"""Dense matrices over a small finite field, stored as index arrays."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ff import FieldCtx


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MatrixFq:
    ctx: FieldCtx
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise DimensionError(f"bad matrix shape {arr.shape}")
        if arr.min() < 0 or arr.max() >= self.ctx.q:
            raise ValueError("entries outside the field")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def identity(cls, ctx: FieldCtx, n: int) -> "MatrixFq":
        return cls(ctx, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, ctx: FieldCtx, rows: int, cols: int) -> "MatrixFq":
        return cls(ctx, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __eq__(self, other) -> bool:
        return (isinstance(other, MatrixFq) and other.ctx is self.ctx
                and np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((self.ctx.q, self.entries.tobytes(), self.shape))

    def __matmul__(self, other: "MatrixFq") -> "MatrixFq":
        if other.ctx is not self.ctx:
            raise ValueError("matrices over different fields")
        return MatrixFq(self.ctx, matmul(self.ctx, self.entries, other.entries))

    def apply(self, vec) -> np.ndarray:
        v = np.asarray(vec, dtype=np.int64).reshape(-1, 1)
        return matmul(self.ctx, self.entries, v)[:, 0]

    def transpose(self) -> "MatrixFq":
        return MatrixFq(self.ctx, self.entries.T)

    def inverse(self) -> "MatrixFq":
        n = self.rows
        if self.cols != n:
            raise DimensionError("inverse of a non-square matrix")
        aug = np.concatenate([self.entries, np.eye(n, dtype=np.int64)], axis=1)
        red, rank, pivots = _rref(self.ctx, aug)
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return MatrixFq(self.ctx, red[:, n:])

    def tolist(self) -> list[list[int]]:
        return self.entries.tolist()


def matmul(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of index arrays via the field tables."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        prod = ctx.mul_table[a[:, k][:, None], b[k][None, :]]
        out = ctx.add_table[out, prod]
    return out.astype(np.int64)


def _rref(ctx: FieldCtx, arr: np.ndarray) -> tuple[np.ndarray, int, list[int]]:
    m = np.array(arr, dtype=np.int64)
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if len(nz) == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = ctx.mul_table[ctx.inv_table[m[r, c]], m[r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = ctx.sub_table[m[i], ctx.mul_table[m[i, c], m[r]]]
        pivots.append(c)
        r += 1
    return m, r, pivots


def row_reduce(M: MatrixFq) -> tuple[MatrixFq, int]:
    """Reduced row-echelon form and rank."""
    red, rank, _ = _rref(M.ctx, M.entries)
    return MatrixFq(M.ctx, red), rank


def rank(M: MatrixFq) -> int:
    return _rref(M.ctx, M.entries)[1]


def kernel(M: MatrixFq) -> list[np.ndarray]:
    """Basis of the right null space ``{v : M v = 0}``.

    One vector per free column of the reduced form, with a 1 in that column.
    """
    ctx = M.ctx
    red, r, pivots = _rref(ctx, M.entries)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(M.cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = ctx.neg_table[red[i, f]]
        basis.append(v)
    return basis


def is_invertible(M: MatrixFq) -> bool:
    if M.rows != M.cols:
        raise DimensionError("invertibility of a non-square matrix")
    return rank(M) == M.rows


def batch_rank(ctx: FieldCtx, mats: np.ndarray) -> np.ndarray:
    """Ranks of a stack of matrices ``(B, r, c)``, vectorized over ``B``."""
    m = np.array(mats, dtype=np.int64)
    B, rows, cols = m.shape
    ranks = np.zeros(B, dtype=np.int64)
    idx = np.arange(B)
    mul, sub, inv = ctx.mul_table, ctx.sub_table, ctx.inv_table
    for c in range(cols):
        # rows at or below the current rank with a nonzero entry in column c
        cand = m[:, :, c] != 0
        cand &= np.arange(rows)[None, :] >= ranks[:, None]
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        sel = idx[has]
        prow = piv[has]
        target = ranks[has]
        # swap pivot row into position `target`
        tmp = m[sel, prow].copy()
        m[sel, prow] = m[sel, target]
        m[sel, target] = tmp
        pivot_row = m[sel, target]
        scale = inv[pivot_row[:, c]]
        pivot_row = mul[scale[:, None], pivot_row]
        m[sel, target] = pivot_row
        for i in range(rows):
            factor = m[sel, i, c]
            upd = (factor != 0) & (target != i)
            if upd.any():
                s = sel[upd]
                m[s, i] = sub[m[s, i], mul[factor[upd][:, None], pivot_row[upd]]]
        ranks[has] += 1
    return ranks


def batch_is_invertible(ctx: FieldCtx, mats: np.ndarray) -> np.ndarray:
    mats = np.asarray(mats)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise DimensionError("expected a stack of square matrices")
    if len(mats) == 0:
        return np.zeros(0, dtype=bool)
    return batch_rank(ctx, mats) == mats.shape[1]


def batch_matmul(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Products of stacked matrices ``(B, n, k) @ (B, k, m)`` (or broadcast)."""
    a = np.asarray(a)
    b = np.asarray(b)
    n, k = a.shape[-2:]
    m = b.shape[-1]
    shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2]) + (n, m)
    out = np.zeros(shape, dtype=np.int64)
    for j in range(k):
        prod = ctx.mul_table[a[..., :, j][..., :, None], b[..., j, :][..., None, :]]
        out = ctx.add_table[out, prod]
    return out.astype(np.int64)


def determinant_leibniz(ctx: FieldCtx, mat) -> int:
    """Determinant by the Leibniz permutation sum; a test oracle for tiny n."""
    from itertools import permutations

    m = np.asarray(mat, dtype=np.int64)
    n = m.shape[0]
    total = 0
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = 1
        for i in range(n):
            term = ctx.mul(term, int(m[i, perm[i]]))
        if inversions % 2:
            term = ctx.neg(term)
        total = ctx.add(total, term)
    return total


def enumerate_gl(ctx: FieldCtx, n: int) -> np.ndarray:
    """All invertible ``n x n`` matrices, in lexicographic order of entries."""
    q = ctx.q
    total = q ** (n * n)
    flat = np.arange(total, dtype=np.int64)
    digits = np.zeros((total, n * n), dtype=np.int64)
    for pos in range(n * n - 1, -1, -1):
        digits[:, pos] = flat % q
        flat //= q
    mats = digits.reshape(total, n, n)
    return mats[batch_is_invertible(ctx, mats)]


def gl_order(q: int, n: int) -> int:
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out
