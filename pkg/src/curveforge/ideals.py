"""A small Groebner-basis engine over F_q (grevlex, Buchberger with sugar).

Polynomials are dicts ``{exponent tuple: coefficient index}``. The public
entry points take :class:`Ideal` objects whose generators are homogeneous
:class:`~curveforge.poly.Form` instances.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Sequence

from .ff import FieldCtx
from .poly import Form, partials

Mono = tuple[int, ...]
Poly = dict  # Mono -> int


class IdealError(ValueError):
    pass


class NotCompleteIntersection(IdealError):
    pass


@functools.lru_cache(maxsize=1 << 16)
def grevlex_key(m: Mono) -> tuple:
    return (sum(m), tuple(-e for e in reversed(m)))


def _divides(a: Mono, b: Mono) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Mono, b: Mono) -> Mono:
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a: Mono, b: Mono) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


class _Ops:
    """Scalar arithmetic through Python lists (fast for small fields)."""

    def __init__(self, ctx: FieldCtx):
        self.ctx = ctx
        self.add = ctx.add_table.tolist()
        self.sub = ctx.sub_table.tolist()
        self.mul = ctx.mul_table.tolist()
        self.inv = ctx.inv_table.tolist()
        self.neg = ctx.neg_table.tolist()


@functools.lru_cache(maxsize=None)
def _ops(ctx: FieldCtx) -> _Ops:
    if ctx.q > 256:
        raise IdealError("Groebner computations are limited to fields of size <= 256")
    return _Ops(ctx)


def leading(f: Poly) -> Mono:
    return max(f, key=grevlex_key)


def _monic(f: Poly, ops: _Ops) -> Poly:
    lc = f[leading(f)]
    if lc == 1:
        return f
    s = ops.inv[lc]
    mul = ops.mul
    return {m: mul[s][c] for m, c in f.items()}


def _sub_multiple(f: Poly, c: int, shift: Mono, g: Poly, ops: _Ops) -> None:
    """``f -= c * x^shift * g`` in place."""
    mul, sub = ops.mul[c], ops.sub
    for m, a in g.items():
        t = tuple(x + y for x, y in zip(m, shift))
        v = sub[f.get(t, 0)][mul[a]]
        if v:
            f[t] = v
        else:
            f.pop(t, None)


def normal_form(f: Poly, basis: Sequence[tuple[Mono, Poly]], ops: _Ops) -> Poly:
    """Full reduction of ``f`` by monic polynomials given with their leading monomials."""
    f = dict(f)
    rem: Poly = {}
    while f:
        m = leading(f)
        c = f[m]
        for lm, g in basis:
            if _divides(lm, m):
                shift = tuple(x - y for x, y in zip(m, lm))
                _sub_multiple(f, c, shift, g, ops)
                break
        else:
            rem[m] = c
            del f[m]
    return rem


def _spoly(f: Poly, lf: Mono, g: Poly, lg: Mono, ops: _Ops) -> Poly:
    lcm = _lcm(lf, lg)
    sf = tuple(x - y for x, y in zip(lcm, lf))
    sg = tuple(x - y for x, y in zip(lcm, lg))
    out: Poly = {}
    for m, a in f.items():
        out[tuple(x + y for x, y in zip(m, sf))] = a
    _sub_multiple(out, 1, sg, g, ops)
    return out


def buchberger(polys: Iterable[Poly], ctx: FieldCtx, nvars: int) -> list[Poly]:
    """Reduced Groebner basis (monic, sorted by leading monomial, descending)."""
    ops = _ops(ctx)
    G: list[Poly] = []
    LM: list[Mono] = []
    sugar: list[int] = []
    pairs: list[tuple[int, int, Mono, int]] = []  # (i, j, lcm, sugar)
    alive: list[bool] = []

    def add(h: Poly, s: int) -> None:
        lh = leading(h)
        k = len(G)
        # chain criterion on existing pairs
        kept = []
        for (i, j, l, sg) in pairs:
            if _divides(lh, l) and _lcm(LM[i], lh) != l and _lcm(LM[j], lh) != l:
                continue
            kept.append((i, j, l, sg))
        # new pairs, Gebauer-Moeller style pruning
        cand = []
        for i in range(k):
            if not alive[i]:
                continue
            l = _lcm(LM[i], lh)
            si = max(sugar[i] + sum(l) - sum(LM[i]), s + sum(l) - sum(lh))
            cand.append((i, l, si, _coprime(LM[i], lh)))
        pruned = []
        for a, (i, l, si, cop) in enumerate(cand):
            dominated = False
            for b, (j, l2, sj, cop2) in enumerate(cand):
                if b == a:
                    continue
                if l2 != l and _divides(l2, l):
                    dominated = True
                    break
                if l2 == l and (cop2 and not cop or (cop2 == cop and b < a)):
                    dominated = True
                    break
            if not dominated:
                pruned.append((i, l, si, cop))
        for i, l, si, cop in pruned:
            if not cop:
                kept.append((i, k, l, si))
        pairs[:] = kept
        G.append(h)
        LM.append(lh)
        sugar.append(s)
        alive.append(True)
        for i in range(k):
            if alive[i] and _divides(lh, LM[i]):
                alive[i] = False

    inputs = []
    for f in polys:
        f = {m: c for m, c in f.items() if c}
        if f:
            if len(next(iter(f))) != nvars:
                raise IdealError("polynomial in the wrong number of variables")
            inputs.append(f)
    inputs.sort(key=lambda f: grevlex_key(leading(f)))
    for f in inputs:
        basis = [(LM[i], G[i]) for i in range(len(G)) if alive[i]]
        h = normal_form(f, basis, ops)
        if h:
            add(_monic(h, ops), max(sum(m) for m in f))
    while pairs:
        best = min(range(len(pairs)), key=lambda t: (pairs[t][3], grevlex_key(pairs[t][2])))
        i, j, l, s = pairs.pop(best)
        sp = _spoly(G[i], LM[i], G[j], LM[j], ops)
        basis = [(LM[t], G[t]) for t in range(len(G)) if alive[t]]
        h = normal_form(sp, basis, ops)
        if h:
            add(_monic(h, ops), s)
            if all(v == 0 for v in LM[-1]):
                break
    # minimal then reduced
    live = [(LM[t], G[t]) for t in range(len(G)) if alive[t]]
    if any(all(v == 0 for v in lm) for lm, _ in live):
        return [{(0,) * nvars: 1}]
    minimal = []
    for a, (lm, g) in enumerate(live):
        if any(_divides(lm2, lm) and (lm2 != lm or b < a) for b, (lm2, _) in enumerate(live) if b != a):
            continue
        minimal.append((lm, g))
    minimal.sort(key=lambda t: grevlex_key(t[0]), reverse=True)
    reduced = []
    for a, (lm, g) in enumerate(minimal):
        others = [t for b, t in enumerate(minimal) if b != a]
        tail = {m: c for m, c in g.items() if m != lm}
        r = normal_form(tail, others, ops)
        r[lm] = 1
        reduced.append(r)
    return reduced


# -- public types ----------------------------------------------------------------

def form_to_poly(F: Form) -> Poly:
    return {m: c for m, c in zip(F.monomials, F.coeffs) if c}


def poly_to_form(f: Poly, ctx: FieldCtx, n: int, d: int | None = None) -> Form:
    if not f:
        if d is None:
            raise IdealError("degree of the zero polynomial is unknown")
        return Form.zero(ctx, n, d)
    degs = {sum(m) for m in f}
    if len(degs) != 1:
        raise IdealError("polynomial is not homogeneous")
    return Form.from_terms(ctx, n, degs.pop(), f)


@dataclass(frozen=True)
class Ideal:
    gens: tuple[Form, ...]
    n: int = field(init=False)
    ctx: FieldCtx = field(init=False)

    def __init__(self, gens: Iterable[Form]):
        gens = tuple(gens)
        if not gens or all(g.is_zero() for g in gens):
            raise IdealError("an ideal needs a nonzero generator")
        ctx, n = gens[0].ctx, gens[0].n
        if any(g.ctx is not ctx or g.n != n for g in gens):
            raise IdealError("generators live in different rings")
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "ctx", ctx)


@dataclass(frozen=True)
class GroebnerBasis:
    ctx: FieldCtx
    nvars: int
    basis: tuple[tuple[tuple[Mono, int], ...], ...]  # each poly as sorted term tuple

    @property
    def polys(self) -> list[Poly]:
        return [dict(t) for t in self.basis]

    @property
    def leading_monomials(self) -> list[Mono]:
        return [t[0][0] for t in self.basis]

    def is_unit(self) -> bool:
        return any(all(e == 0 for e in lm) for lm in self.leading_monomials)

    def reduce(self, f: Poly | Form) -> Poly:
        if isinstance(f, Form):
            f = form_to_poly(f)
        basis = [(t[0][0], dict(t)) for t in self.basis]
        return normal_form(f, basis, _ops(self.ctx))

    def contains(self, f: Poly | Form) -> bool:
        return not self.reduce(f)


def _freeze(polys: list[Poly]) -> tuple:
    return tuple(tuple(sorted(p.items(), key=lambda t: grevlex_key(t[0]), reverse=True)) for p in polys)


def groebner_polys(polys: Iterable[Poly], ctx: FieldCtx, nvars: int) -> GroebnerBasis:
    return GroebnerBasis(ctx, nvars, _freeze(buchberger(polys, ctx, nvars)))


@functools.lru_cache(maxsize=4096)
def groebner(I: Ideal) -> GroebnerBasis:
    return groebner_polys([form_to_poly(g) for g in I.gens], I.ctx, I.n)


def affine_dimension(lms: Sequence[Mono], nvars: int) -> int:
    """Krull dimension of ``k[x]/(lms)``: the largest set of variables containing
    the support of no leading monomial (-1 for the unit ideal)."""
    if any(all(e == 0 for e in m) for m in lms):
        return -1
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in lms]
    for size in range(nvars, -1, -1):
        for S in combinations(range(nvars), size):
            s = frozenset(S)
            if not any(sup <= s for sup in supports):
                return size
    return 0


def projective_dimension(I: Ideal) -> int:
    gb = groebner(I)
    return affine_dimension(gb.leading_monomials, I.n) - 1


def is_projectively_empty(I: Ideal) -> bool:
    lms = groebner(I).leading_monomials
    if any(all(e == 0 for e in m) for m in lms):
        return True
    pure = {i for m in lms for i in range(I.n) if m[i] and sum(m) == m[i]}
    return len(pure) == I.n


# -- Jacobians and smoothness -------------------------------------------------------

def _poly_mul(f: Poly, g: Poly, ops: _Ops) -> Poly:
    out: Poly = {}
    add, mul = ops.add, ops.mul
    for m1, a in f.items():
        for m2, b in g.items():
            t = tuple(x + y for x, y in zip(m1, m2))
            v = add[out.get(t, 0)][mul[a][b]]
            if v:
                out[t] = v
            else:
                out.pop(t, None)
    return out


def _poly_add(f: Poly, g: Poly, ops: _Ops, negate: bool = False) -> Poly:
    out = dict(f)
    op = ops.sub if negate else ops.add
    for m, b in g.items():
        v = op[out.get(m, 0)][b]
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def determinant(rows: Sequence[Sequence[Poly]], ops: _Ops) -> Poly:
    """Leibniz expansion; fine for the 1x1 .. 3x3 Jacobian minors used here."""
    n = len(rows)
    total: Poly = {}
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = rows[0][perm[0]]
        for i in range(1, n):
            if not term:
                break
            term = _poly_mul(term, rows[i][perm[i]], ops)
        if term:
            total = _poly_add(total, term, ops, negate=bool(inversions % 2))
    return total


def jacobian_minors(gens: Sequence[Form], size: int) -> list[Form]:
    ctx, n = gens[0].ctx, gens[0].n
    ops = _ops(ctx)
    jac = [[form_to_poly(p) if p.d >= 0 else {} for p in partials(g)] for g in gens]
    deg = sum(g.d - 1 for g in gens[:size])
    out = []
    for rows in combinations(range(len(gens)), size):
        d = sum(gens[r].d - 1 for r in rows)
        for cols in combinations(range(n), size):
            det = determinant([[jac[r][c] for c in cols] for r in rows], ops)
            if det:
                out.append(poly_to_form(det, ctx, n, d))
    del deg
    return out


def singular_subscheme(I: Ideal, check: bool = True) -> Ideal:
    """``I`` plus the ``c x c`` minors of the Jacobian of its ``c`` generators.

    Only meaningful for complete intersections; with ``check`` the dimension
    ``n - 1 - c`` is verified first.
    """
    gens = [g for g in I.gens if not g.is_zero()]
    c = len(gens)
    if check:
        dim = projective_dimension(I)
        if dim != I.n - 1 - c:
            raise NotCompleteIntersection(
                f"dimension {dim} but {c} generators in P^{I.n - 1}")
    return Ideal(list(gens) + jacobian_minors(gens, c))


def is_smooth_curve(I: Ideal) -> bool:
    """Dimension one and an empty singular subscheme.

    For complete intersections of dimension >= 1 this also certifies geometric
    irreducibility (connected + smooth).
    """
    gens = [g for g in I.gens if not g.is_zero()]
    if len(gens) != I.n - 2:
        raise IdealError(f"expected {I.n - 2} generators in P^{I.n - 1}, got {len(gens)}")
    if projective_dimension(I) != 1:
        return False
    return is_projectively_empty(singular_subscheme(I, check=False))


def is_smooth_hypersurface_section(I: Ideal) -> bool:
    """Empty singular subscheme for a complete intersection of any dimension."""
    gens = [g for g in I.gens if not g.is_zero()]
    if projective_dimension(I) != I.n - 1 - len(gens):
        return False
    return is_projectively_empty(singular_subscheme(I, check=False))


def unit_after_localizing(I: Ideal, h: Form) -> bool:
    """Whether ``1`` lies in ``I + (1 - s h)``, i.e. ``V(I)`` lies inside ``V(h)``."""
    ctx, n = I.ctx, I.n
    polys = [{m + (0,): c for m, c in form_to_poly(g).items()} for g in I.gens]
    ops = _ops(ctx)
    rab = {(0,) * (n + 1): 1}
    for m, c in form_to_poly(h).items():
        t = m + (1,)
        rab[t] = ops.neg[c]
    polys.append(rab)
    return groebner_polys(polys, ctx, n + 1).is_unit()
