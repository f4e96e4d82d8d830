"""Points on projective varieties, hyperelliptic models, plane singularities, bounds."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .ff import FieldCtx, FieldError, embedding, make_field
from .poly import Form, UniPoly, monomial_values, dot, substitute_batch, partials, uni_derivative, uni_gcd


# -- projective points ------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectivePoint:
    ctx: FieldCtx
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not any(coords):
            raise ValueError("the zero vector is not a projective point")
        object.__setattr__(self, "coords", normalize(self.ctx, coords))

    def __iter__(self):
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __str__(self) -> str:
        return "(" + " : ".join(self.ctx.format(c) for c in self.coords) + ")"


def normalize(ctx: FieldCtx, coords: Sequence[int]) -> tuple[int, ...]:
    """Scale so the first nonzero coordinate is 1."""
    for c in coords:
        if c:
            s = int(ctx.inv_table[c])
            return tuple(int(ctx.mul_table[s, x]) for x in coords)
    raise ValueError("the zero vector is not a projective point")


def normalize_array(ctx: FieldCtx, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.int64)
    nz = pts != 0
    first = np.argmax(nz, axis=1)
    lead = pts[np.arange(len(pts)), first]
    return ctx.mul_table[ctx.inv_table[lead][:, None], pts].astype(np.int64)


def num_projective_points(n: int, q: int) -> int:
    return (q ** (n + 1) - 1) // (q - 1)


def iter_projective_points(n: int, field: FieldCtx, chunk: int = 1 << 18) -> Iterator[np.ndarray]:
    """Normalized points of P^n in lexicographic order, in blocks.

    Points are grouped by the position of their leading 1; within a group the
    free coordinates run in lexicographic order, which makes the whole list
    lexicographic.
    """
    q = field.q
    for lead in range(n, -1, -1):
        free = n - lead
        total = q**free
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            block = np.zeros((len(idx), n + 1), dtype=np.int64)
            block[:, lead] = 1
            for pos in range(n, lead, -1):
                block[:, pos] = idx % q
                idx //= q
            yield block


def projective_points(n: int, field: FieldCtx) -> np.ndarray:
    """All normalized points of P^n(field), one per row, lexicographically sorted."""
    if num_projective_points(n, field.q) > 50_000_000:
        raise ValueError("too many points to materialize; use iter_projective_points")
    return np.concatenate(list(iter_projective_points(n, field)))


def _embedded_coeffs(forms: Sequence[Form], field: FieldCtx) -> list[np.ndarray]:
    out = []
    for F in forms:
        emb = np.asarray(embedding(F.ctx, field))
        out.append(emb[F.array()])
    return out


def zero_mask(forms: Sequence[Form], pts: np.ndarray, field: FieldCtx) -> np.ndarray:
    """Rows of ``pts`` where every form vanishes (forms filtered one at a time)."""
    keep = np.ones(len(pts), dtype=bool)
    idx = np.arange(len(pts))
    for F, c in zip(forms, _embedded_coeffs(forms, field)):
        if not idx.size:
            break
        vals = dot(field, c, monomial_values(pts[idx], F.d, field))
        ok = np.asarray(vals) == 0
        keep[idx[~ok]] = False
        idx = idx[ok]
    return keep


def points_on_array(forms: Sequence[Form], field: FieldCtx | None = None) -> np.ndarray:
    forms = list(forms)
    if not forms:
        raise ValueError("need at least one form")
    field = field or forms[0].ctx
    n = forms[0].n
    if any(F.n != n for F in forms):
        raise ValueError("forms in different ambient spaces")
    found = []
    for block in iter_projective_points(n - 1, field):
        found.append(block[zero_mask(forms, block, field)])
    return np.concatenate(found)


def points_on(forms: Sequence[Form], field: FieldCtx | None = None) -> list[ProjectivePoint]:
    """Common zeros of ``forms`` in P^{n-1}(field)."""
    field = field or forms[0].ctx
    return [ProjectivePoint(field, tuple(r)) for r in points_on_array(forms, field).tolist()]


def count_points(forms: Sequence[Form], field: FieldCtx | None = None) -> int:
    return len(points_on_array(forms, field))


def galois_orbit_reps(points, q: int, field: FieldCtx | None = None) -> list:
    """One representative (the lexicographically least) per orbit of ``x -> x^q``.

    ``points`` is a list of :class:`ProjectivePoint` or an array of normalized
    coordinate rows over ``field``. The output has the same kind as the input.
    """
    as_objects = len(points) > 0 and isinstance(points[0], ProjectivePoint)
    if as_objects:
        field = points[0].ctx
        arr = np.array([p.coords for p in points], dtype=np.int64)
    else:
        if field is None:
            raise ValueError("field required for array input")
        arr = np.asarray(points, dtype=np.int64)
    if len(arr) == 0:
        return []
    orbits = galois_orbits(arr, q, field)
    reps = [min(orb) for orb in orbits]
    reps.sort()
    if as_objects:
        return [ProjectivePoint(field, r) for r in reps]
    return [list(r) for r in reps]


def galois_orbits(arr: np.ndarray, q: int, field: FieldCtx) -> list[list[tuple[int, ...]]]:
    keys = [tuple(r) for r in np.asarray(arr).tolist()]
    present = set(keys)
    frob = field.pow_table(q)
    seen: set = set()
    orbits = []
    for k in keys:
        if k in seen:
            continue
        orb = [k]
        seen.add(k)
        cur = k
        while True:
            nxt = normalize(field, [int(frob[c]) for c in cur])
            if nxt == k:
                break
            if nxt not in present:
                raise ValueError("point set is not closed under Frobenius")
            orb.append(nxt)
            seen.add(nxt)
            cur = nxt
        orbits.append(orb)
    return orbits


def field_of_definition(coords: Sequence[int], base: FieldCtx, field: FieldCtx) -> int:
    """Smallest ``e`` such that the normalized point is defined over F_{q^e}."""
    q = base.q
    pt = normalize(field, coords)
    for e in range(1, field.k // base.k + 1):
        if (field.k // base.k) % e:
            continue
        fr = field.pow_table(q**e)
        if all(int(fr[c]) == c for c in pt):
            return e
    return field.k // base.k


# -- hyperelliptic models ------------------------------------------------------------

class HyperellipticError(ValueError):
    pass


@dataclass(frozen=True)
class HyperellipticModel:
    """``y^2 + Q(x) y = P(x)`` with genus parameter ``g``."""

    ctx: FieldCtx
    P: UniPoly
    Q: UniPoly
    g: int

    def __post_init__(self):
        if self.g < 0:
            raise HyperellipticError("negative genus")
        if max(2 * self.Q.degree, self.P.degree) > 2 * self.g + 2:
            raise HyperellipticError("degrees too large for the genus parameter")

    @classmethod
    def from_strings(cls, ctx: FieldCtx, P: str, Q: str = "0", g: int | None = None) -> "HyperellipticModel":
        from .poly import parse_unipoly

        Pp, Qp = parse_unipoly(P, ctx), parse_unipoly(Q, ctx)
        if g is None:
            top = max(Pp.degree, 2 * Qp.degree)
            g = max(0, (top + 1) // 2 - 1)
        return cls(ctx, Pp, Qp, g)

    def __str__(self) -> str:
        lhs = "y^2" if self.Q.is_zero() else f"y^2 + ({self.Q})*y"
        return f"{lhs} = {self.P}"


def hyperelliptic_smooth(M: HyperellipticModel) -> bool:
    """Smoothness of the model in both charts (affine and at infinity)."""
    ctx, g = M.ctx, M.g
    if ctx.p == 2:
        if M.Q.is_zero():
            return False
        Qd, Pd = uni_derivative(M.Q), uni_derivative(M.P)
        crit = Qd * Qd * M.P + Pd * Pd
        if not _coprime(M.Q, crit):
            return False
        # chart at infinity, local at 0: reversed coefficients
        qt, qt1 = M.Q.coeff(g + 1), M.Q.coeff(g)
        pt, pt1 = M.P.coeff(2 * g + 2), M.P.coeff(2 * g + 1)
        c = ctx.add(ctx.mul(ctx.mul(qt1, qt1), pt), ctx.mul(pt1, pt1))
        return not (qt == 0 and c == 0)
    four = UniPoly.const(ctx, ctx.prime_index(4))
    D = M.Q * M.Q + four * M.P
    if D.is_zero() or not _coprime(D, uni_derivative(D)):
        return False
    return D.degree >= 2 * g + 1


def _coprime(a: UniPoly, b: UniPoly) -> bool:
    if a.is_zero() and b.is_zero():
        return False
    if a.is_zero():
        return b.degree == 0
    if b.is_zero():
        return a.degree == 0
    return uni_gcd(a, b).degree == 0


def hyperelliptic_infinity_count(M: HyperellipticModel, field: FieldCtx | None = None) -> int:
    """Rational solutions of ``Y^2 + q_{g+1} Y = p_{2g+2}``."""
    ctx = M.ctx
    field = field or ctx
    emb = np.asarray(embedding(ctx, field))
    a = int(emb[M.Q.coeff(M.g + 1)])
    b = int(emb[M.P.coeff(2 * M.g + 2)])
    Y = np.arange(field.q)
    lhs = field.add_table[field.mul_table[Y, Y], field.mul_table[a, Y]]
    return int(np.count_nonzero(lhs == b))


def hyperelliptic_affine_count(M: HyperellipticModel, field: FieldCtx | None = None) -> int:
    ctx = M.ctx
    field = field or ctx
    emb = np.asarray(embedding(ctx, field))
    xs = np.arange(field.q)

    def values(poly: UniPoly) -> np.ndarray:
        acc = np.zeros(field.q, dtype=np.int64)
        for c in reversed(poly.coeffs):
            acc = field.add_table[field.mul_table[acc, xs], int(emb[c])]
        return acc

    Pv, Qv = values(M.P), values(M.Q)
    ys = np.arange(field.q)
    lhs = field.add_table[field.mul_table[ys[None, :], ys[None, :]], field.mul_table[Qv[:, None], ys[None, :]]]
    return int(np.count_nonzero(lhs == Pv[:, None]))


def hyperelliptic_count(M: HyperellipticModel, field: FieldCtx | None = None,
                        check_smooth: bool = True) -> int:
    """Affine solutions plus points at infinity of the genus-``g`` model."""
    if check_smooth and not hyperelliptic_smooth(M):
        raise HyperellipticError(f"singular model: {M}")
    return hyperelliptic_affine_count(M, field) + hyperelliptic_infinity_count(M, field)


def _x_power(ctx: FieldCtx, e: int) -> UniPoly:
    return UniPoly.x(ctx) ** e


def odd_family(q: int, g: int) -> HyperellipticModel:
    """``y^2 = x^{2g+2-q^2} (x^q - x)^q + 1`` for odd ``q`` and ``g > (q^2-2)/2``."""
    from .ff import field_of_size

    ctx = field_of_size(q)
    if q % 2 == 0 or 2 * g <= q * q - 2:
        raise HyperellipticError(f"odd family needs odd q and g > (q^2-2)/2, got q={q}, g={g}")
    x = UniPoly.x(ctx)
    P = _x_power(ctx, 2 * g + 2 - q * q) * (x**q - x) ** q + UniPoly.const(ctx, 1)
    return HyperellipticModel(ctx, P, UniPoly.const(ctx, 0), g)


def even_family(q: int, g: int) -> HyperellipticModel:
    """``y^2 + ((x^q + x) x^{g+1-q} + 1) y = (x^q + x)^2`` for even ``q`` and ``g >= q - 1``."""
    from .ff import field_of_size

    ctx = field_of_size(q)
    if q % 2 or g < q - 1:
        raise HyperellipticError(f"even family needs even q and g >= q-1, got q={q}, g={g}")
    x = UniPoly.x(ctx)
    base = x**q + x
    Q = base * _x_power(ctx, g + 1 - q) + UniPoly.const(ctx, 1)
    return HyperellipticModel(ctx, base * base, Q, g)


def ternary_family(g: int) -> HyperellipticModel:
    """``y^2 = x^{2g-1} (x^3 - x) + 1`` over F_3, smooth unless ``g = 1 mod 6``."""
    ctx = make_field(3)
    if g < 1 or g % 6 == 1:
        raise HyperellipticError(f"ternary variant is singular or undefined for g={g}")
    x = UniPoly.x(ctx)
    P = _x_power(ctx, 2 * g - 1) * (x**3 - x) + UniPoly.const(ctx, 1)
    return HyperellipticModel(ctx, P, UniPoly.const(ctx, 0), g)


def quaternary_genus2() -> HyperellipticModel:
    """``y^2 + (x^3 + t + 1) y = x^5 + x^2`` over F_4."""
    return HyperellipticModel.from_strings(make_field(2, 2), "x^5+x^2", "x^3+t+1", g=2)


def family_candidates(q: int, g: int) -> list[HyperellipticModel]:
    """Every listed model whose stated range covers ``(q, g)``, in preference order."""
    out = []
    if q % 2 and 2 * g > q * q - 2:
        out.append(odd_family(q, g))
    if q % 2 == 0 and g >= q - 1 and g >= 1:
        out.append(even_family(q, g))
    if q == 3 and g >= 2 and g % 6 != 1:
        out.append(ternary_family(g))
    if q == 4 and g == 2:
        out.append(quaternary_genus2())
    return out


def hyperelliptic_family(q: int, g: int) -> HyperellipticModel:
    """A smooth genus-``g`` hyperelliptic model over F_q with ``2(q+1)`` points.

    The odd-``q`` family degenerates to a ``p``-th power times a square when
    ``p`` divides ``2g + 2`` (e.g. ``q = 3, g = 5`` gives ``(x^6 + 1)^2``), so
    candidates are screened by the smoothness criterion and the first smooth
    one is returned.
    """
    cands = family_candidates(q, g)
    for M in cands:
        if hyperelliptic_smooth(M):
            return M
    if cands:
        raise HyperellipticError(f"every model covering q={q}, g={g} is singular")
    raise HyperellipticError(f"no family covers q={q}, g={g}")


def family_range(q: int, gmax: int = 20) -> list[int]:
    out = []
    for g in range(2, gmax + 1):
        try:
            hyperelliptic_family(q, g)
        except HyperellipticError:
            continue
        out.append(g)
    return out


# -- plane curve singularities --------------------------------------------------------

@dataclass(frozen=True)
class SingularPoint:
    point: ProjectivePoint
    degree: int  # smallest e with the point defined over F_{q^e}
    multiplicity: int
    shape: str  # "double-line", "two-lines", or "order-m"


def _local_expansion(F: Form, pt: Sequence[int], field: FieldCtx) -> dict[tuple[int, int], int]:
    """Coefficients ``a^i b^j`` of ``F(a e_i + b e_j + s P)`` at ``s = 1``."""
    lead = next(i for i, c in enumerate(pt) if c)
    others = [i for i in range(3) if i != lead]
    g = np.zeros((3, 3), dtype=np.int64)
    g[others[0], 0] = 1
    g[others[1], 1] = 1
    g[:, 2] = pt
    coeffs = np.asarray(embedding(F.ctx, field))[F.array()]
    G = substitute_batch(field, coeffs, g[None], 3, F.d)[0]
    out: dict[tuple[int, int], int] = {}
    for exps, c in zip(F.monomials, G.tolist()):
        if c:
            key = (exps[0], exps[1])
            out[key] = field.add(out.get(key, 0), c)
    return out


def local_multiplicity(F: Form, pt: Sequence[int], field: FieldCtx) -> tuple[int, str]:
    terms = _local_expansion(F, pt, field)
    if not terms:
        return F.d, "order-%d" % F.d
    m = min(i + j for i, j in terms)
    if m != 2:
        return m, f"order-{m}"
    a, b, c = terms.get((2, 0), 0), terms.get((1, 1), 0), terms.get((0, 2), 0)
    disc = field.sub(field.mul(b, b), field.mul(field.prime_index(4), field.mul(a, c)))
    return 2, "double-line" if disc == 0 else "two-lines"


def _singular_ideal_gens(F: Form) -> list[Form]:
    return [F] + [P for P in partials(F) if not P.is_zero()]


def _scan_field(F: Form, field: FieldCtx) -> np.ndarray:
    gens = _singular_ideal_gens(F)
    found = []
    for block in iter_projective_points(2, field, chunk=1 << 17):
        found.append(block[zero_mask(gens, block, field)])
    return np.concatenate(found)


def _certified_complete(F: Form, rational: list[tuple[int, ...]]) -> bool:
    """Whether the singular locus is contained in the given rational points."""
    from .ideals import Ideal, is_projectively_empty, unit_after_localizing

    I = Ideal(_singular_ideal_gens(F))
    if is_projectively_empty(I):
        return True
    if not rational or len(rational) > 3:
        return False
    ctx = F.ctx
    cuts = []
    for pt in rational:
        # two linear forms meeting exactly in pt
        lead = next(i for i, c in enumerate(pt) if c)
        forms = []
        for i in range(3):
            if i == lead:
                continue
            terms = {tuple(1 if k == i else 0 for k in range(3)): 1}
            lt = tuple(1 if k == lead else 0 for k in range(3))
            if pt[i]:
                terms[lt] = ctx.neg(pt[i])
            forms.append(Form.from_terms(ctx, 3, 1, terms))
        cuts.append(forms)
    for choice in product(*cuts):
        h = choice[0]
        for L in choice[1:]:
            h = h * L
        if not unit_after_localizing(I, h):
            return False
    return True


def plane_singular_scan(F: Form, max_degree: int | None = None,
                        max_field_size: int = 4096) -> list[SingularPoint]:
    """Singular points of the plane curve ``F = 0`` over F_{q^e} for ``e <= max_degree``.

    Each point is listed once (over its field of definition, with Galois
    conjugates collapsed to the least representative). The scan stops early
    once a Groebner certificate shows no further singular points exist.
    """
    if F.n != 3 or F.is_zero():
        raise ValueError("expected a nonzero form in three variables")
    base = F.ctx
    cap = max_degree if max_degree is not None else F.d**2
    out: list[SingularPoint] = []
    seen: set = set()
    rational: list[tuple[int, ...]] = []
    for e in range(1, cap + 1):
        if base.q**e > max_field_size:
            break
        field = base.extension(e)
        pts = _scan_field(F, field)
        fresh = [tuple(r) for r in pts.tolist()]
        fresh = [r for r in fresh if field_of_definition(r, base, field) == e]
        if fresh:
            for orb in galois_orbits(np.array(fresh), base.q, field):
                rep = min(orb)
                if (e, rep) in seen:
                    continue
                seen.add((e, rep))
                m, shape = local_multiplicity(F, rep, field)
                out.append(SingularPoint(ProjectivePoint(field, rep), e, m, shape))
                if e == 1:
                    rational.append(rep)
        only_rational = all(s.degree == 1 for s in out)
        if only_rational and _certified_complete(F, rational):
            break
    return out


def plane_curve_genus(d: int, delta: int = 0) -> int:
    """Arithmetic genus minus the delta invariant (supplied by the caller)."""
    return (d - 1) * (d - 2) // 2 - delta


# -- bounds ------------------------------------------------------------------------------

def prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    for p in range(2, math.isqrt(q) + 1):
        if q % p == 0:
            a, r = 0, q
            while r % p == 0:
                r //= p
                a += 1
            if r != 1:
                raise FieldError(f"{q} is not a prime power")
            return p, a
    return q, 1


def weil_interval(q: int, g: int) -> tuple[int, int]:
    """``q + 1 -+ floor(2 g sqrt(q))``."""
    prime_power(q)
    if g < 0:
        raise ValueError("negative genus")
    w = math.isqrt(4 * g * g * q)
    return q + 1 - w, q + 1 + w


def gonality_point_bound(gamma: int, q: int) -> int:
    prime_power(q)
    if gamma < 1:
        raise ValueError("gonality must be positive")
    return gamma * (q + 1)


def serre_nq1(q: int, min_exponent: int = 5) -> int:
    """Maximum number of points on an elliptic curve over F_q.

    ``q + 1 + m`` with ``m = floor(2 sqrt q)``, except ``q + m`` when
    ``q = p^a`` with ``a`` odd, ``a >= min_exponent`` and ``p | m``.
    """
    p, a = prime_power(q)
    m = math.isqrt(4 * q)
    if a % 2 == 1 and a >= min_exponent and m % p == 0:
        return q + m
    return q + 1 + m


def cubic_extension_margin_holds(q: int) -> bool:
    """``(q^{3/2} - 5)^2 - 24 >= 14``, decided in integers."""
    prime_power(q)
    c = q**3
    return c > 13 and (c - 13) ** 2 >= 100 * c
