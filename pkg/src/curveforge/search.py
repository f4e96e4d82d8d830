"""Search campaigns for genus-4 and genus-5 curves of large gonality.

Every campaign enumerates a fixed, lexicographically ordered index space, so
results are reproducible and shards (index ranges) can be run separately,
checkpointed, and merged.
"""

from __future__ import annotations

import functools
import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, field, asdict
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .ff import FieldCtx, embedding, field_of_size
from .geometry import galois_orbit_reps, normalize_array, points_on_array, projective_points
from .ideals import Ideal, is_smooth_curve, projective_dimension
from .linalg import MatrixFq, batch_rank, kernel
from .poly import (Form, KILLED_CUBIC_MONOMIALS, monomial_index, monomial_values,
                   monomials, num_monomials, parse_form, reduce_cubic_batch, substitute_batch)
from .quadform import orthogonal_group, type_label

log = logging.getLogger(__name__)

GENUS4_QUADRICS = {
    2: "x*y+z^2+z*w+w^2",
    3: "x*y+z^2+w^2",
    4: "x*y+z^2+t*z*w+w^2",
}

GENUS5_QUADRICS = {
    (2, "III"): "v*w+x^2+x*y+y^2",
    (2, "IV"): "v*w+x*y+z^2",
    (3, "III"): "v*w+x^2+y^2",
    (3, "IV"): "v*w+x*y+z^2",
    (4, "III"): "v*w+x^2+t*x*y+y^2",
    (4, "IV"): "v*w+x*y+z^2",
}


def genus4_quadric(q: int) -> Form:
    return parse_form(GENUS4_QUADRICS[q], field_of_size(q), n=4)


def genus5_quadric(q: int, kind: str) -> Form:
    return parse_form(GENUS5_QUADRICS[(q, kind)], field_of_size(q), n=5)


class SearchError(RuntimeError):
    pass


class ConsistencyError(SearchError):
    pass


# -- reports, shards, checkpoints ------------------------------------------------------

def _digest(lines: Iterable[str]) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode())
        h.update(b"\n")
    return h.hexdigest()


def campaign_hash(params: dict) -> str:
    return _digest([json.dumps(params, sort_keys=True)])[:16]


@dataclass
class Shard:
    campaign: str
    start: int
    end: int
    status: str = "pending"
    digest: str | None = None


def make_shards(campaign: str, total: int, count: int) -> list[Shard]:
    """Split ``[0, total)`` into ``count`` contiguous, nearly equal ranges."""
    if count < 1:
        raise ValueError("need at least one shard")
    bounds = [total * i // count for i in range(count + 1)]
    return [Shard(campaign, bounds[i], bounds[i + 1]) for i in range(count)]


@dataclass
class SearchReport:
    params: dict
    survivors: list[str] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    wall_time: float = 0.0
    shards: list[dict] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def digest(self) -> str:
        return _digest([campaign_hash(self.params)] + self.survivors)

    def summary(self) -> dict:
        return {"params": self.params, "counts": self.counts, "digest": self.digest,
                "wall_time": round(self.wall_time, 3), "shards": len(self.shards)}

    def to_text(self) -> str:
        lines = [f"campaign {json.dumps(self.params, sort_keys=True)}"]
        for k, v in self.counts.items():
            lines.append(f"  {k:<28} {v}")
        lines.append(f"  {'digest':<28} {self.digest}")
        lines.append(f"  {'wall time (s)':<28} {self.wall_time:.2f}")
        lines.extend(self.survivors)
        return "\n".join(lines)


def _shard_path(directory: Path, chash: str, index: int) -> Path:
    return directory / f"{chash}-{index:05d}.json"


def write_checkpoint(directory: str | os.PathLike, chash: str, index: int, shard: Shard,
                     survivors: list[str]) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    payload = {"campaign": chash, "index": index, "start": shard.start, "end": shard.end,
               "survivors": survivors,
               "digest": _digest([chash, str(shard.start), str(shard.end)] + survivors)}
    path = _shard_path(d, chash, index)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload))
    tmp.replace(path)
    return path


def read_checkpoint(directory: str | os.PathLike, chash: str, index: int) -> dict | None:
    path = _shard_path(Path(directory), chash, index)
    if not path.exists():
        return None
    payload = json.loads(path.read_text())
    if payload.get("campaign") != chash:
        raise ConsistencyError(f"checkpoint {path} belongs to another campaign")
    want = _digest([chash, str(payload["start"]), str(payload["end"])] + payload["survivors"])
    if want != payload["digest"]:
        raise ConsistencyError(f"checkpoint {path} is corrupt")
    return payload


def run_sharded(params: dict, total: int, worker: Callable[[int, int], list[str]],
                shards: int = 1, only: Sequence[int] | None = None,
                checkpoint: str | os.PathLike | None = None) -> SearchReport:
    """Run ``worker(start, end)`` over shards, resuming from checkpoints.

    ``only`` restricts the run to some shard indices (a partial report);
    otherwise the merged report covers the whole index space.
    """
    chash = campaign_hash(params)
    t0 = time.time()
    report = SearchReport(dict(params))
    plan = make_shards(chash, total, shards)
    for i, sh in enumerate(plan):
        if only is not None and i not in only:
            continue
        survivors = None
        if checkpoint is not None:
            saved = read_checkpoint(checkpoint, chash, i)
            if saved is not None:
                if (saved["start"], saved["end"]) != (sh.start, sh.end):
                    raise ConsistencyError("checkpoint range does not match the shard plan")
                survivors = saved["survivors"]
                sh.status = "resumed"
        if survivors is None:
            survivors = worker(sh.start, sh.end)
            sh.status = "done"
            if checkpoint is not None:
                write_checkpoint(checkpoint, chash, i, sh, survivors)
        sh.digest = _digest([chash, str(sh.start), str(sh.end)] + survivors)
        report.survivors.extend(survivors)
        report.shards.append(asdict(sh))
    report.counts["survivors"] = len(report.survivors)
    report.wall_time = time.time() - t0
    return report


# -- genus 4: the cubic sieve ------------------------------------------------------------

_H_COORDS = (2, 3, 5, 6, 7, 8, 9)
_L_COORDS = (10, 11, 12, 13, 14, 15, 17, 18)  # y^3 first; it must be nonzero


@dataclass(frozen=True)
class SieveConfig:
    """Cubics ``F`` with ``V(F) ∩ V(Q)`` avoiding every point over ``F_{q^ext}``.

    The coefficient space is the set ``A``: ``x^3`` coefficient 1, ``y^3``
    nonzero, ``x^2y = xy^2 = z^3 = w^3 = 0``.
    """

    q: int
    Q: Form
    ext: int = 2

    @classmethod
    def standard(cls, q: int) -> "SieveConfig":
        return cls(q, genus4_quadric(q))

    @property
    def ctx(self) -> FieldCtx:
        return self.Q.ctx

    @property
    def h_size(self) -> int:
        return self.q ** len(_H_COORDS)

    @property
    def l_size(self) -> int:
        return (self.q - 1) * self.q ** (len(_L_COORDS) - 1)

    @property
    def size(self) -> int:
        return self.h_size * self.l_size

    def params(self) -> dict:
        return {"campaign": "genus4-sieve", "q": self.q, "Q": str(self.Q), "ext": self.ext}


def _base_q_digits(idx: np.ndarray, q: int, width: int) -> np.ndarray:
    idx = np.array(idx, dtype=np.int64, copy=True)
    out = np.zeros((len(idx), width), dtype=np.int64)
    for pos in range(width - 1, -1, -1):
        out[:, pos] = idx % q
        idx //= q
    return out


def _h_digits(cfg: SieveConfig, h: np.ndarray) -> np.ndarray:
    return _base_q_digits(h, cfg.q, len(_H_COORDS))


def _l_digits(cfg: SieveConfig, l: np.ndarray) -> np.ndarray:
    q = cfg.q
    rest = q ** (len(_L_COORDS) - 1)
    l = np.asarray(l, dtype=np.int64)
    out = np.zeros((len(l), len(_L_COORDS)), dtype=np.int64)
    out[:, 0] = l // rest + 1
    out[:, 1:] = _base_q_digits(l % rest, q, len(_L_COORDS) - 1)
    return out


def decode_A(cfg: SieveConfig, flat: Sequence[int] | np.ndarray) -> np.ndarray:
    """Coefficient vectors (20 entries) for flat indices into ``A``."""
    flat = np.asarray(flat, dtype=np.int64)
    out = np.zeros((len(flat), 20), dtype=np.int64)
    out[:, 0] = 1
    out[:, list(_H_COORDS)] = _h_digits(cfg, flat // cfg.l_size)
    out[:, list(_L_COORDS)] = _l_digits(cfg, flat % cfg.l_size)
    return out


def enumerate_A(q: int, start: int = 0, stop: int | None = None, chunk: int = 1 << 16):
    """Coefficient vectors of ``A`` in lexicographic order, in blocks."""
    cfg = SieveConfig.standard(q)
    stop = cfg.size if stop is None else stop
    for s in range(start, stop, chunk):
        yield decode_A(cfg, np.arange(s, min(stop, s + chunk)))


def sieve_points(cfg: SieveConfig) -> tuple[FieldCtx, np.ndarray]:
    """Frobenius-orbit representatives of ``V(Q)(F_{q^ext})``."""
    K = cfg.ctx.extension(cfg.ext)
    pts = points_on_array([cfg.Q], K)
    reps = np.array(galois_orbit_reps(pts, cfg.q, K), dtype=np.int64)
    return K, reps


def _partial_values(cfg: SieveConfig, K: FieldCtx, evals: np.ndarray, coords, digits: np.ndarray) -> np.ndarray:
    emb = np.asarray(embedding(cfg.ctx, K))
    acc = np.zeros((len(digits), evals.shape[0]), dtype=np.int64)
    for j, c in enumerate(coords):
        acc = K.add_table[acc, K.mul_table[emb[digits[:, j]][:, None], evals[None, :, c]]]
    return acc


def _pack_nibbles(vals: np.ndarray, pad: int) -> np.ndarray:
    """Pack rows of nibble values, 16 per uint64 word."""
    rows, cols = vals.shape
    words = -(-cols // 16)
    padded = np.full((rows, words * 16), pad, dtype=np.uint64)
    padded[:, :cols] = vals
    padded = padded.reshape(rows, words, 16)
    shifts = (np.arange(16, dtype=np.uint64) * np.uint64(4))
    return np.bitwise_or.reduce(padded << shifts, axis=2)


_ONES = np.uint64(0x1111111111111111)
_HIGHS = np.uint64(0x8888888888888888)


def _no_zero_nibble(x: np.ndarray) -> np.ndarray:
    return ((x - _ONES) & ~x & _HIGHS) == 0


@dataclass
class SieveTables:
    K: FieldCtx
    reps: np.ndarray
    hw: np.ndarray
    tw: np.ndarray


def sieve_tables(cfg: SieveConfig) -> SieveTables:
    K, reps = sieve_points(cfg)
    if K.q > 16:
        raise SearchError("nibble packing needs an extension field of size <= 16")
    evals = monomial_values(reps, 3, K)
    H = _partial_values(cfg, K, evals, _H_COORDS, _h_digits(cfg, np.arange(cfg.h_size)))
    L = _partial_values(cfg, K, evals, _L_COORDS, _l_digits(cfg, np.arange(cfg.l_size)))
    # F(P) = x3(P) + H(P) + L(P) vanishes iff H(P) = -(x3(P) + L(P))
    T = K.neg_table[K.add_table[evals[None, :, 0], L]]
    return SieveTables(K, reps, _pack_nibbles(H, 0), _pack_nibbles(T, 1))


def sieve_range(cfg: SieveConfig, start: int, end: int, tables: SieveTables | None = None,
                block: int = 64) -> np.ndarray:
    """Flat indices in ``[start, end)`` whose cubic misses every orbit representative."""
    tables = tables or sieve_tables(cfg)
    hw, tw = tables.hw, tables.tw
    nL = cfg.l_size
    words = hw.shape[1]
    out = []
    h0, h1 = start // nL, -(-end // nL)
    for hb in range(h0, h1, block):
        he = min(h1, hb + block)
        x = hw[hb:he, 0][:, None] ^ tw[None, :, 0]
        hi, li = np.nonzero(_no_zero_nibble(x))
        for w in range(1, words):
            if not len(hi):
                break
            keep = _no_zero_nibble(hw[hb + hi, w] ^ tw[li, w])
            hi, li = hi[keep], li[keep]
        flat = (hb + hi).astype(np.int64) * nL + li
        out.append(flat[(flat >= start) & (flat < end)])
    return np.sort(np.concatenate(out)) if out else np.zeros(0, dtype=np.int64)


def genus4_sieve(cfg: SieveConfig, shards: int = 1, only: Sequence[int] | None = None,
                 checkpoint: str | os.PathLike | None = None) -> SearchReport:
    tables = None

    def worker(start: int, end: int) -> list[str]:
        nonlocal tables
        if tables is None:
            tables = sieve_tables(cfg)
        flat = sieve_range(cfg, start, end, tables)
        coeffs = decode_A(cfg, flat)
        return [Form(cfg.ctx, 4, 3, tuple(c)).serialize() for c in coeffs.tolist()]

    report = run_sharded(cfg.params(), cfg.size, worker, shards, only, checkpoint)
    report.counts["space"] = cfg.size
    if tables is not None:
        report.counts["orbit representatives"] = len(tables.reps)
    return report


def direct_sieve_check(cfg: SieveConfig, F: Form, reps: np.ndarray | None = None) -> bool:
    """Evaluate ``F`` point by point (no dot-product tables)."""
    from .poly import evaluate

    if reps is None:
        K, reps = sieve_points(cfg)
    else:
        K = cfg.ctx.extension(cfg.ext)
    return all(evaluate(F, list(p), K) != 0 for p in np.asarray(reps).tolist())


# -- genus 4: orbit deduplication and certification ---------------------------------------

def _encode(ctx: FieldCtx, coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.int64)
    out = np.zeros(coeffs.shape[:-1], dtype=np.int64)
    for j in range(coeffs.shape[-1]):
        out = out * ctx.q + coeffs[..., j]
    return out


def similitudes(Q: Form) -> list[np.ndarray]:
    """One ``g`` with ``Q(gx) = a Q(x)`` for each nonsquare class ``a``.

    Scalars only realize square multipliers, so these extra cosets are needed
    (odd q) to identify curves ``V(Q, F)`` that are isomorphic but lie in
    different ``O(Q)``-orbits. ``Q`` must be ``xy + R(z, w)``.
    """
    ctx = Q.ctx
    if ctx.p == 2:
        return []
    a, b, c = _split_quadric(Q)
    mul, add = ctx.mul_table, ctx.add_table
    squares = {int(mul[u, u]) for u in range(1, ctx.q)}

    def R(z: int, w: int) -> int:
        return int(add[add[mul[a, mul[z, z]], mul[b, mul[z, w]]], mul[c, mul[w, w]]])

    out = []
    seen = set(squares)
    for lam in range(1, ctx.q):
        if lam in seen:
            continue
        for m in np.ndindex(*(ctx.q,) * 4):
            m00, m01, m10, m11 = m
            # R(M(z,w)) = lam R(z,w) checked on (1,0), (0,1), (1,1)
            if all(R(int(add[mul[m00, z], mul[m01, w]]), int(add[mul[m10, z], mul[m11, w]]))
                   == int(mul[lam, R(z, w)]) for z, w in ((1, 0), (0, 1), (1, 1))):
                if add[mul[m00, m11], ctx.neg_table[mul[m01, m10]]] == 0:
                    continue
                g = np.zeros((4, 4), dtype=np.int64)
                g[0, 0], g[1, 1] = lam, 1
                g[2:, 2:] = [[m00, m01], [m10, m11]]
                out.append(g)
                seen |= {int(mul[lam, s]) for s in squares}
                break
    return out


def isomorphism_group(Q: Form, group: np.ndarray | None = None) -> np.ndarray:
    """``O(Q)`` together with its cosets of nonsquare similitudes."""
    from .linalg import batch_matmul

    if group is None:
        group = orthogonal_group(Q).matrices
    group = np.asarray(group, dtype=np.int64)
    parts = [group] + [batch_matmul(Q.ctx, s[None], group) for s in similitudes(Q)]
    return np.concatenate(parts)


@dataclass
class DedupeResult:
    smooth: list[Form]
    singular_curves: list[Form]
    not_curves: list[Form]
    orbit_sizes: list[int]
    report: SearchReport


def genus4_dedupe_certify(cubics: Sequence[Form], Q: Form, group: np.ndarray | None = None,
                          params: dict | None = None) -> DedupeResult:
    """Pop cubics in order, strike their whole orbit, certify the representative.

    The default group is ``O(Q)`` plus nonsquare similitudes, so that each
    isomorphism class of curves gives exactly one orbit.
    """
    t0 = time.time()
    ctx = Q.ctx
    if group is None:
        group = isomorphism_group(Q)
    group = np.asarray(group, dtype=np.int64)
    codes = _encode(ctx, np.array([F.coeffs for F in cubics], dtype=np.int64)) if cubics else np.zeros(0, np.int64)
    remaining = dict.fromkeys(codes.tolist())
    by_code = {int(c): F for c, F in zip(codes.tolist(), cubics)}
    smooth, singular, other, sizes = [], [], [], []
    while remaining:
        code = next(iter(remaining))
        F = by_code[code]
        images = substitute_batch(ctx, F.array(), group, 4, 3)
        reduced, ok = reduce_cubic_batch(ctx, images, Q)
        if not ok.all():
            raise ConsistencyError("an orbit element left the constrained cubic space")
        orbit = set(_encode(ctx, reduced).tolist())
        missing = [c for c in orbit if c not in remaining]
        if missing:
            raise ConsistencyError(f"{len(missing)} orbit elements of {F} are not sieve survivors")
        for c in orbit:
            del remaining[c]
        sizes.append(len(orbit))
        I = Ideal([Q, F])
        if projective_dimension(I) != 1:
            other.append(F)
        elif is_smooth_curve(I):
            smooth.append(F)
        else:
            singular.append(F)
    if sum(sizes) != len(codes):
        raise ConsistencyError("orbits do not partition the survivors")
    rep = SearchReport(dict(params or {"campaign": "genus4-dedupe", "Q": str(Q)}))
    rep.survivors = [F.serialize() for F in smooth]
    rep.counts = {"input cubics": len(cubics), "orbits": len(sizes), "smooth": len(smooth),
                  "singular curves": len(singular), "not curves": len(other)}
    rep.extra = {"singular": [F.serialize() for F in singular], "orbit_sizes": sizes}
    rep.wall_time = time.time() - t0
    return DedupeResult(smooth, singular, other, sizes, rep)


def cubics_from_report(report: SearchReport) -> list[Form]:
    from .poly import deserialize

    return [deserialize(s) for s in report.survivors]


# -- genus 4: smoothness oracle by point search -------------------------------------------

def _split_quadric(Q: Form) -> tuple[int, int, int]:
    """``(a, b, c)`` with ``Q = xy + a z^2 + b zw + c w^2``, or an error."""
    terms = Q.terms()
    allowed = {(1, 1, 0, 0), (0, 0, 2, 0), (0, 0, 1, 1), (0, 0, 0, 2)}
    if set(terms) - allowed or terms.get((1, 1, 0, 0)) != 1:
        raise ValueError("expected a quadric of the form xy + R(z, w)")
    return terms.get((0, 0, 2, 0), 0), terms.get((0, 0, 1, 1), 0), terms.get((0, 0, 0, 2), 0)


def quadric_points_param(Q: Form, K: FieldCtx) -> np.ndarray:
    """All points of ``V(xy + R(z,w))`` over ``K`` via the parametrization in ``y``."""
    a, b, c = (int(embedding(Q.ctx, K)[v]) for v in _split_quadric(Q))
    add, mul, neg = K.add_table, K.mul_table, K.neg_table
    z, w = np.divmod(np.arange(K.q * K.q, dtype=np.int64), K.q)
    R = add[add[mul[a, mul[z, z]], mul[b, mul[z, w]]], mul[c, mul[w, w]]]
    ones = np.ones_like(z)
    chart1 = np.stack([neg[R], ones, z, w], axis=1)
    # y = 0: R(z, w) = 0 with (z : w) projective, x free
    line = np.array([[1, v] for v in range(K.q)] + [[0, 1]], dtype=np.int64)
    Rl = add[add[mul[a, mul[line[:, 0], line[:, 0]]], mul[b, mul[line[:, 0], line[:, 1]]]],
             mul[c, mul[line[:, 1], line[:, 1]]]]
    roots = line[Rl == 0]
    xs = np.arange(K.q, dtype=np.int64)
    chart0 = [np.array([[1, 0, 0, 0]], dtype=np.int64)]
    for zw in roots:
        block = np.zeros((K.q, 4), dtype=np.int64)
        block[:, 0] = xs
        block[:, 2:] = zw
        chart0.append(block)
    return normalize_array(K, np.concatenate([chart1] + chart0))


@functools.lru_cache(maxsize=8)
def _quadric_cubic_values(Q: Form, d: int) -> tuple[FieldCtx, np.ndarray, np.ndarray]:
    K = Q.ctx.extension(d)
    pts = quadric_points_param(Q, K)
    return K, pts, monomial_values(pts, 3, K)


def singular_point_search(Q: Form, F: Form, max_degree: int = 6) -> tuple[int, list[int]] | None:
    """First singular point of ``V(Q, F)`` over ``F_{q^d}``, ``d <= max_degree``."""
    from .poly import dot, partials

    for d in range(1, max_degree + 1):
        K, pts, mv = _quadric_cubic_values(Q, d)
        emb = np.asarray(embedding(F.ctx, K))
        on = np.asarray(dot(K, emb[F.array()], mv)) == 0
        pts = pts[on]
        if not len(pts):
            continue
        gq = np.stack([dot(K, emb[P.array()], monomial_values(pts, 1, K)) for P in partials(Q)], axis=1)
        gf = np.stack([dot(K, emb[P.array()], monomial_values(pts, 2, K))
                       if not P.is_zero() else np.zeros(len(pts), dtype=np.int64)
                       for P in partials(F)], axis=1)
        sing = np.ones(len(pts), dtype=bool)
        for i in range(4):
            for j in range(i + 1, 4):
                minor = K.sub_table[K.mul_table[gq[:, i], gf[:, j]], K.mul_table[gq[:, j], gf[:, i]]]
                sing &= minor == 0
        if sing.any():
            return d, pts[np.argmax(sing)].tolist()
    return None


# -- genus 4: maximal point counts on the nonsplit quadric -----------------------------

def genus4_maxpoints(n: int, q: int = 4) -> SearchReport:
    """Cubics through ``n`` of the rational points of the genus-4 quadric, checked for smoothness."""
    t0 = time.time()
    Q = genus4_quadric(q)
    ctx = Q.ctx
    pts = points_on_array([Q], ctx)
    index = monomial_index(4, 3)
    killed = {index[m] for m in KILLED_CUBIC_MONOMIALS}
    keep = [j for j in range(20) if j not in killed]
    rows = monomial_values(pts, 3, ctx)[:, keep]
    subsets = smooth = tested = 0
    kdims: dict[int, int] = {}
    survivors = []
    for subset in combinations(range(len(pts)), n):
        subsets += 1
        basis = kernel(MatrixFq(ctx, rows[list(subset)]))
        kdims[len(basis)] = kdims.get(len(basis), 0) + 1
        for combo in _projective_combinations(ctx, len(basis)):
            vec = np.zeros(len(keep), dtype=np.int64)
            for c, b in zip(combo, basis):
                if c:
                    vec = ctx.add_table[vec, ctx.mul_table[c, b]]
            coeffs = np.zeros(20, dtype=np.int64)
            coeffs[keep] = vec
            F = Form(ctx, 4, 3, tuple(coeffs.tolist()))
            tested += 1
            if is_smooth_curve(Ideal([Q, F])):
                smooth += 1
                survivors.append(F.serialize())
    rep = SearchReport({"campaign": "genus4-maxpoints", "q": q, "n": n, "Q": str(Q)}, survivors)
    rep.counts = {"rational points": len(pts), "subsets": subsets, "cubics tested": tested,
                  "smooth": smooth, "kernel dimensions": dict(sorted(kdims.items()))}
    rep.wall_time = time.time() - t0
    return rep


def _projective_combinations(ctx: FieldCtx, k: int):
    """Coefficient tuples of length ``k`` with first nonzero entry 1."""
    if k == 0:
        return
    q = ctx.q
    for lead in range(k):
        for rest in range(q ** (k - lead - 1)):
            tail = _base_q_digits(np.array([rest]), q, k - lead - 1)[0].tolist() if k - lead - 1 else []
            yield (0,) * lead + (1,) + tuple(tail)


# -- linear evaluation of many forms at fixed points ------------------------------------

class LinearEvaluator:
    """Values of ``sum_j c_j f_j(P)`` for many coefficient vectors at once.

    The value is F_p-linear in the F_p-digits of the coefficients, so a batch
    of forms is evaluated by one integer matrix product modulo ``p``.
    ``basis_vals[P, j]`` holds ``f_j(P)`` as indices of ``K``.
    """

    def __init__(self, base: FieldCtx, K: FieldCtx, basis_vals: np.ndarray):
        basis_vals = np.asarray(basis_vals, dtype=np.int64)
        self.base, self.K = base, K
        self.npts, self.N = basis_vals.shape
        emb = np.asarray(embedding(base, K))
        p, k, E = base.p, base.k, K.k
        unit = [int(emb[p**i]) for i in range(k)]
        M = np.zeros((self.N, k, self.npts, E), dtype=np.float32)
        for i, u in enumerate(unit):
            prod = K.mul_table[u, basis_vals]  # (npts, N)
            M[:, i] = K.digits[prod].transpose(1, 0, 2)
        self.M = M.reshape(self.N * k, self.npts * E)
        self.E = E

    def digits_of(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=np.int64)
        return self.base.digits[coeffs].reshape(len(coeffs), -1).astype(np.float32)

    def zero_mask(self, coeff_digits: np.ndarray, cols: slice | None = None) -> np.ndarray:
        """``(rows, points)`` booleans: the form vanishes at the point."""
        M = self.M if cols is None else self.M[:, cols]
        vals = np.fmod(coeff_digits @ M, self.base.p)
        return ~np.any(vals.reshape(len(coeff_digits), -1, self.E) != 0, axis=2)

    def point_cols(self, start: int, stop: int) -> slice:
        return slice(start * self.E, stop * self.E)


def partial_basis_values(n: int, d: int, i: int, pts: np.ndarray, K: FieldCtx) -> np.ndarray:
    """``d m_j / d x_i`` at each point for the degree-``d`` basis monomials."""
    mons = monomials(n, d)
    lower = monomial_values(pts, d - 1, K)
    idx = monomial_index(n, d - 1)
    out = np.zeros((len(pts), len(mons)), dtype=np.int64)
    for j, exps in enumerate(mons):
        e = exps[i]
        if e % K.p == 0:
            continue
        rest = list(exps)
        rest[i] -= 1
        out[:, j] = K.mul_table[e % K.p, lower[:, idx[tuple(rest)]]]
    return out


def decode_forms(ctx: FieldCtx, idx: np.ndarray, N: int) -> np.ndarray:
    return _base_q_digits(np.asarray(idx, dtype=np.int64), ctx.q, N)


def normalized_ranges(q: int, N: int) -> list[tuple[int, int]]:
    """Raw-index ranges of forms whose first nonzero coefficient is 1."""
    out = []
    for lead in range(N):
        size = q ** (N - 1 - lead)
        out.append((size, 2 * size))
    return sorted(out)


def normalized_count(q: int, N: int) -> int:
    return (q**N - 1) // (q - 1)


def normalized_index(k: int, q: int, N: int) -> int:
    """Raw index of the ``k``-th normalized form (increasing raw order)."""
    for lo, hi in normalized_ranges(q, N):
        if k < hi - lo:
            return lo + k
        k -= hi - lo
    raise IndexError(k)


def _normalize_raw(ctx: FieldCtx, digits: np.ndarray) -> np.ndarray:
    nz = digits != 0
    first = np.argmax(nz, axis=1)
    lead = digits[np.arange(len(digits)), first]
    scale = np.where(lead != 0, ctx.inv_table[lead], 0)
    return ctx.mul_table[scale[:, None], digits].astype(np.int64)


# -- genus 5: quadric types, B and A ------------------------------------------------------

class TypeTable:
    """Per-form invariants for all quadratic forms in 5 variables over F_q."""

    def __init__(self, ctx: FieldCtx, n: int = 5):
        self.ctx, self.n = ctx, n
        self.N = num_monomials(n, 2)
        pts = projective_points(n - 1, ctx)
        cols = [monomial_values(pts, 2, ctx)] + [partial_basis_values(n, 2, i, pts, ctx) for i in range(n)]
        self.npts = len(pts)
        self.ev = LinearEvaluator(ctx, ctx, np.concatenate(cols, axis=0))

    def invariants(self, raw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``(singular dimension, point count)`` for raw form indices."""
        q, n, P = self.ctx.q, self.n, self.npts
        digits = self.ev.digits_of(decode_forms(self.ctx, raw, self.N))
        z = self.ev.zero_mask(digits).reshape(len(raw), n + 1, P)
        on = z[:, 0]
        sing = on & z[:, 1:].all(axis=1)
        counts = on.sum(axis=1)
        nsing = sing.sum(axis=1)
        dims = np.full(len(raw), -1, dtype=np.int64)
        for s in range(n):
            dims[nsing == (q ** (s + 1) - 1) // (q - 1)] = s
        return dims, counts


class BitTable:
    """Membership table over raw form indices (bool array, or packed bits when large)."""

    def __init__(self, size: int):
        self.size = size
        self.packed = size > (1 << 28)
        self.data = np.zeros((size + 7) // 8 if self.packed else size, dtype=np.uint8 if self.packed else bool)

    def set(self, idx: np.ndarray) -> None:
        idx = np.asarray(idx, dtype=np.int64)
        if self.packed:
            np.bitwise_or.at(self.data, idx >> 3, (1 << (idx & 7)).astype(np.uint8))
        else:
            self.data[idx] = True

    def get(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        if self.packed:
            return ((self.data[idx >> 3] >> (idx & 7).astype(np.uint8)) & 1).astype(bool)
        return self.data[idx]


@dataclass
class BSet:
    """Quadrics of the same type as ``Q1`` or of type IV."""

    Q1: Form
    label: str
    members: np.ndarray  # normalized raw indices, increasing
    table: BitTable  # every nonzero scalar multiple of a member
    raw_count: int

    def __len__(self) -> int:
        return len(self.members)


def _scalar_multiples(ctx: FieldCtx, raw: np.ndarray, N: int) -> list[np.ndarray]:
    digits = decode_forms(ctx, raw, N)
    return [_encode(ctx, ctx.mul_table[a, digits].astype(np.int64)) for a in range(1, ctx.q)]


def compute_B(Q1: Form, chunk: int = 1 << 15, progress: Callable[[int, int], None] | None = None) -> BSet:
    """All quadrics (forms up to scaling) of type ``type(Q1)`` or IV."""
    ctx, n = Q1.ctx, Q1.n
    if n != 5:
        raise ValueError("B is defined for forms in five variables")
    q = ctx.q
    N = num_monomials(n, 2)
    tt = TypeTable(ctx, n)
    label1 = _type_of(tt, Q1)
    wanted = {label1, "IV"}
    members = []
    key_labels: dict[int, str] = {}
    total = normalized_count(q, N)
    done = 0
    for lo, hi in normalized_ranges(q, N):
        for s in range(lo, hi, chunk):
            raw = np.arange(s, min(hi, s + chunk), dtype=np.int64)
            dims, counts = tt.invariants(raw)
            keys = (dims + 1) * 1_000_000 + counts
            ok = np.zeros(len(raw), dtype=bool)
            for k in np.unique(keys).tolist():
                if k not in key_labels:
                    key_labels[k] = type_label(n, q, k // 1_000_000 - 1, k % 1_000_000)
                if key_labels[k] in wanted:
                    ok |= keys == k
            members.append(raw[ok])
            done += len(raw)
            if progress:
                progress(done, total)
    members_arr = np.sort(np.concatenate(members))
    table = BitTable(q**N)
    for mult in _scalar_multiples(ctx, members_arr, N):
        table.set(mult)
    return BSet(Q1, label1, members_arr, table, len(members_arr) * (q - 1))


def _type_of(tt: TypeTable, Q: Form) -> str:
    raw = _encode(Q.ctx, Q.array()[None])
    dims, counts = tt.invariants(raw)
    return type_label(Q.n, Q.ctx.q, int(dims[0]), int(counts[0]))


def _raw(ctx: FieldCtx, F: Form) -> int:
    return int(_encode(ctx, F.array()[None])[0])


def _combine(ctx: FieldCtx, base: np.ndarray, add: np.ndarray, a: int) -> np.ndarray:
    """Digits of ``base + a * add`` (``add`` broadcast)."""
    return ctx.add_table[base, ctx.mul_table[a, add]].astype(np.int64)


def pencil_keys(ctx: FieldCtx, Q1: Form, digits: np.ndarray) -> np.ndarray:
    """Least normalized raw index among ``Q2 + b Q1`` (all ``b``), per row."""
    q1 = Q1.array()
    best = None
    for b in range(ctx.q):
        comb = _normalize_raw(ctx, _combine(ctx, digits, q1[None], b))
        code = _encode(ctx, comb)
        best = code if best is None else np.minimum(best, code)
    return best


@dataclass
class ASet:
    Q1: Form
    reps: list[Form]
    orbit_sizes: list[int]
    candidates: int


def compute_A(Q1: Form, B: BSet, group: np.ndarray | None = None, chunk: int = 1 << 18) -> ASet:
    """Orbit representatives of pencils ``<Q1, Q2>`` all of whose members lie in B."""
    ctx, n = Q1.ctx, Q1.n
    q = ctx.q
    N = num_monomials(n, 2)
    if group is None:
        group = orthogonal_group(Q1).matrices
    group = np.asarray(group, dtype=np.int64)
    q1 = Q1.array()
    q1_raw = _raw(ctx, Q1)
    cand_chunks, key_chunks = [], []
    for s in range(0, len(B.members), chunk):
        raw = B.members[s:s + chunk]
        raw = raw[raw != q1_raw]
        digits = decode_forms(ctx, raw, N)
        ok = np.ones(len(raw), dtype=bool)
        for b in range(1, q):
            ok &= B.table.get(_encode(ctx, _combine(ctx, digits, q1[None], b)))
        cand_chunks.append(raw[ok])
        key_chunks.append(pencil_keys(ctx, Q1, digits[ok]))
    cands = np.concatenate(cand_chunks)
    keys = np.concatenate(key_chunks)
    order = np.argsort(cands, kind="stable")
    cands, keys = cands[order], keys[order]
    seen: set[int] = set()
    reps, sizes = [], []
    for raw, key in zip(cands.tolist(), keys.tolist()):
        if key in seen:
            continue
        Q2 = Form(ctx, n, 2, tuple(decode_forms(ctx, np.array([key]), N)[0].tolist()))
        images = substitute_batch(ctx, Q2.array(), group, n, 2)
        orbit = set(pencil_keys(ctx, Q1, images).tolist())
        if key not in orbit:
            raise ConsistencyError("pencil key missing from its own orbit")
        seen |= orbit
        reps.append(Q2)
        sizes.append(len(orbit))
    for Q2 in reps:
        if projective_dimension(Ideal([Q1, Q2])) != 2:
            raise ConsistencyError(f"<Q1, {Q2}> does not cut out a surface")
    missing = set(keys.tolist()) - seen
    if missing:
        raise ConsistencyError("candidate pencils outside every swept orbit")
    return ASet(Q1, reps, sizes, len(cands))


# -- genus 5: the search ----------------------------------------------------------------

@dataclass(frozen=True)
class PointTarget:
    n: int
    at_least: bool = False

    def __str__(self) -> str:
        return f"points>={self.n}" if self.at_least else f"points={self.n}"


@dataclass(frozen=True)
class Gonality6:
    def __str__(self) -> str:
        return "gonality6"


def parse_mode(text: str):
    text = text.strip()
    if text == "gonality6":
        return Gonality6()
    if text.startswith("points"):
        body = text[len("points"):].lstrip(":=")
        if body.startswith(">="):
            return PointTarget(int(body[2:]), True)
        if body.endswith("+"):
            return PointTarget(int(body[:-1]), True)
        return PointTarget(int(body))
    raise ValueError(f"unknown mode {text!r}")


@dataclass
class Genus5Context:
    Q1: Form
    A: ASet
    B: BSet
    rational: np.ndarray  # V(Q1)(F_q)
    quadratic: np.ndarray  # V(Q1)(F_{q^2})
    cubic: np.ndarray | None = None  # V(Q1)(F_{q^3})


def prepare_genus5(Q1: Form, A: ASet, B: BSet, need_cubic: bool = False) -> Genus5Context:
    ctx = Q1.ctx
    rational = points_on_array([Q1], ctx)
    quadratic = points_on_array([Q1], ctx.extension(2))
    cubic = points_on_array([Q1], ctx.extension(3)) if need_cubic else None
    return Genus5Context(Q1, A, B, rational, quadratic, cubic)


def _jacobian_singular(forms: Sequence[Form], pts: np.ndarray, K: FieldCtx) -> bool:
    """Whether the Jacobian of ``forms`` drops rank at one of ``pts`` (all on the curve)."""
    from .poly import dot, partials

    if not len(pts):
        return False
    n = forms[0].n
    mats = np.zeros((len(pts), len(forms), n), dtype=np.int64)
    for r, F in enumerate(forms):
        emb = np.asarray(embedding(F.ctx, K))
        for c, P in enumerate(partials(F)):
            if not P.is_zero():
                mats[:, r, c] = dot(K, emb[P.array()], monomial_values(pts, P.d, K))
    return bool(np.any(batch_rank(K, mats) < len(forms)))


def _restrict_points(forms: Sequence[Form], pts: np.ndarray, K: FieldCtx) -> np.ndarray:
    from .geometry import zero_mask

    return pts[zero_mask(list(forms), pts, K)] if len(pts) else pts


def certify_triple(Q1: Form, Q2: Form, Q3: Form, ctxt: Genus5Context | None = None) -> tuple[bool, str]:
    """Smooth genus-5 curve check with a cheap singular-point pre-screen."""
    forms = [Q1, Q2, Q3]
    ctx = Q1.ctx
    if ctxt is not None:
        for pts, K in ((ctxt.rational, ctx), (ctxt.quadratic, ctx.extension(2))):
            on = _restrict_points(forms[1:], pts, K)
            if _jacobian_singular(forms, on, K):
                return False, "singular point found"
    I = Ideal(forms)
    if projective_dimension(I) != 1:
        return False, "not a curve"
    if is_smooth_curve(I):
        return True, "smooth"
    return False, "singular (groebner)"


def span_members_ok(ctx: FieldCtx, B: BSet, q1: np.ndarray, q2: np.ndarray, digits: np.ndarray) -> np.ndarray:
    """Rows ``Q3`` with every ``Q3 + a Q1 + b Q2`` in B."""
    ok = np.ones(len(digits), dtype=bool)
    for a in range(ctx.q):
        base = _combine(ctx, digits, q1[None], a)
        for b in range(ctx.q):
            idx = np.nonzero(ok)[0]
            if not len(idx):
                return ok
            comb = _combine(ctx, base[idx], q2[None], b)
            ok[idx] &= B.table.get(_encode(ctx, comb))
    return ok


def net_keys(ctx: FieldCtx, q1: np.ndarray, q2: np.ndarray, digits: np.ndarray) -> np.ndarray:
    """Least normalized raw index among ``Q3 + a Q1 + b Q2``: identifies the net."""
    best = None
    for a in range(ctx.q):
        base = _combine(ctx, digits, q1[None], a)
        for b in range(ctx.q):
            code = _encode(ctx, _normalize_raw(ctx, _combine(ctx, base, q2[None], b)))
            best = code if best is None else np.minimum(best, code)
    return best


class _ModeState:
    def __init__(self, mode, full: bool, max_certify: int | None):
        self.mode, self.full, self.max_certify = mode, full, max_certify
        self.stages = {"pairs": 0, "point filter": 0, "span filter": 0, "distinct nets": 0,
                       "prescreen survivors": 0, "smooth": 0}
        self.witnesses: list[str] = []
        self.done = False
        self.seen: set[int] = set()

    def keep(self, counts: np.ndarray) -> np.ndarray:
        m = self.mode
        return counts >= m.n if m.at_least else counts == m.n


def _span_pass(ctxt: Genus5Context, Q2: Form, digits: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Rows of ``idx`` whose whole net ``<Q1, Q2, Q3>`` has allowed types."""
    if not len(idx):
        return idx
    return idx[span_members_ok(ctxt.Q1.ctx, ctxt.B, ctxt.Q1.array(), Q2.array(), digits[idx])]


def _process_candidates(st: _ModeState, ctxt: Genus5Context, Q2: Form, digits: np.ndarray,
                        n_points: int, idx: np.ndarray) -> None:
    """Net dedupe and certification for span-filtered rows ``idx`` of ``digits``."""
    Q1 = ctxt.Q1
    ctx, n = Q1.ctx, Q1.n
    st.stages["point filter"] += n_points
    st.stages["span filter"] += len(idx)
    if not len(idx):
        return
    keys = net_keys(ctx, Q1.array(), Q2.array(), digits[idx])
    for i, key in zip(idx.tolist(), keys.tolist()):
        if key in st.seen:
            continue
        st.seen.add(key)
        st.stages["distinct nets"] += 1
        Q3 = Form(ctx, n, 2, tuple(digits[i].tolist()))
        smooth, why = certify_triple(Q1, Q2, Q3, ctxt)
        if why != "singular point found":
            st.stages["prescreen survivors"] += 1
        if smooth:
            st.stages["smooth"] += 1
            st.witnesses.append(" ; ".join(F.serialize() for F in (Q1, Q2, Q3)))
            if not st.full:
                st.done = True
                return
        if st.max_certify is not None and st.stages["distinct nets"] >= st.max_certify:
            st.done = True
            return


def _gonality6_survivors(ev: "LinearEvaluator | None", digits: np.ndarray, step: int = 8) -> np.ndarray:
    """Rows with no zero at any of the evaluator's points (early exit per block of points)."""
    idx = np.arange(len(digits))
    if ev is None:
        return idx
    fd = ev.digits_of(digits)
    for p0 in range(0, ev.npts, step):
        if not len(idx):
            break
        z = ev.zero_mask(fd[idx], ev.point_cols(p0, min(ev.npts, p0 + step)))
        idx = idx[~z.any(axis=1)]
    return idx


def _report(ctxt: Genus5Context, st: _ModeState, t0: float, hist: dict | None) -> SearchReport:
    ctx = ctxt.Q1.ctx
    rep = SearchReport({"campaign": "genus5", "q": ctx.q, "Q1": str(ctxt.Q1), "mode": str(st.mode),
                        "full": st.full}, list(st.witnesses))
    rep.counts = dict(st.stages)
    rep.counts["witness"] = bool(st.witnesses)
    rep.extra = {"exhausted": not (st.witnesses and not st.full) and st.max_certify is None}
    if hist is not None:
        rep.extra["point histogram"] = dict(sorted(hist.items()))
    rep.wall_time = time.time() - t0
    return rep


def genus5_campaign(ctxt: Genus5Context, modes: Sequence, full: bool = False, chunk: int = 1 << 16,
                    max_certify: int | None = None) -> dict:
    """Run several search modes over ``A x B`` sharing the point evaluation.

    For each ``Q2`` in ``A`` (in order) and each chunk of ``B``: filter by the
    point condition, then by the types of the whole net, then deduplicate nets
    and certify smoothness. Witness mode stops a mode at its first smooth net.
    Returns ``{mode: SearchReport}``.
    """
    t0 = time.time()
    Q1, A, B = ctxt.Q1, ctxt.A, ctxt.B
    ctx, n = Q1.ctx, Q1.n
    N = num_monomials(n, 2)
    point_modes = [m for m in modes if isinstance(m, PointTarget)]
    gon_modes = [m for m in modes if isinstance(m, Gonality6)]
    states = {m: _ModeState(m, full, max_certify) for m in modes}
    hist: dict[int, int] = {}
    if gon_modes and ctxt.cubic is None:
        ctxt.cubic = points_on_array([Q1], ctx.extension(3))
    K3 = ctx.extension(3) if gon_modes else None
    for Q2 in A.reps:
        active_pts = [states[m] for m in point_modes if not states[m].done]
        active_gon = [states[m] for m in gon_modes if not states[m].done]
        if not active_pts and not active_gon:
            break
        for st in active_pts + active_gon:
            st.seen = set()
        pts = _restrict_points([Q2], ctxt.rational, ctx)
        ev = LinearEvaluator(ctx, ctx, monomial_values(pts, 2, ctx)) if len(pts) else None
        ev3 = None
        if active_gon:
            p3 = _restrict_points([Q2], ctxt.cubic, K3)
            if len(p3):
                reps = np.array(galois_orbit_reps(p3, ctx.q, K3), dtype=np.int64)
                ev3 = LinearEvaluator(ctx, K3, monomial_values(reps, 2, K3))
        for s in range(0, len(B.members), chunk):
            active_pts = [st for st in active_pts if not st.done]
            active_gon = [st for st in active_gon if not st.done]
            if not active_pts and not active_gon:
                break
            raw = B.members[s:s + chunk]
            digits = decode_forms(ctx, raw, N)
            if active_pts:
                if ev is not None:
                    counts = ev.zero_mask(ev.digits_of(digits)).sum(axis=1)
                else:
                    counts = np.zeros(len(raw), dtype=np.int64)
                for c, k in zip(*np.unique(counts, return_counts=True)):
                    hist[int(c)] = hist.get(int(c), 0) + int(k)
                masks = [st.keep(counts) for st in active_pts]
                passed = np.zeros(len(raw), dtype=bool)
                passed[_span_pass(ctxt, Q2, digits, np.nonzero(np.logical_or.reduce(masks))[0])] = True
                for st, mask in zip(active_pts, masks):
                    st.stages["pairs"] += len(raw)
                    _process_candidates(st, ctxt, Q2, digits, int(mask.sum()), np.nonzero(mask & passed)[0])
            if active_gon:
                idx = _gonality6_survivors(ev3, digits)
                ok = _span_pass(ctxt, Q2, digits, idx)
                for st in active_gon:
                    st.stages["pairs"] += len(raw)
                    _process_candidates(st, ctxt, Q2, digits, len(idx), ok)
    return {m: _report(ctxt, states[m], t0, hist if isinstance(m, PointTarget) else None) for m in modes}


def genus5_search(ctxt: Genus5Context, mode, full: bool = False, chunk: int = 1 << 16,
                  max_certify: int | None = None) -> SearchReport:
    """One mode: ``PointTarget(n)`` (exactly or at least ``n`` points) or ``Gonality6``."""
    return genus5_campaign(ctxt, [mode], full, chunk, max_certify)[mode]


def span_types(Q1: Form, Q2: Form, Q3: Form) -> dict[str, int]:
    """Type labels of every nonzero member of the net, up to scaling."""
    from .quadform import classify

    ctx = Q1.ctx
    out: dict[str, int] = {}
    for combo in _projective_combinations(ctx, 3):
        F = Form.zero(ctx, Q1.n, 2)
        for c, G in zip(combo, (Q1, Q2, Q3)):
            if c:
                F = F + G.scale(c)
        label = "zero" if F.is_zero() else classify(F).label
        out[label] = out.get(label, 0) + 1
    return out


# -- cached precomputation ------------------------------------------------------------------

def bset_from_members(Q1: Form, label: str, members: np.ndarray) -> BSet:
    ctx = Q1.ctx
    N = num_monomials(Q1.n, 2)
    members = np.asarray(members, dtype=np.int64)
    table = BitTable(ctx.q**N)
    for mult in _scalar_multiples(ctx, members, N):
        table.set(mult)
    return BSet(Q1, label, members, table, len(members) * (ctx.q - 1))


def _cache_stem(Q1: Form) -> str:
    return f"q{Q1.ctx.q}-" + hashlib.sha256(Q1.serialize().encode()).hexdigest()[:12]


def precomputed(Q1: Form, cache_dir: str | os.PathLike | None = None,
                progress: Callable[[str], None] | None = None) -> tuple[BSet, ASet]:
    """``B(Q1)`` and ``A(Q1)``, read from or written to ``cache_dir`` when given."""
    say = progress or (lambda msg: None)
    d = Path(cache_dir) if cache_dir is not None else None
    if d is not None:
        stem = _cache_stem(Q1)
        bpath, apath = d / f"{stem}-B.npz", d / f"{stem}-A.json"
        if bpath.exists() and apath.exists():
            data = np.load(bpath, allow_pickle=False)
            if str(data["q1"]) != Q1.serialize():
                raise ConsistencyError(f"cache {bpath} belongs to another form")
            B = bset_from_members(Q1, str(data["label"]), data["members"])
            meta = json.loads(apath.read_text())
            from .poly import deserialize

            A = ASet(Q1, [deserialize(s) for s in meta["reps"]], meta["orbit_sizes"], meta["candidates"])
            say(f"loaded B and A from {d}")
            return B, A
    say("computing B")
    B = compute_B(Q1)
    say(f"B: {len(B)} quadrics; computing A")
    A = compute_A(Q1, B)
    if d is not None:
        d.mkdir(parents=True, exist_ok=True)
        np.savez(bpath, members=B.members, q1=Q1.serialize(), label=B.label)
        apath.write_text(json.dumps({"reps": [F.serialize() for F in A.reps],
                                     "orbit_sizes": A.orbit_sizes, "candidates": A.candidates}))
    return B, A
