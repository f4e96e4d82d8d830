"""Property suites: field axioms, orthogonal groups, evaluation, smoothness oracles, sharding."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curveforge.ff import MAX_FIELD_SIZE, make_field
from curveforge.ideals import Ideal, is_smooth_curve, projective_dimension
from curveforge.poly import Form, dot, eval_vector, evaluate, monomials, num_monomials
from curveforge.quadform import check_group_axioms, orthogonal_group, orthogonal_group_naive
from curveforge.search import (PointTarget, Gonality6, SieveConfig, cubics_from_report,
                               genus4_sieve, genus5_campaign, genus5_quadric, precomputed,
                               prepare_genus5, singular_point_search)

ALL_FIELDS = [(p, k) for p in (2, 3) for k in range(1, 13) if p**k <= MAX_FIELD_SIZE]


# -- field axioms, exhaustive --------------------------------------------------------------

def _times_t(ctx, a):
    """Digits of t*a reduced by the modulus, computed from the digits alone."""
    p, k, mod = ctx.p, ctx.k, ctx.modulus
    d = ctx.digits[a]
    top = d[:, -1]
    out = np.zeros_like(d)
    out[:, 1:] = d[:, :-1]
    for i in range(k):
        out[:, i] = (out[:, i] - top * mod[i]) % p
    return out @ (p ** np.arange(k))


@pytest.mark.parametrize("p,k", ALL_FIELDS, ids=[f"F{p}^{k}" for p, k in ALL_FIELDS])
def test_field_axioms_exhaustive(p, k):
    ctx = make_field(p, k)
    q = ctx.q
    add, mul, neg, inv = (ctx.add_table.astype(np.int64), ctx.mul_table.astype(np.int64),
                          ctx.neg_table.astype(np.int64), ctx.inv_table.astype(np.int64))
    el = np.arange(q)
    weights = p ** np.arange(k)
    d = ctx.digits
    # addition is coordinatewise mod p: an abelian group of exponent p
    for s in range(0, q, 512):
        block = ((d[s:s + 512, None, :] + d[None, :, :]) % p) @ weights
        assert np.array_equal(add[s:s + 512], block)
    assert np.array_equal(add, add.T)
    assert np.array_equal(add[0], el)
    assert not add[el, neg].any()
    # multiplication: commutative, 1 is neutral, inverses exist, 0 absorbs
    assert np.array_equal(mul, mul.T)
    assert np.array_equal(mul[1], el)
    assert not mul[0].any()
    assert (mul[el[1:], inv[1:]] == 1).all()
    # the unit group is cyclic: mul agrees with exp/log, and exp is a bijection onto the units
    exp, log = ctx.exp_table.astype(np.int64), ctx.log_table.astype(np.int64)
    assert sorted(exp.tolist()) == list(range(1, q))
    assert np.array_equal(exp[log[1:]], el[1:])
    for s in range(1, q, 512):
        rows = el[s:s + 512]
        assert np.array_equal(mul[rows][:, 1:], exp[(log[rows][:, None] + log[None, 1:]) % (q - 1)])
    # multiplication by t is the companion map of the modulus
    if k > 1:
        t = p
        assert np.array_equal(mul[t], _times_t(ctx, el))
    # distributivity: each row of mul is additive (checked against generators of (F, +))
    gens = p ** np.arange(k)
    for g in gens:
        lhs = mul[:, add[g]]  # a * (g + c)
        rhs = add[mul[:, g][:, None], mul]  # a*g + a*c
        assert np.array_equal(lhs, rhs)
    # associativity of +: exhaustive for small fields, otherwise implied by the digit description
    if q <= 81:
        a, b, c = np.meshgrid(el, el, el, indexing="ij")
        assert np.array_equal(add[add[a, b], c], add[a, add[b, c]])
        assert np.array_equal(mul[mul[a, b], c], mul[a, mul[b, c]])


# -- orthogonal groups vs the naive GL scan ----------------------------------------------------

@st.composite
def small_quadratic_forms(draw):
    q = draw(st.sampled_from([2, 3]))
    n = draw(st.integers(1, 3))
    ctx = make_field(q)
    N = num_monomials(n, 2)
    coeffs = draw(st.lists(st.integers(0, q - 1), min_size=N, max_size=N).filter(any))
    return Form(ctx, n, 2, tuple(coeffs))


@settings(max_examples=60)
@given(small_quadratic_forms())
def test_orthogonal_group_matches_naive_gl(Q):
    G = orthogonal_group(Q)
    naive = orthogonal_group_naive(Q)
    key = lambda H: sorted(m.tobytes() for m in H.matrices.astype(np.int8))
    assert key(G) == key(naive)
    assert check_group_axioms(G)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("q", [2, 3])
def test_orthogonal_group_standard_forms(n, q):
    ctx = make_field(q)
    terms = {tuple(2 if j == i else 0 for j in range(n)): 1 for i in range(n)}
    Q = Form.from_terms(ctx, n, 2, terms)
    G = orthogonal_group(Q)
    assert G.order == orthogonal_group_naive(Q).order
    assert check_group_axioms(G)


# -- dot product vs evaluation --------------------------------------------------------------------

def _naive_value(ctx, F, P):
    acc = 0
    for exps, c in zip(monomials(F.n, F.d), F.coeffs):
        term = c
        for x, e in zip(P, exps):
            term = ctx.mul(term, ctx.power(x, e))
        acc = ctx.add(acc, term)
    return acc


def test_dot_evaluate_thousand_pairs():
    rng = np.random.default_rng(2024)
    fields = [make_field(2), make_field(3), make_field(2, 2), make_field(3, 2), make_field(2, 4)]
    for _ in range(1000):
        ctx = fields[rng.integers(len(fields))]
        n, d = int(rng.integers(2, 6)), int(rng.integers(1, 4))
        F = Form(ctx, n, d, tuple(rng.integers(0, ctx.q, num_monomials(n, d)).tolist()))
        P = rng.integers(0, ctx.q, n).tolist()
        v = dot(ctx, F.array(), eval_vector(P, n, d, ctx))
        assert v == evaluate(F, P) == _naive_value(ctx, F, P)


@given(st.data())
def test_evaluate_is_homogeneous(data):
    ctx = make_field(3, 2)
    n, d = 4, data.draw(st.integers(1, 3))
    coeffs = data.draw(st.lists(st.integers(0, 8), min_size=num_monomials(n, d), max_size=num_monomials(n, d)))
    P = data.draw(st.lists(st.integers(0, 8), min_size=n, max_size=n))
    lam = data.draw(st.integers(1, 8))
    F = Form(ctx, n, d, tuple(coeffs))
    scaled = [ctx.mul(lam, x) for x in P]
    assert evaluate(F, scaled) == ctx.mul(ctx.power(lam, d), evaluate(F, P))


# -- Groebner verdicts vs singular-point search ---------------------------------------------------

def _agree(cfg, cubics):
    disagreements = []
    for F in cubics:
        I = Ideal([cfg.Q, F])
        assert projective_dimension(I) == 1
        smooth = is_smooth_curve(I)
        if smooth != (singular_point_search(cfg.Q, F) is None):
            disagreements.append(F.serialize())
    return disagreements


def test_groebner_vs_point_oracle_all_f2():
    cfg = SieveConfig.standard(2)
    cubics = cubics_from_report(genus4_sieve(cfg))
    assert len(cubics) == 104
    assert _agree(cfg, cubics) == []


def test_groebner_vs_point_oracle_200_f3():
    cfg = SieveConfig.standard(3)
    cubics = cubics_from_report(genus4_sieve(cfg))
    rng = np.random.default_rng(7)
    pick = [cubics[i] for i in rng.choice(len(cubics), 200, replace=False)]
    assert _agree(cfg, pick) == []


# -- sharding ----------------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def f2_unsharded():
    return genus4_sieve(SieveConfig.standard(2))


@settings(max_examples=25)
@given(st.integers(1, 40), st.data())
def test_shard_union_equals_unsharded(f2_unsharded, shards, data):
    cfg = SieveConfig.standard(2)
    merged = genus4_sieve(cfg, shards=shards)
    assert merged.survivors == f2_unsharded.survivors
    assert merged.digest == f2_unsharded.digest
    subset = data.draw(st.sets(st.integers(0, shards - 1)))
    partial = genus4_sieve(cfg, shards=shards, only=sorted(subset))
    assert set(partial.survivors) <= set(f2_unsharded.survivors)


# -- genus-5 stage counts ---------------------------------------------------------------------------

@pytest.mark.parametrize("kind", ["III", "IV"])
def test_stage_counts_are_monotone(cache_dir, kind):
    Q1 = genus5_quadric(2, kind)
    B, A = precomputed(Q1, cache_dir)
    modes = [PointTarget(i) for i in range(4)] + [PointTarget(4, True), Gonality6()]
    reports = genus5_campaign(prepare_genus5(Q1, A, B), modes)
    stages = ["pairs", "point filter", "span filter", "distinct nets", "prescreen survivors", "smooth"]
    for rep in reports.values():
        vals = [rep.counts[s] for s in stages]
        assert vals == sorted(vals, reverse=True), rep.counts
        assert rep.counts["smooth"] == len(rep.survivors)
