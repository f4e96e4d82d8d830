import json

import numpy as np
import pytest

from curveforge.ff import make_field
from curveforge.geometry import projective_points
from curveforge.ideals import Ideal, is_smooth_curve
from curveforge.poly import Form, deserialize, evaluate, monomial_values, parse_form
from curveforge.quadform import classify
from curveforge.search import (BitTable, ConsistencyError, Gonality6, LinearEvaluator, PointTarget,
                               SearchReport, SieveConfig, campaign_hash, certify_triple,
                               cubics_from_report, decode_A, decode_forms, direct_sieve_check,
                               enumerate_A, genus4_dedupe_certify, genus4_maxpoints, genus4_quadric,
                               genus4_sieve, genus5_quadric, make_shards, normalized_count,
                               normalized_index, normalized_ranges, parse_mode, read_checkpoint,
                               run_sharded, sieve_points, singular_point_search, span_types,
                               write_checkpoint)

F2, F3, F4 = make_field(2), make_field(3), make_field(2, 2)


@pytest.fixture(scope="module")
def f2_sieve():
    return genus4_sieve(SieveConfig.standard(2))


@pytest.mark.parametrize("q,size", [(2, 16_384), (3, 9_565_938), (4, 805_306_368)])
def test_sieve_space_size(q, size):
    assert SieveConfig.standard(q).size == size


def test_decode_A_is_in_constrained_space():
    cfg = SieveConfig.standard(3)
    rng = np.random.default_rng(0)
    coeffs = decode_A(cfg, rng.integers(0, cfg.size, 500))
    assert (coeffs[:, 0] == 1).all()
    assert (coeffs[:, 10] != 0).all()
    assert not coeffs[:, [1, 4, 16, 19]].any()


def test_enumerate_A_is_bijective_for_f2():
    rows = np.concatenate(list(enumerate_A(2, chunk=5000)))
    assert len(rows) == 16_384
    assert len({r.tobytes() for r in rows}) == 16_384


def test_f2_sieve_survivors(f2_sieve):
    assert f2_sieve.counts["survivors"] == 104
    cfg = SieveConfig.standard(2)
    K, reps = sieve_points(cfg)
    for s in f2_sieve.survivors:
        assert direct_sieve_check(cfg, deserialize(s), reps)


def test_sieve_rejects_cubics_through_a_point():
    cfg = SieveConfig.standard(2)
    K, reps = sieve_points(cfg)
    survivors = set(genus4_sieve(cfg).survivors)
    for row in decode_A(cfg, np.arange(0, cfg.size, 97)):
        F = Form(F2, 4, 3, tuple(row.tolist()))
        assert (F.serialize() in survivors) == direct_sieve_check(cfg, F, reps)


def test_f2_dedupe(f2_sieve):
    res = genus4_dedupe_certify(cubics_from_report(f2_sieve), genus4_quadric(2))
    assert len(res.smooth) == 1
    assert sum(res.orbit_sizes) == 104
    assert res.report.counts["orbits"] == len(res.orbit_sizes)


def test_singular_point_search_agrees_on_a_cone():
    Q = genus4_quadric(3)
    F = parse_form("x^3", F3, 4) + parse_form("y^3", F3, 4)
    found = singular_point_search(Q, F, 2)
    smooth = is_smooth_curve(Ideal([Q, F]))
    assert (found is None) == smooth


def test_maxpoints_fifteen():
    rep = genus4_maxpoints(15)
    assert rep.counts["subsets"] == 136
    assert rep.counts["smooth"] == 0
    assert rep.counts["kernel dimensions"] == {1: 136}


def test_maxpoints_seventeen_kernel_matches_rank():
    rep = genus4_maxpoints(17)
    assert rep.counts["subsets"] == 1
    assert rep.counts["kernel dimensions"] == {0: 1}


# -- shards and checkpoints --------------------------------------------------------------

def test_make_shards_cover():
    shards = make_shards("c", 103, 7)
    assert shards[0].start == 0 and shards[-1].end == 103
    assert all(a.end == b.start for a, b in zip(shards, shards[1:]))
    with pytest.raises(ValueError):
        make_shards("c", 10, 0)


def test_sharded_equals_unsharded(f2_sieve):
    cfg = SieveConfig.standard(2)
    sharded = genus4_sieve(cfg, shards=4)
    assert sharded.survivors == f2_sieve.survivors
    assert sharded.digest == f2_sieve.digest
    parts = [genus4_sieve(cfg, shards=4, only=[i]).survivors for i in range(4)]
    assert sum(parts, []) == f2_sieve.survivors


def test_resume_after_failure(tmp_path):
    params = {"campaign": "toy"}
    state = {"fail": True}

    def flaky(start, end):
        if start >= 50 and state["fail"]:
            raise RuntimeError("killed")
        return [str(i) for i in range(start, end) if i % 7 == 0]

    with pytest.raises(RuntimeError):
        run_sharded(params, 100, flaky, shards=4, checkpoint=tmp_path)
    state["fail"] = False
    rep = run_sharded(params, 100, flaky, shards=4, checkpoint=tmp_path)
    assert [s["status"] for s in rep.shards] == ["resumed", "resumed", "done", "done"]
    clean = run_sharded(params, 100, lambda a, b: [str(i) for i in range(a, b) if i % 7 == 0], shards=4)
    assert rep.survivors == clean.survivors and rep.digest == clean.digest


def test_checkpoint_validation(tmp_path):
    params = {"campaign": "toy"}
    chash = campaign_hash(params)
    sh = make_shards(chash, 10, 2)[0]
    path = write_checkpoint(tmp_path, chash, 0, sh, ["a"])
    assert read_checkpoint(tmp_path, chash, 0)["survivors"] == ["a"]
    data = json.loads(path.read_text())
    data["survivors"] = ["b"]
    path.write_text(json.dumps(data))
    with pytest.raises(ConsistencyError):
        read_checkpoint(tmp_path, chash, 0)
    write_checkpoint(tmp_path, chash, 0, sh, ["a"])
    with pytest.raises(ConsistencyError):
        run_sharded(params, 12, lambda a, b: [], shards=2, checkpoint=tmp_path)


def test_report_text():
    rep = SearchReport({"campaign": "x"}, ["s1"], {"survivors": 1})
    text = rep.to_text()
    assert "digest" in text and text.endswith("s1")
    assert rep.summary()["counts"] == {"survivors": 1}


# -- helpers used by the genus-5 search ---------------------------------------------------

def test_normalized_index_ranges():
    q, N = 3, 4
    ranges = normalized_ranges(q, N)
    assert sum(b - a for a, b in ranges) == normalized_count(q, N) == 40
    idx = [normalized_index(k, q, N) for k in range(40)]
    digits = decode_forms(F3, np.array(idx), N)
    for row in digits.tolist():
        assert next(c for c in row if c) == 1
    with pytest.raises(IndexError):
        normalized_index(40, q, N)


def test_linear_evaluator_matches_evaluate():
    rng = np.random.default_rng(5)
    for base, K in ((F2, F4), (F4, make_field(2, 4)), (F3, make_field(3, 2))):
        pts = projective_points(4, K)[rng.integers(0, 40, 12)]
        ev = LinearEvaluator(base, K, monomial_values(pts, 2, K))
        coeffs = rng.integers(0, base.q, size=(30, 15))
        mask = ev.zero_mask(ev.digits_of(coeffs))
        for r, c in enumerate(coeffs):
            F = Form(base, 5, 2, tuple(c.tolist()))
            want = [evaluate(F, p, K) == 0 for p in pts.tolist()]
            assert mask[r].tolist() == want


def test_bit_table_packed_and_plain():
    for size in (1000, (1 << 28) + 8):
        t = BitTable(size)
        t.set(np.array([3, 999]))
        assert t.get(np.array([3, 4, 999])).tolist() == [True, False, True]


def test_parse_mode():
    assert parse_mode("points=3") == PointTarget(3)
    assert parse_mode("points>=4") == PointTarget(4, True)
    assert parse_mode("points:2") == PointTarget(2)
    assert parse_mode("points=5+") == PointTarget(5, True)
    assert parse_mode("gonality6") == Gonality6()
    assert str(PointTarget(4, True)) == "points>=4"
    with pytest.raises(ValueError):
        parse_mode("gonality7")


def test_quadric_types():
    for q in (2, 3, 4):
        assert classify(genus5_quadric(q, "III")).label == "III"
        assert classify(genus5_quadric(q, "IV")).label == "IV"
        assert classify(genus4_quadric(q)).label == "nonsplit-rank-4"


def test_certify_example_triple():
    Q1, Q2, Q3 = (parse_form(s, F3, 5) for s in
                  ("v*w + x*y + z^2", "x^2 + w*y + v*z - x*z", "v*w - w*x + v*y + x*y + v*z + x*z + y*z"))
    assert certify_triple(Q1, Q2, Q3) == (True, "smooth")
    assert set(span_types(Q1, Q2, Q3)) <= {"III", "IV"}
    assert certify_triple(Q1, Q2, Q1 + Q2)[0] is False
