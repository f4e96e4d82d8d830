"""Command-line entry point: ``curveforge <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .ff import FieldError, field_of_size
from .poly import ParseError, deserialize, parse_form

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("curveforge")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    q: int | None = None
    quadric: str | None = None
    mode: str | None = None
    shards: int = 1
    shard_index: int | None = None
    checkpoint: str | None = None
    report: str | None = None
    workers: int = 1
    extra: dict = field(default_factory=dict)


def _read_form(text: str, q: int, n: int | None = None):
    ctx = field_of_size(q)
    if os.path.isfile(text):
        with open(text) as fh:
            text = fh.read().strip()
    if text.startswith("q="):
        F = deserialize(text)
        if F.ctx.q != q:
            raise UsageError(f"form is over F_{F.ctx.q}, expected F_{q}")
        return F
    return parse_form(text, ctx, n=n)


def _emit(cfg: RunConfig, record: dict) -> None:
    if cfg.report:
        with open(cfg.report, "a") as fh:
            fh.write(json.dumps({"config": asdict(cfg), **record}, sort_keys=True, default=str) + "\n")


def _checkpoint_dir(args) -> str | None:
    return args.checkpoint or os.environ.get("CURVEFORGE_CHECKPOINT_DIR")


# -- subcommands ----------------------------------------------------------------------------

def cmd_ortho(args, cfg: RunConfig) -> int:
    from .quadform import orthogonal_group

    Q = _read_form(args.form, args.q, args.n)
    G = orthogonal_group(Q)
    print(G.order)
    if args.verbose:
        print(f"tabulated convention: {G.table_order()}")
    _emit(cfg, {"order": G.order, "table_order": G.table_order(), "form": str(Q)})
    if args.expect is not None and args.expect not in (G.order, G.table_order()):
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_classify(args, cfg: RunConfig) -> int:
    from .quadform import classify

    Q = _read_form(args.form, args.q, args.n)
    t = classify(Q)
    print(f"type {t.label}  singular dimension {t.sing_dim}  points {t.point_count}")
    _emit(cfg, {"label": t.label, "sing_dim": t.sing_dim, "points": t.point_count})
    return EXIT_OK


def cmd_count(args, cfg: RunConfig) -> int:
    from .geometry import HyperellipticModel, count_points, hyperelliptic_count

    ctx = field_of_size(args.q)
    field_ = ctx.extension(args.ext) if args.ext > 1 else ctx
    if args.hyperelliptic:
        P, _, Q = args.hyperelliptic.partition(";")
        M = HyperellipticModel.from_strings(ctx, P, Q or "0")
        n = hyperelliptic_count(M, field_, check_smooth=False)
    else:
        if not args.form:
            raise UsageError("give --form (repeatable) or --hyperelliptic")
        forms = [_read_form(f, args.q, args.n) for f in args.form]
        if args.n is None and len({F.n for F in forms}) > 1:
            # put every equation in the largest ambient space
            forms = [_read_form(f, args.q, max(F.n for F in forms)) for f in args.form]
        n = count_points(forms, field_)
    print(n)
    _emit(cfg, {"points": n})
    if args.expect is not None and args.expect != n:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_precompute(args, cfg: RunConfig) -> int:
    from .quadform import orthogonal_group
    from .search import compute_A, compute_B, genus5_quadric, precomputed

    if args.q == 4 and args.what != "ortho" and not args.large:
        raise UsageError("B and A over F_4 are large computations; pass --large")
    Q1 = genus5_quadric(args.q, args.quadric)
    if args.what == "ortho":
        G = orthogonal_group(Q1)
        print(f"|O| = {G.order}  tabulated: {G.table_order()}")
        _emit(cfg, {"order": G.order, "table_order": G.table_order()})
        return EXIT_OK
    ckpt = _checkpoint_dir(args)
    if args.what == "B":
        B = compute_B(Q1)
        print(f"#B = {len(B)} quadrics ({B.raw_count} forms), type {B.label}")
        _emit(cfg, {"B": len(B), "B_forms": B.raw_count})
        return EXIT_OK
    B, A = precomputed(Q1, ckpt, progress=log.info) if ckpt else (None, None)
    if A is None:
        B = compute_B(Q1)
        A = compute_A(Q1, B)
    print(f"#B = {len(B)}  #A = {len(A.reps)}")
    for F in A.reps:
        print(f"  {F}")
    _emit(cfg, {"B": len(B), "A": len(A.reps), "A_reps": [F.serialize() for F in A.reps]})
    return EXIT_OK


def _sieve_shard(q: int, shards: int, index: int, ckpt: str) -> None:
    from .search import SieveConfig, genus4_sieve

    genus4_sieve(SieveConfig.standard(q), shards, [index], ckpt)


def cmd_search_genus4(args, cfg: RunConfig) -> int:
    from .search import SieveConfig, cubics_from_report, genus4_dedupe_certify, genus4_sieve

    sc = SieveConfig.standard(args.q)
    ckpt = _checkpoint_dir(args)
    only = [args.shard_index] if args.shard_index is not None else None
    if only and not (0 <= args.shard_index < args.shards):
        raise UsageError("--shard-index out of range")
    if args.workers > 1 and only is None:
        tmp = None
        if ckpt is None:
            tmp = tempfile.TemporaryDirectory()
            ckpt = tmp.name
        with ProcessPoolExecutor(args.workers) as pool:
            list(pool.map(_sieve_shard, [args.q] * args.shards, [args.shards] * args.shards,
                          range(args.shards), [ckpt] * args.shards))
    report = genus4_sieve(sc, args.shards, only, ckpt)
    if only is not None:
        print(f"shard {args.shard_index}/{args.shards}: {len(report.survivors)} survivors")
        _emit(cfg, report.summary())
        return EXIT_OK
    line = f"sieve: {len(report.survivors)}"
    record = report.summary()
    if not args.no_certify:
        d = genus4_dedupe_certify(cubics_from_report(report), sc.Q)
        line += f", smooth: {len(d.smooth)}"
        if args.verbose:
            line += f", singular curves: {len(d.singular_curves)}, orbits: {len(d.orbit_sizes)}"
        record["certify"] = d.report.summary()
        record["smooth"] = [F.serialize() for F in d.smooth]
    print(line)
    if args.verbose:
        print(report.to_text())
    _emit(cfg, record)
    return EXIT_OK


def cmd_maxpoints(args, cfg: RunConfig) -> int:
    from .search import genus4_maxpoints

    rep = genus4_maxpoints(args.n, args.q)
    print(f"subsets: {rep.counts['subsets']}, cubics: {rep.counts['cubics tested']}, "
          f"smooth: {rep.counts['smooth']}")
    _emit(cfg, rep.summary())
    return EXIT_OK


def cmd_search_genus5(args, cfg: RunConfig) -> int:
    from .search import genus5_quadric, genus5_search, parse_mode, precomputed, prepare_genus5

    if args.q == 4 and not args.large:
        raise UsageError("genus-5 searches over F_4 need B(Q1) over F_4; pass --large")
    try:
        mode = parse_mode(args.mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    Q1 = genus5_quadric(args.q, args.quadric)
    B, A = precomputed(Q1, _checkpoint_dir(args), progress=log.info)
    rep = genus5_search(prepare_genus5(Q1, A, B), mode, full=args.full)
    verdict = "witness" if rep.survivors else "exhausted"
    print(f"{args.quadric} {mode}: {verdict}")
    for k, v in rep.counts.items():
        print(f"  {k:<22} {v}")
    for s in rep.survivors:
        print(f"  {s}")
    _emit(cfg, {**rep.summary(), "survivors": rep.survivors})
    return EXIT_OK


def cmd_verify_gallery(args, cfg: RunConfig) -> int:
    from .gallery import GALLERY, verify

    records = [r for r in GALLERY if not args.only or r.ident in args.only]
    if args.only and len(records) != len(set(args.only)):
        raise UsageError("unknown record id")
    bad = 0
    for r in records:
        rep = verify(r)
        print("\n".join(rep.lines()) if args.verbose else f"{r.ident:<28} {rep.status}")
        bad += rep.status == "fail"
        _emit(cfg, {"record": r.ident, "status": rep.status,
                    "checks": [(c.name, c.claimed, c.observed) for c in rep.checks]})
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_tables(args, cfg: RunConfig) -> int:
    from .gallery import GALLERY, assemble_table, format_table, verify

    verified = {r.ident: verify(r).status != "fail" for r in GALLERY} if args.verify else None
    rows = assemble_table(verified)
    print(format_table(rows))
    print("W witness, E exhaustion, B bound, claim = paper claim only")
    if args.out:
        with open(args.out, "w") as fh:
            for row in rows:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
    _emit(cfg, {"rows": len(rows)})
    if verified is not None and not all(verified.values()):
        return EXIT_MISMATCH
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curveforge", description="Curves over F_2, F_3, F_4 with given genus and gonality.")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--report", help="append a JSON record per campaign to this file")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sub = p.add_subparsers(dest="cmd", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--report", default=argparse.SUPPRESS)
    common.add_argument("--workers", type=int, default=argparse.SUPPRESS)

    def q_arg(sp, choices=(2, 3, 4)):
        sp.add_argument("--q", type=int, required=True, choices=choices)

    sp = sub.add_parser("ortho", parents=[common], help="order of an orthogonal group")
    q_arg(sp)
    sp.add_argument("--form", required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--expect", type=int)
    sp.set_defaults(func=cmd_ortho)

    sp = sub.add_parser("classify", parents=[common], help="type of a quadratic form")
    q_arg(sp)
    sp.add_argument("--form", required=True)
    sp.add_argument("--n", type=int)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("count", parents=[common], help="rational points on V(forms) or a hyperelliptic model")
    q_arg(sp)
    sp.add_argument("--form", action="append")
    sp.add_argument("--n", type=int)
    sp.add_argument("--ext", type=int, default=1)
    sp.add_argument("--hyperelliptic", metavar="P;Q", help="y^2 + Q y = P, polynomials in x")
    sp.add_argument("--expect", type=int)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("precompute", parents=[common], help="O(Q1), B(Q1) or A(Q1) for genus 5")
    q_arg(sp)
    sp.add_argument("--what", choices=("ortho", "B", "A"), required=True)
    sp.add_argument("--quadric", choices=("III", "IV"), default="IV")
    sp.add_argument("--checkpoint")
    sp.add_argument("--large", action="store_true")
    sp.set_defaults(func=cmd_precompute)

    sp = sub.add_parser("search-genus4", parents=[common], help="genus-4 gonality-5 sieve and certification")
    q_arg(sp)
    sp.add_argument("--shards", type=int, default=1)
    sp.add_argument("--shard-index", type=int)
    sp.add_argument("--checkpoint")
    sp.add_argument("--no-certify", action="store_true")
    sp.set_defaults(func=cmd_search_genus4)

    sp = sub.add_parser("maxpoints-genus4", parents=[common], help="cubics through n rational points of the nonsplit quadric")
    sp.add_argument("--q", type=int, default=4, choices=(2, 3, 4))
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_maxpoints)

    sp = sub.add_parser("search-genus5", parents=[common], help="genus-5 curves of gonality 5 or 6")
    q_arg(sp)
    sp.add_argument("--quadric", choices=("III", "IV"), required=True)
    sp.add_argument("--mode", required=True, help="points:n, points:>=n, or gonality6")
    sp.add_argument("--full", action="store_true")
    sp.add_argument("--checkpoint")
    sp.add_argument("--large", action="store_true")
    sp.set_defaults(func=cmd_search_genus5)

    sp = sub.add_parser("verify-gallery", parents=[common], help="check every catalogued curve")
    sp.add_argument("--only", action="append")
    sp.set_defaults(func=cmd_verify_gallery)

    sp = sub.add_parser("tables", parents=[common], help="the N_q(g, gamma) grid")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_tables)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.workers < 1:
        parser.error("--workers must be positive")
    cfg = RunConfig(args.cmd, q=getattr(args, "q", None), quadric=getattr(args, "quadric", None),
                    mode=getattr(args, "mode", None), shards=getattr(args, "shards", 1),
                    shard_index=getattr(args, "shard_index", None),
                    checkpoint=getattr(args, "checkpoint", None), report=args.report,
                    workers=args.workers)
    if getattr(args, "shards", 1) < 1:
        parser.error("--shards must be positive")
    try:
        return args.func(args, cfg)
    except (UsageError, ParseError, FieldError) as exc:
        print(f"curveforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
