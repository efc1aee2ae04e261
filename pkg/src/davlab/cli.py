"""Command line front end.  Every command prints line-delimited JSON.

Exit codes: 0 success, 1 a theorem or lemma oracle failed, 2 usage error or
invalid presentation, 3 a search cap was hit, 4 cache inconsistency.
"""

from __future__ import annotations

import argparse
import collections
import json
import sys
from typing import Iterable

from . import oracles
from .cache import ResultCache
from .errors import (CacheMismatch, DavlabError, HypothesisViolated, InvalidPresentation,
                     ParamOutOfRange, SequenceSyntaxError)
from .groups import Element, Group, make_metacyclic
from .search import SearchOptions, enumerate_free_result, large_davenport, small_davenport
from .sequences import format_sequence, parse_sequence, sequence_to_json
from .trials import LEMMAS, run_suite

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_CAP, EXIT_CACHE = 0, 1, 2, 3, 4
DIAGNOSTIC_FIELDS = ("nodes", "ms")


def payload_core(record: dict) -> dict:
    """A record without its run diagnostics, for determinism comparisons."""
    return {k: v for k, v in record.items() if k not in DIAGNOSTIC_FIELDS}


def _emit(records: Iterable[dict], pretty: bool, out=None) -> None:
    out = out or sys.stdout
    records = list(records)
    if not pretty:
        for rec in records:
            out.write(json.dumps(rec, separators=(",", ":")) + "\n")
        return
    cols = []
    for rec in records:
        cols += [k for k in rec if k not in cols]
    cells = [[_cell(rec.get(c)) for c in cols] for rec in records]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
    for row in cells:
        out.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")


def _cell(value) -> str:
    if isinstance(value, list):
        return f"[{len(value)} items]"
    if value is None:
        return "-"
    return str(value).lower() if isinstance(value, bool) else str(value)


def _options(args) -> SearchOptions:
    return SearchOptions(max_length=getattr(args, "max_length", None),
                         state_cap=args.state_cap, node_cap=args.node_cap,
                         symmetry=args.symmetry, jobs=args.jobs,
                         checkpoint=getattr(args, "checkpoint", None))


def _group(args) -> Group:
    if args.m is None or args.n is None or args.s is None:
        raise ParamOutOfRange("--m, --n and --s are required")
    return make_metacyclic((args.m, args.n, args.s))


def _head(group: Group) -> dict:
    m, n, s = group.params
    return {"m": m, "n": n, "s": s, "order": group.order, "star": group.params.star}


def _predicted(group: Group):
    m, n, _ = group.params
    if m >= 2 and group.params.star:
        return oracles.predicted_d(m, n)
    return None


def _cached(args, key: dict, compute):
    """Return (payload, from_cache), consulting ``--cache`` and ``--recheck``."""
    cache = ResultCache(args.cache) if args.cache else None
    cached = cache.get(key) if cache else None
    if cached is not None and not args.recheck:
        return cached, True
    payload = compute()
    if cached is not None:
        if payload_core(cached) != payload_core(payload):
            sys.stderr.write("cache mismatch for " + json.dumps(key) + "\n")
            sys.stderr.write("cached:   " + json.dumps(cached, sort_keys=True) + "\n")
            sys.stderr.write("computed: " + json.dumps(payload, sort_keys=True) + "\n")
            raise CacheMismatch("recomputed result differs from the cache")
        return cached, True
    if cache and payload.get("exhaustive"):
        cache.put(key, payload)
    return payload, False


def _key(cmd: str, group: Group, args, **extra) -> dict:
    m, n, s = group.params
    key = {"cmd": cmd, "m": m, "n": n, "s": s, "symmetry": args.symmetry,
           "max_length": getattr(args, "max_length", None)}
    key.update(extra)
    return key


# -- commands -----------------------------------------------------------------

def cmd_group(args) -> int:
    group = _group(args)
    m, n, s = group.params
    hist = collections.Counter(group.element_orders)
    rec = _head(group)
    rec.update({
        "abelian": group.is_abelian,
        "cyclic": group.is_cyclic,
        "element_orders": {str(k): hist[k] for k in sorted(hist)},
        "normal_subgroup": f"<y>, cyclic of order {n}",
        "quotient": f"G/N cyclic of order {m}, generated by xN",
        "s_powers": list(group.s_powers),
    })
    _emit([rec], args.pretty)
    return EXIT_OK


def cmd_small(args) -> int:
    group = _group(args)

    def compute():
        res = small_davenport(group, _options(args))
        pred = _predicted(group)
        rec = _head(group)
        rec.update({
            "d_computed": res.value,
            "d_predicted": pred,
            "match": (res.value == pred) if pred is not None and res.exhaustive else None,
            "exhaustive": res.exhaustive,
            "witness": format_sequence(group, res.witness) if res.witness else None,
            "witness_json": json.loads(sequence_to_json(group, res.witness)) if res.witness else None,
            "nodes": res.nodes,
            "ms": round(res.elapsed * 1000),
        })
        return rec

    rec, _ = _cached(args, _key("small", group, args), compute)
    _emit([rec], args.pretty)
    if not rec["exhaustive"]:
        return EXIT_CAP
    return EXIT_MISMATCH if rec["match"] is False else EXIT_OK


def cmd_large(args) -> int:
    group = _group(args)

    def compute():
        res = large_davenport(group, _options(args))
        rec = _head(group)
        rec.update({
            "D_computed": res.value,
            "exhaustive": res.exhaustive,
            "witness": format_sequence(group, res.witness) if res.witness else None,
            "nodes": res.nodes,
            "ms": round(res.elapsed * 1000),
        })
        return rec

    rec, _ = _cached(args, _key("large", group, args), compute)
    _emit([rec], args.pretty)
    return EXIT_OK if rec["exhaustive"] else EXIT_CAP


def cmd_enumerate(args) -> int:
    group = _group(args)
    if args.length is None or args.length < 1:
        raise ParamOutOfRange("--length must be a positive integer")

    def compute():
        res = enumerate_free_result(group, args.length, _options(args))
        rec = _head(group)
        rec.update({"length": args.length, "count": len(res.sequences),
                    "exhaustive": res.exhaustive,
                    "sequences": [format_sequence(group, s) for s in res.sequences]})
        m, n, _ = group.params
        if _predicted(group) is not None and args.length == m + n - 2:
            check = oracles.compare_forms(group, res.sequences, res.exhaustive)
            rec["inverse_ok"] = check.ok if res.exhaustive else None
            rec["predicted_count"] = check.predicted
        rec.update({"nodes": res.nodes, "ms": round(res.elapsed * 1000)})
        return rec

    rec, _ = _cached(args, _key("enumerate", group, args, length=args.length), compute)
    _emit([rec], args.pretty)
    if not rec["exhaustive"]:
        return EXIT_CAP
    return EXIT_MISMATCH if rec.get("inverse_ok") is False else EXIT_OK


def cmd_verify(args) -> int:
    opts = _options(args)
    cache = ResultCache(args.cache) if args.cache else None
    records = []
    for params in oracles.star_triples(args.max_order):
        order = params.order
        inverse = args.inverse_max_order is None or order <= args.inverse_max_order
        large = order <= args.large_max_order
        key = {"cmd": "verify", "m": params.m, "n": params.n, "s": params.s,
               "inverse": inverse, "large": large, "symmetry": args.symmetry}
        rec = cache.get(key) if cache else None
        if rec is None or args.recheck:
            fresh = oracles.sweep_record(params, opts, inverse=inverse, large=large)
            if rec is not None and payload_core(rec) != payload_core(fresh):
                sys.stderr.write("cache mismatch for " + json.dumps(key) + "\n")
                raise CacheMismatch("recomputed sweep entry differs from the cache")
            if rec is None:
                rec = fresh
                if cache and rec["exhaustive"]:
                    cache.put(key, rec)
        records.append(rec)
        if not args.pretty:
            _emit([rec], False)
            sys.stdout.flush()
    if args.pretty:
        _emit(records, True)
    if any(r["match"] is False or r["inverse_ok"] is False or r["bounds_ok"] is False
           for r in records):
        return EXIT_MISMATCH
    if any(not r["exhaustive"] for r in records):
        return EXIT_CAP
    return EXIT_OK


def _single_lemma(args) -> int:
    lemma = args.lemma[0]
    group = _group(args)
    seq = parse_sequence(group, args.sequence)
    if lemma == "structure":
        verdict = oracles.structure_check(group.params, strict=args.strict)
    elif lemma == "quotient-minimal":
        verdict = oracles.quotient_minimal_check(group, seq, strict=args.strict)
    elif lemma == "coset-translate":
        u = parse_sequence(group, args.u or "")
        if len(u) != 1:
            raise ParamOutOfRange("--u must name exactly one element")
        verdict = oracles.coset_translate_check(group, seq, group.element(u.support[0]),
                                        strict=args.strict)
    elif lemma == "normal-part":
        verdict = oracles.normal_part_check(group, seq, strict=args.strict)
    elif lemma == "cyclic-extremal":
        verdict = oracles.cyclic_extremal_check(group, seq, strict=args.strict)
    elif lemma == "longest-part":
        verdict = oracles.longest_part_check(group, seq, parse_sequence(group, args.sub or ""),
                                        strict=args.strict)
    else:
        raise ParamOutOfRange(f"lemma {lemma} has no single-instance form; use trials")
    rec = {"lemma": lemma, **_head(group), "sequence": format_sequence(group, seq),
           "ok": verdict.ok, "vacuous": verdict.vacuous, "detail": verdict.detail}
    _emit([rec], args.pretty)
    return EXIT_OK if verdict.ok else EXIT_MISMATCH


def cmd_lemmas(args) -> int:
    lemmas = args.lemma or list(LEMMAS)
    unknown = [name for name in lemmas if name not in LEMMAS]
    if unknown:
        raise ParamOutOfRange(f"unknown lemma(s) {unknown}; choose from {list(LEMMAS)}")
    if args.sequence is not None:
        if len(lemmas) != 1:
            raise ParamOutOfRange("--sequence needs exactly one --lemma")
        return _single_lemma(args)
    records = []
    for name in lemmas:
        rec = run_suite(name, args.trials, args.seed).record()
        records.append(rec)
        if not args.pretty:
            _emit([rec], False)
            sys.stdout.flush()
    if args.pretty:
        _emit(records, True)
    if any(not r["ok"] for r in records):
        return EXIT_MISMATCH
    if args.strict and any(not r["exhaustive"] and r["trials"] < args.trials for r in records):
        return EXIT_CAP
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="davlab", description="Exact product-one computations over metacyclic groups.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--s", type=int)
    common.add_argument("--jobs", type=int, default=1, metavar="K")
    common.add_argument("--symmetry", action="store_true",
                        help="restrict the first term to automorphism orbit representatives")
    common.add_argument("--node-cap", type=int, default=None)
    common.add_argument("--state-cap", type=int, default=1 << 22)
    common.add_argument("--cache", metavar="PATH")
    common.add_argument("--recheck", action="store_true",
                        help="recompute cached results and abort if they differ")
    common.add_argument("--pretty", action="store_true", help="render records as a table")
    common.add_argument("--strict", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("group", parents=[common], help="summarise G(m,n,s)").set_defaults(func=cmd_group)

    for name, func, help_ in (("small", cmd_small, "exact small Davenport constant"),
                              ("large", cmd_large, "exact large Davenport constant")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--max-length", type=int, default=None)
        p.add_argument("--checkpoint", metavar="PATH")
        p.set_defaults(func=func)

    p = sub.add_parser("enumerate", parents=[common], help="all free sequences of a length")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--checkpoint", metavar="PATH")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", parents=[common], help="sweep all star groups up to an order")
    p.add_argument("--max-order", type=int, default=42)
    p.add_argument("--inverse-max-order", type=int, default=None)
    p.add_argument("--large-max-order", type=int, default=6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lemmas", parents=[common], help="randomized and exhaustive lemma suites")
    p.add_argument("--lemma", action="append", help=f"one of {', '.join(LEMMAS)}; repeatable")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sequence", help="check a single instance instead of running trials")
    p.add_argument("--u", help="the element u for coset-translate")
    p.add_argument("--sub", help="the subsequence T for longest-part")
    p.set_defaults(func=cmd_lemmas)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InvalidPresentation, ParamOutOfRange, SequenceSyntaxError, HypothesisViolated) as exc:
        sys.stderr.write(f"davlab: {exc}\n")
        return EXIT_USAGE
    except CacheMismatch as exc:
        sys.stderr.write(f"davlab: {exc}\n")
        return EXIT_CACHE
    except DavlabError as exc:
        sys.stderr.write(f"davlab: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
