"""Command-line front end: ``zigzag classify|family|sweep``."""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import sys

from zigzag.crystalline import classify_crystalline
from zigzag.errors import InsufficientPrecision, ParseError, PreconditionError, ZigZagError
from zigzag.family import ApFamily, chart_limit, chart_point, chart_relation_defect
from zigzag.padic import DEFAULT_PRECISION, CappedElement, parse_element
from zigzag.semistable import SemistableInput, classify_semistable
from zigzag.sweep import SweepConfig, render_rows, run_sweep, summarize, summary_line

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_PRECISION = 4

FORMATS = ("text", "json", "csv")


def _int_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("-")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if sep else lo_i
    except ValueError as exc:
        raise ParseError(f"bad range {text!r}") from exc
    if hi_i < lo_i:
        raise ParseError(f"empty range {text!r}")
    return lo_i, hi_i


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError as exc:
        raise ParseError(f"bad integer list {text!r}") from exc


def _read_config(path: str | None) -> dict:
    """Flat ``key = value`` file; keys mirror the long flags (dashes or underscores)."""
    if not path:
        return {}
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[zigzag]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    return {k.replace("-", "_"): v for k, v in parser["zigzag"].items()}


def _setting(args, conf: dict, name: str, default=None, convert=str):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in conf:
        try:
            return convert(conf[name])
        except ValueError as exc:
            raise ParseError(f"bad config value {name} = {conf[name]!r}") from exc
    return default


def _flag(args, conf: dict, name: str) -> bool:
    if getattr(args, name, False):
        return True
    value = conf.get(name, "false").strip().lower()
    if value not in ("true", "false", "yes", "no", "1", "0"):
        raise ParseError(f"bad boolean {name} = {value!r}")
    return value in ("true", "yes", "1")


def _parse_value(text: str, p: int, precision: int | None):
    value = parse_element(text, p)
    if precision is None:
        return value
    return CappedElement.from_exact(value, precision)


def _render_mapping(d: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(d, separators=(",", ":")) + "\n"
    flat = {k: ("; ".join(v) if isinstance(v, list) else ("" if v is None else str(v))) for k, v in d.items()}
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(flat))
        writer.writeheader()
        writer.writerow(flat)
        return buf.getvalue()
    width = max(len(k) for k in flat)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in flat.items())


def cmd_classify(args, conf: dict) -> tuple[str, int]:
    fmt = _setting(args, conf, "format", "json")
    allow_p3 = _flag(args, conf, "allow_p3")
    precision = _setting(args, conf, "precision", DEFAULT_PRECISION, int) if args.capped else None
    if args.kind == "crystalline":
        tmin = _setting(args, conf, "tmin", None, int)
        a_p = _parse_value(args.ap, args.p, precision)
        verdict = classify_crystalline(args.p, args.k, a_p, tmin=tmin, allow_p3=allow_p3)
    else:
        L = _parse_value(args.L, args.p, precision)
        verdict = classify_semistable(SemistableInput(args.p, args.k0, L, allow_p3))
    return _render_mapping(verdict.to_dict(), fmt), EXIT_OK


def _family_ks(f: ApFamily, args) -> list[int]:
    if args.k:
        return list(args.k)
    lo, hi = _int_range(args.m)
    return [f.k0 + (f.p - 1) * f.p**m for m in range(lo, hi + 1)]


def cmd_family(args, conf: dict) -> tuple[str, int]:
    fmt = _setting(args, conf, "format", "text")
    precision = _setting(args, conf, "precision", DEFAULT_PRECISION, int)
    allow_p3 = _flag(args, conf, "allow_p3")
    f = ApFamily.parse(args.family, allow_p3=allow_p3)
    if args.action == "limit":
        lim = chart_limit(f, precision)
        d = {"family": str(f), "x": str(lim.x), "y": str(lim.y), "a": str(lim.a), "b": str(lim.b),
             "L": str(f.l_invariant())}
        return _render_mapping(d, fmt), EXIT_OK
    if args.action == "chart":
        rows = []
        for k in _family_ks(f, args):
            pt = chart_point(f, k, precision)
            rows.append({"k": str(k), "x": str(pt.x), "y": str(pt.y), "a": str(pt.a), "b": str(pt.b),
                         "defect": str(chart_relation_defect(pt, f))})
        if fmt == "json":
            return json.dumps(rows, indent=1) + "\n", EXIT_OK
        return "".join(_render_mapping(r, fmt) for r in rows), EXIT_OK
    cfg = SweepConfig(families=(f,), ks={str(f): _family_ks(f, args)}, precision=precision,
                      tmin=_setting(args, conf, "tmin", None, int), chart=not _flag(args, conf, "no_chart"))
    rows = run_sweep(cfg)
    return render_rows(rows, fmt), EXIT_FAILURE if summarize(rows)["fail"] else EXIT_OK


def sweep_config(args, conf: dict) -> SweepConfig:
    families = list(args.family or [])
    if not families and "family" in conf:
        families = [line for line in conf["family"].splitlines() if line.strip()]
    allow_p3 = _flag(args, conf, "allow_p3")
    r0 = _setting(args, conf, "r0", None, str)
    return SweepConfig(
        primes=_int_list(_setting(args, conf, "primes", "5,7,11,13")),
        r0_range=_int_range(r0) if r0 else None,
        m_range=_int_range(_setting(args, conf, "m", "2-6")),
        families=tuple(ApFamily.parse(s, allow_p3=allow_p3) for s in families),
        count=_setting(args, conf, "count", 0, int),
        seed=_setting(args, conf, "seed", 0, int),
        max_degree=_setting(args, conf, "degree", 3, int),
        precision=_setting(args, conf, "precision", DEFAULT_PRECISION, int),
        output=_setting(args, conf, "format", "text"),
        outfile=_setting(args, conf, "out", None),
        tmin=_setting(args, conf, "tmin", None, int),
        jobs=_setting(args, conf, "jobs", 1, int),
        chart=not _flag(args, conf, "no_chart"),
        allow_p3=allow_p3,
    )


def cmd_sweep(args, conf: dict) -> tuple[str, int]:
    cfg = sweep_config(args, conf)
    if cfg.output not in FORMATS:
        raise ParseError(f"unknown format {cfg.output!r}")
    rows = run_sweep(cfg)
    summary = summarize(rows)
    if cfg.output == "csv":
        print(summary_line(summary), file=sys.stderr)
    return render_rows(rows, cfg.output), EXIT_FAILURE if summary["fail"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, help=f"p-adic precision (default {DEFAULT_PRECISION})")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--allow-p3", action="store_true", help="permit p = 3 (conjectural)")
    common.add_argument("--tmin", type=int, help="theorem threshold on t (default r0)")
    common.add_argument("--config", help="flat key=value file mirroring the flags")

    parser = argparse.ArgumentParser(prog="zigzag", description="Zig-zag reductions at exceptional weights.")
    sub = parser.add_subparsers(dest="command", required=True)

    classify = sub.add_parser("classify", help="classify one representation")
    csub = classify.add_subparsers(dest="kind", required=True)
    crys = csub.add_parser("crystalline", parents=[common])
    crys.add_argument("--p", type=int, required=True)
    crys.add_argument("--k", type=int, required=True)
    crys.add_argument("--ap", required=True, help="a_p in Q(sqrt p), e.g. '505' or '5*s'")
    crys.add_argument("--capped", action="store_true", help="treat --ap as known to --precision only")
    st = csub.add_parser("semistable", parents=[common])
    st.add_argument("--p", type=int, required=True)
    st.add_argument("--k0", type=int, required=True)
    st.add_argument("--L", required=True, help="L-invariant in Q(sqrt p)")
    st.add_argument("--capped", action="store_true", help="treat --L as known to --precision only")

    family = sub.add_parser("family", help="work with a weight family p;k0;[c0,c1,...]")
    fsub = family.add_subparsers(dest="action", required=True)
    for name in ("limit", "verify", "chart"):
        fp = fsub.add_parser(name, parents=[common])
        fp.add_argument("--family", required=True)
        if name != "limit":
            fp.add_argument("--m", default="1-5", help="weights k0 + (p-1) p^m for m in this range")
            fp.add_argument("--k", type=int, action="append", help="explicit weight (repeatable)")
        if name == "verify":
            fp.add_argument("--no-chart", action="store_true", help="skip the chart gap column")

    sweep = sub.add_parser("sweep", parents=[common], help="verification sweep")
    sweep.add_argument("--family", action="append", help="explicit family (repeatable)")
    sweep.add_argument("--count", type=int, help="number of seeded random families")
    sweep.add_argument("--primes", help="comma-separated primes (default 5,7,11,13)")
    sweep.add_argument("--r0", help="r0 range, e.g. 1-4 (default 1..p-1)")
    sweep.add_argument("--m", help="t exponent range (default 2-6)")
    sweep.add_argument("--degree", type=int, help="maximum family degree (default 3)")
    sweep.add_argument("--jobs", type=int, help="worker processes")
    sweep.add_argument("--no-chart", action="store_true", help="skip the chart gap column")
    return parser


COMMANDS = {"classify": cmd_classify, "family": cmd_family, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        conf = _read_config(args.config)
        text, code = COMMANDS[args.command](args, conf)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InsufficientPrecision as exc:
        print(f"insufficient precision: {exc} (certified lower bound {exc.bound})", file=sys.stderr)
        return EXIT_PRECISION
    except PreconditionError as exc:
        print(f"precondition violated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ZigZagError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    out = _setting(args, conf, "out", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
