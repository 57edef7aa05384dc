"""Command-line front end: ``approxmul <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 invalid plan, 3 I/O failure.
Failures print a single ``error: ...`` line on stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .builders import design_from_selector
from .compressors import CompressorKind, compressor_error_stats, evaluate, figures_of_merit, input_patterns, input_value
from .cost import GateCosts, cost_report, sweep_csv, sweep_precise_chain, sweep_truncation
from .imaging import ImageFormatError, TableMul, bench_csv, load_images, read_netpbm, run_benchmark, sharpen, write_netpbm
from .netlist import elaborate
from .plan import PlanError, serialize_plan
from .simulator import STATS_CSV_HEADER, exhaustive_error_stats, heatmap

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _out(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _design(selector: str):
    try:
        return design_from_selector(selector)
    except PlanError:
        raise
    except ValueError as e:
        raise UsageError(str(e)) from None


def _costs(path: str | None) -> GateCosts:
    if path is None:
        return GateCosts()
    try:
        return GateCosts.load(path)
    except (ValueError, TypeError) as e:
        raise UsageError(f"bad gate-cost file: {e}") from None


def cmd_compressor(args) -> None:
    try:
        kind = CompressorKind(args.kind)
    except ValueError:
        raise UsageError(f"unknown compressor kind {args.kind!r}") from None
    st = compressor_error_stats(kind)
    lines = []
    if args.table:
        lines.append("b a cin | cout carry sum | in out ed")
        for b, a, c in input_patterns(kind):
            o = evaluate(kind, b, a, c)
            cin = "-" if c is None else (str(c) if isinstance(c, int) else "".join(map(str, c)))
            couts = "".join(map(str, o.couts)) or "-"
            v = input_value(b, a, c)
            lines.append(f"{''.join(map(str, b)) or '-'} {''.join(map(str, a)) or '-'} {cin} | "
                         f"{couts} {o.carry} {o.sum} | {v} {o.value} {o.value - v}")
    lines.append(f"med={st.med_c} ({float(st.med_c):.6g}) ned={st.ned_c} ({float(st.ned_c):.6g}) "
                 f"er={st.error_rate} ({float(st.error_rate):.6g})")
    if args.fom:
        f = figures_of_merit(kind, args.delay, args.power)
        lines.append(f"fom1={f.fom1:.6g} fom2={f.fom2:.6g}")
    _out("\n".join(lines) + "\n", None)


def cmd_multiplier(args) -> None:
    plan = _design(args.design)
    nl = elaborate(plan)
    if args.plan_out:
        Path(args.plan_out).write_text(serialize_plan(plan))
    if args.netlist_out:
        Path(args.netlist_out).write_text(nl.serialize())
    if args.stats or args.csv:
        st = exhaustive_error_stats(nl)
        if args.csv:
            Path(args.csv).write_text(f"{STATS_CSV_HEADER}\n{st.csv_row(args.design)}\n")
        if args.stats:
            rep = cost_report(nl, _costs(args.costs), st.med)
            print(f"design={args.design} med={float(st.med):.6f} ned={float(st.ned):.6e} "
                  f"er={float(st.error_rate):.6f} max_abs_ed={st.max_abs_ed} "
                  f"mean_signed_ed={float(st.mean_signed_ed):.6f}")
            print(f"gates={rep.gate_count} depth={rep.depth:g} pdp={rep.pdp:g} "
                  f"pdap={rep.pdap:g} pdaep={rep.pdaep:.6g}")


def cmd_sweep(args) -> None:
    costs = _costs(args.costs)
    rows = sweep_truncation(costs) if args.family == "truncation" else sweep_precise_chain(costs)
    _out(sweep_csv(rows), args.out)


def cmd_heatmap(args) -> None:
    if not (args.out or args.csv):
        raise UsageError("heatmap needs --out and/or --csv")
    hm = heatmap(_design(args.design), args.design)
    if args.out:
        hm.write_pgm(args.out)
    if args.csv:
        hm.write_csv(args.csv)
    print(f"design={args.design} max_abs_ed={hm.max_value} mean={float(hm.mean):.6f} "
          f"border_mean={float(hm.border_mean()):.6f}")


def cmd_sharpen(args) -> None:
    mul = TableMul.from_design(_design(args.design), pixel_first=not args.kernel_first)
    img = read_netpbm(args.input)
    write_netpbm(args.out, sharpen(img, mul, args.rounding))


def cmd_bench(args) -> None:
    names = [s for s in args.designs.split(",") if s]
    if not names:
        raise UsageError("--designs is empty")
    muls = {n: TableMul.from_design(_design(n), pixel_first=not args.kernel_first) for n in names}
    images = load_images(args.images)
    if not images:
        raise FileNotFoundError(f"no .pgm/.ppm images in {args.images}")
    _out(bench_csv(run_benchmark(images, muls)), args.out)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="approxmul", description="Approximate multiplier laboratory.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compressor", help="truth table and error metrics of one compressor")
    c.add_argument("--kind", required=True)
    c.add_argument("--table", action="store_true")
    c.add_argument("--stats", action="store_true", help="print metrics (always shown)")
    c.add_argument("--fom", action="store_true")
    c.add_argument("--delay", type=float, default=1.0)
    c.add_argument("--power", type=float, default=1.0)
    c.set_defaults(fn=cmd_compressor)

    m = sub.add_parser("multiplier", help="exhaustive error stats and costs of a design")
    m.add_argument("--design", required=True)
    m.add_argument("--stats", action="store_true")
    m.add_argument("--csv")
    m.add_argument("--costs", help="gate-cost JSON")
    m.add_argument("--netlist-out")
    m.add_argument("--plan-out")
    m.set_defaults(fn=cmd_multiplier)

    s = sub.add_parser("sweep", help="precise-chain or truncation sweep as CSV")
    s.add_argument("--family", required=True, choices=("truncation", "chain"))
    s.add_argument("--costs")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sweep)

    h = sub.add_parser("heatmap", help="|ED| heatmap as PGM and/or CSV")
    h.add_argument("--design", required=True)
    h.add_argument("--out")
    h.add_argument("--csv")
    h.set_defaults(fn=cmd_heatmap)

    for name, fn, hlp in (("sharpen", cmd_sharpen, "sharpen one PGM/PPM image"),
                          ("bench", cmd_bench, "SSIM/PSNR benchmark over a folder")):
        q = sub.add_parser(name, help=hlp)
        if name == "sharpen":
            q.add_argument("--design", required=True)
            q.add_argument("--in", dest="input", required=True)
            q.add_argument("--out", required=True)
            q.add_argument("--rounding", choices=("floor", "half_up"), default="floor")
        else:
            q.add_argument("--designs", required=True)
            q.add_argument("--images", required=True)
            q.add_argument("--out")
        q.add_argument("--kernel-first", action="store_true",
                       help="feed the kernel coefficient to operand A instead of the pixel")
        q.set_defaults(fn=fn)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.fn(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PlanError as e:
        print(f"error: invalid plan: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ImageFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
