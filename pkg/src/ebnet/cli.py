"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

Examples:
  ebnet capacity --d 2 --x 0.6667
  ebnet sweep --d 2 --steps 11 --out sweep.csv
  ebnet demo butterfly --d 2 --x 0.6667 --out report.json
  ebnet eb-threshold --d 3
  ebnet verify-all --d-max 3
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ebnet import verify
from ebnet.capacity import (
    RATIO_GUARD,
    ea_capacity_depolarizing,
    holevo_capacity_depolarizing,
)
from ebnet.channels import depolarizing_channel
from ebnet.ebcheck import eb_threshold_scan, eb_verdict
from ebnet.protocols import DEFAULT_TOLERANCE, PROTOCOLS

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
SIG_DIGITS = 12
EB_SLACK = 1e-12


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SweepRow:
    d: int
    x: float
    c: float
    c_e: float
    ratio: float | None
    eb: bool


def fmt(v: float) -> str:
    return f"{v:.{SIG_DIGITS}g}"


def _round(obj: Any) -> Any:
    """Round every float to 12 significant digits for stable output."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(fmt(float(obj)))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps_json(obj: Any) -> str:
    return json.dumps(_round(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def sweep_row(d: int, x: float) -> SweepRow:
    c = holevo_capacity_depolarizing(d, x)
    ce = ea_capacity_depolarizing(d, x)
    return SweepRow(d, x, c, ce, ce / c if c > RATIO_GUARD else None, x >= d / (d + 1) - EB_SLACK)


def sweep_rows(d: int, x_min: float, x_max: float, steps: int, parallel: bool = False) -> list[SweepRow]:
    xs = [float(v) for v in np.linspace(x_min, x_max, steps)]
    if parallel:
        with ThreadPoolExecutor() as pool:
            return list(pool.map(lambda x: sweep_row(d, x), xs))
    return [sweep_row(d, x) for x in xs]


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "x", "C", "C_E", "ratio", "eb"])
    for r in rows:
        ratio = "" if r.ratio is None else fmt(r.ratio)
        w.writerow([r.d, fmt(r.x), fmt(r.c), fmt(r.c_e), ratio, "true" if r.eb else "false"])
    return buf.getvalue()


def rows_to_json(rows: list[SweepRow]) -> str:
    return dumps_json([asdict(r) for r in rows])


def rows_from_json(text: str) -> list[SweepRow]:
    return [SweepRow(**item) for item in json.loads(text)]


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from exc


def _need(args, name: str) -> float:
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"--{name} is required here")
    return v


def _check_d(d: int) -> None:
    if d < 2:
        raise UsageError(f"--d must be >= 2, got {d}")


def _check_unit(name: str, v: float) -> None:
    if not 0.0 <= v <= 1.0:
        raise UsageError(f"--{name} must lie in [0, 1], got {v}")


def cmd_capacity(args) -> int:
    d, x = args.d, _need(args, "x")
    _check_d(d)
    _check_unit("x", x)
    row = sweep_row(d, x)
    verdict = eb_verdict(depolarizing_channel(d, x))
    print(f"d={d} x={fmt(x)}")
    print(f"C={fmt(row.c)}")
    print(f"C_E={fmt(row.c_e)}")
    print(f"ratio={'' if row.ratio is None else fmt(row.ratio)}")
    print(f"EB={'true' if verdict.is_ppt else 'false'} (min PT eigenvalue {fmt(verdict.min_pt_eigenvalue)})")
    return EXIT_OK


def cmd_sweep(args) -> int:
    _check_d(args.d)
    if not (0.0 <= args.x_min < args.x_max <= 1.0):
        raise UsageError("need 0 <= --x-min < --x-max <= 1")
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    rows = sweep_rows(args.d, args.x_min, args.x_max, args.steps, args.parallel)
    text = rows_to_csv(rows) if args.format == "csv" else rows_to_json(rows)
    _write(text, args.out)
    return EXIT_OK


def cmd_demo(args) -> int:
    _check_d(args.d)
    name = args.name
    if name == "teleport":
        report = PROTOCOLS[name](args.d, seed=args.seed)
    elif name in ("noisy-i", "noisy-ii"):
        q = _need(args, "q")
        _check_unit("q", q)
        kw = {"seed": args.seed} if name == "noisy-ii" else {}
        report = PROTOCOLS[name](args.d, q, **kw)
    else:
        x = _need(args, "x")
        _check_unit("x", x)
        report = PROTOCOLS[name](args.d, x)
    _write(dumps_json(report.to_dict()), args.out)
    return EXIT_OK if report.passed(DEFAULT_TOLERANCE) else EXIT_FAIL


def cmd_eb_threshold(args) -> int:
    _check_d(args.d)
    x = eb_threshold_scan(args.d)
    print(f"d={args.d} threshold={fmt(x)} expected={fmt(args.d / (args.d + 1))}")
    return EXIT_OK


def cmd_verify_all(args) -> int:
    if args.d_max not in (2, 3, 4):
        raise UsageError("--d-max must be 2, 3 or 4")
    results = verify.run_all(args.d_max, parallel=args.parallel)
    print(verify.format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ebnet", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="C, C_E, ratio and EB status of D_x")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--x", type=float)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("sweep", help="tabulate C and C_E over a grid of x")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--x-min", type=float, default=0.0)
    p.add_argument("--x-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("demo", help="run one protocol and write its report as JSON")
    p.add_argument("name", choices=sorted(PROTOCOLS))
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--x", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("eb-threshold", help="bisect the EB threshold of D_x")
    p.add_argument("--d", type=int, default=2)
    p.set_defaults(func=cmd_eb_threshold)

    p = sub.add_parser("verify-all", help="run the full verification suite")
    p.add_argument("--d-max", type=int, default=3)
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=cmd_verify_all)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"ebnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ebnet: {exc}", file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        print("ebnet: interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    raise SystemExit(main())
