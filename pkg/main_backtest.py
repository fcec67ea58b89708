# main_backtest.py

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

from anticor.constants import (
    CBAL_STAR_TOL, CODE_INPUT, CODE_UNKNOWN, CODE_USAGE, COMMISSION_SWEEP, DEFAULT_ETA,
    DEFAULT_MAX_WINDOW, DEFAULT_SAMPLES, DEFAULT_SEED, ERROR_CODES, FORMAT_PRICES, FORMAT_RELATIVES,
    INPUT_FORMATS, REPORT_FORMATS, RISK_FREE_RATE, TRADING_DAYS,
)
from anticor.exceptions import AnticorError, ArgumentError, InputError
from anticor.market import (
    MarketSequence, cover_gluss, load_prices, random_market, reverse_market, save_market, to_relatives,
)
from anticor.meta import anticor_over, meta_market
from backtest import (
    STRATEGIES, TABLE_STRATEGIES, RunSpec, metrics_table, run, run_table, sweep_commission,
    sweep_max_window, sweep_window, validated,
)
from report import curves_of, emit_report

load_dotenv()


class CliConfig(BaseModel):
    """Every numeric flag, checked before any computation starts."""
    command: str
    w: Optional[int] = Field(default=None, ge=2)
    W: int = Field(default=DEFAULT_MAX_WINDOW, ge=2)
    eta: float = Field(default=DEFAULT_ETA, ge=0)
    gamma: float = Field(default=0.0, ge=0.0, lt=1.0)
    n_samples: int = Field(default=DEFAULT_SAMPLES, ge=1)
    seed: int = DEFAULT_SEED
    tol: float = Field(default=CBAL_STAR_TOL, gt=0)
    risk_free: float = RISK_FREE_RATE
    trading_days: int = Field(default=TRADING_DAYS, ge=1)
    max_workers: int = Field(default=1, ge=1)
    days: Optional[int] = Field(default=None, ge=1)
    assets: Optional[int] = Field(default=None, ge=1)
    band_seeds: int = Field(default=0, ge=0)


def _env(name: str, cast, default):
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError:
        raise ArgumentError(f"environment variable {name}={raw!r} is not a valid {cast.__name__}")


def env_defaults() -> dict:
    return {
        "W": _env("ANTICOR_MAX_WINDOW", int, DEFAULT_MAX_WINDOW),
        "eta": _env("ANTICOR_ETA", float, DEFAULT_ETA),
        "n_samples": _env("ANTICOR_SAMPLES", int, DEFAULT_SAMPLES),
        "seed": _env("ANTICOR_SEED", int, DEFAULT_SEED),
        "risk_free": _env("ANTICOR_RISK_FREE", float, RISK_FREE_RATE),
        "trading_days": _env("ANTICOR_TRADING_DAYS", int, TRADING_DAYS),
        "max_workers": _env("MAX_WORKERS", int, 1),
    }


# ---------------------------------------------------------------------- #
# Argument parsing
# ---------------------------------------------------------------------- #

def _strategy_help() -> str:
    width = max(len(k) for k in STRATEGIES)
    return "\n".join(f"  {k.ljust(width)}  {desc}" for k, (_, desc) in STRATEGIES.items())


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_range(text: str) -> List[int]:
    lo, sep, hi = text.partition(":")
    try:
        lo, hi = int(lo), int(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    return list(range(lo, hi + 1))


class _Parser(argparse.ArgumentParser):
    """Usage errors become one stderr line and exit code CODE_USAGE."""

    def error(self, message):
        print(f"error: {ERROR_CODES[CODE_USAGE]}: {self.prog}: {message}", file=sys.stderr)
        raise SystemExit(CODE_USAGE)


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    p = _Parser(
        prog="main_backtest",
        description="ANTICOR portfolio selection backtests",
        epilog="strategies:\n" + _strategy_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    io_in = argparse.ArgumentParser(add_help=False)
    io_in.add_argument("-i", "--input", default="-", help="input CSV path, '-' for stdin (default)")
    io_in.add_argument("--format", choices=INPUT_FORMATS, default=FORMAT_RELATIVES,
                       help="meaning of the input cells (default: %(default)s)")

    io_out = argparse.ArgumentParser(add_help=False)
    io_out.add_argument("-o", "--output", default="-", help="output path, '-' for stdout (default)")
    io_out.add_argument("--out-format", choices=REPORT_FORMATS, default="tsv",
                        help="report format (default: %(default)s)")

    strat = argparse.ArgumentParser(add_help=False)
    strat.add_argument("--w", type=int, help="ANTICOR window (anticor)")
    strat.add_argument("--W", "--max-window", dest="W", type=int,
                       help=f"maximal window for anti1/anti2 (default {DEFAULT_MAX_WINDOW})")
    strat.add_argument("--eta", type=float, help=f"EG learning rate (default {DEFAULT_ETA})")
    strat.add_argument("--gamma", type=float, default=0.0, help="proportional commission rate in [0, 1)")
    strat.add_argument("--n-samples", type=int, help=f"universal sample count (default {DEFAULT_SAMPLES})")
    strat.add_argument("--seed", type=int, help=f"universal sampler seed (default {DEFAULT_SEED})")
    strat.add_argument("--tol", type=float, default=CBAL_STAR_TOL, help="CBAL* tolerance")
    strat.add_argument("--weights", type=_floats, help="comma-separated portfolio for bah / cbal")
    strat.add_argument("--workers", type=int, help="thread pool size (default MAX_WORKERS or 1)")

    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("convert", parents=[io_in, io_out], help="prices CSV → relatives CSV") \
        .set_defaults(format=FORMAT_PRICES)
    sub.add_parser("reverse", parents=[io_in, io_out], help="reverse a relatives CSV")

    r = sub.add_parser("run", parents=[io_in, io_out, strat], help="run one strategy",
                       epilog="strategies:\n" + _strategy_help(),
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    r.add_argument("-s", "--strategy", required=True, choices=list(STRATEGIES), metavar="STRATEGY",
                   help="one of: " + ", ".join(STRATEGIES))
    r.add_argument("--curve", help="also write the wealth curve (CSV, or SVG if the path ends in .svg)")

    sw = sub.add_parser("sweep", help="final returns along one parameter axis")
    sw_sub = sw.add_subparsers(dest="axis", required=True)
    for axis, default, what in (("window", "2:30", "w of ANTICOR_w"),
                                ("maxwindow", "2:30", "W of BAH_W(ANTICOR)")):
        a = sw_sub.add_parser(axis, parents=[io_in, io_out, strat], help=f"sweep {what}")
        a.add_argument("--range", type=_int_range, default=_int_range(default),
                       help=f"LO:HI inclusive (default {default})")
    c = sw_sub.add_parser("commission", parents=[io_in, io_out, strat], help="sweep commission rate gamma")
    c.add_argument("--gammas", type=_floats, default=list(COMMISSION_SWEEP),
                   help="comma-separated rates (default 0,0.001,...,0.01)")
    c.add_argument("-s", "--strategy", default="anti1", choices=list(STRATEGIES), metavar="STRATEGY")

    t = sub.add_parser("table", parents=[io_out, strat], help="multi-strategy return table")
    t.add_argument("-i", "--input", action="append", required=True,
                   help="relatives CSV (repeatable); the file stem names the column")
    t.add_argument("--format", choices=INPUT_FORMATS, default=FORMAT_RELATIVES)
    t.add_argument("--strategies", type=lambda s: [v.strip() for v in s.split(",") if v.strip()],
                   default=list(TABLE_STRATEGIES), help="comma-separated strategy ids")
    t.add_argument("--reversed", action="store_true", help="add a reversed column per market")
    t.add_argument("--metrics", action="store_true", help="annualized return ± risk and Sharpe")
    t.add_argument("--band-seeds", type=int, default=0, help="universal mean ± stderr over N seeds")

    syn = sub.add_parser("synth", help="synthetic markets")
    syn_sub = syn.add_subparsers(dest="kind", required=True)
    cg = syn_sub.add_parser("cover-gluss", parents=[io_out], help="cash / alternating stock market")
    cg.add_argument("--days", type=int, required=True)
    rnd = syn_sub.add_parser("random", parents=[io_out], help="uniform random relatives")
    rnd.add_argument("--days", type=int, required=True)
    rnd.add_argument("--assets", type=int, required=True)
    rnd.add_argument("--seed", type=int)

    sub.add_parser("metamarket", parents=[io_in, io_out, strat],
                        help="market whose assets are ANTICOR_w wealth curves, w = 2..W")

    return p.parse_args(argv)


def build_config(args: argparse.Namespace) -> CliConfig:
    env = env_defaults()
    flags = {
        "W": getattr(args, "W", None),
        "eta": getattr(args, "eta", None),
        "n_samples": getattr(args, "n_samples", None),
        "seed": getattr(args, "seed", None),
        "max_workers": getattr(args, "workers", None),
    }
    values = {k: v if v is not None else env[k] for k, v in flags.items()}
    return validated(
        CliConfig,
        command=args.command,
        w=getattr(args, "w", None),
        gamma=getattr(args, "gamma", 0.0),
        tol=getattr(args, "tol", CBAL_STAR_TOL),
        risk_free=env["risk_free"],
        trading_days=env["trading_days"],
        days=getattr(args, "days", None),
        assets=getattr(args, "assets", None),
        band_seeds=getattr(args, "band_seeds", 0),
        **values,
    )


# ---------------------------------------------------------------------- #
# I/O helpers
# ---------------------------------------------------------------------- #

def read_market(path: str, format: str) -> MarketSequence:
    if path == "-":
        data = load_prices(sys.stdin, format)
    else:
        try:
            with open(path, "rb") as fh:
                data = load_prices(fh, format)
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror or exc}", path=path)
    return to_relatives(data) if format == FORMAT_PRICES else data


def write_bytes(data: bytes, path: str) -> None:
    if path == "-":
        out = getattr(sys.stdout, "buffer", None)
        if out is None:
            sys.stdout.write(data.decode("utf-8"))
        else:
            sys.stdout.flush()
            out.write(data)
            out.flush()
        return
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror or exc}", path=path)


def write_market(x: MarketSequence, path: str) -> None:
    if path == "-":
        save_market(x, sys.stdout)
        return
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            save_market(x, fh)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror or exc}", path=path)


def _params(args, cfg: CliConfig) -> dict:
    params = {"W": cfg.W, "eta": cfg.eta, "n_samples": cfg.n_samples, "tol": cfg.tol}
    if cfg.w is not None:
        params["w"] = cfg.w
    if getattr(args, "weights", None):
        params["weights"] = args.weights
    return params


# ---------------------------------------------------------------------- #
# Commands
# ---------------------------------------------------------------------- #

def cmd_convert(args, cfg):
    write_market(read_market(args.input, args.format), args.output)


def cmd_reverse(args, cfg):
    write_market(reverse_market(read_market(args.input, args.format)), args.output)


def cmd_run(args, cfg):
    x = read_market(args.input, args.format)
    market_id = "stdin" if args.input == "-" else Path(args.input).stem
    spec = validated(RunSpec, market_id=market_id, strategy=args.strategy, params=_params(args, cfg),
                     gamma=cfg.gamma, seed=cfg.seed)
    result = run(spec, x, cfg.trading_days, cfg.risk_free)
    write_bytes(emit_report([result], args.out_format), args.output)
    if args.curve:
        fmt = "svg-lines" if args.curve.endswith(".svg") else "csv"
        write_bytes(emit_report(curves_of([result]), fmt), args.curve)


def cmd_sweep(args, cfg):
    x = read_market(args.input, args.format)
    if args.axis == "window":
        result = sweep_window(x, args.range, cfg.gamma, cfg.max_workers)
    elif args.axis == "maxwindow":
        result = sweep_max_window(x, args.range, cfg.gamma, cfg.max_workers)
    else:
        result = sweep_commission(x, args.gammas, args.strategy, _params(args, cfg), cfg.seed)
    write_bytes(emit_report(result, args.out_format), args.output)


def cmd_table(args, cfg):
    unknown = [s for s in args.strategies if s not in STRATEGIES]
    if unknown:
        raise ArgumentError(f"unknown strategy id(s): {', '.join(unknown)}")
    markets = {}
    for path in args.input:
        name = "stdin" if path == "-" else Path(path).stem
        if name in markets:
            raise ArgumentError(f"duplicate market name {name!r}")
        markets[name] = read_market(path, args.format)
    common = dict(params=_params(args, cfg), gamma=cfg.gamma, seed=cfg.seed,
                  with_reversed=args.reversed, max_workers=cfg.max_workers)
    if args.metrics:
        table = metrics_table(markets, args.strategies, **common)
    else:
        table = run_table(markets, args.strategies, band_seeds=cfg.band_seeds, **common)
    write_bytes(emit_report(table, args.out_format), args.output)


def cmd_synth(args, cfg):
    if args.kind == "cover-gluss":
        x = cover_gluss(cfg.days)
    else:
        x = random_market(cfg.days, cfg.assets, seed=cfg.seed)
    write_market(x, args.output)


def cmd_metamarket(args, cfg):
    x = read_market(args.input, args.format)
    write_market(meta_market(anticor_over(cfg.W, x), x, cfg.max_workers), args.output)


COMMANDS = {
    "convert": cmd_convert,
    "reverse": cmd_reverse,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "table": cmd_table,
    "synth": cmd_synth,
    "metamarket": cmd_metamarket,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return CODE_USAGE if exc.code not in (0, None) else 0

    level = logging.INFO if args.verbose else os.getenv("LOG_LEVEL", "WARNING").upper()
    if isinstance(level, str) and not isinstance(logging.getLevelName(level), int):
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(message)s", force=True)

    try:
        cfg = build_config(args)
        logging.info("[CLI] %s (seed %d, workers %d)", args.command, cfg.seed, cfg.max_workers)
        COMMANDS[args.command](args, cfg)
    except AnticorError as exc:
        print(f"error: {exc.reason}: {exc.message}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {ERROR_CODES[CODE_INPUT]}: {exc}", file=sys.stderr)
        return CODE_INPUT
    except Exception as exc:  # noqa: BLE001
        logging.debug("[CLI] unexpected failure", exc_info=True)
        print(f"error: UNKNOWN: {exc}", file=sys.stderr)
        return CODE_UNKNOWN
    return 0


if __name__ == "__main__":
    sys.exit(main())
