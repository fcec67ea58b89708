# report.py
"""Render run sets, tables and sweep series as TSV / CSV / SVG bytes.

Table cells are truncated (not rounded) to two decimals. Sweep series
and wealth curves keep full precision (`repr` of each float) so they can
be re-plotted elsewhere.
"""
from __future__ import annotations

import csv
import io
import logging
from decimal import ROUND_DOWN, Context, Decimal
from typing import Dict, List, Mapping, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

from anticor.constants import REPORT_FORMATS  # noqa: E402
from anticor.exceptions import FormatError  # noqa: E402
from anticor.portfolio import WealthSeries  # noqa: E402
from backtest import RunResult, SweepResult, Table  # noqa: E402

Results = Union[Table, SweepResult, Sequence[RunResult], Mapping[str, WealthSeries]]

RUN_COLUMNS = ("market", "strategy", "gamma", "seed", "total_return",
               "annualized_return_pct", "annualized_risk_pct", "sharpe", "turnover_pct", "final_wealth")

_CENT = Decimal("0.01")
_WIDE = Context(prec=400)
_SVG_RC = {"svg.hashsalt": "anticor", "svg.fonttype": "none", "path.simplify": False}


def truncate(v: Optional[float]) -> str:
    """Two decimals, cut toward zero: 27.079 → '27.07', -0.005 → '0.00'."""
    if v is None:
        return "n/a"
    if v != v or v in (float("inf"), float("-inf")):
        return repr(float(v))
    d = Decimal(repr(float(v))).quantize(_CENT, rounding=ROUND_DOWN, context=_WIDE)
    if d == 0:
        d = abs(d)
    return f"{d:f}"


def _pct(v: Optional[float]) -> Optional[float]:
    return None if v is None else v * 100.0


# ---------------------------------------------------------------------- #
# Row builders
# ---------------------------------------------------------------------- #

def _comments(meta: Mapping[str, str]) -> List[List[str]]:
    return [[f"# {key}: {meta[key]}"] for key in sorted(meta)]


def _returns_rows(table: Table) -> List[List[str]]:
    rows = _comments(table.meta) + [["strategy"] + table.columns]
    for s in table.rows:
        line = [s]
        for col in table.columns:
            cell = truncate(table.cells.get(s, {}).get(col))
            err = table.errors.get(s, {}).get(col)
            line.append(cell if err is None else f"{cell} ± {truncate(err)}")
        rows.append(line)
    return rows


def _metrics_rows(table: Table) -> List[List[str]]:
    header = ["strategy"]
    for col in table.columns:
        header += [f"{col} ret ± risk %", f"{col} sharpe"]
    rows = _comments(table.meta) + [header]
    for s in table.rows:
        line = [s]
        for col in table.columns:
            r = table.reports.get(s, {}).get(col)
            if r is None:
                line += ["n/a", "n/a"]
                continue
            line += [f"{truncate(_pct(r.annualized_return))} ± {truncate(_pct(r.annualized_risk))}",
                     truncate(r.sharpe)]
        rows.append(line)
    return rows


def _run_rows(runs: Sequence[RunResult]) -> List[List[str]]:
    rows = [list(RUN_COLUMNS)]
    for r in runs:
        rep = r.report
        rows.append([
            r.spec.market_id, r.spec.strategy, repr(r.spec.gamma), str(r.spec.seed),
            truncate(r.final),
            truncate(_pct(rep.annualized_return)) if rep else "n/a",
            truncate(_pct(rep.annualized_risk)) if rep else "n/a",
            truncate(rep.sharpe) if rep else "n/a",
            truncate(_pct(r.turnover)),
            repr(r.final),
        ])
    return rows


def _sweep_rows(sweep: SweepResult) -> List[List[str]]:
    names = list(sweep.series)
    rows = [[sweep.axis] + names]
    for i, v in enumerate(sweep.values):
        rows.append([repr(v)] + [repr(float(sweep.series[n][i])) for n in names])
    return rows


def _curve_rows(curves: Mapping[str, WealthSeries]) -> List[List[str]]:
    names = list(curves)
    rows = [["day"] + names]
    if not names:
        return rows
    days = {c.n_days for c in curves.values()}
    if len(days) != 1:
        raise FormatError(f"wealth curves cover different day counts: {sorted(days)}")
    values = {n: curves[n].values for n in names}
    for t in range(days.pop() + 1):
        rows.append([str(t)] + [repr(float(values[n][t])) for n in names])
    return rows


def _rows(results: Results) -> List[List[str]]:
    if isinstance(results, Table):
        return _metrics_rows(results) if results.kind == "metrics" else _returns_rows(results)
    if isinstance(results, SweepResult):
        return _sweep_rows(results)
    if isinstance(results, Mapping):
        return _curve_rows(results)
    return _run_rows(list(results))


# ---------------------------------------------------------------------- #
# Writers
# ---------------------------------------------------------------------- #

def _delimited(rows: List[List[str]], delimiter: str) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    for row in rows:
        if len(row) == 1 and row[0].startswith("# "):
            buf.write(row[0] + "\n")
        else:
            writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def _series_for_plot(results: Results):
    if isinstance(results, SweepResult):
        return results.axis, "total return", [(n, results.values, ys) for n, ys in results.series.items()]
    if isinstance(results, Mapping):
        return "day", "wealth", [(n, list(range(c.n_days + 1)), c.values) for n, c in results.items()]
    raise FormatError("svg-lines renders sweeps and wealth curves only", format="svg-lines")


def _svg(results: Results) -> bytes:
    xlabel, ylabel, lines = _series_for_plot(results)
    with matplotlib.rc_context(_SVG_RC):
        fig = Figure(figsize=(8, 5))
        ax = fig.add_subplot(1, 1, 1)
        for name, xs, ys in lines:
            ax.plot(xs, ys, label=name, linewidth=1.2)
        if lines and all(min(ys) > 0 for _, _, ys in lines if len(ys)):
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if lines:
            ax.legend(loc="best", fontsize="small")
        ax.grid(True, linewidth=0.3)
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def emit_report(results: Results, format: str = "tsv") -> bytes:
    """Byte-stable rendering of `results` in one of REPORT_FORMATS."""
    if format not in REPORT_FORMATS:
        raise FormatError(f"unknown report format {format!r}; expected one of {', '.join(REPORT_FORMATS)}",
                          format=format)
    if format == "svg-lines":
        out = _svg(results)
    else:
        out = _delimited(_rows(results), "\t" if format == "tsv" else ",")
    logging.debug("[Report] %s, %d byte(s)", format, len(out))
    return out


def curves_of(results: Sequence[RunResult]) -> Dict[str, WealthSeries]:
    """Wealth curves of a run set keyed by 'strategy@market'."""
    return {f"{r.spec.strategy}@{r.spec.market_id}": r.wealth for r in results}
