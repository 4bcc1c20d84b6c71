"""Command-line front end emitting densities, tables, and distributions.

Commands: single, pair, table, kdist, bound, check. Data commands serialize
to CSV or JSON (floats in shortest round-trip form, so re-parsing reproduces
the computed values exactly); bound and kdist default to short text
summaries. Exit codes: 0 success, 1 failed check, 2 usage error, 3 numerical
guard failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path

import numpy as np

from .linalg import as_vector
from .measurement import (
    LIMIT,
    OutcomeDensity,
    PAIR_LABELS,
    PointerGrid,
    SINGLE_LABELS,
    coincidence_density,
    completeness_defect,
    eigenstate_density_closed_form,
    single_outcome_density,
)
from .polarization import (
    bell_expectation,
    bell_state,
    classical_chsh_bound,
    stokes_eigenstate,
    stokes_operator,
)
from .quasiprob import (
    IllConditionedDesignError,
    PAIR_COLUMN_LABELS,
    PAIR_ROW_LABELS,
    S1_CENTERS,
    deconvolve,
    k_distribution,
    quasiprob_table_pair,
    quasiprob_table_single,
    reconstruct_density,
)

NAMED_STATES = {
    "y+": lambda: stokes_eigenstate(2, +1),
    "y-": lambda: stokes_eigenstate(2, -1),
    "x+": lambda: stokes_eigenstate(1, +1),
    "x-": lambda: stokes_eigenstate(1, -1),
    "r": lambda: stokes_eigenstate(3, +1),
    "l": lambda: stokes_eigenstate(3, -1),
    "bell": bell_state,
}

DEFAULT_GRID_SINGLE = "-6:6:0.01"
DEFAULT_GRID_PAIR = "-14:14:0.05"


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_grid(text: str) -> PointerGrid:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be LO:HI:STEP, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"grid must contain numbers, got {text!r}") from None
    try:
        return PointerGrid(lo, hi, step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_delta_s(text: str, allow_limit: bool) -> float:
    if text.strip().lower() == "inf":
        if not allow_limit:
            raise UsageError("delta-s 'inf' is only accepted by the table and kdist commands")
        return LIMIT
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"delta-s must be a positive number or 'inf', got {text!r}") from None
    if not value > 0 or math.isinf(value) or math.isnan(value):
        raise UsageError(f"delta-s must be a positive number, got {text!r}")
    return value


def _load_state_file(path: str) -> np.ndarray:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read state file {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"state file {path!r} is not valid JSON: {exc}") from None
    amplitudes = document.get("amplitudes") if isinstance(document, dict) else None
    if not isinstance(amplitudes, list) or len(amplitudes) not in (2, 4):
        raise UsageError(
            f"state file {path!r} must contain an 'amplitudes' list of 2 or 4 [re, im] pairs"
        )
    try:
        state = np.array([complex(re, im) for re, im in amplitudes])
    except (TypeError, ValueError):
        raise UsageError(f"state file {path!r}: each amplitude must be an [re, im] pair") from None
    norm = float(np.linalg.norm(state))
    if abs(norm - 1.0) > 1e-9:
        raise UsageError(f"state file {path!r}: amplitudes are not normalized (norm {norm})")
    return state / norm


def _resolve_state(args, default: str) -> tuple[np.ndarray, str]:
    if getattr(args, "state_file", None):
        return _load_state_file(args.state_file), f"file:{args.state_file}"
    name = getattr(args, "state", None) or default
    if name not in NAMED_STATES:
        raise UsageError(f"unknown state {name!r}; choose from {sorted(NAMED_STATES)} or --state-file")
    return as_vector(NAMED_STATES[name]()), name


def _round_percent(weight: float) -> float:
    """Percentage rounded half away from zero to one decimal."""
    return float(Decimal(repr(weight * 100.0)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _json_text(command: str, config: dict, data) -> str:
    return json.dumps({"command": command, "config": config, "data": data}, indent=2) + "\n"


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _delta_s_config(delta_s: float):
    return "inf" if math.isinf(delta_s) else delta_s


def _grid_config(grid: PointerGrid) -> str:
    return f"{grid.lo}:{grid.hi}:{grid.step}"


def _density_document(density: OutcomeDensity, columns: list[str]) -> dict:
    rows = []
    if len(density.grids) == 1:
        for i, m in enumerate(density.grids[0].points()):
            rows.append([float(m)] + [float(v) for v in density.values[i]])
    else:
        points_a = density.grids[0].points()
        points_b = density.grids[1].points()
        for i, ma in enumerate(points_a):
            for j, mb in enumerate(points_b):
                rows.append([float(ma), float(mb)] + [float(v) for v in density.values[i, j]])
    return {"columns": columns, "rows": rows}


def _emit_density(args, command: str, density: OutcomeDensity, columns: list[str], config: dict) -> None:
    document = _density_document(density, columns)
    if args.format == "json":
        _write(_json_text(command, config, document), args.out)
    else:
        rows = [[_fmt(v) for v in row] for row in document["rows"]]
        _write(_csv_text(columns, rows), args.out)


def _cmd_single(args) -> int:
    state, state_name = _resolve_state(args, default="y+")
    if state.size != 2:
        raise UsageError(f"the single command needs a 2-amplitude state, got {state.size}")
    delta_s = _parse_delta_s(args.delta_s, allow_limit=False)
    grid = _parse_grid(args.grid)
    density = single_outcome_density(state, delta_s, grid)
    config = {"state": state_name, "delta_s": delta_s, "grid": _grid_config(grid)}
    _emit_density(args, "single", density, ["s1m", "p_s2_plus", "p_s2_minus"], config)
    return 0


def _cmd_pair(args) -> int:
    state, state_name = _resolve_state(args, default="bell")
    if state.size != 4:
        raise UsageError(f"the pair command needs a 4-amplitude state, got {state.size}")
    delta_s = _parse_delta_s(args.delta_s, allow_limit=False)
    grid_a = _parse_grid(args.grid)
    grid_b = _parse_grid(args.grid_b) if args.grid_b else grid_a
    density = coincidence_density(state, delta_s, grid_a, grid_b)
    config = {
        "state": state_name,
        "delta_s": delta_s,
        "grid": _grid_config(grid_a),
        "grid_b": _grid_config(grid_b),
    }
    # Sheet columns: first sign is arm a's s2, second is arm b's.
    columns = ["s1m_a", "s1m_b", "p_pp", "p_pm", "p_mp", "p_mm"]
    _emit_density(args, "pair", density, columns, config)
    return 0


def _table_records(table):
    if table.arms == 1:
        return [
            {"labels": {"s1": s1, "s2": s2}, "weight": table.entries[(s1, s2)]}
            for s2 in SINGLE_LABELS
            for s1 in S1_CENTERS
        ]
    return [
        {
            "labels": {"a": list(label_a), "b": list(label_b)},
            "weight": table.entries[(label_a, label_b)],
        }
        for label_b in PAIR_ROW_LABELS
        for label_a in PAIR_COLUMN_LABELS
    ]


def _cmd_table(args) -> int:
    system = args.system
    if getattr(args, "state_file", None) or getattr(args, "state", None):
        state, state_name = _resolve_state(args, default="")
        inferred = "single" if state.size == 2 else "pair"
        if system is None:
            system = inferred
        elif system != inferred:
            raise UsageError(f"--system {system} conflicts with a {state.size}-amplitude state")
    else:
        system = system or "single"
        state, state_name = _resolve_state(args, default="y+" if system == "single" else "bell")
    delta_s = _parse_delta_s(args.delta_s, allow_limit=True)

    if system == "single":
        table = quasiprob_table_single(state, delta_s)
    else:
        table = quasiprob_table_pair(state, delta_s)
    config = {"system": system, "state": state_name, "delta_s": _delta_s_config(delta_s)}

    if args.format == "json":
        _write(_json_text("table", config, _table_records(table)), args.out)
        return 0
    if table.arms == 1:
        header = ["s2"] + [f"s1={s1}" for s1 in S1_CENTERS]
        rows = [
            [f"{s2:+d}"] + [_fmt(table.entries[(s1, s2)]) for s1 in S1_CENTERS]
            for s2 in SINGLE_LABELS
        ]
    else:
        header = ["(s1b,s2b)\\(s1a,s2a)"] + [f"({a[0]},{a[1]})" for a in PAIR_COLUMN_LABELS]
        rows = [
            [f"({b[0]},{b[1]})"] + [_fmt(table.entries[(a, b)]) for a in PAIR_COLUMN_LABELS]
            for b in PAIR_ROW_LABELS
        ]
    _write(_csv_text(header, rows), args.out)
    return 0


def _cmd_kdist(args) -> int:
    state, state_name = _resolve_state(args, default="bell")
    if state.size != 4:
        raise UsageError(f"the kdist command needs a 4-amplitude state, got {state.size}")
    delta_s = _parse_delta_s(args.delta_s, allow_limit=True)
    distribution = k_distribution(quasiprob_table_pair(state, delta_s))
    config = {"state": state_name, "delta_s": _delta_s_config(delta_s)}
    ordered = sorted(distribution.weights, reverse=True)

    if args.format == "json":
        data = [
            {"k": k, "weight": distribution.weights[k], "percent": _round_percent(distribution.weights[k])}
            for k in ordered
        ]
        _write(_json_text("kdist", config, data), args.out)
        return 0
    if args.format == "csv":
        rows = [
            [str(k), _fmt(distribution.weights[k]), f"{_round_percent(distribution.weights[k]):.1f}"]
            for k in ordered
        ]
        _write(_csv_text(["k", "weight", "percent"], rows), args.out)
        return 0
    lines = [
        f"K={k}: {_round_percent(distribution.weights[k]):.1f}% (weight {_fmt(distribution.weights[k])})"
        for k in ordered
    ]
    lines.append(f"sum of weights = {_fmt(distribution.total())}")
    lines.append(f"mean K = {_fmt(distribution.mean())}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_bound(args) -> int:
    bound = classical_chsh_bound()
    quantum = bell_expectation()
    margin = quantum - bound
    if args.format == "json":
        data = {"classical_bound": bound, "quantum_expectation": quantum, "violation_margin": margin}
        _write(_json_text("bound", {}, data), args.out)
        return 0
    _write(
        f"classical max K = {bound:g}; quantum <K> = {quantum:.6f}; "
        f"violation margin = {margin:.6f}\n",
        args.out,
    )
    return 0


def _check_results() -> list[tuple[str, bool, str]]:
    results = []

    def record(name: str, value: float, limit: float):
        results.append((name, value < limit, f"{value:.3e} < {limit:.0e}"))

    s1 = stokes_operator(1)
    record("completeness defect (delta_s=0.6)", completeness_defect(s1, 0.6, PointerGrid(-8, 8, 1e-3)), 1e-6)
    record("completeness defect (delta_s=2)", completeness_defect(s1, 2.0, PointerGrid(-14, 14, 1e-3)), 1e-6)

    yplus = stokes_eigenstate(2, +1)
    oracle_grid = PointerGrid(-4, 4, 0.01)
    worst = 0.0
    for delta_s in (0.3, 0.6, 1.0, 2.0):
        density = single_outcome_density(yplus, delta_s, oracle_grid)
        p_plus, p_minus = eigenstate_density_closed_form(delta_s, oracle_grid.points())
        worst = max(
            worst,
            float(np.max(np.abs(density.sheet(1) - p_plus))),
            float(np.max(np.abs(density.sheet(-1) - p_minus))),
        )
    record("closed-form oracle agreement", worst, 1e-12)

    grid_1d = PointerGrid(-8, 8, 0.01)
    recovered = deconvolve(single_outcome_density(yplus, 1.0, grid_1d), 1.0)
    analytic = quasiprob_table_single(yplus, 1.0)
    diff = max(abs(recovered.entries[k] - analytic.entries[k]) for k in analytic.entries)
    record("deconvolution matches analytic table (single)", diff, 1e-8)

    pair = bell_state()
    grid_2d = PointerGrid(-8, 8, 0.05)
    recovered_pair = deconvolve(coincidence_density(pair, 1.0, grid_2d, grid_2d), 1.0)
    analytic_pair = quasiprob_table_pair(pair, 1.0)
    diff = max(abs(recovered_pair.entries[k] - analytic_pair.entries[k]) for k in analytic_pair.entries)
    record("deconvolution matches analytic table (pair)", diff, 1e-6)

    limit_single = quasiprob_table_single(yplus, LIMIT)
    limit_pair = quasiprob_table_pair(pair, LIMIT)
    record("table totals equal one", max(abs(limit_single.total - 1), abs(limit_pair.total - 1)), 1e-12)

    zero_single = abs(limit_single.entries[(0, 1)] + limit_single.entries[(0, -1)])
    zero_a = abs(sum(w for (la, lb), w in limit_pair.entries.items() if la[0] == 0))
    zero_b = abs(sum(w for (la, lb), w in limit_pair.entries.items() if lb[0] == 0))
    record("zero total weight at s1=0", max(zero_single, zero_a, zero_b), 1e-12)

    single_grid = PointerGrid(-6, 6, 0.01)
    table06 = quasiprob_table_single(yplus, 0.6)
    rebuilt = reconstruct_density(table06, single_grid)
    direct = single_outcome_density(yplus, 0.6, single_grid)
    err = float(np.max(np.abs(rebuilt.values - direct.values)))
    pair_grid = PointerGrid(-14, 14, 0.05)
    table_pair = quasiprob_table_pair(pair, 2.0)
    rebuilt_pair = reconstruct_density(table_pair, pair_grid, pair_grid)
    direct_pair = coincidence_density(pair, 2.0, pair_grid, pair_grid)
    err = max(err, float(np.max(np.abs(rebuilt_pair.values - direct_pair.values))))
    record("density rebuilt from table weights", err, 1e-10)

    record("CHSH expectation equals 2*sqrt(2)", abs(bell_expectation() - 2.0 * math.sqrt(2.0)), 1e-12)
    results.append(("classical CHSH bound equals 2", classical_chsh_bound() == 2.0, "brute force over 16 assignments"))
    return results


def _cmd_check(args) -> int:
    results = _check_results()
    for name, ok, detail in results:
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
    failed = sum(1 for _, ok, _ in results if not ok)
    sys.stdout.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    return 0 if failed == 0 else 1


def _add_state_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--state", help=f"named input state: {', '.join(sorted(NAMED_STATES))}")
    parser.add_argument("--state-file", help="JSON file with an 'amplitudes' list of [re, im] pairs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakpol",
        description="Finite-resolution polarization measurement statistics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_single = sub.add_parser("single", help="1D pointer density with s2 readout")
    _add_state_options(p_single)
    p_single.add_argument("--delta-s", default="0.6", help="pointer resolution (positive)")
    p_single.add_argument("--grid", default=DEFAULT_GRID_SINGLE, help="pointer grid LO:HI:STEP")
    p_single.add_argument("--format", choices=("csv", "json"), default="csv")
    p_single.add_argument("--out", help="output path (default: stdout)")
    p_single.set_defaults(handler=_cmd_single)

    p_pair = sub.add_parser("pair", help="2D coincidence density with s2 readouts")
    _add_state_options(p_pair)
    p_pair.add_argument("--delta-s", default="2", help="pointer resolution (positive)")
    p_pair.add_argument("--grid", default=DEFAULT_GRID_PAIR, help="arm-a grid LO:HI:STEP")
    p_pair.add_argument("--grid-b", help="arm-b grid LO:HI:STEP (default: same as --grid)")
    p_pair.add_argument("--format", choices=("csv", "json"), default="csv")
    p_pair.add_argument("--out", help="output path (default: stdout)")
    p_pair.set_defaults(handler=_cmd_pair)

    p_table = sub.add_parser("table", help="signed joint quasi-probability table")
    _add_state_options(p_table)
    p_table.add_argument("--system", choices=("single", "pair"), help="one photon or a pair")
    p_table.add_argument("--delta-s", default="inf", help="positive number or 'inf'")
    p_table.add_argument("--format", choices=("csv", "json"), default="csv")
    p_table.add_argument("--out", help="output path (default: stdout)")
    p_table.set_defaults(handler=_cmd_table)

    p_kdist = sub.add_parser("kdist", help="signed distribution of the CHSH combination")
    _add_state_options(p_kdist)
    p_kdist.add_argument("--delta-s", default="inf", help="positive number or 'inf'")
    p_kdist.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p_kdist.add_argument("--out", help="output path (default: stdout)")
    p_kdist.set_defaults(handler=_cmd_kdist)

    p_bound = sub.add_parser("bound", help="classical bound, quantum expectation, margin")
    p_bound.add_argument("--format", choices=("text", "json"), default="text")
    p_bound.add_argument("--out", help="output path (default: stdout)")
    p_bound.set_defaults(handler=_cmd_bound)

    p_check = sub.add_parser("check", help="run built-in consistency diagnostics")
    p_check.set_defaults(handler=_cmd_check)

    return parser


def _merge_dash_values(argv: list[str]) -> list[str]:
    # Join options with values like "-4:4:0.01" into one token so argparse
    # does not mistake the leading dash for a flag.
    merged = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        follower = argv[i + 1] if i + 1 < len(argv) else ""
        if (
            token in ("--grid", "--grid-b", "--delta-s")
            and len(follower) > 1
            and follower[0] == "-"
            and (follower[1].isdigit() or follower[1] == ".")
        ):
            merged.append(f"{token}={follower}")
            skip = True
        else:
            merged.append(token)
    return merged


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_merge_dash_values(argv))
    try:
        return args.handler(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except IllConditionedDesignError as exc:
        sys.stderr.write(f"numerical guard: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
