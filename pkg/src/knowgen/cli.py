"""Command-line front end.

    knowgen run SCENARIO.json --out DIR [--seed N] [--episodes N] [--format csv|json]
    knowgen analyze MATRIX.json [--lambda L] [--out FILE]
    knowgen sweep MATRIX.json [--grid K] [--format csv|json] [--out FILE]
    knowgen optimize --concepts N --stimuli M [--lambda L] [--seed N] [--restarts R] [--out FILE]

Exit codes: 0 success, 1 missing or unreadable input, 2 malformed input
(bad JSON, schema or value violation, bad flags), 3 error while computing.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .knowledge import run_curriculum
from .probmath import DomainError
from .scenario_io import (
    FormatError,
    dumps,
    matrix_from_obj,
    parse_json,
    scenario_from_obj,
    scenario_to_obj,
)
from .semnet import DEFAULT_LAMBDA, lambda_profile, optimize_matrix, similarity_matrix, synsets, transfer_energy

EXIT_OK, EXIT_MISSING, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2, 3

TRACE_COLUMNS = ("episode", "tau", "observation", "action", "F", "G", "surprisal", "n_concepts")


class MissingInput(OSError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except FileNotFoundError:
        raise MissingInput(f"no such file: {path}") from None
    except OSError as exc:
        raise MissingInput(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def trace_rows(traces) -> list[dict]:
    rows = []
    for tr in traces:
        for r in tr.rows:
            rows.append(
                {
                    "episode": tr.episode,
                    "tau": r.tau,
                    "observation": r.observation,
                    "action": "none" if r.action is None else r.action,
                    "F": r.F,
                    "G": r.G,
                    "surprisal": r.surprisal,
                    "n_concepts": r.n_concepts,
                }
            )
    return rows


def _csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_num(row[c]) if isinstance(row[c], float) or row[c] is None else row[c] for c in columns])
    return buf.getvalue()


def cmd_run(args) -> int:
    scenario = scenario_from_obj(parse_json(_read(args.scenario), args.scenario))
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    if args.episodes is not None:
        scenario = replace(scenario, episodes=args.episodes)
    result = run_curriculum(scenario)
    rows = trace_rows(result.traces)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        (out / "trace.json").write_text(dumps(rows))
    else:
        (out / "trace.csv").write_text(_csv(rows, TRACE_COLUMNS))
    summary = dict(result.summary)
    summary["scenario_config"] = scenario_to_obj(scenario)
    (out / "summary.json").write_text(dumps(summary))
    print(f"{summary['regime']} seed={scenario.seed} episodes={len(result.traces)} -> {out}")
    return EXIT_OK


def _load_matrix(path: str):
    return matrix_from_obj(parse_json(_read(path), path))


def analysis(csm, lam: float) -> dict:
    return {
        "matrix": csm.to_dict(),
        "report": transfer_energy(csm, lam).to_dict(),
        "similarity": similarity_matrix(csm).tolist(),
        # synsets are only defined on binary link sets
        "synsets": synsets(csm) if csm.mode == "binary" else None,
    }


def cmd_analyze(args) -> int:
    _emit(dumps(analysis(_load_matrix(args.matrix), args.lam)), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    profile = [r.to_dict() for r in lambda_profile(_load_matrix(args.matrix), args.grid)]
    if args.format == "json":
        text = dumps(profile)
    else:
        text = _csv(profile, ("lambda", "information", "concept_entropy", "omega"))
    _emit(text, args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    rng = np.random.default_rng(args.seed)
    csm, report = optimize_matrix(args.concepts, args.stimuli, args.lam, rng, args.restarts)
    payload = {
        "matrix": csm.to_dict(),
        "report": report.to_dict(),
        "lambda": args.lam,
        "seed": args.seed,
        "restarts": args.restarts,
        "concepts": args.concepts,
        "stimuli": args.stimuli,
    }
    _emit(dumps(payload), args.out)
    return EXIT_OK


def _unit_interval(text: str) -> float:
    x = float(text)
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"lambda must lie in [0, 1], got {text}")
    return x


def _nonneg_int(text: str) -> int:
    x = int(text)
    if x < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return x


def _positive_int(text: str) -> int:
    x = int(text)
    if x < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return x


def _grid(text: str) -> int:
    x = int(text)
    if x < 2:
        raise argparse.ArgumentTypeError(f"grid needs at least 2 points, got {text}")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="knowgen", description="Knowledge-generation engine.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write trace + summary")
    run.add_argument("scenario", help="scenario JSON file")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=_nonneg_int, help="override the scenario seed")
    run.add_argument("--episodes", type=_positive_int, help="override the learning episode count")
    run.add_argument("--format", choices=("csv", "json"), default="csv", help="trace format")
    run.set_defaults(func=cmd_run)

    an = sub.add_parser("analyze", help="transfer energy, similarity and synsets of a matrix")
    an.add_argument("matrix", help="matrix JSON file")
    an.add_argument("--lambda", dest="lam", type=_unit_interval, default=DEFAULT_LAMBDA, help="weight in [0, 1]")
    an.add_argument("--out", help="write here instead of stdout")
    an.set_defaults(func=cmd_analyze)

    sw = sub.add_parser("sweep", help="transfer energy over an even lambda grid")
    sw.add_argument("matrix", help="matrix JSON file")
    sw.add_argument("--grid", type=_grid, default=11, help="number of lambda values, at least 2")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--out", help="write here instead of stdout")
    sw.set_defaults(func=cmd_sweep)

    op = sub.add_parser("optimize", help="search for a least-effort binary matrix")
    op.add_argument("--concepts", type=_positive_int, required=True)
    op.add_argument("--stimuli", type=_positive_int, required=True)
    op.add_argument("--lambda", dest="lam", type=_unit_interval, default=DEFAULT_LAMBDA, help="weight in [0, 1]")
    op.add_argument("--seed", type=_nonneg_int, default=0)
    op.add_argument("--restarts", type=_positive_int, default=8, help="random starts for the bit-flip search")
    op.add_argument("--out", help="write here instead of stdout")
    op.set_defaults(func=cmd_optimize)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)  # usage errors exit with 2
    try:
        return args.func(args)
    except MissingInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
