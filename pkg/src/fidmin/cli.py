"""Command-line entry point: ``fidmin compute | sweep | verify``.

State files are JSON documents::

    {"dim_a": 2, "dim_b": 2, "matrix": [[re, im], [re, im], ...]}

with the ``(dim_a*dim_b)**2`` entries listed row-major.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 numerical failure.
"""

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import product

import numpy as np

from . import nonlocality as nl
from .errors import DimensionError, NumericalError, ValidationError
from .searchopt import OptimizerConfig
from .states import BellDiagonalParams, DensityMatrix, bell_diagonal, isotropic, werner
from .verify import SUITES, run_suite

log = logging.getLogger("fidmin")

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
FAMILIES = ("bell_diagonal", "werner", "isotropic", "symmetric_bd")
FAMILY_ARITY = {"bell_diagonal": 3, "werner": 1, "isotropic": 1, "symmetric_bd": 1}
CSV_HEADER = ["family", "p1", "p2", "p3", "measure", "value", "method", "closed_form_value", "abs_gap"]


class InputError(Exception):
    pass


def fmt(x):
    return f"{x:.9g}"


# state files ----------------------------------------------------------------


def parse_state_text(text, source="<state>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{source}: top level must be an object with dim_a, dim_b, matrix")
    for key in ("dim_a", "dim_b", "matrix"):
        if key not in doc:
            raise InputError(f"{source}: missing field '{key}'")
    dim_a, dim_b = doc["dim_a"], doc["dim_b"]
    for key, val in (("dim_a", dim_a), ("dim_b", dim_b)):
        if not isinstance(val, int) or isinstance(val, bool) or val < 1:
            raise InputError(f"{source}: field '{key}' must be a positive integer")
    entries = doc["matrix"]
    size = dim_a * dim_b
    if not isinstance(entries, list) or len(entries) != size * size:
        raise InputError(f"{source}: field 'matrix' must list {size * size} [re, im] pairs")
    values = np.empty(size * size, dtype=np.complex128)
    for i, pair in enumerate(entries):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
        ):
            raise InputError(f"{source}: field 'matrix' entry {i} must be a [re, im] pair of numbers")
        values[i] = complex(pair[0], pair[1])
    try:
        return DensityMatrix(dim_a, dim_b, values.reshape(size, size))
    except ValidationError as exc:
        raise InputError(f"{source}: invalid density matrix ({exc.invariant}): {exc}") from exc


def read_state_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    return parse_state_text(text, str(path))


def state_to_text(rho):
    entries = [[float(z.real), float(z.imag)] for z in rho.mat.reshape(-1)]
    return json.dumps({"dim_a": rho.dim_a, "dim_b": rho.dim_b, "matrix": entries}, indent=1)


# sweep ----------------------------------------------------------------------


def parse_number(text):
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse number {text!r}") from exc


def parse_grid(text):
    """``start:stop:steps`` -> list of floats (``steps`` points, inclusive)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"grid {text!r} must look like start:stop:steps")
    start, stop = parse_number(parts[0]), parse_number(parts[1])
    try:
        steps = int(parts[2])
    except ValueError as exc:
        raise InputError(f"grid {text!r}: steps must be an integer") from exc
    if steps < 1:
        raise InputError(f"grid {text!r}: steps must be >= 1")
    if steps == 1:
        return [start]
    return [start + (stop - start) * k / (steps - 1) for k in range(steps)]


def family_state(family, point, dim):
    if family == "bell_diagonal":
        return bell_diagonal(BellDiagonalParams(*point))
    if family == "symmetric_bd":
        return bell_diagonal(BellDiagonalParams(point[0], point[0], point[0]))
    if family == "werner":
        return werner(dim, point[0])
    if family == "isotropic":
        return isotropic(dim, point[0])
    raise InputError(f"unknown family {family!r}")


def closed_form_for(measure, rho):
    """Closed-form counterpart of an optimizer measure on a Bell-diagonal state, if any."""
    if rho.dims != (2, 2) or measure not in ("HS_MIN", "FMIN_A", "FMIN_B", "FMIN_AB"):
        return None
    try:
        params = nl.bell_diagonal_params_of(rho)
    except (ValidationError, DimensionError):
        return None
    hs, fm = nl.closed_bell_diagonal(params)
    return hs if measure == "HS_MIN" else fm


def point_seed(seed, index):
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _sweep_point(args):
    family, point, dim, measures, cfg_kwargs, index = args
    cfg = OptimizerConfig(**{**cfg_kwargs, "seed": point_seed(cfg_kwargs["seed"], index)})
    cells = [fmt(v) for v in point] + [""] * (3 - len(point))
    try:
        rho = family_state(family, point, dim)
    except ValidationError as exc:
        return [[family, *cells, m, "", "skipped", "", ""] for m in measures], [str(exc)]
    rows, gaps = [], []
    for m in measures:
        report = nl.compute(m, rho, cfg)
        closed = closed_form_for(m, rho)
        gap = abs(report.value - closed) if closed is not None else None
        rows.append([
            family, *cells, m, fmt(report.value), report.method,
            "" if closed is None else fmt(closed), "" if gap is None else fmt(gap),
        ])
        gaps.append(gap)
    return rows, gaps


def sweep_rows(family, grids, measures, cfg, dim=2, jobs=1):
    """All CSV rows of a sweep, in grid order, plus per-point messages."""
    if family not in FAMILIES:
        raise InputError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if len(grids) != FAMILY_ARITY[family]:
        raise InputError(f"family {family} needs {FAMILY_ARITY[family]} --grid option(s), got {len(grids)}")
    for m in measures:
        if m not in nl.MEASURE_IDS:
            raise InputError(f"unknown measure {m!r}")
    cfg_kwargs = {"starts": cfg.starts, "max_iters": cfg.max_iters, "ftol": cfg.ftol, "seed": cfg.seed}
    tasks = [(family, pt, dim, measures, cfg_kwargs, i) for i, pt in enumerate(product(*grids))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]
    return results


# commands -------------------------------------------------------------------


def _cfg_from(args):
    return OptimizerConfig(starts=args.starts, max_iters=args.max_iters, ftol=args.ftol, seed=args.seed)


def _measures(text):
    ids = [m.strip() for m in text.split(",") if m.strip()]
    if not ids:
        raise InputError("no measures requested")
    if ids == ["all"]:
        return ["HS_MIN", "GD", "FMIN_A", "FMIN_B", "FMIN_AB"]
    for m in ids:
        if m not in nl.MEASURE_IDS:
            raise InputError(f"unknown measure {m!r}; choose from {', '.join(nl.MEASURE_IDS)}")
    return ids


def cmd_compute(args, out):
    rho = read_state_file(args.state)
    measures = _measures(args.measures)
    cfg = _cfg_from(args)
    records = []
    for m in measures:
        try:
            report = nl.compute(m, rho, cfg)
        except (ValidationError, DimensionError) as exc:
            raise InputError(f"{m}: {exc}") from exc
        record = report.as_dict()
        record["value"] = float(fmt(report.value))
        if "diagnostics" in record and not args.argmeas:
            record["diagnostics"].pop("argmeas")
        records.append(record)
    for record in records:
        out.write(json.dumps(record) + "\n")
    return EXIT_OK


def cmd_sweep(args, out):
    measures = _measures(args.measures)
    grids = [[parse_number(v) for v in g.split(",")] if ":" not in g else parse_grid(g) for g in args.grid]
    results = sweep_rows(args.family, grids, measures, _cfg_from(args), args.dim, args.jobs)
    rows = []
    for point_rows, extra in results:
        rows.extend(point_rows)
        for e in extra:
            if isinstance(e, str):
                log.warning("skipped unphysical point: %s", e)
            elif e is not None and e > args.tol:
                log.warning("closed-form gap %.3e exceeds --tol %.1e", e, args.tol)
    if args.out == "-":
        _write_csv(out, rows)
    else:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            _write_csv(fh, rows)
    return EXIT_OK


def _write_csv(fh, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)


def cmd_verify(args, out):
    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    results = run_suite(args.suite, args.trials, args.seed)
    for r in results:
        out.write(r.line() + "\n")
    failed = sum(not r.passed for r in results)
    out.write(f"{len(results) - failed}/{len(results)} properties passed\n")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def build_parser():
    defaults = OptimizerConfig()
    parser = argparse.ArgumentParser(prog="fidmin", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_opt_flags(p):
        p.add_argument("--starts", type=int, default=defaults.starts)
        p.add_argument("--max-iters", type=int, default=defaults.max_iters)
        p.add_argument("--ftol", type=float, default=defaults.ftol)
        p.add_argument("--seed", type=int, default=defaults.seed)
        p.add_argument("--tol", type=float, default=1e-6, help="report tolerance")

    p = sub.add_parser("compute", help="measures of a single state file")
    p.add_argument("state")
    p.add_argument("--measures", default="all", help="comma separated measure ids, or 'all'")
    p.add_argument("--argmeas", action="store_true", help="include optimal measurement bases")
    add_opt_flags(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="measures over a family parameter grid, as CSV")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--grid", action="append", required=True,
                   help="start:stop:steps or a comma list; repeat once per parameter "
                        "(write --grid=-1:1:5 when the list starts with a minus sign)")
    p.add_argument("--measures", default="HS_MIN,FMIN_AB")
    p.add_argument("--dim", type=int, default=2, help="local dimension for werner/isotropic")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="-")
    add_opt_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run randomized property suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if hasattr(args, "starts"):
            _cfg_from(args)
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
