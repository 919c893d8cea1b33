"""Command line front end for sparse polynomial minimization.

Each subcommand builds a problem, runs one relaxation through the
interior point solver, extracts minimizers, and emits a Report, either
as a human readable summary or as JSON.  Exit codes follow the solver
status: 0 Optimal, 1 input error, 2 DualUnbounded, 3 numerical trouble,
infeasibility, or iteration limit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .apps import (
    BenchmarkFamily,
    BenchmarkSpec,
    BvpSpec,
    benchmark,
    bvp_basic,
    bvp_cubic_forcing,
    bvp_discretize,
    rmsd,
    snl_generate,
    snl_objective,
)
from .extract import accuracy, extract_solution
from .poly import ParseError, SparseSum
from .relax import RelaxationKind, build_relaxation
from .sdp import SolverConfig, SolverStatus, export_sdpa, solve

__all__ = ["Report", "Pipeline", "run_pipeline", "main"]


_EXIT_CODES = {
    SolverStatus.OPTIMAL.value: 0,
    SolverStatus.DUAL_UNBOUNDED.value: 2,
    SolverStatus.PRIMAL_INFEASIBLE.value: 3,
    SolverStatus.ITERATION_LIMIT.value: 3,
    SolverStatus.NUMERICAL_TROUBLE.value: 3,
}


class InputError(Exception):
    """Bad user input: unreadable file, parse failure, unknown name."""


@dataclass
class Report:
    """Self-contained record of one solve.

    ``problem`` embeds the full problem payload so every stored quantity
    can be recomputed from the report alone; ``minimizers`` carry their
    relative error ``|f(x) - bound| / max(1, |f(x)|)``, recomputed at
    report time from the embedded problem rather than copied out of the
    extraction internals.
    """

    command: str
    instance: dict
    problem: dict
    kind: str
    block_sizes: list
    num_moments: int
    bound: float
    status: str
    minimizers: list
    block_ranks: list
    flat: dict
    certified: bool
    notes: list
    wall_time: float
    iterations: int
    config: dict
    columns: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), indent=2)

    @staticmethod
    def from_json(text):
        return Report(**json.loads(text))

    def exit_code(self):
        return _EXIT_CODES.get(self.status, 3)


@dataclass
class Pipeline:
    """Everything produced by one build-solve-extract run."""

    report: Report
    solution: object
    extraction: object


def run_pipeline(
    f,
    kind,
    config=None,
    rank_tol=1e-6,
    match_tol=1e-4,
    seed=0,
    command="solve",
    instance=None,
    export_path=None,
):
    """Build the relaxation of ``f``, solve it, extract, and report."""
    config = config or SolverConfig()
    if isinstance(kind, str):
        kind = RelaxationKind.parse(kind)
    t0 = time.perf_counter()
    problem, info = build_relaxation(f, kind)
    if export_path:
        Path(export_path).write_text(export_sdpa(problem))
    sol = solve(problem, config)
    res = extract_solution(
        f, info, sol, rank_tol=rank_tol, match_tol=match_tol, seed=seed
    )
    wall = time.perf_counter() - t0
    minimizers = [
        {
            "point": [float(v) for v in pt],
            "err": float(accuracy(f, pt, sol.objective)),
        }
        for pt in res.minimizers
    ]
    report = Report(
        command=command,
        instance=dict(instance or {}),
        problem=json.loads(f.to_json()),
        kind=kind.value,
        block_sizes=list(info.block_sizes),
        num_moments=info.num_moments,
        bound=float(sol.objective),
        status=sol.status.value,
        minimizers=minimizers,
        block_ranks=list(res.block_ranks),
        flat={k: bool(v) for k, v in res.as_dict()["flat_extension"].items()},
        certified=bool(res.certified),
        notes=list(res.notes),
        wall_time=wall,
        iterations=int(sol.iterations),
        config=config.as_dict(),
        columns={},
    )
    return Pipeline(report, sol, res)


# ---------------------------------------------------------------------------
# rendering


def _describe_instance(rep):
    inst = rep.instance
    src = inst.get("source", "?")
    if src == "file":
        return inst.get("path", "?")
    if src == "benchmark":
        return "%s n=%s" % (inst.get("family"), inst.get("n"))
    if src == "bvp":
        return "bvp %s N=%s" % (inst.get("template"), inst.get("N"))
    if src == "snl":
        return "snl n=%s seed=%s" % (inst.get("n"), inst.get("seed"))
    return src


def _print_report(rep, stream):
    c = rep.columns
    sizes = rep.block_sizes
    print(
        "%s: kind=%s blocks=%d max_block=%d moments=%d"
        % (
            _describe_instance(rep),
            rep.kind,
            len(sizes),
            max(sizes) if sizes else 0,
            rep.num_moments,
        ),
        file=stream,
    )
    print(
        "  bound=%.9e status=%s iters=%d time=%.2fs certified=%s"
        % (rep.bound, rep.status, rep.iterations, rep.wall_time, rep.certified),
        file=stream,
    )
    for idx, m in enumerate(rep.minimizers, 1):
        pt = m["point"]
        shown = ", ".join("%.6f" % v for v in pt[:8])
        if len(pt) > 8:
            shown += ", ..."
        print("  minimizer %d: err=%.3e  (%s)" % (idx, m["err"], shown), file=stream)
    if "accu" in c:
        print("  accu=%.3e" % c["accu"], file=stream)
    if "eqn_error" in c:
        line = "  eqn_error=%.3e" % c["eqn_error"]
        if c.get("sup_error") is not None:
            line += "  sup_error=%.3e  ratio=%.4e" % (c["sup_error"], c["ratio"])
        print(line, file=stream)
    if "rmsd" in c:
        print(
            "  objective_at_estimate=%.3e  rmsd=%.4e"
            % (c["objective_at_estimate"], c["rmsd"]),
            file=stream,
        )
    for note in rep.notes:
        print("  note: %s" % note, file=stream)


def _emit(reports, as_json, stream=None):
    stream = stream or sys.stdout
    if as_json:
        if len(reports) == 1:
            print(reports[0].to_json(), file=stream)
        else:
            print(
                json.dumps([asdict(r) for r in reports], indent=2), file=stream
            )
    else:
        for rep in reports:
            _print_report(rep, stream)
    return max((r.exit_code() for r in reports), default=0)


def _numbered(path, index, total):
    if path is None or total <= 1:
        return path
    p = Path(path)
    return str(p.with_name("%s.%d%s" % (p.stem, index, p.suffix)))


# ---------------------------------------------------------------------------
# subcommands


def _config_from(args):
    return SolverConfig(
        tol_gap=args.tol_gap,
        tol_feas=args.tol_feas,
        max_iters=args.max_iters,
        rank_tol=args.rank_tol,
    )


def _load_sparse_sum(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc)) from exc
    try:
        return SparseSum.from_json(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            "%s: invalid JSON at line %d column %d: %s"
            % (path, exc.lineno, exc.colno, exc.msg)
        ) from exc
    except ParseError as exc:
        raise InputError("%s: %s" % (path, exc)) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("%s: malformed problem payload: %s" % (path, exc)) from exc


def _solve_one(task):
    path, kind, cfg_dict, rank_tol, match_tol, seed, export_path = task
    f = _load_sparse_sum(path)
    pipe = run_pipeline(
        f,
        kind,
        SolverConfig(**cfg_dict),
        rank_tol=rank_tol,
        match_tol=match_tol,
        seed=seed,
        command="solve",
        instance={"source": "file", "path": str(path)},
        export_path=export_path,
    )
    return pipe.report


def cmd_solve(args):
    config = _config_from(args)
    tasks = [
        (
            path,
            args.kind,
            config.as_dict(),
            args.rank_tol,
            args.match_tol,
            args.seed,
            _numbered(args.export_sdpa, i, len(args.input)),
        )
        for i, path in enumerate(args.input)
    ]
    reports = _run_tasks(_solve_one, tasks, args.jobs)
    return _emit(reports, args.json)


def _bench_one(task):
    family, n, kind, cfg_dict, rank_tol, match_tol, seed, export_path = task
    spec = BenchmarkSpec(BenchmarkFamily.parse(family), n)
    f = benchmark(spec)
    pipe = run_pipeline(
        f,
        kind,
        SolverConfig(**cfg_dict),
        rank_tol=rank_tol,
        match_tol=match_tol,
        seed=seed,
        command="bench",
        instance={"source": "benchmark", "family": spec.family.value, "n": spec.n},
        export_path=export_path,
    )
    pipe.report.columns["accu"] = abs(pipe.report.bound)
    return pipe.report


def cmd_bench(args):
    config = _config_from(args)
    try:
        BenchmarkFamily.parse(args.family)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    tasks = [
        (
            args.family,
            n,
            args.kind,
            config.as_dict(),
            args.rank_tol,
            args.match_tol,
            args.seed,
            _numbered(args.export_sdpa, i, len(args.n)),
        )
        for i, n in enumerate(args.n)
    ]
    try:
        reports = _run_tasks(_bench_one, tasks, args.jobs)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return _emit(reports, args.json)


_BVP_TEMPLATES = {"basic": bvp_basic, "cubic-forcing": bvp_cubic_forcing}

_BVP_ANALYTIC = {"basic": lambda t: 1.0 / (t + 2.0)}


def _bvp_spec(name, N):
    if name in _BVP_TEMPLATES:
        return _BVP_TEMPLATES[name](N), name
    path = Path(name)
    if path.suffix == ".json" or path.exists():
        try:
            data = json.loads(path.read_text())
            data["N"] = N
            return BvpSpec.from_dict(data), str(path)
        except OSError as exc:
            raise InputError("cannot read %s: %s" % (name, exc)) from exc
        except (json.JSONDecodeError, KeyError, ParseError, ValueError) as exc:
            raise InputError("%s: bad boundary value spec: %s" % (name, exc)) from exc
    raise InputError(
        "unknown template %r (built in: %s, or a JSON spec file)"
        % (name, ", ".join(sorted(_BVP_TEMPLATES)))
    )


def cmd_bvp(args):
    spec, label = _bvp_spec(args.template, args.N)
    config = _config_from(args)
    system, f = bvp_discretize(spec)
    instance = {
        "source": "bvp",
        "template": label,
        "N": spec.N,
        "spec": spec.as_dict(),
    }
    pipe = run_pipeline(
        f,
        args.kind or "sparser",
        config,
        rank_tol=args.rank_tol,
        match_tol=args.match_tol,
        seed=args.seed,
        command="bvp",
        instance=instance,
        export_path=args.export_sdpa,
    )
    report = pipe.report
    if args.kind is None and _bvp_needs_fallback(report):
        retry = run_pipeline(
            f,
            "sparse",
            config,
            rank_tol=args.rank_tol,
            match_tol=args.match_tol,
            seed=args.seed,
            command="bvp",
            instance=instance,
            export_path=None,
        )
        if not _bvp_needs_fallback(retry.report):
            report = retry.report
            report.notes.append("support-adapted relaxation failed; used clique blocks")
    _attach_bvp_columns(report, spec, system, label)
    return _emit([report], args.json)


def _bvp_needs_fallback(report):
    if not report.minimizers:
        return True
    return min(m["err"] for m in report.minimizers) > 1e-5


def _attach_bvp_columns(report, spec, system, label):
    if not report.minimizers:
        return
    pick = min(
        range(len(report.minimizers)),
        key=lambda i: max(abs(v) for v in report.minimizers[i]["point"]),
    )
    x = np.asarray(report.minimizers[pick]["point"], dtype=float)
    h = spec.h
    eqn_error = max(abs(g.evaluate(x)) / h**2 for g, _ in system)
    cols = {"selected": pick, "h": h, "eqn_error": float(eqn_error)}
    analytic = _BVP_ANALYTIC.get(label)
    if analytic is not None:
        truth = np.array([analytic(t) for t in spec.mesh()])
        sup = float(np.max(np.abs(x - truth)))
        cols["sup_error"] = sup
        cols["ratio"] = sup / h**2
    else:
        cols["sup_error"] = None
        cols["ratio"] = None
    report.columns.update(cols)


def cmd_snl(args):
    config = _config_from(args)
    inst = snl_generate(args.n, args.seed)
    try:
        f = snl_objective(inst)
    except ValueError as exc:
        raise InputError(
            "instance n=%d seed=%d has no distance edges: %s"
            % (args.n, args.seed, exc)
        ) from exc
    pipe = run_pipeline(
        f,
        args.kind or "sparse",
        config,
        rank_tol=args.rank_tol,
        match_tol=args.match_tol,
        seed=args.seed,
        command="snl",
        instance={
            "source": "snl",
            "n": args.n,
            "seed": args.seed,
            "instance": json.loads(inst.to_json()),
        },
        export_path=args.export_sdpa,
    )
    report = pipe.report
    if report.minimizers:
        best = min(range(len(report.minimizers)), key=lambda i: report.minimizers[i]["err"])
        est = np.asarray(report.minimizers[best]["point"], dtype=float)
        report.columns.update(
            {
                "selected": best,
                "estimate": [float(v) for v in est],
                "objective_at_estimate": float(f.evaluate(est)),
                "rmsd": rmsd(est, inst.sensors.ravel()),
            }
        )
    return _emit([report], args.json)


# ---------------------------------------------------------------------------
# batch plumbing


def _run_tasks(worker, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks))


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser, default_kind):
    parser.add_argument(
        "--kind",
        choices=["dense", "sparse", "sparser"],
        default=default_kind,
        help="relaxation kind (default: %(default)s)",
    )
    parser.add_argument("--tol-gap", type=float, default=1e-8)
    parser.add_argument("--tol-feas", type=float, default=1e-8)
    parser.add_argument("--max-iters", type=int, default=100)
    parser.add_argument("--rank-tol", type=float, default=1e-6)
    parser.add_argument("--match-tol", type=float, default=1e-4)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--export-sdpa", metavar="PATH", default=None)
    parser.add_argument("--json", action="store_true", help="emit the report as JSON")
    parser.add_argument("--jobs", type=int, default=1, help="parallel instances in batch runs")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sparsesos",
        description="Certified lower bounds and minimizers for sums of small polynomials.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("solve", help="solve a problem given as a JSON file")
    p.add_argument("input", nargs="+", help="SparseSum JSON file(s)")
    _add_common(p, "sparse")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a named benchmark family")
    p.add_argument("family", help="family name, e.g. chained-wood")
    p.add_argument("n", nargs="+", type=int, help="problem size(s)")
    _add_common(p, "sparse")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("bvp", help="discretize and solve a boundary value problem")
    p.add_argument("template", help="basic, cubic-forcing, or a JSON spec file")
    p.add_argument("N", type=int, help="number of interior mesh points")
    _add_common(p, None)
    p.set_defaults(func=cmd_bvp)

    p = sub.add_parser("snl", help="random planar sensor localization instance")
    p.add_argument("n", type=int, help="number of sensors")
    _add_common(p, None)
    p.set_defaults(func=cmd_snl)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
