"""Command-line front end: simulate, classify, eigen, steady, reproduce, sweep.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 reproduction mismatch. All CSV output uses 17 significant digits so
values round-trip losslessly, and contains nothing nondeterministic:
identical configs give byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import copy
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .classify import (
    classify_bistable_basin,
    classify_dirichlet,
    classify_neumann,
    eigenpairs_for,
    predicted_limit,
)
from .config import (
    config_from_document,
    load_document,
    problem_from_document,
    sweep_spec_from_document,
)
from .dynamics import BoundaryCondition, FieldPair, Trajectory, integrate, neumann_project
from .dynamics import _coerce_initial
from .errors import (
    ConfigInvalid,
    GraphLVError,
    GridTooLarge,
    NoPositiveState,
    NumericalError,
    RequiresSteadySolve,
)
from .fixtures import reproduce_ids, run_reproduce
from .monotone import coexistence_bounds, logistic_steady_state


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _write_trajectory(path: str, vertices, traj: Trajectory) -> None:
    header = ",".join(["t"] + [f"u@{v}" for v in vertices] + [f"v@{v}" for v in vertices])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for t, state in zip(traj.times, traj.states):
            row = [_fmt(t)] + [_fmt(x) for x in state.u] + [_fmt(x) for x in state.v]
            fh.write(",".join(row) + "\n")


def _write_report(path: str, report: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def _cmd_simulate(args) -> int:
    cfg = config_from_document(load_document(args.config),
                               t_end=args.t_end, dt=args.dt, tol=args.tol)
    started = time.perf_counter()
    traj = integrate(cfg.problem, (cfg.initial_u, cfg.initial_v), cfg.t_end, dt=cfg.dt)
    elapsed = time.perf_counter() - started
    out = _ensure_dir(args.out)
    traj_path = os.path.join(out, "trajectory.csv")
    report_path = os.path.join(out, "report.json")
    vertices = cfg.problem.graph.vertices
    _write_trajectory(traj_path, vertices, traj)
    final = traj.final
    _write_report(report_path, {
        "t_end": cfg.t_end,
        "final": {
            "u": {v: float(final.u[i]) for i, v in enumerate(vertices)},
            "v": {v: float(final.v[i]) for i, v in enumerate(vertices)},
        },
        "rectangle": {"m_u": traj.metadata["m_u"], "m_v": traj.metadata["m_v"]},
        "steps": {k: traj.metadata[k] for k in
                  ("dt", "dt_final", "n_steps", "n_clamped", "n_halvings")},
        "boundary": cfg.problem.bc.value,
        "elapsed_seconds": elapsed,
        "files": {"trajectory": traj_path},
    })
    print(f"wrote {traj_path} ({traj.times.size} samples) and {report_path}")
    return 0


def _basin_initial(problem, cfg) -> tuple[np.ndarray, np.ndarray]:
    u_full, v_full = _coerce_initial(problem, (cfg.initial_u, cfg.initial_v))
    state = FieldPair(u=u_full, v=v_full)
    if problem.bc is BoundaryCondition.NEUMANN:
        state = neumann_project(problem, state)
    idx = problem.closure_idx
    return state.u[idx], state.v[idx]


def _classify_problem(doc, problem):
    if problem.bc is BoundaryCondition.DIRICHLET:
        eig1, eig2 = eigenpairs_for(problem)
        return classify_dirichlet(problem.params, eig1, eig2)
    regime = classify_neumann(problem.params)
    if regime.kind.value == "bistable" and "initial" in doc:
        cfg = config_from_document(doc)
        regime = classify_bistable_basin(problem.params, _basin_initial(problem, cfg))
    return regime


def _cmd_classify(args) -> int:
    doc = load_document(args.config)
    problem = problem_from_document(doc)
    regime = _classify_problem(doc, problem)
    print(f"regime: {regime.kind.value}")
    for cert in regime.certificates:
        state = "yes" if cert.satisfied else "no"
        print(f"certificate {cert.name}: margin={cert.margin:.6g} satisfied={state}")
    if regime.predicted is None:
        print("predicted limit: none (initial-data dependent or unresolved)")
        return 0
    if regime.predicted.kind == "constant":
        print(f"predicted limit: constant u={_fmt(regime.predicted.u)} "
              f"v={_fmt(regime.predicted.v)}")
        return 0
    try:
        limit = predicted_limit(regime, problem)
    except RequiresSteadySolve:
        print("predicted limit: coexistence bounds; run the steady subcommand with --bounds")
        return 0
    out = _ensure_dir(args.out)
    path = os.path.join(out, "predicted_limit.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("vertex,u,v\n")
        for i, v in enumerate(problem.graph.vertices):
            fh.write(f"{v},{_fmt(limit.u[i])},{_fmt(limit.v[i])}\n")
    print(f"predicted limit: steady profile written to {path}")
    return 0


def _cmd_eigen(args) -> int:
    problem = problem_from_document(load_document(args.config))
    if problem.partition is None:
        raise ConfigInvalid("eigen needs a partitioned problem (bc neumann or dirichlet)")
    eig1, eig2 = eigenpairs_for(problem)
    lines = [f"# lambda0_1 = {_fmt(eig1.lambda0)}",
             f"# lambda0_2 = {_fmt(eig2.lambda0)}",
             "vertex,phi1,phi2"]
    for k, i in enumerate(problem.partition.interior_idx):
        vertex = problem.graph.vertices[i]
        lines.append(f"{vertex},{_fmt(eig1.phi[k])},{_fmt(eig2.phi[k])}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out is not None:
        out = _ensure_dir(args.out)
        path = os.path.join(out, "eigen.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"# written to {path}")
    return 0


def _cmd_steady(args) -> int:
    doc = load_document(args.config)
    problem = problem_from_document(doc)
    if problem.bc is not BoundaryCondition.DIRICHLET:
        raise ConfigInvalid("steady states are defined for the absorbing boundary; "
                            'set bc to "dirichlet"')
    p = problem.params
    tol = args.tol if args.tol is not None else 1e-10
    out = _ensure_dir(args.out)
    interior = [problem.graph.vertices[i] for i in problem.partition.interior_idx]
    if args.bounds:
        bounds = coexistence_bounds(problem, tol=max(tol, 1e-10))
        path = os.path.join(out, "coexistence_bounds.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("vertex,s_lo,s_hi,r_lo,r_hi\n")
            for k, vertex in enumerate(interior):
                fh.write(",".join([vertex, _fmt(bounds.s_lower[k]), _fmt(bounds.s_upper[k]),
                                   _fmt(bounds.r_lower[k]), _fmt(bounds.r_upper[k])]) + "\n")
        spread = max(float(np.max(bounds.s_upper - bounds.s_lower)),
                     float(np.max(bounds.r_upper - bounds.r_lower)))
        unique = "unique (bounds collapse)" if bounds.unique else "bounds only"
        print(f"wrote {path}; {unique}, spread {spread:.3e}, "
              f"epsilon={bounds.epsilon:.6g}, delta={bounds.delta:.6g}")
        return 0
    columns = []
    for species, (d, a, e) in enumerate(((p.d1, p.a1, p.b1), (p.d2, p.a2, p.c2)), start=1):
        try:
            state = logistic_steady_state(problem.graph, problem.partition, species,
                                          d=d, a=a, e=e, tol=tol)
            columns.append(state.values)
        except NoPositiveState:
            print(f"# species {species} is subcritical; its steady state is 0",
                  file=sys.stderr)
            columns.append(np.zeros(len(interior)))
    path = os.path.join(out, "steady.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("vertex,s1,s2\n")
        for k, vertex in enumerate(interior):
            fh.write(f"{vertex},{_fmt(columns[0][k])},{_fmt(columns[1][k])}\n")
    print(f"wrote {path}")
    return 0


def _cmd_reproduce(args) -> int:
    ids = reproduce_ids() if args.id == "all" else [args.id]
    tol = args.tol if args.tol is not None else 1e-3
    t_max = args.t_end if args.t_end is not None else 1000.0
    failures = 0
    for case_id in ids:
        result = run_reproduce(case_id, tol=tol, t_max=t_max, dt=args.dt)
        expected = f"({_fmt(result.expected[0])}, {_fmt(result.expected[1])})"
        if result.passed:
            print(f"{case_id}: PASS sup-error {result.error:.3e} <= {tol:g} "
                  f"at t={result.t_reached:g}, limit {expected}")
        else:
            failures += 1
            print(f"{case_id}: FAIL sup-error {result.error:.3e} > {tol:g} "
                  f"at t={result.t_reached:g}, limit {expected}")
    return 4 if failures else 0


def _sweep_point(payload) -> dict:
    doc, names, values, t_end, agree_tol = payload
    doc = copy.deepcopy(doc)
    doc["params"] = {**doc["params"], **dict(zip(names, values))}
    doc.pop("sweep", None)
    cfg = config_from_document(doc, t_end=t_end)
    problem = cfg.problem
    regime = _classify_problem(doc, problem)
    margin = min(abs(c.margin) for c in regime.certificates)
    traj = integrate(problem, (cfg.initial_u, cfg.initial_v), cfg.t_end,
                     max_samples=2)
    final = traj.final
    idx = problem.closure_idx
    row = {name: value for name, value in zip(names, values)}
    row.update(kind=regime.kind.value, margin=margin,
               u_min=float(final.u[idx].min()), u_max=float(final.u[idx].max()),
               v_min=float(final.v[idx].min()), v_max=float(final.v[idx].max()))
    if regime.predicted is not None and regime.predicted.kind == "constant":
        pred_u, pred_v = regime.predicted.u, regime.predicted.v
        sup_err = max(float(np.max(np.abs(final.u[idx] - pred_u))),
                      float(np.max(np.abs(final.v[idx] - pred_v))))
        row.update(pred_u=pred_u, pred_v=pred_v, sup_err=sup_err)
        if margin > 0.05:
            row["agree"] = "yes" if sup_err <= agree_tol else "no"
        else:
            row["agree"] = "exempt"
    else:
        row.update(pred_u=float("nan"), pred_v=float("nan"), sup_err=float("nan"),
                   agree="exempt")
    return row


def _cmd_sweep(args) -> int:
    doc = load_document(args.config)
    spec = sweep_spec_from_document(doc)
    config_from_document(doc)
    axes = spec["axes"]
    names = tuple(sorted(axes))
    points = list(itertools.product(*(axes[name] for name in names)))
    if len(points) > spec["max_points"]:
        raise GridTooLarge(f"grid has {len(points)} points, cap is {spec['max_points']} "
                           "(raise sweep.max_points to allow this)")
    t_end = args.t_end if args.t_end is not None else spec["t_end"]
    agree_tol = args.tol if args.tol is not None else spec["tol"]
    payloads = [(doc, names, values, t_end, agree_tol) for values in points]
    workers = args.workers if args.workers else min(4, os.cpu_count() or 1)
    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, payloads))
    else:
        rows = [_sweep_point(payload) for payload in payloads]
    out = _ensure_dir(args.out)
    path = os.path.join(out, "sweep.csv")
    columns = list(names) + ["kind", "margin", "pred_u", "pred_v",
                             "u_min", "u_max", "v_min", "v_max", "sup_err", "agree"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            cells = [row[c] if isinstance(row[c], str) else _fmt(row[c]) for c in columns]
            fh.write(",".join(cells) + "\n")
    agree = sum(r["agree"] == "yes" for r in rows)
    exempt = sum(r["agree"] == "exempt" for r in rows)
    mismatch = sum(r["agree"] == "no" for r in rows)
    print(f"wrote {path}: {len(rows)} points, {agree} agree, "
          f"{exempt} exempt, {mismatch} mismatch")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphlv",
        description="Two-species competition dynamics on finite weighted graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, config=True, out=None):
        cmd = sub.add_parser(name, help=help_text)
        if config:
            cmd.add_argument("--config", required=True, help="JSON problem description")
        if out is not None:
            cmd.add_argument("--out", default=out, help="output directory")
        cmd.add_argument("--t-end", type=float, default=None, dest="t_end",
                         help="override the time horizon")
        cmd.add_argument("--dt", type=float, default=None,
                         help="override the time step (default: stability bound)")
        cmd.add_argument("--tol", type=float, default=None, help="override the tolerance")
        return cmd

    add("simulate", "integrate a configured problem and emit trajectory.csv", out="out")
    add("classify", "print the predicted long-time regime with its margins", out="out")
    eigen = add("eigen", "print the smallest absorbing-boundary eigenpairs as CSV")
    eigen.add_argument("--out", default=None, help="also write eigen.csv here")
    steady = add("steady", "solve steady states under the absorbing boundary", out="out")
    steady.add_argument("--bounds", action="store_true",
                        help="emit coexistence bounds instead of logistic states")
    reproduce = add("reproduce", "run a built-in example against its known limit",
                    config=False)
    reproduce.add_argument("id", help='one of the built-in case ids, or "all"')
    sweep = add("sweep", "classify and simulate over a parameter grid", out="out")
    sweep.add_argument("--workers", type=int, default=None,
                       help="parallel worker processes (default: up to 4)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "simulate": _cmd_simulate,
        "classify": _cmd_classify,
        "eigen": _cmd_eigen,
        "steady": _cmd_steady,
        "reproduce": _cmd_reproduce,
        "sweep": _cmd_sweep,
    }[args.command]
    try:
        return handler(args)
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except GraphLVError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
