"""Run configuration: a single JSON document describing one problem.

Schema (all physical quantities are unitless reals):

    {
      "graph": {
        "vertices": ["x1", "x2", ...],
        "edges": [["x1", "x2", w], ...]            // or [a, b, w1, w2]
        "measures": {"1": {"x1": 3.0, ...},        // optional; default is
                     "2": {...}},                  // the weighted degree
        "interior": ["x1", ...]                    // required unless bc "none"
      },
      "bc": "none" | "neumann" | "dirichlet",
      "params": {"a1": .., "b1": .., "c1": .., "a2": .., "b2": .., "c2": ..,
                 "d1": .., "d2": ..},              // d's default to 1
      "initial": {"u": 1.0 | {"x1": 7.0, ...},     // scalars apply to the
                  "v": ...},                       // active region
      "t_end": 10.0,                               // optional, flag overrides
      "dt": 0.001,                                 // optional, default CFL
      "tol": 1e-8,                                 // optional
      "sweep": {                                   // sweep subcommand only
        "grid": {"a1": [0.5, 1.0, 1.5],            // explicit values, or
                 "a2": {"start": 0.5, "stop": 2.5, "count": 11}},
        "t_end": 200.0, "tol": 1e-2, "max_points": 2000
      }
    }

Vector and matrix coordinates everywhere follow the order of the
"vertices" list. Scalar initial data under the absorbing boundary means
that constant on the interior with zero boundary; explicit nonzero
boundary values are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import BoundaryCondition, CompetitionParams, Problem
from .errors import ConfigInvalid, GraphLVError, InputError
from .graphs import boundary_of, build_graph

_BC_NAMES = {bc.value: bc for bc in BoundaryCondition}
_PARAM_KEYS = ("a1", "b1", "c1", "a2", "b2", "c2", "d1", "d2")


@dataclass(frozen=True, eq=False)
class RunConfig:
    problem: Problem
    initial_u: object
    initial_v: object
    t_end: float
    dt: float | None
    tol: float
    document: dict = field(repr=False, default_factory=dict)


def load_document(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigInvalid("config must be a JSON object")
    return doc


def problem_from_document(doc: dict) -> Problem:
    graph_doc = _require(doc, "graph", dict)
    vertices = _require(graph_doc, "vertices", list)
    edges = _require(graph_doc, "edges", list)
    weights1, weights2 = [], []
    split_weights = False
    for entry in edges:
        if not isinstance(entry, list) or len(entry) not in (3, 4):
            raise ConfigInvalid(f"edge entries are [a, b, w] or [a, b, w1, w2], got {entry!r}")
        a, b = entry[0], entry[1]
        weights1.append((a, b, entry[2]))
        if len(entry) == 4:
            split_weights = True
            weights2.append((a, b, entry[3]))
        else:
            weights2.append((a, b, entry[2]))
    measures = graph_doc.get("measures") or {}
    if not isinstance(measures, dict) or not set(measures) <= {"1", "2"}:
        raise ConfigInvalid('"measures" must be an object with keys "1" and/or "2"')
    try:
        graph = build_graph(
            vertices,
            weights1,
            weights2 if split_weights else None,
            measure1=measures.get("1"),
            measure2=measures.get("2"),
        )
    except InputError as exc:
        raise ConfigInvalid(str(exc)) from exc

    bc_name = doc.get("bc", "none")
    bc = _BC_NAMES.get(bc_name)
    if bc is None:
        raise ConfigInvalid(f'"bc" must be one of {sorted(_BC_NAMES)}, got {bc_name!r}')

    interior = graph_doc.get("interior")
    partition = None
    if bc is BoundaryCondition.NO_BOUNDARY:
        if interior is not None:
            raise ConfigInvalid('bc "none" takes no "interior" list')
    else:
        if interior is None:
            raise ConfigInvalid(f'bc {bc_name!r} needs graph.interior')
        try:
            partition = boundary_of(graph, interior)
        except InputError as exc:
            raise ConfigInvalid(str(exc)) from exc

    params_doc = _require(doc, "params", dict)
    unknown = set(params_doc) - set(_PARAM_KEYS)
    if unknown:
        raise ConfigInvalid(f"unknown params: {sorted(unknown)}")
    values = {k: float(params_doc[k]) for k in params_doc}
    for key in ("a1", "b1", "c1", "a2", "b2", "c2"):
        if key not in values:
            raise ConfigInvalid(f'params.{key} is required')
    try:
        params = CompetitionParams(**values)
    except InputError as exc:
        raise ConfigInvalid(str(exc)) from exc

    try:
        return Problem(graph=graph, params=params, bc=bc, partition=partition)
    except InputError as exc:
        raise ConfigInvalid(str(exc)) from exc


def config_from_document(
    doc: dict,
    t_end: float | None = None,
    dt: float | None = None,
    tol: float | None = None,
) -> RunConfig:
    """Validate the document and apply command-line overrides."""
    problem = problem_from_document(doc)
    initial_doc = _require(doc, "initial", dict)
    if set(initial_doc) != {"u", "v"}:
        raise ConfigInvalid('"initial" must have exactly the keys "u" and "v"')
    initial_u = _initial_side(problem, initial_doc["u"], "u")
    initial_v = _initial_side(problem, initial_doc["v"], "v")

    t_end = float(doc.get("t_end", 10.0)) if t_end is None else float(t_end)
    if not np.isfinite(t_end) or t_end <= 0.0:
        raise ConfigInvalid(f"t_end must be positive and finite, got {t_end}")
    if dt is None and "dt" in doc and doc["dt"] is not None:
        dt = float(doc["dt"])
    if dt is not None and (not np.isfinite(dt) or dt <= 0.0):
        raise ConfigInvalid(f"dt must be positive and finite, got {dt}")
    if tol is None:
        tol = float(doc.get("tol", 1e-8))
    if not np.isfinite(tol) or tol <= 0.0:
        raise ConfigInvalid(f"tol must be positive and finite, got {tol}")

    return RunConfig(problem=problem, initial_u=initial_u, initial_v=initial_v,
                     t_end=t_end, dt=dt, tol=float(tol), document=doc)


def _initial_side(problem: Problem, data, name: str):
    graph = problem.graph
    if isinstance(data, dict):
        unknown = set(data) - set(graph.vertices)
        if unknown:
            raise ConfigInvalid(f"initial.{name} names unknown vertices: {sorted(unknown)}")
        values = {k: float(v) for k, v in data.items()}
        if any(not np.isfinite(v) or v < 0.0 for v in values.values()):
            raise ConfigInvalid(f"initial.{name} must be nonnegative and finite")
        missing = [graph.vertices[i] for i in problem.active_idx
                   if graph.vertices[i] not in values]
        if missing:
            raise ConfigInvalid(f"initial.{name} is missing active vertices: {missing}")
        if problem.bc is BoundaryCondition.DIRICHLET:
            for i in problem.partition.boundary_idx:
                vertex = graph.vertices[i]
                if values.get(vertex, 0.0) != 0.0:
                    raise ConfigInvalid(
                        f"initial.{name} is nonzero at boundary vertex {vertex!r}; "
                        "the absorbing boundary requires zero there"
                    )
        return values
    try:
        scalar = float(data)
    except (TypeError, ValueError):
        raise ConfigInvalid(f"initial.{name} must be a number or a vertex map") from None
    if not np.isfinite(scalar) or scalar < 0.0:
        raise ConfigInvalid(f"initial.{name} must be nonnegative and finite")
    if problem.bc is BoundaryCondition.DIRICHLET:
        out = {graph.vertices[i]: scalar for i in problem.partition.interior_idx}
        out.update({graph.vertices[i]: 0.0 for i in problem.partition.boundary_idx})
        return out
    return scalar


def sweep_spec_from_document(doc: dict) -> dict:
    """Extract and normalize the sweep section: grid axes and budgets."""
    sweep = _require(doc, "sweep", dict)
    grid_doc = _require(sweep, "grid", dict)
    if not grid_doc:
        raise ConfigInvalid("sweep.grid must name at least one parameter")
    unknown = set(grid_doc) - set(_PARAM_KEYS)
    if unknown:
        raise ConfigInvalid(f"sweep.grid names unknown params: {sorted(unknown)}")
    axes: dict[str, list[float]] = {}
    for key in sorted(grid_doc):
        spec = grid_doc[key]
        if isinstance(spec, dict):
            extra = set(spec) - {"start", "stop", "count"}
            if extra or not {"start", "stop", "count"} <= set(spec):
                raise ConfigInvalid(
                    f"sweep.grid.{key} object form needs exactly start/stop/count"
                )
            count = int(spec["count"])
            if count < 1:
                raise ConfigInvalid(f"sweep.grid.{key}.count must be >= 1")
            values = np.linspace(float(spec["start"]), float(spec["stop"]), count)
            axes[key] = [float(v) for v in values]
        elif isinstance(spec, list) and spec:
            axes[key] = [float(v) for v in spec]
        else:
            raise ConfigInvalid(f"sweep.grid.{key} must be a value list or start/stop/count")
        if any(not np.isfinite(v) or v <= 0.0 for v in axes[key]):
            raise ConfigInvalid(f"sweep.grid.{key} values must be positive and finite")
    return {
        "axes": axes,
        "t_end": float(sweep.get("t_end", 200.0)),
        "tol": float(sweep.get("tol", 1e-2)),
        "max_points": int(sweep.get("max_points", 2000)),
    }


def _require(doc: dict, key: str, kind):
    if key not in doc:
        raise ConfigInvalid(f'config is missing "{key}"')
    value = doc[key]
    if not isinstance(value, kind):
        raise ConfigInvalid(f'"{key}" must be a {kind.__name__}')
    return value


def describe_error(exc: GraphLVError) -> str:
    return f"{type(exc).__name__}: {exc}"
