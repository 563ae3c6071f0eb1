"""Time integration of the two-species competition system on a graph.

The evolving state is the pair (u, v) on the active vertex set: the
whole graph, or the interior of a partition when a boundary condition
is in force. Dirichlet pins the boundary at zero; the reflecting
(zero normal derivative) condition is enforced algebraically, boundary
values being the weighted average of interior neighbours, and that
substitution is baked into the reduced diffusion operator so every
integrator stage sees a consistent boundary.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InputError,
    IsolatedBoundaryVertex,
    NegativeInitial,
    StepSizeUnstable,
)
from .graphs import (
    DomainPartition,
    WeightedGraph,
    dirichlet_blocks,
    field_array,
    whole_laplacian,
)

_CLAMP = 1e-12
_RECT_SLACK = 1e-9


@dataclass(frozen=True)
class CompetitionParams:
    """Growth, self-limitation, competition, and diffusion coefficients."""

    a1: float
    b1: float
    c1: float
    a2: float
    b2: float
    c2: float
    d1: float = 1.0
    d2: float = 1.0

    def __post_init__(self) -> None:
        for name in ("a1", "b1", "c1", "a2", "b2", "c2", "d1", "d2"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise InputError(f"parameter {name} must be positive and finite, got {val!r}")


class BoundaryCondition(enum.Enum):
    NO_BOUNDARY = "none"
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True, eq=False)
class Problem:
    """A competition system bound to a graph and boundary condition."""

    graph: WeightedGraph
    params: CompetitionParams
    bc: BoundaryCondition = BoundaryCondition.NO_BOUNDARY
    partition: DomainPartition | None = None

    def __post_init__(self) -> None:
        if self.bc is BoundaryCondition.NO_BOUNDARY:
            if self.partition is not None:
                raise InputError("whole-graph problems take no partition")
        elif self.partition is None:
            raise InputError(f"{self.bc.value} boundary condition needs a partition")

    @property
    def active_idx(self) -> np.ndarray:
        if self.partition is None:
            return np.arange(self.graph.n)
        return self.partition.interior_idx

    @property
    def closure_idx(self) -> np.ndarray:
        if self.partition is None:
            return np.arange(self.graph.n)
        return self.partition.closure_idx


@dataclass(frozen=True, eq=False)
class FieldPair:
    """Per-vertex values for both species, in graph vertex order."""

    u: np.ndarray
    v: np.ndarray


@dataclass(eq=False)
class Trajectory:
    times: np.ndarray
    states: list[FieldPair]
    metadata: dict = field(default_factory=dict)

    @property
    def final(self) -> FieldPair:
        return self.states[-1]


def reaction(params: CompetitionParams, u, v):
    """Logistic-competition reaction terms (f1, f2); broadcasts over arrays."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    f1 = u * (params.a1 - params.b1 * u - params.c1 * v)
    f2 = v * (params.a2 - params.b2 * u - params.c2 * v)
    return f1, f2


def invariant_rectangle(params: CompetitionParams, u0, v0) -> tuple[float, float]:
    """Componentwise bounds [0, M_u] x [0, M_v] preserved by the flow."""
    m_u = max(params.a1 / params.b1, float(np.max(u0)))
    m_v = max(float(np.max(v0)), params.a2 / params.c2)
    return m_u, m_v


@dataclass(frozen=True, eq=False)
class _Operators:
    """Reduced diffusion matrices and boundary materialization data."""

    act: np.ndarray
    red1: np.ndarray
    red2: np.ndarray
    bnd: np.ndarray | None = None
    proj1: np.ndarray | None = None
    proj2: np.ndarray | None = None


def _projection_matrix(graph: WeightedGraph, species: int, partition: DomainPartition) -> np.ndarray:
    w = graph.weights(species)
    rows = w[np.ix_(partition.boundary_idx, partition.interior_idx)]
    sums = rows.sum(axis=1)
    dead = np.flatnonzero(sums == 0.0)
    if dead.size:
        names = [partition.boundary[i] for i in dead]
        raise IsolatedBoundaryVertex(f"boundary vertices with no interior neighbour: {names}")
    return rows / sums[:, None]


def reduced_operators(problem: Problem) -> _Operators:
    """Diffusion restricted to the active set, boundary handling included."""
    if problem.bc is BoundaryCondition.NO_BOUNDARY:
        return _Operators(
            act=np.arange(problem.graph.n),
            red1=whole_laplacian(problem.graph, 1),
            red2=whole_laplacian(problem.graph, 2),
        )
    part = problem.partition
    l1_ii, l1_ib = dirichlet_blocks(problem.graph, 1, part)
    l2_ii, l2_ib = dirichlet_blocks(problem.graph, 2, part)
    if problem.bc is BoundaryCondition.DIRICHLET:
        return _Operators(act=part.interior_idx, red1=l1_ii, red2=l2_ii, bnd=part.boundary_idx)
    p1 = _projection_matrix(problem.graph, 1, part)
    p2 = _projection_matrix(problem.graph, 2, part)
    return _Operators(
        act=part.interior_idx,
        red1=l1_ii + l1_ib @ p1,
        red2=l2_ii + l2_ib @ p2,
        bnd=part.boundary_idx,
        proj1=p1,
        proj2=p2,
    )


def neumann_project(problem: Problem, state: FieldPair) -> FieldPair:
    """Replace boundary values by the interior weighted average per species."""
    if problem.bc is not BoundaryCondition.NEUMANN:
        raise InputError("projection only applies to the reflecting boundary condition")
    part = problem.partition
    p1 = _projection_matrix(problem.graph, 1, part)
    p2 = _projection_matrix(problem.graph, 2, part)
    u = np.asarray(state.u, dtype=float).copy()
    v = np.asarray(state.v, dtype=float).copy()
    u[part.boundary_idx] = p1 @ u[part.interior_idx]
    v[part.boundary_idx] = p2 @ v[part.interior_idx]
    return FieldPair(u=u, v=v)


def stable_dt(problem: Problem, m_u: float, m_v: float) -> float:
    """Step cap: 0.5 over (diffusion rate + reaction Lipschitz bound)."""
    p = problem.params
    closure = problem.closure_idx
    diff = 0.0
    for species, d in ((1, p.d1), (2, p.d2)):
        w = problem.graph.weights(species)
        mu = problem.graph.measure(species)
        rows = w[np.ix_(problem.active_idx, closure)].sum(axis=1) / mu[problem.active_idx]
        diff = max(diff, d * float(rows.max()))
    lf = p.a1 + 2 * p.b1 * m_u + p.c1 * m_v + p.a2 + p.b2 * m_u + 2 * p.c2 * m_v
    return 0.5 / (diff + lf)


def _coerce_initial(problem: Problem, initial) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(initial, FieldPair):
        u_in, v_in = initial.u, initial.v
    else:
        u_in, v_in = initial
    need = problem.active_idx
    u = field_array(problem.graph, u_in, required_idx=need)
    v = field_array(problem.graph, v_in, required_idx=need)
    full = np.zeros((2, problem.graph.n))
    closure = problem.closure_idx
    for out, vals in zip(full, (u, v)):
        given = vals[closure]
        out[closure] = np.where(np.isnan(given), 0.0, given)
    u, v = full
    if problem.bc is BoundaryCondition.DIRICHLET:
        bnd = problem.partition.boundary_idx
        if np.any(u[bnd] != 0.0) or np.any(v[bnd] != 0.0):
            raise ValueError("Dirichlet initial data must vanish on the boundary")
    if np.any(u[closure] < 0.0) or np.any(v[closure] < 0.0):
        raise NegativeInitial("initial data must be nonnegative")
    return u, v


def sample_times(t_end: float, dt: float, max_samples: int = 250, forced=()) -> np.ndarray:
    """Geometric schedule, dense early; forced times and t_end always land."""
    pts = {0.0, float(t_end)}
    for f in forced:
        f = float(f)
        if 0.0 < f <= t_end:
            pts.add(f)
    t = 10.0 * dt
    while t < t_end and len(pts) < max_samples:
        pts.add(float(t))
        t *= 1.3
    return np.array(sorted(pts))


def _materialize(problem: Problem, ops: _Operators, u_act, v_act) -> FieldPair:
    u = np.zeros(problem.graph.n)
    v = np.zeros(problem.graph.n)
    u[ops.act] = u_act
    v[ops.act] = v_act
    if problem.bc is BoundaryCondition.NEUMANN:
        u[ops.bnd] = ops.proj1 @ u_act
        v[ops.bnd] = ops.proj2 @ v_act
    return FieldPair(u=u, v=v)


def integrate(
    problem: Problem,
    initial,
    t_end: float,
    dt: float | None = None,
    max_samples: int = 250,
    forced_times=(),
) -> Trajectory:
    """Fixed-step fourth-order Runge-Kutta run up to t_end.

    Steps that push the state out of the invariant rectangle (or below
    -1e-12) are rejected and retried at half the step for the rest of
    the run; roundoff undershoots in (-1e-12, 0) are clamped to zero and
    counted in the metadata.
    """
    if not (math.isfinite(t_end) and t_end > 0):
        raise InputError(f"t_end must be positive and finite, got {t_end}")
    p = problem.params
    ops = reduced_operators(problem)
    u_full, v_full = _coerce_initial(problem, initial)
    m_u, m_v = invariant_rectangle(p, u_full[problem.closure_idx], v_full[problem.closure_idx])
    if dt is None:
        dt = stable_dt(problem, m_u, m_v)
    elif not (math.isfinite(dt) and dt > 0):
        raise InputError(f"dt must be positive and finite, got {dt}")
    dt_min = dt * 2.0**-20

    red1, red2 = ops.red1, ops.red2
    d1, d2 = p.d1, p.d2
    y = np.concatenate([u_full[ops.act], v_full[ops.act]])
    n_act = ops.act.size

    def rhs(state: np.ndarray) -> np.ndarray:
        u = state[:n_act]
        v = state[n_act:]
        f1 = u * (p.a1 - p.b1 * u - p.c1 * v)
        f2 = v * (p.a2 - p.b2 * u - p.c2 * v)
        return np.concatenate([d1 * (red1 @ u) + f1, d2 * (red2 @ v) + f2])

    targets = sample_times(t_end, dt, max_samples=max_samples, forced=forced_times)
    states = [_materialize(problem, ops, y[:n_act], y[n_act:])]
    n_steps = 0
    n_clamped = 0
    n_halvings = 0
    dt_cur = dt
    t = 0.0
    for target in targets[1:]:
        while t < target - 1e-12 * max(1.0, target):
            h = min(dt_cur, target - t)
            while True:
                k1 = rhs(y)
                k2 = rhs(y + 0.5 * h * k1)
                k3 = rhs(y + 0.5 * h * k2)
                k4 = rhs(y + h * k3)
                y_new = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
                low = float(y_new.min())
                high_u = float(y_new[:n_act].max())
                high_v = float(y_new[n_act:].max())
                if low <= -_CLAMP or high_u > m_u + _RECT_SLACK or high_v > m_v + _RECT_SLACK:
                    dt_cur *= 0.5
                    n_halvings += 1
                    if dt_cur < dt_min:
                        raise StepSizeUnstable(
                            f"state left [0, {m_u:.6g}] x [0, {m_v:.6g}] at t={t:.6g} "
                            f"and halving reached dt={dt_cur:.3e}"
                        )
                    h = min(dt_cur, target - t)
                    continue
                break
            undershoot = (y_new < 0.0)
            if undershoot.any():
                n_clamped += int(undershoot.sum())
                y_new[undershoot] = 0.0
            y = y_new
            t += h
            n_steps += 1
        t = float(target)
        states.append(_materialize(problem, ops, y[:n_act], y[n_act:]))

    return Trajectory(
        times=targets,
        states=states,
        metadata={
            "dt": dt,
            "dt_final": dt_cur,
            "n_steps": n_steps,
            "n_clamped": n_clamped,
            "n_halvings": n_halvings,
            "m_u": m_u,
            "m_v": m_v,
            "bc": problem.bc.value,
        },
    )
