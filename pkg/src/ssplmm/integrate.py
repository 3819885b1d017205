"""Time integration harness for checking discrete monotonicity.

Runs a linear multistep method on monotone test problems and records whether
each step norm stays below the running maximum of the previous k norms.  The
guarantee being exercised: if a single forward Euler step with h <= h_FE never
increases the norm, then any method with nonnegative coefficients and
threshold factor C keeps the discrete norms monotone for h <= C * h_FE.

Unlike the exact core, stepping runs in double precision (exact rational time
integration would blow up denominators exponentially); the violation
tolerance below absorbs roundoff.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .order_conditions import (
    MethodCoefficients,
    ThresholdFactor,
    UNBOUNDED,
    threshold_factor,
)

VIOLATION_TOL = 1e-12

_EULER_SUBSTEPS = 16


class UnsupportedProblemError(ValueError):
    """Implicit stepping is only available for linear problems."""


class Norm(enum.Enum):
    MAX = "max"
    TOTAL_VARIATION = "tv"
    L1 = "l1"


def _norm_value(kind: Norm, u: np.ndarray) -> float:
    if kind is Norm.MAX:
        return float(np.max(np.abs(u)))
    if kind is Norm.TOTAL_VARIATION:
        return float(np.sum(np.abs(np.roll(u, -1) - u)))
    return float(np.sum(np.abs(u)))


@dataclass(frozen=True)
class TestProblem:
    """A monotone initial value problem with a known Euler step bound.

    ``h_fe`` is the step bound under which a single forward Euler step does
    not increase ``norm``.  ``linear_matrix`` (f(u) = L u) enables implicit
    stepping; ``exact_solution`` may return None at times where no closed
    form is available, in which case starting values fall back to Euler
    sub-stepping.
    """

    name: str
    rhs: Callable[[np.ndarray], np.ndarray]
    initial_state: np.ndarray
    h_fe: float
    norm: Norm
    exact_solution: Optional[Callable[[float], Optional[np.ndarray]]] = None
    linear_matrix: Optional[np.ndarray] = None


def decay_problem() -> TestProblem:
    """Scalar decay u' = -u with h_FE = 2 in the max norm."""
    matrix = np.array([[-1.0]])

    def exact(t: float) -> np.ndarray:
        return np.array([np.exp(-t)])

    return TestProblem(
        name="decay",
        rhs=lambda u: -u,
        initial_state=np.array([1.0]),
        h_fe=2.0,
        norm=Norm.MAX,
        exact_solution=exact,
        linear_matrix=matrix,
    )


def advection_problem(n_cells: int = 100) -> TestProblem:
    """Periodic advection u_t + u_x = 0, first-order upwind, h_FE = dx.

    Step-function initial data on a unit circle; the exact solution is an
    index shift, available only when t is an integer multiple of dx.
    """
    dx = 1.0 / n_cells
    u0 = np.zeros(n_cells)
    u0[: n_cells // 2] = 1.0
    matrix = (np.roll(np.eye(n_cells), 1, axis=1).T - np.eye(n_cells)) / dx

    def rhs(u: np.ndarray) -> np.ndarray:
        return -(u - np.roll(u, 1)) / dx

    def exact(t: float) -> Optional[np.ndarray]:
        shift = t / dx
        nearest = round(shift)
        if abs(shift - nearest) > 1e-9:
            return None
        return np.roll(u0, nearest % n_cells)

    return TestProblem(
        name="advection",
        rhs=rhs,
        initial_state=u0,
        h_fe=dx,
        norm=Norm.TOTAL_VARIATION,
        exact_solution=exact,
        linear_matrix=matrix,
    )


BUILTIN_PROBLEMS: dict[str, Callable[[], TestProblem]] = {
    "decay": decay_problem,
    "advection": advection_problem,
}


@dataclass(frozen=True)
class RunRecord:
    """One integration run: norm history and the worst monotonicity breach.

    ``norm_history`` covers the k starting values followed by the computed
    steps; ``max_violation`` is the largest ||u_n|| - max of the previous k
    norms over the computed steps (<= 0 means monotone throughout).
    """

    method: MethodCoefficients
    problem_name: str
    h: float
    steps: int
    norm_history: tuple[float, ...]
    max_violation: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["step_index", "time", "norm_value"])
        for n, value in enumerate(self.norm_history):
            writer.writerow([n, n * self.h, repr(value)])
        return buf.getvalue()


def _starting_values(
    method: MethodCoefficients, problem: TestProblem, h: float
) -> list[np.ndarray]:
    states = [np.array(problem.initial_state, dtype=float)]
    for i in range(1, method.k):
        t = i * h
        state = problem.exact_solution(t) if problem.exact_solution else None
        if state is None:
            state = states[-1].copy()
            sub = h / _EULER_SUBSTEPS
            for _ in range(_EULER_SUBSTEPS):
                state = state + sub * problem.rhs(state)
        states.append(np.asarray(state, dtype=float))
    return states


def lmm_integrate(
    method: MethodCoefficients, problem: TestProblem, h: float, steps: int
) -> RunRecord:
    """Advance the method `steps` times and record the norm history.

    Starting values come from the exact solution where available, otherwise
    from forward Euler sub-stepping at h/16.  Implicit methods require a
    linear problem and perform a direct solve per step.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    if steps < 0:
        raise ValueError("step count must be nonnegative")
    k = method.k
    alpha = [float(a) for a in method.alpha]
    beta = [float(b) for b in method.beta]
    implicit = not method.explicit and beta[0] != 0.0
    if implicit and problem.linear_matrix is None:
        raise UnsupportedProblemError(
            "implicit stepping needs a linear problem (no direct solver for "
            "general nonlinear stages)"
        )

    history = _starting_values(method, problem, h)
    if implicit:
        matrix = np.asarray(problem.linear_matrix, dtype=float)
        system = np.eye(matrix.shape[0]) - h * beta[0] * matrix

    for _ in range(steps):
        acc = np.zeros_like(history[-1])
        for j in range(1, k + 1):
            u_prev = history[-j]
            acc = acc + alpha[j - 1] * u_prev
            if beta[j] != 0.0:
                acc = acc + h * beta[j] * problem.rhs(u_prev)
        if implicit:
            new = np.linalg.solve(system, acc)
        else:
            new = acc
        history.append(new)

    norms = [_norm_value(problem.norm, u) for u in history]
    violation = float("-inf")
    for n in range(k, len(norms)):
        violation = max(violation, norms[n] - max(norms[n - k : n]))
    if steps == 0:
        violation = 0.0
    return RunRecord(
        method=method,
        problem_name=problem.name,
        h=h,
        steps=steps,
        norm_history=tuple(norms),
        max_violation=violation,
    )


@dataclass(frozen=True)
class SweepEntry:
    h: float
    guaranteed: bool
    record: RunRecord

    @property
    def monotone(self) -> bool:
        return self.record.max_violation <= VIOLATION_TOL


@dataclass(frozen=True)
class SweepReport:
    """Per-step-size monotonicity results, split at the guaranteed limit.

    Runs with h <= C * h_FE must be monotone up to roundoff; runs above the
    limit are observational only.
    """

    problem_name: str
    threshold: ThresholdFactor
    h_limit: Optional[float]
    entries: tuple[SweepEntry, ...]

    @property
    def guaranteed_all_monotone(self) -> bool:
        return all(e.monotone for e in self.entries if e.guaranteed)

    def to_json(self) -> str:
        payload = {
            "problem": self.problem_name,
            "threshold": None
            if self.threshold is UNBOUNDED
            else str(self.threshold),
            "h_limit": self.h_limit,
            "guaranteed_all_monotone": self.guaranteed_all_monotone,
            "runs": [
                {
                    "h": e.h,
                    "guaranteed": e.guaranteed,
                    "max_violation": e.record.max_violation,
                    "monotone": e.monotone,
                }
                for e in self.entries
            ],
        }
        return json.dumps(payload, indent=2)


def monotonicity_sweep(
    method: MethodCoefficients,
    problem: TestProblem,
    h_values: Sequence[float],
    steps: int,
) -> SweepReport:
    """Run the method at each h and group runs by the guaranteed step limit.

    The comparison h <= C * h_FE is done in exact rational arithmetic on the
    binary values of h and h_FE, so classification never suffers roundoff.
    """
    threshold = threshold_factor(method)
    if threshold is UNBOUNDED:
        h_limit = None
    else:
        h_limit = float(threshold * Fraction(problem.h_fe))
    entries = []
    for h in h_values:
        if threshold is UNBOUNDED:
            guaranteed = True
        else:
            guaranteed = Fraction(h) <= threshold * Fraction(problem.h_fe)
        record = lmm_integrate(method, problem, h, steps)
        entries.append(SweepEntry(h=h, guaranteed=guaranteed, record=record))
    return SweepReport(
        problem_name=problem.name,
        threshold=threshold,
        h_limit=h_limit,
        entries=tuple(entries),
    )
