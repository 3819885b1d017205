"""Exact rational linear algebra and LP feasibility with dual certificates.

Everything here runs over `fractions.Fraction`, so every verdict is an exact
statement about the input system: a feasible problem comes back with a
nonnegative solution satisfying the equalities identically, an infeasible one
with a separating vector whose defining inequalities hold identically.  There
are no tolerances anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence


def _frac_row(values: Sequence) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class RationalMatrix:
    """Dense row-major matrix of exact rationals."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"entry count {len(self.entries)} does not match "
                f"{self.rows}x{self.cols}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat: list[Fraction] = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged rows")
            flat.extend(Fraction(v) for v in row)
        return cls(nrows, ncols, tuple(flat))

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_lists(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]


@dataclass(frozen=True)
class FeasibilityProblem:
    """The system ``A x = b, x >= 0`` over the rationals."""

    a: RationalMatrix
    b: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.b) != self.a.rows:
            raise ValueError("right-hand side length does not match row count")
        if self.a.rows < 1 or self.a.cols < 1:
            raise ValueError("need at least one row and one column")


@dataclass(frozen=True)
class FeasibilityOutcome:
    """Either a nonnegative solution of ``Ax = b`` or a separating vector.

    Exactly one of ``witness_x`` / ``farkas_y`` is set.  A witness satisfies
    ``A witness_x = b`` and ``witness_x >= 0`` identically; a separating
    vector satisfies ``A^T farkas_y >= 0`` componentwise and
    ``b^T farkas_y < 0``.
    """

    feasible: bool
    witness_x: Optional[tuple[Fraction, ...]] = None
    farkas_y: Optional[tuple[Fraction, ...]] = None


def _dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def verify_outcome(problem: FeasibilityProblem, outcome: FeasibilityOutcome) -> bool:
    """Re-check an outcome's defining (in)equalities in exact arithmetic."""
    a, b = problem.a, problem.b
    if outcome.feasible:
        x = outcome.witness_x
        if x is None or len(x) != a.cols or any(v < 0 for v in x):
            return False
        return all(_dot(a.row(i), x) == b[i] for i in range(a.rows))
    y = outcome.farkas_y
    if y is None or len(y) != a.rows:
        return False
    if _dot(b, y) >= 0:
        return False
    return all(_dot(a.column(j), y) >= 0 for j in range(a.cols))


def _primitive(vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale by a positive rational to the primitive integer form.

    The first nonzero entry then has denominator one, which makes certificate
    output reproducible; positive scaling keeps the sign conditions intact.
    """
    denom_lcm = 1
    for v in vec:
        denom_lcm = denom_lcm * v.denominator // gcd(denom_lcm, v.denominator)
    ints = [int(v * denom_lcm) for v in vec]
    g = 0
    for n in ints:
        g = gcd(g, abs(n))
    if g == 0:
        return tuple(Fraction(0) for _ in vec)
    return tuple(Fraction(n // g) for n in ints)


def solve_feasibility(problem: FeasibilityProblem) -> FeasibilityOutcome:
    """Decide ``Ax = b, x >= 0`` by a phase-I simplex with Bland's rule.

    Artificial variables start the basis; Bland's pivoting rule guarantees
    termination on degenerate instances.  On infeasibility the separating
    vector is read off the final reduced costs of the artificial columns and
    normalized to a primitive integer vector.
    """
    a, b = problem.a, problem.b
    m, n = a.rows, a.cols

    # Flip rows with negative right-hand side so artificials start feasible.
    tableau: list[list[Fraction]] = []
    signs: list[int] = []
    for i in range(m):
        row = list(a.row(i))
        rhs = b[i]
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
            signs.append(-1)
        else:
            signs.append(1)
        full = row + [Fraction(0)] * m + [rhs]
        full[n + i] = Fraction(1)
        tableau.append(full)

    basis = [n + i for i in range(m)]
    zero = Fraction(0)
    # Reduced costs for minimizing the sum of artificials (basis costs all 1).
    reduced = []
    for j in range(n + m):
        cj = zero if j < n else Fraction(1)
        reduced.append(cj - sum(tableau[i][j] for i in range(m)))

    while True:
        entering = next((j for j in range(n + m) if reduced[j] < 0), None)
        if entering is None:
            break
        leaving = None
        best_ratio = None
        for i in range(m):
            coeff = tableau[i][entering]
            if coeff > 0:
                ratio = tableau[i][-1] / coeff
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving is None:  # pragma: no cover - phase-I objective is bounded
            raise RuntimeError("phase-I simplex reported unbounded")
        pivot = tableau[leaving][entering]
        tableau[leaving] = [v / pivot for v in tableau[leaving]]
        pivot_row = tableau[leaving]
        for i in range(m):
            if i != leaving and tableau[i][entering] != 0:
                factor = tableau[i][entering]
                tableau[i] = [u - factor * v for u, v in zip(tableau[i], pivot_row)]
        factor = reduced[entering]
        reduced = [u - factor * v for u, v in zip(reduced, pivot_row[:-1])]
        basis[leaving] = entering

    residual = sum(
        (tableau[i][-1] for i in range(m) if basis[i] >= n), Fraction(0)
    )
    if residual == 0:
        x = [zero] * n
        for i, var in enumerate(basis):
            if var < n:
                x[var] = tableau[i][-1]
        outcome = FeasibilityOutcome(feasible=True, witness_x=tuple(x))
    else:
        # Simplex multipliers: reduced cost of artificial i is 1 - y_i in the
        # sign-flipped system; map back and negate to separate the original b.
        y = [
            -signs[i] * (Fraction(1) - reduced[n + i]) for i in range(m)
        ]
        outcome = FeasibilityOutcome(feasible=False, farkas_y=_primitive(y))
    if not verify_outcome(problem, outcome):  # pragma: no cover - soundness guard
        raise RuntimeError("internal error: certificate failed exact re-check")
    return outcome


def rank(matrix: RationalMatrix) -> int:
    """Exact rank by Gaussian elimination over the rationals."""
    rows = matrix.to_lists()
    nrows, ncols = matrix.rows, matrix.cols
    r = 0
    for col in range(ncols):
        pivot_row = next(
            (i for i in range(r, nrows) if rows[i][col] != 0), None
        )
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pivot = rows[r][col]
        rows[r] = [v / pivot for v in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [u - factor * v for u, v in zip(rows[i], rows[r])]
        r += 1
        if r == nrows:
            break
    return r
