"""Accuracy constraints and step-size ratio analysis for linear multistep methods.

A k-step method advances u_n = sum_j alpha_j u_{n-j} + h sum_j beta_j f(u_{n-j}).
This module builds the exact equality systems that encode "order p and
monotonicity ratio at least r" as feasibility problems over nonnegative
variables, evaluates order residuals for arbitrary coefficient sets, and
computes the monotone step-size factor of a method.

Throughout, the convention 0**0 == 1 is used, so the m = 0 accuracy row reads
sum_j alpha_j = 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .exactlp import FeasibilityProblem, RationalMatrix


class Variant(enum.Enum):
    """Method class: beta_0 forced to zero (explicit) or free (implicit)."""

    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


class _Unbounded:
    """Marker for a monotone step-size factor with no finite ratio."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Unbounded"


UNBOUNDED = _Unbounded()

ThresholdFactor = Union[Fraction, _Unbounded]


@dataclass(frozen=True)
class MethodCoefficients:
    """Coefficients (alpha_1..alpha_k, beta_0..beta_k) of a k-step method."""

    k: int
    explicit: bool
    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("step count must be at least 1")
        if len(self.alpha) != self.k:
            raise ValueError("alpha must have k entries")
        if len(self.beta) != self.k + 1:
            raise ValueError("beta must have k+1 entries (beta_0 first)")
        if self.explicit and self.beta[0] != 0:
            raise ValueError("explicit methods require beta_0 = 0")

    @property
    def variant(self) -> Variant:
        return Variant.EXPLICIT if self.explicit else Variant.IMPLICIT


@dataclass(frozen=True)
class PrimalWitness:
    """Nonnegative (delta, beta) solving the order/ratio equality system.

    ``delta`` holds delta_1..delta_k.  For explicit witnesses ``beta`` holds
    beta_1..beta_k; for implicit ones it holds beta_0..beta_k.
    """

    k: int
    p: int
    r: Fraction
    delta: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.delta) != self.k:
            raise ValueError("delta must have k entries")
        if len(self.beta) not in (self.k, self.k + 1):
            raise ValueError("beta must have k (explicit) or k+1 (implicit) entries")
        if any(v < 0 for v in self.delta) or any(v < 0 for v in self.beta):
            raise ValueError("witness entries must be nonnegative")

    @property
    def variant(self) -> Variant:
        return Variant.EXPLICIT if len(self.beta) == self.k else Variant.IMPLICIT


def _accuracy_row_entries(k: int, m: int, r: Fraction) -> tuple[list[Fraction], list[Fraction]]:
    """Row m of the constraint system: delta-block and beta-block entries."""
    delta_part = [Fraction(j**m) for j in range(1, k + 1)]
    beta_part = []
    for j in range(1, k + 1):
        deriv = Fraction(0) if m == 0 else Fraction(m * j ** (m - 1))
        beta_part.append(r * j**m - deriv)
    return delta_part, beta_part


def build_explicit_lp(k: int, p: int, r) -> FeasibilityProblem:
    """Equality system for an explicit order-p method with ratio >= r.

    Columns are delta_1..delta_k then beta_1..beta_k; row m (0 <= m <= p) has
    entry j**m under delta_j and r*j**m - m*j**(m-1) under beta_j; the
    right-hand side is (1, 0, ..., 0).
    """
    if k < 1 or p < 1:
        raise ValueError("need k >= 1 and p >= 1")
    r = Fraction(r)
    rows = []
    for m in range(p + 1):
        delta_part, beta_part = _accuracy_row_entries(k, m, r)
        rows.append(delta_part + beta_part)
    b = tuple([Fraction(1)] + [Fraction(0)] * p)
    return FeasibilityProblem(RationalMatrix.from_rows(rows), b)


def build_implicit_lp(k: int, p: int, r) -> FeasibilityProblem:
    """Like :func:`build_explicit_lp` with a trailing beta_0 column.

    The beta_0 column is -m * 0**(m-1), i.e. -1 in row m = 1 and 0 elsewhere.
    """
    if k < 1 or p < 1:
        raise ValueError("need k >= 1 and p >= 1")
    r = Fraction(r)
    rows = []
    for m in range(p + 1):
        delta_part, beta_part = _accuracy_row_entries(k, m, r)
        beta0 = Fraction(-1) if m == 1 else Fraction(0)
        rows.append(delta_part + beta_part + [beta0])
    b = tuple([Fraction(1)] + [Fraction(0)] * p)
    return FeasibilityProblem(RationalMatrix.from_rows(rows), b)


def order_residuals(method: MethodCoefficients, p: int) -> tuple[Fraction, ...]:
    """Residuals of the order-p accuracy conditions; all zero iff order >= p.

    Entry 0 is sum(alpha) - 1; entry m is
    sum_j (j**m alpha_j - m j**(m-1) beta_j) - m 0**(m-1) beta_0.
    """
    if p < 0:
        raise ValueError("p must be nonnegative")
    k = method.k
    out = [sum(method.alpha, Fraction(0)) - 1]
    for m in range(1, p + 1):
        acc = Fraction(0)
        for j in range(1, k + 1):
            acc += method.alpha[j - 1] * j**m
            acc -= method.beta[j] * m * j ** (m - 1)
        if m == 1:
            acc -= method.beta[0]
        out.append(acc)
    return tuple(out)


def threshold_factor(method: MethodCoefficients) -> ThresholdFactor:
    """Largest r with alpha_j - r beta_j >= 0 for the method's nonneg split.

    Zero as soon as any alpha_j (j >= 1) or beta_j (j >= 0) is negative;
    ``UNBOUNDED`` when no beta_j with j >= 1 constrains the ratio.
    """
    if any(a < 0 for a in method.alpha) or any(b < 0 for b in method.beta):
        return Fraction(0)
    ratios = [
        method.alpha[j - 1] / method.beta[j]
        for j in range(1, method.k + 1)
        if method.beta[j] != 0
    ]
    if not ratios:
        return UNBOUNDED
    return min(ratios)


def witness_to_method(witness: PrimalWitness) -> MethodCoefficients:
    """Recover method coefficients via alpha_j = delta_j + r * beta_j."""
    k, r = witness.k, witness.r
    if witness.variant is Variant.EXPLICIT:
        beta_full = (Fraction(0),) + tuple(witness.beta)
    else:
        beta_full = tuple(witness.beta)
    alpha = tuple(
        witness.delta[j - 1] + r * beta_full[j] for j in range(1, k + 1)
    )
    return MethodCoefficients(
        k=k,
        explicit=witness.variant is Variant.EXPLICIT,
        alpha=alpha,
        beta=beta_full,
    )
