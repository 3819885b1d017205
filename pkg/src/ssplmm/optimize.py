"""Bisection over the step-size ratio with exact certificates at both ends.

The optimal coefficient C(k, p) is bracketed by probing the feasibility
system at rational ratios: a feasible probe yields a nonnegative witness
(hence a concrete method with ratio >= r), an infeasible probe yields a dual
polynomial certifying that no such method exists.  Feasibility is monotone
(downward) in r, so bisection applies.  Two refinements recover exact optima
where possible: the closed-form ceiling is probed first and, when feasible,
the bracket collapses onto it; after bisection, the simplest rationals inside
the bracket are probed so that simple exact optima (e.g. 1/2) are returned
as exact rationals rather than dyadic approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import bounds as _bounds
from .certificates import CertificatePolynomial, DualSystem
from .exactlp import solve_feasibility
from .order_conditions import (
    MethodCoefficients,
    PrimalWitness,
    Variant,
    build_explicit_lp,
    build_implicit_lp,
    witness_to_method,
)

DEFAULT_TOLERANCE = Fraction(1, 2**30)

_SHARPEN_CAP = 24


class NoPositiveSSP(ValueError):
    """Raised when an operation needs a certified positive coefficient."""


@dataclass(frozen=True)
class SSPQuery:
    k: int
    p: int
    variant: Variant
    tolerance: Fraction = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        object.__setattr__(self, "tolerance", Fraction(self.tolerance))
        if self.k < 1 or self.p < 1:
            raise ValueError("need k >= 1 and p >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of one feasibility probe at a fixed ratio."""

    feasible: bool
    witness: Optional[PrimalWitness] = None
    certificate: Optional[CertificatePolynomial] = None


@dataclass(frozen=True)
class SSPBracket:
    """Certified interval r_lo <= C(k, p) < r_hi.

    ``primal_at_lo`` witnesses feasibility at r_lo (absent only in the
    certified-zero case, where no method of the requested order has
    nonnegative coefficients at all); ``dual_at_hi`` certifies infeasibility
    at r_hi.  ``exact`` marks brackets that collapsed onto the closed-form
    ceiling, where r_lo equals the optimum outright.
    """

    query: SSPQuery
    r_lo: Fraction
    r_hi: Fraction
    primal_at_lo: Optional[PrimalWitness]
    dual_at_hi: CertificatePolynomial
    exact: bool = False

    @property
    def gap(self) -> Fraction:
        return self.r_hi - self.r_lo

    @property
    def certified_zero(self) -> bool:
        return self.r_lo == 0


def is_feasible(k: int, p: int, r, variant: Variant) -> ProbeResult:
    """Probe the order/ratio system at ratio r and package the certificate.

    On infeasibility the separating vector's entries are exactly the
    coefficients y_0..y_p of an open-system dual polynomial.
    """
    r = Fraction(r)
    if r < 0:
        raise ValueError("ratio must be nonnegative")
    if variant is Variant.EXPLICIT:
        problem = build_explicit_lp(k, p, r)
    else:
        problem = build_implicit_lp(k, p, r)
    outcome = solve_feasibility(problem)
    if outcome.feasible:
        x = outcome.witness_x
        if variant is Variant.EXPLICIT:
            delta, beta = x[:k], x[k : 2 * k]
        else:
            delta, beta = x[:k], (x[2 * k],) + x[k : 2 * k]
        witness = PrimalWitness(k=k, p=p, r=r, delta=tuple(delta), beta=tuple(beta))
        return ProbeResult(feasible=True, witness=witness)
    system = (
        DualSystem.OPEN_EXPLICIT
        if variant is Variant.EXPLICIT
        else DualSystem.OPEN_IMPLICIT
    )
    certificate = CertificatePolynomial(
        coefficients=outcome.farkas_y,
        target_k=k,
        target_r=r,
        system=system,
    )
    return ProbeResult(feasible=False, certificate=certificate)


def simplest_between(lo, hi) -> Fraction:
    """The fraction with the smallest denominator strictly inside (lo, hi)."""
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    floor = lo.numerator // lo.denominator
    if lo < floor + 1 < hi:
        return Fraction(floor + 1)
    if lo == floor:
        # (floor, hi) with hi <= floor+1: candidates floor + 1/n
        inv = 1 / (hi - floor)
        return floor + Fraction(1, inv.numerator // inv.denominator + 1)
    return floor + 1 / simplest_between(1 / (hi - floor), 1 / (lo - floor))


def _ceiling(query: SSPQuery) -> Fraction:
    if query.variant is Variant.EXPLICIT:
        return _bounds.explicit_bound_value(query.k, query.p)
    return _bounds.implicit_bound_value(query.k, query.p)


def optimal_ssp(query: SSPQuery) -> SSPBracket:
    """Bracket the optimal coefficient with certificates at both endpoints.

    The closed-form ceiling is probed exactly first; feasibility there
    collapses the bracket (the optimum is attained at the ceiling).
    Otherwise bisection runs from [0, ceiling] down to the query tolerance,
    followed by a short simplest-rational sharpening pass.  A ratio of zero
    that is itself infeasible yields the certified-zero verdict with no
    witness attached.
    """
    k, p, variant, tol = query.k, query.p, query.variant, query.tolerance
    if variant is Variant.IMPLICIT and p < 2:
        raise ValueError(
            "implicit order-1 queries have no finite optimum: the feasibility "
            "system is satisfiable at every ratio"
        )
    ceiling = _ceiling(query)

    at_ceiling = is_feasible(k, p, ceiling, variant)
    if at_ceiling.feasible:
        above = is_feasible(k, p, ceiling + tol, variant)
        if above.feasible:  # pragma: no cover - would refute the proved bound
            raise RuntimeError("feasible above the proved ceiling")
        return SSPBracket(
            query=query,
            r_lo=ceiling,
            r_hi=ceiling + tol,
            primal_at_lo=at_ceiling.witness,
            dual_at_hi=above.certificate,
            exact=True,
        )

    if ceiling == 0:
        # Infeasible even at ratio zero: no admissible method of this order.
        at_tol = is_feasible(k, p, tol, variant)
        return SSPBracket(
            query=query,
            r_lo=Fraction(0),
            r_hi=tol,
            primal_at_lo=None,
            dual_at_hi=at_tol.certificate,
        )

    hi, dual = ceiling, at_ceiling.certificate
    at_zero = is_feasible(k, p, Fraction(0), variant)
    if not at_zero.feasible:
        at_tol = is_feasible(k, p, tol, variant)
        return SSPBracket(
            query=query,
            r_lo=Fraction(0),
            r_hi=tol,
            primal_at_lo=None,
            dual_at_hi=at_tol.certificate,
        )
    lo, witness = Fraction(0), at_zero.witness

    cap = math.ceil(math.log2(float((hi - lo) / tol))) + 4
    steps = 0
    while hi - lo > tol and steps < cap:
        steps += 1
        mid = (lo + hi) / 2
        probe = is_feasible(k, p, mid, variant)
        if probe.feasible:
            lo, witness = mid, probe.witness
        else:
            hi, dual = mid, probe.certificate

    landed = False
    for _ in range(_SHARPEN_CAP):
        candidate = simplest_between(lo, hi)
        probe = is_feasible(k, p, candidate, variant)
        if probe.feasible:
            lo, witness, landed = candidate, probe.witness, True
        else:
            hi, dual = candidate, probe.certificate
            if landed:
                break

    return SSPBracket(
        query=query,
        r_lo=lo,
        r_hi=hi,
        primal_at_lo=witness,
        dual_at_hi=dual,
    )


def extract_optimal_method(bracket: SSPBracket) -> MethodCoefficients:
    """Method coefficients from the witness at the feasible endpoint.

    The result satisfies the order conditions identically and has threshold
    factor at least r_lo.  Raises :class:`NoPositiveSSP` when the bracket
    certifies a zero coefficient.
    """
    if bracket.r_lo == 0 or bracket.primal_at_lo is None:
        raise NoPositiveSSP(
            f"no positive coefficient certified for k={bracket.query.k}, "
            f"p={bracket.query.p}, {bracket.query.variant.value}"
        )
    return witness_to_method(bracket.primal_at_lo)


@dataclass(frozen=True)
class SupportReport:
    """Binding structure of the dual certificate at the infeasible endpoint.

    ``delta_support_allowed`` collects the j with q(j) = 0 (only there may an
    optimal method place delta weight) and ``beta_support_allowed`` the j with
    -q'(j) + r q(j) = 0 (only there beta weight); for implicit brackets index
    0 appears when q'(0) = 0.  When the constraint vectors at these indices
    are linearly independent the optimal method is unique.  Off a collapsed
    bracket the certificate sits at r_hi rather than the optimum, so the
    report is marked approximate and the witness containments are advisory.
    """

    query: SSPQuery
    r: Fraction
    delta_support_allowed: tuple[int, ...]
    beta_support_allowed: tuple[int, ...]
    vectors: tuple[tuple[Fraction, ...], ...]
    rank: int
    unique: bool
    approximate: bool
    witness_delta_contained: bool
    witness_beta_contained: bool


def support_analysis(bracket: SSPBracket) -> SupportReport:
    from .exactlp import RationalMatrix, rank as matrix_rank

    query = bracket.query
    if bracket.r_lo == 0 or bracket.primal_at_lo is None:
        raise NoPositiveSSP("support analysis needs a positive certified ratio")
    if bracket.gap > query.tolerance:
        raise ValueError("bracket gap exceeds the query tolerance")

    cert = bracket.dual_at_hi
    r = bracket.r_hi
    k, p = query.k, query.p

    delta_allowed = tuple(j for j in range(1, k + 1) if cert(j) == 0)
    beta_allowed = [
        j
        for j in range(1, k + 1)
        if -cert.derivative_at(j) + r * cert(j) == 0
    ]
    implicit = query.variant is Variant.IMPLICIT
    include_zero = implicit and cert.derivative_at(0) == 0
    if include_zero:
        beta_allowed = [0] + beta_allowed

    vectors: list[tuple[Fraction, ...]] = []
    for j in delta_allowed:
        vectors.append(tuple(Fraction(j**m) for m in range(p + 1)))
    for j in beta_allowed:
        if j == 0:
            vec = [Fraction(0)] * (p + 1)
            vec[1] = Fraction(-1)
            vectors.append(tuple(vec))
        else:
            vectors.append(
                tuple(
                    -Fraction(m * j ** (m - 1) if m else 0) + r * j**m
                    for m in range(p + 1)
                )
            )

    if vectors:
        rank_value = matrix_rank(RationalMatrix.from_rows(vectors))
    else:
        rank_value = 0
    unique = bool(vectors) and rank_value == len(vectors)

    witness = bracket.primal_at_lo
    delta_support = {
        j for j in range(1, k + 1) if witness.delta[j - 1] != 0
    }
    if witness.variant is Variant.EXPLICIT:
        beta_support = {
            j for j in range(1, k + 1) if witness.beta[j - 1] != 0
        }
    else:
        beta_support = {j for j in range(0, k + 1) if witness.beta[j] != 0}

    return SupportReport(
        query=query,
        r=r,
        delta_support_allowed=delta_allowed,
        beta_support_allowed=tuple(beta_allowed),
        vectors=tuple(vectors),
        rank=rank_value,
        unique=unique,
        approximate=not bracket.exact,
        witness_delta_contained=delta_support <= set(delta_allowed),
        witness_beta_contained=beta_support <= set(beta_allowed),
    )
