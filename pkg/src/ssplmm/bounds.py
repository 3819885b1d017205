"""Closed-form ceilings on the monotone step-size coefficient.

The explicit ceiling (k-p)/(k-1) and the implicit ceiling (2k-p)/(k-1) come
with canonical closed-system certificates attached, so each reported bound is
itself verifiable.  The module also computes the step count beyond which
explicit order-p methods with a positive coefficient are guaranteed to exist,
and cross-checks the implicit/explicit doubling relation on computed brackets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import TYPE_CHECKING

from .certificates import (
    CertificatePolynomial,
    canonical_explicit_bound_certificate,
    canonical_implicit_bound_certificate,
    close_certificate,
    square_certificate,
    verify_certificate,
)
from .order_conditions import Variant

if TYPE_CHECKING:  # pragma: no cover
    from .optimize import SSPBracket


def explicit_bound_value(k: int, p: int) -> Fraction:
    if k < 1 or p < 1:
        raise ValueError("need k >= 1 and p >= 1")
    if k == 1:
        return Fraction(1) if p == 1 else Fraction(0)
    return max(Fraction(k - p, k - 1), Fraction(0))


def implicit_bound_value(k: int, p: int) -> Fraction:
    if k < 1:
        raise ValueError("need k >= 1")
    if p < 2:
        raise ValueError("implicit bound is only stated for p >= 2")
    if k == 1:
        return Fraction(2) if p == 2 else Fraction(0)
    return max(Fraction(2 * k - p, k - 1), Fraction(0))


@dataclass(frozen=True)
class BoundReport:
    k: int
    p: int
    variant: Variant
    bound_value: Fraction
    certificate: CertificatePolynomial


def upper_bound_explicit(k: int, p: int) -> BoundReport:
    """Ceiling for explicit methods, with its canonical certificate."""
    value = explicit_bound_value(k, p)
    cert = canonical_explicit_bound_certificate(k, p)
    return BoundReport(
        k=k, p=p, variant=Variant.EXPLICIT, bound_value=value, certificate=cert
    )


def upper_bound_implicit(k: int, p: int) -> BoundReport:
    """Ceiling for implicit methods (p >= 2), with its canonical certificate."""
    value = implicit_bound_value(k, p)
    cert = canonical_implicit_bound_certificate(k, p)
    return BoundReport(
        k=k, p=p, variant=Variant.IMPLICIT, bound_value=value, certificate=cert
    )


def existence_step_threshold(p: int) -> int:
    """Smallest k with k**2 > p**2(p**2-1)/6 * floor((p+2)/2), exactly.

    Beyond this step count an explicit order-p method with positive monotone
    step-size coefficient is guaranteed to exist.  The radicand is an integer
    (p**2(p**2-1) is always divisible by 6), so the comparison is pure
    integer arithmetic.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    radicand = (p * p * (p * p - 1) // 6) * ((p + 2) // 2)
    return isqrt(radicand) + 1


@dataclass(frozen=True)
class ImpExpReport:
    """Outcome of checking C_imp(k, 2p) <= 2 C_exp(k, p) at bracket resolution."""

    k: int
    p: int
    implicit_lower: Fraction
    doubled_explicit_upper: Fraction
    slack: Fraction
    margin: Fraction
    verdict: bool
    squared_certificate: CertificatePolynomial
    squared_ok: bool


def check_impexp_relation(
    k: int, p: int, c_exp: "SSPBracket", c_imp: "SSPBracket"
) -> ImpExpReport:
    """Verify the doubling relation on a pair of computed brackets.

    The inequality relates true optima; the artifact holds brackets, so the
    comparison allows an explicit 2*tolerance slack.  The implication is also
    re-derived constructively: the explicit dual certificate is closed and
    squared, which must verify the closed implicit system at twice the ratio.
    """
    if (
        c_exp.query.k != k
        or c_exp.query.p != p
        or c_exp.query.variant is not Variant.EXPLICIT
    ):
        raise ValueError("c_exp is not the explicit bracket for (k, p)")
    if (
        c_imp.query.k != k
        or c_imp.query.p != 2 * p
        or c_imp.query.variant is not Variant.IMPLICIT
    ):
        raise ValueError("c_imp is not the implicit bracket for (k, 2p)")

    slack = 2 * max(c_exp.query.tolerance, c_imp.query.tolerance)
    lhs = c_imp.r_lo
    rhs = 2 * c_exp.r_hi
    verdict = lhs <= rhs + slack

    closed = close_certificate(c_exp.dual_at_hi)
    squared = square_certificate(closed)
    squared_ok = verify_certificate(squared).valid

    return ImpExpReport(
        k=k,
        p=p,
        implicit_lower=lhs,
        doubled_explicit_upper=rhs,
        slack=slack,
        margin=rhs + slack - lhs,
        verdict=verdict and squared_ok,
        squared_certificate=squared,
        squared_ok=squared_ok,
    )
