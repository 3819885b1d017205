"""Dual polynomial certificates and their exact verification.

A certificate is a rational-coefficient polynomial q of bounded degree whose
sign pattern at the integers 0..k witnesses that no k-step method of the given
order can have a monotone step-size ratio above r.  Two flavours exist: the
"open" systems require q(0) < 0 (these come straight out of LP separation),
the "closed" systems normalize to q(0) = 0 (and q'(0) = 0 in the implicit
case) and are the ones with clean root structure.

All verdicts rest on exact Fraction evaluation.  Root-counting (for the
root-form cross-checks) is exact as well, via integer-root deflation plus
Sturm chains on the deflated factor; only the locations of complex roots are
reported approximately, and they never enter any verdict.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .order_conditions import Variant


class CertificateError(ValueError):
    """A certificate violates a contract it was required to satisfy."""


class CertificateParseError(ValueError):
    """A certificate file does not follow the interchange format."""


class DualSystem(enum.Enum):
    OPEN_EXPLICIT = "open-explicit"
    OPEN_IMPLICIT = "open-implicit"
    CLOSED_EXPLICIT = "closed-explicit"
    CLOSED_IMPLICIT = "closed-implicit"

    @property
    def is_open(self) -> bool:
        return self in (DualSystem.OPEN_EXPLICIT, DualSystem.OPEN_IMPLICIT)

    @property
    def is_implicit(self) -> bool:
        return self in (DualSystem.OPEN_IMPLICIT, DualSystem.CLOSED_IMPLICIT)


# ---------------------------------------------------------------------------
# Polynomial helpers (coefficients low degree -> high degree, Fractions).

def _strip(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    cs = list(coeffs)
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def poly_eval(coeffs: Sequence[Fraction], x) -> Fraction:
    x = Fraction(x)
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    if len(coeffs) <= 1:
        return (Fraction(0),)
    return tuple(Fraction(m) * coeffs[m] for m in range(1, len(coeffs)))


def poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return tuple(out)


def _poly_divmod(a, b):
    a = list(_strip(a))
    b = _strip(b)
    if b == (Fraction(0),):
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and _strip(a) != (Fraction(0),):
        shift = len(a) - len(b)
        factor = a[-1] / lead
        q[shift] = factor
        for i, bi in enumerate(b):
            a[shift + i] -= factor * bi
        while len(a) > 1 and a[-1] == 0:
            a.pop()
        if len(a) < len(b):
            break
    return _strip(q), _strip(a)


def _poly_monic(a):
    a = _strip(a)
    lead = a[-1]
    if lead == 0:
        return a
    return tuple(c / lead for c in a)


def _poly_gcd(a, b):
    a, b = _strip(a), _strip(b)
    while b != (Fraction(0),):
        _, rem = _poly_divmod(a, b)
        a, b = b, rem
    return _poly_monic(a)


def _deflate(coeffs, root) -> tuple[Fraction, ...]:
    """Exact synthetic division by (x - root); root must be an exact root."""
    root = Fraction(root)
    out = []
    acc = Fraction(0)
    for c in reversed(_strip(coeffs)):
        acc = acc * root + c
        out.append(acc)
    remainder = out.pop()
    if remainder != 0:
        raise ValueError("not a root")
    return _strip(tuple(reversed(out)))


def _squarefree_parts(coeffs) -> list[tuple[tuple[Fraction, ...], int]]:
    """Musser decomposition: [(factor, multiplicity)] with factors squarefree."""
    f = _strip(coeffs)
    if len(f) <= 1:
        return []
    a = _poly_gcd(f, poly_derivative(f))
    b, _ = _poly_divmod(f, a)
    parts = []
    i = 1
    while len(a) > 1:
        c = _poly_gcd(a, b)
        fac, _ = _poly_divmod(b, c)
        if len(fac) > 1:
            parts.append((fac, i))
        b = c
        a, _ = _poly_divmod(a, c)
        i += 1
    if len(b) > 1:
        parts.append((b, i))
    return parts


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _sturm_chain(coeffs):
    chain = [_strip(coeffs)]
    d = _strip(poly_derivative(coeffs))
    if d != (Fraction(0),):
        chain.append(d)
        while True:
            _, rem = _poly_divmod(chain[-2], chain[-1])
            if rem == (Fraction(0),):
                break
            chain.append(tuple(-c for c in rem))
            if len(chain[-1]) == 1:
                break
    return chain


def _variations(signs) -> int:
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_distinct_roots_above(coeffs, mu) -> int:
    """Distinct real roots of a squarefree polynomial in (mu, +inf)."""
    chain = _sturm_chain(coeffs)
    at_mu = [_sign(poly_eval(c, mu)) for c in chain]
    at_inf = [_sign(c[-1]) for c in chain]
    return _variations(at_mu) - _variations(at_inf)


def _count_distinct_roots_total(coeffs) -> int:
    chain = _sturm_chain(coeffs)
    at_ninf = [_sign(c[-1]) * (-1 if (len(c) - 1) % 2 else 1) for c in chain]
    at_inf = [_sign(c[-1]) for c in chain]
    return _variations(at_ninf) - _variations(at_inf)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CertificatePolynomial:
    """Polynomial q (coefficients y_0..y_p) targeting one dual system.

    ``target_k`` and ``target_r`` record the step count and ratio the
    certificate speaks about; ``system`` selects which conditions at 0 apply.
    """

    coefficients: tuple[Fraction, ...]
    target_k: int
    target_r: Fraction
    system: DualSystem

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "coefficients", tuple(Fraction(c) for c in self.coefficients)
        )
        object.__setattr__(self, "target_r", Fraction(self.target_r))
        if self.target_k < 1:
            raise ValueError("target_k must be at least 1")
        if not self.coefficients or all(c == 0 for c in self.coefficients):
            raise ValueError("certificate polynomial must be nonzero")

    @property
    def degree_bound(self) -> int:
        return len(self.coefficients) - 1

    @property
    def degree(self) -> int:
        return len(_strip(self.coefficients)) - 1

    def __call__(self, x) -> Fraction:
        return poly_eval(self.coefficients, x)

    def derivative_at(self, x) -> Fraction:
        return poly_eval(poly_derivative(self.coefficients), x)


@dataclass(frozen=True)
class ConditionCheck:
    label: str
    value: Fraction
    holds: bool


@dataclass(frozen=True)
class CertificateReport:
    certificate: CertificatePolynomial
    conditions: tuple[ConditionCheck, ...]
    valid: bool


def verify_certificate(q: CertificatePolynomial) -> CertificateReport:
    """Exactly evaluate every condition of q's dual system.

    For j = 1..k both q(j) >= 0 and -q'(j) + r q(j) >= 0 are checked; at 0
    the open systems need q(0) < 0 and the closed ones q(0) = 0, with the
    implicit variants adding -q'(0) >= 0 (open) or q'(0) = 0 (closed).
    """
    r, k = q.target_r, q.target_k
    checks = []
    for j in range(1, k + 1):
        vj = q(j)
        checks.append(ConditionCheck(f"q({j}) >= 0", vj, vj >= 0))
        wj = -q.derivative_at(j) + r * vj
        checks.append(ConditionCheck(f"-q'({j}) + r*q({j}) >= 0", wj, wj >= 0))
    v0 = q(0)
    if q.system.is_open:
        checks.append(ConditionCheck("q(0) < 0", v0, v0 < 0))
    else:
        checks.append(ConditionCheck("q(0) = 0", v0, v0 == 0))
    if q.system is DualSystem.OPEN_IMPLICIT:
        d0 = -q.derivative_at(0)
        checks.append(ConditionCheck("-q'(0) >= 0", d0, d0 >= 0))
    elif q.system is DualSystem.CLOSED_IMPLICIT:
        d0 = q.derivative_at(0)
        checks.append(ConditionCheck("q'(0) = 0", d0, d0 == 0))
    return CertificateReport(
        certificate=q,
        conditions=tuple(checks),
        valid=all(c.holds for c in checks),
    )


# ---------------------------------------------------------------------------
# Root structure.


@dataclass(frozen=True)
class RootAnalysis:
    """Exact root bookkeeping for a certificate polynomial.

    ``integer_roots`` lists (root, multiplicity) for integer roots in
    [0, target_k], found by exact deflation.  ``s_table[j]`` is the number of
    real roots >= j, counted with multiplicity, for j = 0..target_k; it is
    exact (deflation plus Sturm counts on squarefree parts).  Complex pairs
    and non-integer real roots are located approximately, for reporting only.
    """

    leading_coefficient: Fraction
    degree: int
    integer_roots: tuple[tuple[int, int], ...]
    s_table: tuple[int, ...]
    real_root_count: int
    complex_root_pairs: tuple[complex, ...]
    other_real_roots_approx: tuple[float, ...]

    def s(self, mu: int) -> int:
        return self.s_table[mu]

    def multiplicity(self, j: int) -> int:
        for root, mult in self.integer_roots:
            if root == j:
                return mult
        return 0


def analyze_roots(q: CertificatePolynomial) -> RootAnalysis:
    coeffs = _strip(q.coefficients)
    degree = len(coeffs) - 1
    lead = coeffs[-1]
    k = q.target_k

    integer_roots = []
    residual = coeffs
    for j in range(0, k + 1):
        mult = 0
        while len(residual) > 1 and poly_eval(residual, j) == 0:
            residual = _deflate(residual, j)
            mult += 1
        if mult:
            integer_roots.append((j, mult))

    parts = _squarefree_parts(residual)
    residual_real = sum(
        mult * _count_distinct_roots_total(fac) for fac, mult in parts
    )

    s_table = []
    for mu in range(0, k + 1):
        count = sum(m for root, m in integer_roots if root >= mu)
        count += sum(
            mult * _count_distinct_roots_above(fac, mu) for fac, mult in parts
        )
        s_table.append(count)

    complex_pairs: list[complex] = []
    other_real: list[float] = []
    if len(residual) > 1:
        approx = np.roots([float(c) for c in reversed(residual)])
        for z in approx:
            if abs(z.imag) < 1e-9:
                other_real.append(float(z.real))
            elif z.imag > 0:
                complex_pairs.append(complex(z))

    total_integer = sum(m for _, m in integer_roots)
    return RootAnalysis(
        leading_coefficient=lead,
        degree=degree,
        integer_roots=tuple(integer_roots),
        s_table=tuple(s_table),
        real_root_count=total_integer + residual_real,
        complex_root_pairs=tuple(complex_pairs),
        other_real_roots_approx=tuple(sorted(other_real)),
    )


@dataclass(frozen=True)
class RootConditionReport:
    """Sign/derivative conditions at one integer, in both available forms.

    The value forms are the exact inequalities on q itself.  The root forms
    use the sign rule c*(-1)^s and the logarithmic derivative q'/q (an exact
    rational whenever the point is not a root); a root form is None when its
    hypotheses do not apply, e.g. the reciprocal-root sum at 0 when 0 is a
    root.
    """

    j: int
    is_root: bool
    multiplicity: int
    sign_value_form: bool
    sign_root_form: Optional[bool]
    derivative_value_form: bool
    derivative_root_form: Optional[bool]
    forms_agree: bool


def check_root_conditions(q: CertificatePolynomial, j: int) -> RootConditionReport:
    if not 0 <= j <= q.target_k:
        raise ValueError("j must lie in 0..target_k")
    analysis = analyze_roots(q)
    r = q.target_r
    c = analysis.leading_coefficient
    qj = q(j)
    dqj = q.derivative_at(j)
    mult = analysis.multiplicity(j)
    is_root = qj == 0
    sign_rule = _sign(c) * (-1) ** analysis.s(j)

    if j >= 1:
        sign_value = qj >= 0
        sign_root: Optional[bool] = is_root or sign_rule > 0
        deriv_value = -dqj + r * qj >= 0
        if not sign_root:
            deriv_root: Optional[bool] = None
        elif is_root:
            deriv_root = mult >= 2 or (mult == 1 and sign_rule > 0)
        else:
            # sum over roots of 1/(j - root) equals q'(j)/q(j), exactly
            deriv_root = dqj / qj <= r
    else:
        sign_value = qj < 0
        sign_root = (not is_root) and sign_rule < 0
        deriv_value = -dqj >= 0
        if is_root or not sign_value:
            deriv_root = None
        else:
            # sum over roots of 1/root equals -q'(0)/q(0), exactly
            deriv_root = -dqj / qj <= 0

    agree = (sign_root is None or sign_root == sign_value) and (
        deriv_root is None or deriv_root == deriv_value
    )
    return RootConditionReport(
        j=j,
        is_root=is_root,
        multiplicity=mult,
        sign_value_form=sign_value,
        sign_root_form=sign_root,
        derivative_value_form=deriv_value,
        derivative_root_form=deriv_root,
        forms_agree=agree,
    )


# ---------------------------------------------------------------------------
# Structural audit of closed-system certificates.


@dataclass(frozen=True)
class StructuralAudit:
    """Root-pattern properties expected of closed certificates at the optimum.

    All checks except ``complex_parts_in_range_approx`` are exact.  For
    brackets that did not collapse to an exact optimum the audit is advisory.
    """

    degree_matches_bound: bool
    zero_root_multiplicity_ok: bool
    interior_roots_double: bool
    endpoint_rule_ok: bool
    real_roots_all_integers: bool
    nonnegative_on_range: bool
    complex_parts_in_range_approx: bool
    passed: bool


def structural_audit(q: CertificatePolynomial, variant: Variant) -> StructuralAudit:
    analysis = analyze_roots(q)
    k = q.target_k
    p = q.degree_bound
    degree_ok = analysis.degree == p

    zero_mult = analysis.multiplicity(0)
    want_zero = 1 if variant is Variant.EXPLICIT else 2
    zero_ok = zero_mult == want_zero

    interior_ok = all(
        mult == 2 for root, mult in analysis.integer_roots if 1 <= root <= k - 1
    )

    mult_k = analysis.multiplicity(k)
    if variant is Variant.EXPLICIT:
        endpoint_ok = mult_k == 1 if p % 2 == 0 else mult_k in (0, 2)
    else:
        endpoint_ok = mult_k == 1 if p % 2 == 1 else mult_k in (0, 2)

    # Exact: after deflating integer roots in [0, k], any surviving real root
    # is either irrational or an integer outside the admissible range; both
    # break the integrality/location pattern.
    strayless = (
        analysis.real_root_count == sum(m for _, m in analysis.integer_roots)
    )

    quarter_samples_ok = all(
        poly_eval(q.coefficients, Fraction(i, 4)) >= 0 for i in range(4 * k + 1)
    )
    nonneg_ok = quarter_samples_ok and interior_ok and strayless

    in_range = True
    for z in analysis.complex_root_pairs:
        if not (-1e-9 <= z.real <= k + 1e-9):
            in_range = False

    passed = (
        degree_ok
        and zero_ok
        and interior_ok
        and endpoint_ok
        and strayless
        and nonneg_ok
    )
    return StructuralAudit(
        degree_matches_bound=degree_ok,
        zero_root_multiplicity_ok=zero_ok,
        interior_roots_double=interior_ok,
        endpoint_rule_ok=endpoint_ok,
        real_roots_all_integers=strayless,
        nonnegative_on_range=nonneg_ok,
        complex_parts_in_range_approx=in_range,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# Canonical constructions.


def _expand_x_power_times_k_minus_x(k: int, a: int, b: int) -> tuple[Fraction, ...]:
    """Coefficients of x**a * (k - x)**b."""
    poly = (Fraction(1),)
    for _ in range(b):
        poly = poly_mul(poly, (Fraction(k), Fraction(-1)))
    return tuple([Fraction(0)] * a) + poly


def canonical_explicit_bound_certificate(k: int, p: int) -> CertificatePolynomial:
    """The closed-system certificate x*(k-x)**(p-1) at the classical bound."""
    if k < 1 or p < 1:
        raise ValueError("need k >= 1 and p >= 1")
    if k == 1:
        r = Fraction(1) if p == 1 else Fraction(0)
    else:
        r = max(Fraction(k - p, k - 1), Fraction(0))
    return CertificatePolynomial(
        coefficients=_expand_x_power_times_k_minus_x(k, 1, p - 1),
        target_k=k,
        target_r=r,
        system=DualSystem.CLOSED_EXPLICIT,
    )


def canonical_implicit_bound_certificate(k: int, p: int) -> CertificatePolynomial:
    """The closed-system certificate x**2*(k-x)**(p-2) at the refined bound."""
    if k < 1 or p < 2:
        raise ValueError("need k >= 1 and p >= 2")
    if k == 1:
        r = Fraction(2) if p == 2 else Fraction(0)
    else:
        r = max(Fraction(2 * k - p, k - 1), Fraction(0))
    return CertificatePolynomial(
        coefficients=_expand_x_power_times_k_minus_x(k, 2, p - 2),
        target_k=k,
        target_r=r,
        system=DualSystem.CLOSED_IMPLICIT,
    )


def close_certificate(q: CertificatePolynomial) -> CertificatePolynomial:
    """Convert an open explicit certificate into a closed one.

    Subtracting q(0) preserves all conditions when r >= 0: the values at
    j = 1..k only go up, the derivative condition gains -r*q(0) >= 0, and the
    constant term becomes 0.
    """
    if q.system is not DualSystem.OPEN_EXPLICIT:
        raise CertificateError("only open explicit certificates can be closed")
    if q.target_r < 0:
        raise CertificateError("closing requires a nonnegative target ratio")
    if not verify_certificate(q).valid:
        raise CertificateError("input certificate does not verify")
    shifted = (Fraction(0),) + tuple(q.coefficients[1:])
    return CertificatePolynomial(
        coefficients=shifted,
        target_k=q.target_k,
        target_r=q.target_r,
        system=DualSystem.CLOSED_EXPLICIT,
    )


def square_certificate(q: CertificatePolynomial) -> CertificatePolynomial:
    """Square a closed explicit certificate into a closed implicit one at 2r.

    The identity -(q^2)'(j) + 2r*(q^2)(j) = 2 q(j) (-q'(j) + r q(j)) makes
    the derivative conditions carry over, and q(0) = 0 forces both conditions
    at 0 for the square.
    """
    if q.system is not DualSystem.CLOSED_EXPLICIT:
        raise CertificateError("squaring requires a closed explicit certificate")
    if not verify_certificate(q).valid:
        raise CertificateError("input certificate does not verify")
    squared = CertificatePolynomial(
        coefficients=poly_mul(q.coefficients, q.coefficients),
        target_k=q.target_k,
        target_r=2 * q.target_r,
        system=DualSystem.CLOSED_IMPLICIT,
    )
    if not verify_certificate(squared).valid:  # pragma: no cover - identity
        raise RuntimeError("internal error: squared certificate failed")
    return squared


# ---------------------------------------------------------------------------
# Interchange format.


def certificate_to_text(q: CertificatePolynomial) -> str:
    lines = [
        "# ssplmm certificate",
        f"k = {q.target_k}",
        f"p = {q.degree_bound}",
        f"r = {q.target_r.numerator}/{q.target_r.denominator}",
        f"system = {q.system.value}",
    ]
    for i, c in enumerate(q.coefficients):
        lines.append(f"y{i} = {c.numerator}/{c.denominator}")
    return "\n".join(lines) + "\n"


def certificate_from_text(text: str) -> CertificatePolynomial:
    fields: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CertificateParseError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in fields:
            raise CertificateParseError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = (lineno, value)

    def take(key: str) -> tuple[int, str]:
        if key not in fields:
            raise CertificateParseError(f"missing required key {key!r}")
        return fields.pop(key)

    def parse_int(key: str) -> int:
        lineno, value = take(key)
        try:
            return int(value)
        except ValueError:
            raise CertificateParseError(
                f"line {lineno}: {key} must be an integer, got {value!r}"
            ) from None

    def parse_fraction(lineno: int, key: str, value: str) -> Fraction:
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise CertificateParseError(
                f"line {lineno}: {key} must be an exact fraction, got {value!r}"
            ) from None

    k = parse_int("k")
    p = parse_int("p")
    lineno, value = take("r")
    r = parse_fraction(lineno, "r", value)
    lineno, value = take("system")
    try:
        system = DualSystem(value)
    except ValueError:
        raise CertificateParseError(
            f"line {lineno}: unknown system {value!r}"
        ) from None

    coeffs = []
    for i in range(p + 1):
        lineno, value = take(f"y{i}")
        coeffs.append(parse_fraction(lineno, f"y{i}", value))
    if fields:
        key = next(iter(fields))
        lineno, _ = fields[key]
        raise CertificateParseError(f"line {lineno}: unexpected key {key!r}")
    try:
        return CertificatePolynomial(
            coefficients=tuple(coeffs), target_k=k, target_r=r, system=system
        )
    except ValueError as exc:
        raise CertificateParseError(str(exc)) from None
