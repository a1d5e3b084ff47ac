"""Generating functions for N-rooted map counts, with cross-checked routes.

The zero-dimensional toy field theory behind the enumeration has one complex
field pair per electron line and a quartic-free photon coupling; expanding its
2N-point correlator in the coupling λ gives the family

    Z_N(λ) = Σ_k (2k+N)! (2k-1)!! / (2k)! · λ^{2k},

whose connected part M_N(λ) = Σ_e m_N(e) λ^{2e} counts N-rooted maps with e
edges.  Everything here is exact rational arithmetic on :class:`Series`.

Normalization note: ``m0_series`` is the logarithm of the *normalized* vacuum
series (constant term 1), i.e. M0(0) = 0; the additive constant of the
unnormalized integral is deliberately dropped.

Every function that admits more than one computation route computes all of its
routes and raises :class:`ConsistencyError` if they disagree — disagreement is
a bug, not a value.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cache
from math import factorial

from .combinat import compositions, double_factorial, partitions
from .errors import ConsistencyError
from .series import Series

__all__ = [
    "z_series",
    "z_np_series",
    "z_recursion",
    "m0_series",
    "m0_series_via_compositions",
    "enum_alpha_vectors",
    "m_series",
    "m_count",
    "m1_closed_form",
    "m2_via_routes",
    "m3_via_routes",
]


@cache
def z_series(j: int, order: int) -> Series:
    """The 2j-point correlator expansion Σ_k (2k+j)!(2k-1)!!/(2k)! λ^{2k}."""
    if j < 0:
        raise ValueError("j must be non-negative")
    if order < 0:
        raise ValueError("order must be non-negative")
    coeffs = [Fraction(0)] * (order + 1)
    for k in range(order // 2 + 1):
        coeffs[2 * k] = Fraction(
            factorial(2 * k + j) * double_factorial(2 * k - 1), factorial(2 * k)
        )
    return Series(coeffs)


def z_np_series(n: int, p: int, order: int) -> Series:
    """Correlator with N electron pairs and one extra photon insertion of power p.

    Even p populates even λ-powers:  Σ_k (2k+N)!(2k+p-1)!!/(2k)! λ^{2k};
    odd p populates odd λ-powers:    Σ_k (2k+N+1)!(2k+p)!!/(2k+1)! λ^{2k+1}.
    """
    if n < 0 or p < 0:
        raise ValueError("n and p must be non-negative")
    if order < 0:
        raise ValueError("order must be non-negative")
    coeffs = [Fraction(0)] * (order + 1)
    if p % 2 == 0:
        for k in range(order // 2 + 1):
            coeffs[2 * k] = Fraction(
                factorial(2 * k + n) * double_factorial(2 * k + p - 1),
                factorial(2 * k),
            )
    else:
        for k in range((order - 1) // 2 + 1):
            coeffs[2 * k + 1] = Fraction(
                factorial(2 * k + n + 1) * double_factorial(2 * k + p),
                factorial(2 * k + 1),
            )
    return Series(coeffs)


def z_recursion(n: int, order: int) -> Series:
    """Z_N from Z_0 by two independent ladder routes, cross-checked.

    Route 1 applies the raising operator f -> j*f + λ f' for j = 1..N.
    Route 2 takes the N-th derivative of λ^N * Z_0.  Both are evaluated on a
    base series built to order ``order + n`` so the result is valid to
    ``order``; a mismatch raises :class:`ConsistencyError`.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    base = z_series(0, order + n)

    ladder = base
    for j in range(1, n + 1):
        ladder = j * ladder + ladder.x_derivative()
    ladder = ladder.truncate(order)

    derivative_route = base.shifted(n)
    for _ in range(n):
        derivative_route = derivative_route.derivative()
    derivative_route = derivative_route.truncate(order)

    if ladder != derivative_route:
        raise ConsistencyError(
            f"z_recursion({n}): ladder and derivative routes disagree"
        )
    return ladder


@cache
def m0_series(order: int) -> Series:
    """Connected vacuum series: log of the normalized Z_0 (so M0(0) = 0)."""
    return z_series(0, order).log()


def _m0_coefficient(e: int) -> Fraction:
    """[λ^{2e}] M0 as the alternating composition sum over double factorials."""
    total = Fraction(0)
    for k in range(1, e + 1):
        s = 0
        for mu in compositions(e, k):
            prod = 1
            for part in mu:
                prod *= double_factorial(2 * part - 1)
            s += prod
        total += Fraction((-1) ** (k + 1), k) * s
    return total


def m0_series_via_compositions(order: int) -> Series:
    """M0 assembled coefficientwise from the explicit composition sum.

    An independent route to :func:`m0_series` (no series log involved); the
    two are compared in the test suite.
    """
    coeffs = [Fraction(0)] * (order + 1)
    for e in range(1, order // 2 + 1):
        coeffs[2 * e] = _m0_coefficient(e)
    return Series(coeffs)


def enum_alpha_vectors(n: int) -> list[tuple[int, ...]]:
    """All multiplicity vectors (a_1..a_N) with Σ j*a_j = N.

    a_j is the multiplicity of part j in a partition of N; vectors are listed
    from the all-ones partition (N, 0, ..) up to the single part (.., 0, 1).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    vectors = []
    for part in partitions(n):
        alpha = [0] * n
        for p in part:
            alpha[p - 1] += 1
        vectors.append(tuple(alpha))
    vectors.reverse()
    return vectors


@cache
def m_series(n: int, order: int) -> Series:
    """Generating function of N-rooted map counts by edge count.

    Connected-part extraction: an inclusion–exclusion over partitions of N
    combining the correlator family Z_1..Z_N against powers of 1/Z_0.  The
    result must have non-negative integer coefficients (they are counts); any
    other outcome raises :class:`ConsistencyError`.
    """
    if n < 1:
        raise ValueError("n must be at least 1 (counts are for rooted objects)")
    z0_inv = z_series(0, order).invert()
    scaled = {
        j: z_series(j, order) * Fraction(1, factorial(j) ** 2)
        for j in range(1, n + 1)
    }
    total = Series.zero(order)
    for alpha in enum_alpha_vectors(n):
        s = sum(alpha)
        coeff = Fraction(factorial(n))
        for a in alpha:
            coeff /= factorial(a)
        coeff *= Fraction((-1) ** (s - 1) * factorial(s - 1))
        term = Series.one(order) * coeff
        for _ in range(s):
            term = term * z0_inv
        for j, a in enumerate(alpha, start=1):
            for _ in range(a):
                term = term * scaled[j]
        total = total + term
    for p, c in enumerate(total.coefficients):
        if c.denominator != 1 or c < 0:
            raise ConsistencyError(
                f"m_series({n}): coefficient of λ^{p} is {c}, "
                "expected a non-negative integer"
            )
    return total


def m_count(n: int, edges: int) -> int:
    """The number of N-rooted maps with the given edge count."""
    if edges < 0:
        raise ValueError("edge count must be non-negative")
    return int(m_series(n, 2 * edges).coefficient(2 * edges))


def m1_closed_form(edges: int) -> int:
    """m_1(e) from the two explicit alternating composition sums, cross-checked.

    Variant A sums products of odd double factorials over compositions of e+1;
    variant B sums products of (2k)!/k! and divides by 2^{e+1}.  Both must
    agree (and B must divide exactly) or :class:`ConsistencyError` is raised.
    """
    e = edges
    if e < 0:
        raise ValueError("edge count must be non-negative")

    variant_a = 0
    for k in range(e + 1):
        s = 0
        for mu in compositions(e + 1, k + 1):
            prod = 1
            for part in mu:
                prod *= double_factorial(2 * part - 1)
            s += prod
        variant_a += (-1) ** k * s

    raw_b = 0
    for i in range(e + 1):
        s = 0
        for ks in compositions(e + 1, i + 1):
            prod = 1
            for part in ks:
                prod *= factorial(2 * part) // factorial(part)
            s += prod
        raw_b += (-1) ** i * s
    variant_b, remainder = divmod(raw_b, 2 ** (e + 1))
    if remainder != 0:
        raise ConsistencyError(
            f"m1_closed_form({e}): factorial-ratio sum {raw_b} is not divisible "
            f"by 2^{e + 1}"
        )

    if variant_a != variant_b:
        raise ConsistencyError(
            f"m1_closed_form({e}): variants disagree ({variant_a} vs {variant_b})"
        )
    return variant_a


def m2_via_routes(order: int) -> Series:
    """M_2 by three independent routes, cross-checked.

    A: correlator quotients        Z_2/(2 Z_0) - (Z_1/Z_0)^2
    B: connected-vacuum calculus   λ²/2·M0'' - λ²/2·(M0')²
    C: explicit coefficients       m_2(e) = e(2e-1)·[λ^{2e}]M0
                                          - ½ Σ_{k=1}^{e-1} m_1(k) m_1(e-k)
    with m_2(1) = 1, using the closed forms for [λ^{2e}]M0 and m_1.
    """
    z0 = z_series(0, order)
    z0_inv = z0.invert()
    route_a = (
        z_series(2, order) * z0_inv * Fraction(1, 2)
        - (z_series(1, order) * z0_inv) ** 2
    )

    m0 = m0_series(order + 2)
    d1 = m0.derivative()
    d2 = d1.derivative()
    route_b = (
        (d2.shifted(2) * Fraction(1, 2)).truncate(order)
        - ((d1 * d1).shifted(2) * Fraction(1, 2)).truncate(order)
    )

    coeffs = [Fraction(0)] * (order + 1)
    m1_values = {k: m1_closed_form(k) for k in range(1, order // 2)}
    for e in range(1, order // 2 + 1):
        if e == 1:
            coeffs[2] = Fraction(1)
            continue
        first = e * (2 * e - 1) * _m0_coefficient(e)
        conv = sum(m1_values[k] * m1_values[e - k] for k in range(1, e))
        coeffs[2 * e] = first - Fraction(conv, 2)
    route_c = Series(coeffs)

    if not (route_a == route_b == route_c):
        raise ConsistencyError("m2_via_routes: routes disagree")
    return route_a


def m3_via_routes(order: int) -> Series:
    """M_3 by two independent routes, cross-checked.

    A: correlator quotients   Z_3/(6 Z_0) - 3 Z_1 Z_2/(2 Z_0²) + 2 (Z_1/Z_0)³
    B: connected-vacuum calculus
       2/3·λ³(M0')³ - λ³·M0'·M0'' + λ³/6·M0'''.
    """
    z0_inv = z_series(0, order).invert()
    q1 = z_series(1, order) * z0_inv
    q2 = z_series(2, order) * z0_inv
    q3 = z_series(3, order) * z0_inv
    route_a = (
        q3 * Fraction(1, 6)
        - q1 * q2 * Fraction(3, 2)
        + q1 ** 3 * Fraction(2)
    )

    m0 = m0_series(order + 3)
    d1 = m0.derivative()
    d2 = d1.derivative()
    d3 = d2.derivative()
    route_b = (
        ((d1 ** 3).shifted(3) * Fraction(2, 3)).truncate(order)
        - ((d1 * d2).shifted(3)).truncate(order)
        + (d3.shifted(3) * Fraction(1, 6)).truncate(order)
    )

    if route_a != route_b:
        raise ConsistencyError("m3_via_routes: routes disagree")
    return route_a
