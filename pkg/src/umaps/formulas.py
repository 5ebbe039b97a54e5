"""Exact counting formulas for precubic unicellular maps.

Types are passed as the integer ``twice_h`` (= 2h) throughout, so no
fractions appear in signatures.  Size ``m`` means ``2m + 1`` edges for
integer types and ``2m`` edges for half-integer types.  The counting
families are:

* ``xi(twice_h, m)``   -- orientable precubic unicellular maps of genus h,
  ``(2m)! / (12^h h! m! (m+1-3h)!)``; zero for half-integer types and
  outside the support;
* ``eta(twice_h, m)``  -- non-orientable precubic unicellular maps,
  ``c_h (2m)! / (6^h m! (m+1-3h)!)`` for integer ``h >= 1`` and
  ``4^(m+j-1) (m-1)! / (6^j (2h-1)!! (m-1-3j)!)`` with ``j = floor(h)`` for
  half-integer ``h``;
* ``marked_count``     -- maps of the family above carrying a marked
  intertwined node, ``4 C(l,3) eta_{h-1}(m) + 3 C(l,3) xi_{h-1}(m)`` where
  ``l = m + 4 - 3h - [h half-integer]/2`` counts non-root leaves one type
  down; it equals ``(2h - 1) eta_h(m)`` because the average number of
  intertwined nodes over the family is ``2h - 1``.

The rational constants ``c_h`` satisfy both a closed form and the recursion
``c_h = 4 c_{h-1} / (2h-1) + 3 / (2^{h-1} (h-1)! (2h-1))`` with ``c_0 = 0``;
:func:`c_const` computes both and asserts they agree.  All counts are exact
big integers, the constants exact rationals; the only non-exact output in
this module is :func:`asymptotic_kappa`, a configurable-precision evaluator
of the growth ``const * n^(3h - 3/2) * 4^n`` of general (not necessarily
precubic) unicellular map counts, never used as a count.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

import mpmath


def catalan(m: int) -> int:
    if m < 0:
        raise ValueError("catalan requires m >= 0")
    return comb(2 * m, m) // (m + 1)


def double_factorial(n: int) -> int:
    """n!! with 0!! = 1!! = 1."""
    if n < 0:
        raise ValueError("double factorial requires n >= 0")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _exact_div(num: int, den: int) -> int:
    q, r = divmod(num, den)
    assert r == 0, "count formula did not divide exactly"
    return q


def xi(twice_h: int, m: int) -> int:
    """Orientable precubic unicellular maps of type ``twice_h/2`` and size m.

    Zero for half-integer types (odd ``twice_h``) and outside the support
    ``m + 1 >= 3h``.
    """
    if twice_h < 0:
        raise ValueError("type must be non-negative")
    if twice_h % 2 or m < 0:
        return 0
    h = twice_h // 2
    if m + 1 - 3 * h < 0:
        return 0
    return _exact_div(factorial(2 * m),
                      12 ** h * factorial(h) * factorial(m) * factorial(m + 1 - 3 * h))


def c_const(twice_h: int) -> Fraction:
    """The rational constant ``c_h`` for integer ``h = twice_h / 2``.

    ``c_0 = 0`` (there is no non-orientable map of type 0).  Both the
    closed form and the recursion are evaluated and compared.
    """
    if twice_h < 0 or twice_h % 2:
        raise ValueError("c_const is defined for integer types only")
    h = twice_h // 2
    if h == 0:
        return Fraction(0)
    closed = (3 * Fraction(2) ** (3 * h - 2) * Fraction(factorial(h), factorial(2 * h))
              * sum(Fraction(comb(2 * l, l), 16 ** l) for l in range(h)))
    rec = Fraction(0)
    for j in range(1, h + 1):
        rec = (Fraction(4, 2 * j - 1) * rec
               + Fraction(3, 2 ** (j - 1) * factorial(j - 1) * (2 * j - 1)))
    assert closed == rec, "closed form and recursion for c_h disagree"
    return closed


def k_const(twice_h: int) -> Fraction:
    """Leading rational constant of ``eta_h(m)`` in its hypergeometric form:
    ``c_h / 6^h`` for integer types, ``4^(j-1) / (6^j (2h-1)!!)`` with
    ``j = floor(h)`` otherwise."""
    if twice_h < 1:
        raise ValueError("k_const requires type >= 1/2")
    if twice_h % 2 == 0:
        h = twice_h // 2
        return c_const(twice_h) / 6 ** h
    j = twice_h // 2
    return Fraction(4 ** j, 4 * 6 ** j * double_factorial(twice_h - 1))


def eta(twice_h: int, m: int) -> int:
    """Non-orientable precubic unicellular maps of type ``twice_h/2``, size m.

    Zero below the support (negative factorial argument); raises for type 0.
    """
    if twice_h < 1:
        raise ValueError("eta requires a positive type (no non-orientable "
                         "maps of type 0)")
    if m < 0:
        return 0
    if twice_h % 2 == 0:
        h = twice_h // 2
        if m + 1 - 3 * h < 0:
            return 0
        value = (c_const(twice_h) * factorial(2 * m)
                 / (6 ** h * factorial(m) * factorial(m + 1 - 3 * h)))
        assert value.denominator == 1
        return int(value)
    j = twice_h // 2  # floor(h)
    if m - 1 - 3 * j < 0 or m < 1:
        return 0
    return _exact_div(4 ** (m + j - 1) * factorial(m - 1),
                      6 ** j * double_factorial(twice_h - 1) * factorial(m - 1 - 3 * j))


def _leaves_one_type_down(twice_h: int, m: int) -> int:
    """Non-root leaf count ``l = m + 4 - 3h - [h half-integer]/2`` of the
    size-m family one type below ``twice_h/2`` (same edge count)."""
    return m + 4 - (3 * twice_h + (twice_h % 2)) // 2


def marked_count(twice_h: int, m: int) -> int:
    """Maps of type ``twice_h/2`` and size m with a marked intertwined node:
    ``4 C(l,3) eta_{h-1}(m) + 3 C(l,3) xi_{h-1}(m)``."""
    if twice_h < 2:
        raise ValueError("marked_count requires type >= 1")
    ell = _leaves_one_type_down(twice_h, m)
    if ell < 3:
        return 0
    below = twice_h - 2
    eta_below = eta(below, m) if below >= 1 else 0
    return 4 * comb(ell, 3) * eta_below + 3 * comb(ell, 3) * xi(below, m)


def recursion_check(twice_h: int, m: int) -> bool:
    """``(2h - 1) eta_h(m) == marked_count(h, m)`` via the closed forms."""
    if twice_h < 2:
        raise ValueError("recursion_check requires type >= 1")
    return (twice_h - 1) * eta(twice_h, m) == marked_count(twice_h, m)


def remy_recursion_check(twice_h: int, m: int) -> bool:
    """Leaf-insertion recursion on the edge count, at fixed type:
    ``(m+1-3h) eta_h(m) = 2 (2m-1) eta_h(m-1)`` for integer types and
    ``(m-1-3 floor(h)) eta_h(m) = 4 (m-1) eta_h(m-1)`` for half-integer."""
    if twice_h < 1:
        raise ValueError("remy_recursion_check requires type >= 1/2")
    if m < 1:
        return True
    if twice_h % 2 == 0:
        h = twice_h // 2
        return (m + 1 - 3 * h) * eta(twice_h, m) == 2 * (2 * m - 1) * eta(twice_h, m - 1)
    j = twice_h // 2
    return (m - 1 - 3 * j) * eta(twice_h, m) == 4 * (m - 1) * eta(twice_h, m - 1)


def asymptotic_kappa(twice_h: int, n: int, dps: int = 50) -> mpmath.mpf:
    """Evaluate the large-n growth of unicellular map counts of fixed type:
    ``c_h / (sqrt(pi) 6^h) n^(3h-3/2) 4^n`` for integer types and
    ``4^j / (2 * 6^j (2h-1)!!) n^(3h-3/2) 4^n`` (j = floor h) otherwise.

    A plain evaluator at the requested decimal precision; the result is an
    asymptotic equivalent, never an exact count.
    """
    if twice_h < 1:
        raise ValueError("asymptotic_kappa requires type >= 1/2")
    if n < 1:
        raise ValueError("asymptotic_kappa requires n >= 1")
    with mpmath.workdps(dps):
        if twice_h % 2 == 0:
            h = twice_h // 2
            c = c_const(twice_h)
            pref = (mpmath.mpf(c.numerator) / c.denominator
                    / (mpmath.sqrt(mpmath.pi) * 6 ** h))
        else:
            j = twice_h // 2
            pref = mpmath.mpf(4 ** j) / (2 * 6 ** j * double_factorial(twice_h - 1))
        expo = mpmath.mpf(3 * twice_h - 3) / 2
        return pref * mpmath.mpf(n) ** expo * mpmath.mpf(4) ** n
