"""Initially division-poor sequences via backward recursion.

If every step divided by exactly 2, terms would obey the linear recurrence
2*a_{n+4} = a_n + a_{n+1} + a_{n+2} + a_{n+3}, whose dominant root alpha is
the positive real root of 2x^4 - x^3 - x^2 - x - 1 = 0 (about 1.34903).
Seeding four terms close to a geometric progression with ratio r ~ alpha
and running the inverse step a_n = 2*a_{n+4} - (a_{n+1} + a_{n+2} + a_{n+3})
backward while terms stay positive produces a seed whose forward replay has
division exponent 1 for a long initial run.

alpha is only ever handled as an exact rational bracket (lo, hi) with
f(lo) < 0 < f(hi); every decimal digit and every continued-fraction partial
quotient is certified from the bracket, with no floating point anywhere in
the certified paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .core import Window, check_window, generate, step_backward

Rational = Union[Fraction, int, str]


def char_poly(x: Fraction) -> Fraction:
    """2x^4 - x^3 - x^2 - x - 1, evaluated exactly."""
    return 2 * x**4 - x**3 - x**2 - x - 1


def parse_rational(value: Rational) -> Fraction:
    """Parse "p/q", decimal, or scientific notation into an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class AlphaApprox:
    """An exact rational bracket lo < alpha < hi, plus a certified rendering.

    decimal is alpha truncated (not rounded) to the requested number of
    places; every printed digit is implied by the bracket.
    """

    lo: Fraction
    hi: Fraction
    decimal: str

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


def _bisect(lo: Fraction, hi: Fraction, stop) -> tuple[Fraction, Fraction]:
    """Shrink the sign-change bracket until stop(lo, hi) is true.

    The polynomial has no rational roots, so f(mid) != 0 always and the
    strict bracket f(lo) < 0 < f(hi) is preserved.
    """
    while not stop(lo, hi):
        mid = (lo + hi) / 2
        if char_poly(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _truncated_decimal(x: Fraction, places: int) -> str:
    scaled = (x.numerator * 10**places) // x.denominator
    digits = str(scaled).rjust(places + 1, "0")
    return digits[:-places] + "." + digits[-places:] if places else digits


def isolate_alpha(tolerance: Rational, digits: Optional[int] = None) -> AlphaApprox:
    """Bracket alpha to the given width by exact-rational bisection on [1, 2].

    digits fixes how many decimal places the rendering carries (default:
    as many as the tolerance suggests, -log10 rounded down).  The bracket
    is tightened beyond the tolerance if needed to certify every digit,
    i.e. until lo and hi truncate identically.
    """
    tol = parse_rational(tolerance)
    if tol <= 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")
    if digits is None:
        digits = 0
        while Fraction(1, 10**digits) > tol and digits < 10_000:
            digits += 1
    if digits < 0:
        raise ValueError(f"digits must be >= 0, got {digits}")
    lo, hi = _bisect(Fraction(1), Fraction(2), lambda a, b: b - a <= tol)
    scale = 10**digits
    lo, hi = _bisect(
        lo, hi, lambda a, b: (a.numerator * scale) // a.denominator == (b.numerator * scale) // b.denominator
    )
    return AlphaApprox(lo, hi, _truncated_decimal(lo, digits))


@dataclass(frozen=True)
class ContinuedFraction:
    """Certified partial quotients of alpha and their convergents."""

    quotients: list[int]
    convergents: list[Fraction]


def _extract_quotients(lo: Fraction, hi: Fraction, n_terms: int) -> Optional[list[int]]:
    """Read n_terms partial quotients from a bracket, or None if too wide.

    The bracket endpoints follow the tail interval exactly: x -> 1/(x - q)
    swaps and inverts the endpoints.  A quotient is only emitted when both
    endpoints agree on the floor, so every emitted quotient is a certified
    quotient of alpha, independent of how tight the starting bracket was.
    """
    quots = []
    a, b = lo, hi
    for _ in range(n_terms):
        fa = a.numerator // a.denominator
        fb = b.numerator // b.denominator
        if fa != fb:
            return None
        quots.append(fa)
        ra, rb = a - fa, b - fa
        if ra <= 0:
            return None  # endpoint hit the floor exactly; need a tighter bracket
        a, b = 1 / rb, 1 / ra
    return quots


def continued_fraction_of_alpha(n_terms: int) -> ContinuedFraction:
    """First n_terms certified partial quotients of alpha, with convergents.

    Starts from a 2^-64 bracket and squares down until every floor is
    certain.  Tightening the tolerance never changes an emitted quotient,
    only extends the list.
    """
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    width = Fraction(1, 2**64)
    lo, hi = Fraction(1), Fraction(2)
    while True:
        lo, hi = _bisect(lo, hi, lambda a, b: b - a <= width)
        quots = _extract_quotients(lo, hi, n_terms)
        if quots is not None:
            break
        width = width * width
    convergents = []
    p0, q0, p1, q1 = 1, 0, quots[0], 1
    convergents.append(Fraction(p1, q1))
    for ak in quots[1:]:
        p0, q0, p1, q1 = p1, q1, ak * p1 + p0, ak * q1 + q0
        convergents.append(Fraction(p1, q1))
    return ContinuedFraction(quots, convergents)


def continued_fraction_of_rational(x: Fraction, max_terms: int = 10_000) -> list[int]:
    """Full (finite) continued fraction of an exact rational > 0."""
    x = parse_rational(x)
    if x <= 0:
        raise ValueError(f"expected a positive rational, got {x}")
    quots = []
    for _ in range(max_terms):
        q, rem = divmod(x.numerator, x.denominator)
        quots.append(q)
        if rem == 0:
            return quots
        x = Fraction(x.denominator, rem)
    raise ValueError("continued fraction longer than max_terms")


@dataclass(frozen=True)
class ConstructionResult:
    """Outcome of the backward-recursion construction for one ratio r = p/q.

    The anchor is (2q^3+1, 2pq^2+1, 2p^2q+1, 2p^3+1), four odd integers
    close to a geometric progression with ratio r.  seed is the window after
    extending backward as far as terms stay positive.  division_poor_steps
    counts the maximal initial run of steps with exponent 1 when replaying
    forward from seed; the segment spans division_poor_steps + 4 terms.
    """

    r: Fraction
    k: int
    forward_anchor: Window
    seed: Window
    backward_steps: int
    division_poor_steps: int
    segment_terms: int
    segment: list[int]


def measure_division_poor(seed, max_steps: int = 1_000_000) -> int:
    """Length of the initial all-exponent-1 run from a seed, capped at max_steps."""
    a, b, c, d = check_window(seed)
    steps = 0
    while steps < max_steps:
        s = a + b + c + d
        if s & 3:  # v2(s) == 1 exactly when s == 2 mod 4
            a, b, c, d = b, c, d, s >> 1
            steps += 1
        else:
            break
    return steps


def construct(r: Rational, max_steps: int = 1_000_000) -> ConstructionResult:
    """Build a division-poor seed for ratio r > 1 by backward recursion.

    Anchors the window at four odd integers near a geometric progression
    with ratio r, then applies the inverse step until the next term would be
    non-positive.  The measured division-poor run is found by forward replay
    from the final seed, so it covers the backward-built segment and any
    extra exponent-1 steps past the anchor.
    """
    r = parse_rational(r)
    if r <= 1:
        raise ValueError(f"r must be > 1, got {r}")
    p, q = r.numerator, r.denominator
    k = q**3
    anchor = (2 * q**3 + 1, 2 * p * q**2 + 1, 2 * p**2 * q + 1, 2 * p**3 + 1)
    window = anchor
    back = 0
    while True:
        x = step_backward(window)
        if x <= 0:
            break
        window = (x, window[0], window[1], window[2])
        back += 1
    steps = measure_division_poor(window, max_steps)
    record = generate(window, steps)
    return ConstructionResult(
        r=r,
        k=k,
        forward_anchor=anchor,
        seed=window,
        backward_steps=back,
        division_poor_steps=steps,
        segment_terms=steps + 4,
        segment=record.terms,
    )


@dataclass(frozen=True)
class LengthPrediction:
    """Heuristic growth bound for the division-poor run length.

    predicted_bound evaluates log[(2q^3+1)/(6q)] / log(5*alpha) with the
    asymptotically-vanishing part of the error constant taken as zero.  It
    is a heuristic on how far the backward recursion can go before the
    5-fold error growth overwhelms the terms, not a guarantee either way;
    measured runs routinely exceed it.
    """

    q: int
    predicted_bound: float


_ALPHA_FLOAT: Optional[float] = None


def alpha_float() -> float:
    """The double nearest alpha, certified from a bracket both ends of which round alike."""
    global _ALPHA_FLOAT
    if _ALPHA_FLOAT is None:
        lo, hi = _bisect(Fraction(1), Fraction(2), lambda a, b: float(a) == float(b))
        _ALPHA_FLOAT = float(lo)
    return _ALPHA_FLOAT


def predict_length(q: int) -> LengthPrediction:
    """Evaluate the heuristic run-length bound for denominator q >= 2."""
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    num = 2 * q**3 + 1
    den = 6 * q
    bound = (math.log(num) - math.log(den)) / math.log(5 * alpha_float())
    return LengthPrediction(q=q, predicted_bound=bound)
