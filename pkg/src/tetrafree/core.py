"""Exact arithmetic engine for 2-free Tetranacci sequences.

A 2-free Tetranacci sequence starts from four odd positive integers.  Each
new term is the sum of the previous four, divided by the largest power of 2
that divides it, so every term is again odd.  The division exponent d_i
(the 2-adic valuation of the four-term sum) is at least 1 because a sum of
four odd numbers is even.

All arithmetic is exact: terms are native Python integers, exponents are
computed as trailing-zero counts of the exact sum.  Everything here is a
pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

Window = tuple[int, int, int, int]


class InvalidWindowError(ValueError):
    """A window field is even, non-positive, or the window is malformed."""


class StepResult(NamedTuple):
    term: int
    exponent: int


def check_window(w: Iterable[int]) -> Window:
    """Validate and normalize a window to a 4-tuple of odd positive ints.

    Raises InvalidWindowError otherwise.
    """
    t = tuple(w)
    if len(t) != 4:
        raise InvalidWindowError(f"window needs exactly 4 terms, got {len(t)}")
    for x in t:
        if not isinstance(x, int) or isinstance(x, bool):
            raise InvalidWindowError(f"window term {x!r} is not an integer")
        if x <= 0:
            raise InvalidWindowError(f"window term {x} is not positive")
        if x % 2 == 0:
            raise InvalidWindowError(f"window term {x} is even")
    return t  # type: ignore[return-value]


def v2(n: int) -> int:
    """2-adic valuation of a positive integer (count of trailing zero bits)."""
    return (n & -n).bit_length() - 1


def step_forward(w: Iterable[int]) -> StepResult:
    """One forward step: next term and its division exponent.

    Returns (s / 2^d, d) where s is the window sum and d its exact 2-adic
    valuation.  d >= 1 always; d >= 2 exactly when 4 | s.
    """
    w1, w2, w3, w4 = check_window(w)
    s = w1 + w2 + w3 + w4
    d = (s & -s).bit_length() - 1
    return StepResult(s >> d, d)


def step_backward(w: Iterable[int]) -> int:
    """Extend a division-poor segment one term to the left.

    For a window (a_{n+1}, a_{n+2}, a_{n+3}, a_{n+4}) this inverts the d=1
    forward step: a_n = 2*a_{n+4} - (a_{n+1} + a_{n+2} + a_{n+3}).  The
    result is always odd but may be non-positive, which signals that the
    backward extension must stop; that is a terminal condition, not an
    error, so the (possibly non-positive) value is returned as-is.

    Whenever the result x is positive, step_forward((x, w1, w2, w3))
    returns (w4, 1) exactly.
    """
    w1, w2, w3, w4 = check_window(w)
    return 2 * w4 - (w1 + w2 + w3)


@dataclass
class SequenceRecord:
    """A generated sequence: terms plus the division exponent of each step.

    terms[0:4] is the seed; terms[4 + i] was produced with exponent
    exponents[i], so len(terms) == len(exponents) + 4.
    """

    terms: list[int] = field(default_factory=list)
    exponents: list[int] = field(default_factory=list)

    @property
    def seed(self) -> Window:
        return tuple(self.terms[:4])  # type: ignore[return-value]

    def __len__(self) -> int:
        return len(self.terms)

    def verify(self) -> None:
        """Re-derive every generated term; raise ValueError on any mismatch."""
        if len(self.terms) != len(self.exponents) + 4:
            raise ValueError("terms/exponents length mismatch")
        check_window(self.terms[:4])
        for i, (term, d) in enumerate(zip(self.terms[4:], self.exponents)):
            got = step_forward(self.terms[i : i + 4])
            if got != (term, d):
                raise ValueError(f"replay mismatch at step {i + 1}: {got} != {(term, d)}")


def generate(seed: Iterable[int], n: int) -> SequenceRecord:
    """Generate n terms beyond the seed window.

    The record holds the 4 seed terms followed by n generated terms and the
    n division exponents that produced them.
    """
    a, b, c, d = check_window(seed)
    if n < 0:
        raise ValueError(f"term count must be >= 0, got {n}")
    terms = [a, b, c, d]
    exps = []
    for _ in range(n):
        s = a + b + c + d
        e = (s & -s).bit_length() - 1
        t = s >> e
        terms.append(t)
        exps.append(e)
        a, b, c, d = b, c, d, t
    return SequenceRecord(terms, exps)
