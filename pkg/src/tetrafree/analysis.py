"""Trajectory classification, exhaustive cycle census, and cycle drift.

Four consecutive terms determine the rest of a 2-free Tetranacci sequence,
so a trajectory either repeats a 4-term window (periodic) or never does
within the step budget (unresolved).  `classify` finds the exact preperiod
and minimal period when a repeat occurs; `period_search` runs a census over
every odd seed window below a bound; `cycle_drift` evaluates the exact mean
of term - (previous four)/4 around a cycle.

"Unresolved" is a report about a finite computation, not a claim of
unboundedness.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .core import InvalidWindowError, Window, check_window, generate, step_forward

PERIODIC = "periodic"
UNRESOLVED = "unresolved"

#: Trajectories whose terms exceed this are reported unresolved.  Growing
#: trajectories gain roughly 0.037 decimal digits per term, so the default
#: keeps a survey pass finite (a few thousand steps per escaping seed).
DEFAULT_VALUE_CAP = 10**100


class InvalidCycleError(ValueError):
    """The given term list does not close under replay."""


@dataclass(frozen=True)
class Classification:
    """Outcome of following one trajectory.

    kind is "periodic" or "unresolved".  For periodic results, preperiod is
    the number of steps before the window orbit enters its cycle, period is
    the minimal cycle length, and cycle holds one full period of terms
    starting at the cycle entry point.  steps_taken counts forward steps the
    detector actually executed; max_term is the largest term seen.
    """

    kind: str
    steps_taken: int
    max_term: int
    preperiod: Optional[int] = None
    period: Optional[int] = None
    cycle: Optional[tuple[int, ...]] = None

    @property
    def is_periodic(self) -> bool:
        return self.kind == PERIODIC


def _classify_hash(seed: Window, max_steps: int, value_cap: Optional[int]) -> Classification:
    """Window-hashing detector: exact first repeat, one dict entry per step."""
    a, b, c, d = seed
    terms = [a, b, c, d]
    seen = {seed: 0}
    mx = max(seed)
    for i in range(1, max_steps + 1):
        s = a + b + c + d
        e = (s & -s).bit_length() - 1
        t = s >> e
        a, b, c, d = b, c, d, t
        terms.append(t)
        if t > mx:
            mx = t
        if value_cap is not None and t > value_cap:
            return Classification(UNRESOLVED, steps_taken=i, max_term=mx)
        w = (a, b, c, d)
        j = seen.get(w)
        if j is not None:
            lam = i - j
            return Classification(
                PERIODIC,
                steps_taken=i,
                max_term=mx,
                preperiod=j,
                period=lam,
                cycle=tuple(terms[j : j + lam]),
            )
        seen[w] = i
    return Classification(UNRESOLVED, steps_taken=max_steps, max_term=mx)


def _classify_brent(seed: Window, max_steps: int, value_cap: Optional[int]) -> Classification:
    """Brent's constant-memory detector.

    Finds the same (preperiod, period, cycle) as the hashing detector but
    compares against a single saved window, so a repeat that first occurs at
    step k may need up to roughly 3k steps to certify.  Results agree with
    mode="hash" whenever the cycle is certified within budget.
    """
    a, b, c, d = seed
    ta, tb, tc, td = a, b, c, d
    power = 1
    lam = 0
    steps = 0
    mx = max(seed)
    found = 0
    while steps < max_steps:
        s = a + b + c + d
        e = (s & -s).bit_length() - 1
        t = s >> e
        steps += 1
        lam += 1
        a, b, c, d = b, c, d, t
        if t > mx:
            mx = t
        if value_cap is not None and t > value_cap:
            return Classification(UNRESOLVED, steps_taken=steps, max_term=mx)
        if a == ta and b == tb and c == tc and d == td:
            found = lam
            break
        if lam == power:
            ta, tb, tc, td = a, b, c, d
            power <<= 1
            lam = 0
    if not found:
        return Classification(UNRESOLVED, steps_taken=max_steps, max_term=mx)
    # Period found; locate the entry point by walking two cursors lam apart.
    lam = found
    lead = seed
    for _ in range(lam):
        lead = _advance(lead)
    trail = seed
    mu = 0
    while lead != trail:
        lead = _advance(lead)
        trail = _advance(trail)
        mu += 1
    cycle = list(trail)[:lam]
    w = trail
    for _ in range(lam - 4):
        w = _advance(w)
        cycle.append(w[3])
    return Classification(
        PERIODIC,
        steps_taken=steps,
        max_term=mx,
        preperiod=mu,
        period=lam,
        cycle=tuple(cycle),
    )


def _advance(w: Window) -> Window:
    a, b, c, d = w
    s = a + b + c + d
    e = (s & -s).bit_length() - 1
    return (b, c, d, s >> e)


_MODES: dict[str, Callable[[Window, int, Optional[int]], Classification]] = {
    "hash": _classify_hash,
    "brent": _classify_brent,
}


def classify(
    seed: Iterable[int],
    max_steps: int,
    value_cap: Optional[int] = DEFAULT_VALUE_CAP,
    mode: str = "hash",
) -> Classification:
    """Follow one trajectory until a window repeats, or budgets run out.

    With mode="hash" (default) any window repeat within max_steps is found,
    with exact preperiod and minimal period.  mode="brent" trades certainty
    near the budget edge for constant memory; see _classify_brent.
    A term exceeding value_cap stops the run early (reported unresolved);
    pass value_cap=None to disable the cap.
    """
    w = check_window(seed)
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    if value_cap is not None and value_cap < 1:
        raise ValueError(f"value_cap must be >= 1, got {value_cap}")
    try:
        impl = _MODES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; expected 'hash' or 'brent'") from None
    return impl(w, max_steps, value_cap)


def canonical_cycle(cycle: Iterable[int]) -> tuple[int, ...]:
    """Rotate a cycle to its lexicographically least form."""
    c = tuple(cycle)
    if not c:
        raise ValueError("empty cycle")
    return min(c[i:] + c[:i] for i in range(len(c)))


@dataclass
class CycleCensus:
    """Distinct cycles reached from a seed range, with basin sizes.

    cycles maps each canonical cycle (lexicographically least rotation) to
    the number of seeds that settled into it.  Seeds whose trajectory never
    certified a repeat are tallied in unresolved_seeds.
    """

    bound: int
    max_steps: int
    value_cap: Optional[int]
    cycles: dict[tuple[int, ...], int]
    seed_count: int
    unresolved_seeds: int

    def periods(self) -> set[int]:
        return {len(c) for c in self.cycles}

    def sorted_cycles(self) -> list[tuple[tuple[int, ...], int]]:
        return sorted(self.cycles.items(), key=lambda kv: (len(kv[0]), kv[0]))


def _seed_at(bound: int, index: int) -> Window:
    """Mixed-radix decode of a seed index over odd values in (0, bound)."""
    m = bound // 2
    i4, r = divmod(index, m)
    i3, r2 = divmod(i4, m)
    i1, i2 = divmod(i3, m)
    return (2 * i1 + 1, 2 * i2 + 1, 2 * r2 + 1, 2 * r + 1)


def _census_range(
    bound: int,
    lo: int,
    hi: int,
    max_steps: int,
    value_cap: Optional[int],
    mode: str,
) -> tuple[dict[tuple[int, ...], int], int]:
    """Classify seeds lo..hi-1 (by index); return cycle tallies + unresolved."""
    impl = _MODES[mode]
    cycles: dict[tuple[int, ...], int] = {}
    unresolved = 0
    for index in range(lo, hi):
        res = impl(_seed_at(bound, index), max_steps, value_cap)
        if res.kind == PERIODIC:
            key = canonical_cycle(res.cycle)
            cycles[key] = cycles.get(key, 0) + 1
        else:
            unresolved += 1
    return cycles, unresolved


def period_search(
    bound: int,
    max_steps: int,
    value_cap: Optional[int] = DEFAULT_VALUE_CAP,
    workers: int = 1,
    mode: str = "brent",
    progress: Optional[Callable[[int, int], None]] = None,
) -> CycleCensus:
    """Census every seed of odd terms in (0, bound): all (bound//2)**4 of them.

    The seed space is sharded into contiguous index ranges; merging tallies
    is commutative, so the census is identical for any worker count.  The
    default detector is mode="brent" (constant memory per seed).  progress,
    if given, is called as progress(done_seeds, total_seeds) after each shard.
    """
    if bound < 2:
        raise ValueError(f"bound must be >= 2, got {bound}")
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}; expected 'hash' or 'brent'")
    total = (bound // 2) ** 4
    # Small shards keep workers busy and give usable progress ticks.
    chunk = max(1, min(4096, total // (workers * 8) or 1))
    ranges = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
    cycles: dict[tuple[int, ...], int] = {}
    unresolved = 0
    done = 0
    if workers == 1:
        for lo, hi in ranges:
            part, un = _census_range(bound, lo, hi, max_steps, value_cap, mode)
            for key, n in part.items():
                cycles[key] = cycles.get(key, 0) + n
            unresolved += un
            done += hi - lo
            if progress:
                progress(done, total)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_census_range, bound, lo, hi, max_steps, value_cap, mode)
                for lo, hi in ranges
            ]
            for (lo, hi), fut in zip(ranges, futures):
                part, un = fut.result()
                for key, n in part.items():
                    cycles[key] = cycles.get(key, 0) + n
                unresolved += un
                done += hi - lo
                if progress:
                    progress(done, total)
    return CycleCensus(
        bound=bound,
        max_steps=max_steps,
        value_cap=value_cap,
        cycles=cycles,
        seed_count=total,
        unresolved_seeds=unresolved,
    )


def cycle_drift(cycle: Iterable[int]) -> Fraction:
    """Exact mean of a_{k+4} - (a_k + a_{k+1} + a_{k+2} + a_{k+3})/4 around a cycle.

    The input must close under replay: stepping forward from every window of
    the cyclically-extended term list must reproduce the list.  Raises
    InvalidCycleError otherwise.  For every closed cycle the mean is 0.
    """
    c = tuple(cycle)
    p = len(c)
    if p == 0:
        raise InvalidCycleError("empty cycle")
    for x in c:
        if not isinstance(x, int) or x <= 0 or x % 2 == 0:
            raise InvalidCycleError(f"cycle term {x!r} is not an odd positive integer")
    for k in range(p):
        w = (c[k % p], c[(k + 1) % p], c[(k + 2) % p], c[(k + 3) % p])
        nxt = step_forward(w).term
        if nxt != c[(k + 4) % p]:
            raise InvalidCycleError(
                f"cycle does not close at offset {k}: step gives {nxt}, expected {c[(k + 4) % p]}"
            )
    total = Fraction(0)
    for k in range(p):
        s = c[k % p] + c[(k + 1) % p] + c[(k + 2) % p] + c[(k + 3) % p]
        total += c[(k + 4) % p] - Fraction(s, 4)
    return total / p
