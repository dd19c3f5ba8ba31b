"""Stochastic growth model and empirical surveys over real sequences.

The model idealizes a 2-free Tetranacci step: the division exponent is not
derived from the terms but drawn independently each step, P(d = j) = 2^-j.
Model states are exact positive rationals evolving by
value[k+4] = (sum of previous four) / 2^{d_k}.  The per-step drift
(value[k+4] - s/4) / s collapses to 1/2^{d_k} - 1/4 identically, so the
drift statistic depends only on the sampled exponents and is computed
exactly; its expectation under the sampling law is 1/12.

The surveys run the *real* recurrence over every odd seed window below a
bound and tally division exponents or term residues.  They are the
empirical check of the model's assumptions.  Terms are kept as exact
bignums throughout (a fast-growing seed reaches ~10^130 by step 1000); the
seed space, not the arithmetic, is what gets sharded across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .core import check_window
from .rng import SplitMix64, sample_exponent

#: Seed used by randomized entry points when the caller does not pass one.
DEFAULT_RNG_SEED = 271828182845


@dataclass
class ModelTrajectory:
    """One run of the probabilistic model.

    values holds exact rationals (track="exact") and log_values natural
    logs as floats (track="log"); both include the 4 start values.  Exactly
    one of the two is populated.  drift is the exact mean of
    1/2^d - 1/4 over the sampled exponents (None when steps == 0).
    """

    start: tuple[int, int, int, int]
    rng_seed: Optional[int]
    track: str
    exponents: list[int]
    values: Optional[list[Fraction]]
    log_values: Optional[list[float]]
    drift: Optional[Fraction]

    def __len__(self) -> int:
        return len(self.exponents) + 4


def drift_of_exponents(exponents: list[int]) -> Optional[Fraction]:
    """Exact mean of 1/2^d - 1/4 over a list of sampled exponents."""
    if not exponents:
        return None
    counts: dict[int, int] = {}
    for d in exponents:
        counts[d] = counts.get(d, 0) + 1
    total = Fraction(0)
    for d, n in counts.items():
        total += n * (Fraction(1, 2**d) - Fraction(1, 4))
    return total / len(exponents)


def simulate_model(
    start,
    steps: int,
    rng_seed: int = DEFAULT_RNG_SEED,
    track: str = "log",
    sampler: Optional[Callable[[], int]] = None,
) -> ModelTrajectory:
    """Evolve the model `steps` times from an odd start window.

    track="exact" keeps every value as a Fraction (denominators grow by one
    factor of 2^d per step, so reserve it for short runs); track="log"
    accumulates natural logs in float and is safe for millions of steps.
    The drift statistic is exact under either tracking mode.  A custom
    sampler() -> d replaces the geometric draw (useful for forcing a fixed
    exponent); otherwise exponents come from SplitMix64(rng_seed).
    """
    w = check_window(start)
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    if track not in ("exact", "log"):
        raise ValueError(f"unknown track {track!r}; expected 'exact' or 'log'")
    if sampler is None:
        rng = SplitMix64(rng_seed)
        draw = lambda: sample_exponent(rng)
    else:
        draw = sampler
    exponents: list[int] = []
    values: Optional[list[Fraction]] = None
    log_values: Optional[list[float]] = None
    if track == "exact":
        values = [Fraction(x) for x in w]
        a, b, c, d = values
        for _ in range(steps):
            e = draw()
            nxt = (a + b + c + d) / 2**e
            values.append(nxt)
            exponents.append(e)
            a, b, c, d = b, c, d, nxt
    else:
        log_values = [math.log(x) for x in w]
        la, lb, lc, ld = log_values
        log2 = math.log(2.0)
        for _ in range(steps):
            e = draw()
            m = max(la, lb, lc, ld)
            ls = m + math.log(
                math.exp(la - m) + math.exp(lb - m) + math.exp(lc - m) + math.exp(ld - m)
            )
            nxt = ls - e * log2
            log_values.append(nxt)
            exponents.append(e)
            la, lb, lc, ld = lb, lc, ld, nxt
    return ModelTrajectory(
        start=w,
        rng_seed=None if sampler else rng_seed,
        track=track,
        exponents=exponents,
        values=values,
        log_values=log_values,
        drift=drift_of_exponents(exponents),
    )


def growth_estimate(trajectory: ModelTrajectory) -> float:
    """Mean per-term log growth: (log a_N - log a_0) / N over the whole run."""
    n = len(trajectory) - 1
    if n + 1 < 100:
        raise ValueError(f"trajectory too short for a growth estimate: {n + 1} < 100")
    if trajectory.values is not None:
        first, last = trajectory.values[0], trajectory.values[-1]
        if first <= 0 or last <= 0:
            raise ValueError("trajectory left the positive domain")
        log_first = math.log(first.numerator) - math.log(first.denominator)
        log_last = math.log(last.numerator) - math.log(last.denominator)
    else:
        log_first, log_last = trajectory.log_values[0], trajectory.log_values[-1]
        if not (math.isfinite(log_first) and math.isfinite(log_last)):
            raise ValueError("trajectory log values are not finite")
    return (log_last - log_first) / n


@dataclass
class Histogram:
    """Exact tallies over residue classes or over division exponents.

    kind is "residue" (classes 0..modulus-1) or "exponent" (classes are the
    observed d values, reported from 1 up to the largest seen).
    """

    kind: str
    modulus: Optional[int]
    counts: dict[int, int]
    total: int

    def merge(self, other: "Histogram") -> None:
        if (self.kind, self.modulus) != (other.kind, other.modulus):
            raise ValueError("histogram domains differ")
        for cls, n in other.counts.items():
            self.counts[cls] = self.counts.get(cls, 0) + n
        self.total += other.total

    def rows(self) -> list[tuple[int, int]]:
        """(class, count) rows over the full class range, zeros included."""
        if self.kind == "residue":
            return [(cls, self.counts.get(cls, 0)) for cls in range(self.modulus)]
        top = max(self.counts, default=0)
        return [(d, self.counts.get(d, 0)) for d in range(1, top + 1)]

    def frequency(self, cls: int) -> Fraction:
        return Fraction(self.counts.get(cls, 0), self.total)


def _seed_at(bound: int, index: int) -> tuple[int, int, int, int]:
    m = bound // 2
    i4, r = divmod(index, m)
    i3, r2 = divmod(i4, m)
    i1, i2 = divmod(i3, m)
    return (2 * i1 + 1, 2 * i2 + 1, 2 * r2 + 1, 2 * r + 1)


def _survey_range(
    bound: int,
    lo: int,
    hi: int,
    terms_per_seed: int,
    modulus: Optional[int],
    want_exponents: bool,
    include_seeds: bool,
) -> tuple[Optional[list[int]], Optional[list[int]]]:
    """Tally seeds lo..hi-1 (by index); returns (residue counts, exponent counts)."""
    rhist = [0] * modulus if modulus else None
    ehist = [0] * 128 if want_exponents else None
    mask = modulus - 1 if modulus else 0
    gen_steps = terms_per_seed - 4 if include_seeds else terms_per_seed
    for index in range(lo, hi):
        a, b, c, d = _seed_at(bound, index)
        if rhist is not None and include_seeds:
            rhist[a & mask] += 1
            rhist[b & mask] += 1
            rhist[c & mask] += 1
            rhist[d & mask] += 1
        for _ in range(gen_steps):
            s = a + b + c + d
            e = (s & -s).bit_length() - 1
            t = s >> e
            if rhist is not None:
                rhist[t & mask] += 1
            if ehist is not None:
                if e >= len(ehist):
                    ehist.extend([0] * (e + 1 - len(ehist)))
                ehist[e] += 1
            a, b, c, d = b, c, d, t
    return rhist, ehist


def _run_survey(
    bound: int,
    terms_per_seed: int,
    modulus: Optional[int],
    want_exponents: bool,
    include_seeds: bool,
    workers: int,
    progress: Optional[Callable[[int, int], None]],
) -> tuple[Optional[list[int]], dict[int, int], int]:
    if bound < 2:
        raise ValueError(f"bound must be >= 2, got {bound}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    min_terms = 4 if include_seeds else 0
    if terms_per_seed < min_terms:
        raise ValueError(f"terms_per_seed must be >= {min_terms}, got {terms_per_seed}")
    total_seeds = (bound // 2) ** 4
    chunk = max(1, min(4096, total_seeds // (workers * 8) or 1))
    ranges = [(lo, min(lo + chunk, total_seeds)) for lo in range(0, total_seeds, chunk)]
    rtotal = [0] * modulus if modulus else None
    etotal: dict[int, int] = {}

    def fold(rhist, ehist, done):
        if rhist is not None:
            for cls, n in enumerate(rhist):
                rtotal[cls] += n
        if ehist is not None:
            for d, n in enumerate(ehist):
                if n:
                    etotal[d] = etotal.get(d, 0) + n
        if progress:
            progress(done, total_seeds)

    done = 0
    if workers == 1:
        for lo, hi in ranges:
            rhist, ehist = _survey_range(
                bound, lo, hi, terms_per_seed, modulus, want_exponents, include_seeds
            )
            done += hi - lo
            fold(rhist, ehist, done)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _survey_range, bound, lo, hi, terms_per_seed, modulus, want_exponents, include_seeds
                )
                for lo, hi in ranges
            ]
            for (lo, hi), fut in zip(ranges, futures):
                rhist, ehist = fut.result()
                done += hi - lo
                fold(rhist, ehist, done)
    return rtotal, etotal, total_seeds


def residue_survey(
    bound: int,
    terms_per_seed: int,
    modulus: int,
    workers: int = 1,
    include_seeds: bool = False,
    progress: Optional[Callable[[int, int], None]] = None,
) -> Histogram:
    """Tally term residues modulo a power of two over all odd seeds below bound.

    Counts terms_per_seed terms for each of the (bound//2)^4 seeds.  By
    default only generated terms are counted; include_seeds=True counts the
    four seed terms and terms_per_seed - 4 generated ones instead, i.e. the
    first terms_per_seed terms of each sequence.  Results are independent of
    worker count.
    """
    if modulus < 2 or modulus & (modulus - 1):
        raise ValueError(f"modulus must be a power of two >= 2, got {modulus}")
    rtotal, _, _ = _run_survey(bound, terms_per_seed, modulus, False, include_seeds, workers, progress)
    counts = {cls: n for cls, n in enumerate(rtotal) if n}
    return Histogram(kind="residue", modulus=modulus, counts=counts, total=sum(rtotal))


def exponent_survey(
    bound: int,
    terms_per_seed: int,
    workers: int = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> Histogram:
    """Tally division exponents over terms_per_seed steps of all odd seeds below bound."""
    _, etotal, _ = _run_survey(bound, terms_per_seed, None, True, False, workers, progress)
    return Histogram(kind="exponent", modulus=None, counts=dict(etotal), total=sum(etotal.values()))
