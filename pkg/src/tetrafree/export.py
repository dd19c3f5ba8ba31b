"""Structured export: result objects -> records -> CSV or JSON-lines bytes.

Unbounded integers (sequence terms, cycle members, rational parts) are
rendered as decimal strings in every format; they routinely exceed any
native numeric width and must never pass through a float.  Bounded counters
(periods, step counts, histogram tallies) stay plain integers.  Record
values may be None (empty CSV cell, JSON null) or lists of strings
(";"-joined in CSV, arrays in JSON-lines).

Rendering is deterministic: fixed field order, fixed row order, "\n" line
endings.  Identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any, Optional

from .analysis import Classification, CycleCensus
from .divpoor import AlphaApprox, ConstructionResult, ContinuedFraction, LengthPrediction
from .stochastic import Histogram, ModelTrajectory, growth_estimate

Record = dict[str, Any]


def fmt_fraction(x: Fraction) -> str:
    """Exact decimal-string rendering, "p/q" unless the denominator is 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        return ";".join(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(fieldnames: list[str], records: list[Record]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(fieldnames)
    for rec in records:
        writer.writerow([_csv_cell(rec.get(name)) for name in fieldnames])
    return out.getvalue()


def render_jsonl(fieldnames: list[str], records: list[Record]) -> str:
    lines = []
    for rec in records:
        ordered = {name: rec.get(name) for name in fieldnames}
        lines.append(json.dumps(ordered, ensure_ascii=True))
    return "".join(line + "\n" for line in lines)


def render(fieldnames: list[str], records: list[Record], fmt: str) -> str:
    if fmt == "csv":
        return render_csv(fieldnames, records)
    if fmt == "jsonl":
        return render_jsonl(fieldnames, records)
    raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'jsonl'")


# ---------------------------------------------------------------------------
# record builders, one per result shape

GENERATE_FIELDS = ["index", "term", "exponent"]


def generate_records(terms: list[int], exponents: list[int]) -> list[Record]:
    recs: list[Record] = []
    for i, t in enumerate(terms, start=1):
        d = exponents[i - 5] if i >= 5 else None
        recs.append({"index": i, "term": str(t), "exponent": d})
    return recs


CLASSIFY_FIELDS = ["seed", "kind", "preperiod", "period", "cycle", "steps_taken", "max_term"]


def classify_records(seed, result: Classification) -> list[Record]:
    return [
        {
            "seed": [str(x) for x in seed],
            "kind": result.kind,
            "preperiod": result.preperiod,
            "period": result.period,
            "cycle": [str(x) for x in result.cycle] if result.cycle else None,
            "steps_taken": result.steps_taken,
            "max_term": str(result.max_term),
        }
    ]


CENSUS_FIELDS = ["kind", "period", "cycle", "seeds"]


def census_records(census: CycleCensus) -> list[Record]:
    recs: list[Record] = [
        {"kind": "cycle", "period": len(cycle), "cycle": [str(x) for x in cycle], "seeds": basin}
        for cycle, basin in census.sorted_cycles()
    ]
    recs.append({"kind": "unresolved", "period": None, "cycle": None, "seeds": census.unresolved_seeds})
    return recs


DRIFT_FIELDS = ["cycle", "period", "drift"]


def drift_records(cycle: tuple[int, ...], drift: Fraction) -> list[Record]:
    return [{"cycle": [str(x) for x in cycle], "period": len(cycle), "drift": fmt_fraction(drift)}]


ALPHA_FIELDS = ["lo", "hi", "width", "decimal"]


def alpha_records(approx: AlphaApprox) -> list[Record]:
    return [
        {
            "lo": fmt_fraction(approx.lo),
            "hi": fmt_fraction(approx.hi),
            "width": fmt_fraction(approx.width),
            "decimal": approx.decimal,
        }
    ]


CF_FIELDS = ["index", "quotient", "convergent_numerator", "convergent_denominator"]


def cf_records(cf: ContinuedFraction) -> list[Record]:
    return [
        {
            "index": i,
            "quotient": q,
            "convergent_numerator": str(conv.numerator),
            "convergent_denominator": str(conv.denominator),
        }
        for i, (q, conv) in enumerate(zip(cf.quotients, cf.convergents), start=1)
    ]


CONSTRUCT_FIELDS = [
    "r",
    "k",
    "anchor",
    "seed",
    "backward_steps",
    "division_poor_steps",
    "segment_terms",
    "segment",
]


def construct_records(res: ConstructionResult) -> list[Record]:
    return [
        {
            "r": fmt_fraction(res.r),
            "k": str(res.k),
            "anchor": [str(x) for x in res.forward_anchor],
            "seed": [str(x) for x in res.seed],
            "backward_steps": res.backward_steps,
            "division_poor_steps": res.division_poor_steps,
            "segment_terms": res.segment_terms,
            "segment": [str(x) for x in res.segment],
        }
    ]


SEGMENT_FIELDS = ["index", "term"]


def segment_records(res: ConstructionResult) -> list[Record]:
    return [{"index": i, "term": str(t)} for i, t in enumerate(res.segment, start=1)]


MEASURE_FIELDS = ["seed", "division_poor_steps"]


def measure_records(seed, steps: int) -> list[Record]:
    return [{"seed": [str(x) for x in seed], "division_poor_steps": steps}]


PREDICT_FIELDS = ["q", "predicted_bound"]


def predict_records(pred: LengthPrediction) -> list[Record]:
    return [{"q": str(pred.q), "predicted_bound": pred.predicted_bound}]


SIMULATE_FIELDS = ["start", "steps", "rng_seed", "track", "drift", "freq_d1", "growth"]


def simulate_records(traj: ModelTrajectory) -> list[Record]:
    steps = len(traj.exponents)
    freq = Fraction(sum(1 for d in traj.exponents if d == 1), steps) if steps else None
    return [
        {
            "start": [str(x) for x in traj.start],
            "steps": steps,
            "rng_seed": traj.rng_seed,
            "track": traj.track,
            "drift": fmt_fraction(traj.drift) if traj.drift is not None else None,
            "freq_d1": fmt_fraction(freq) if freq is not None else None,
            "growth": growth_estimate(traj) if len(traj) >= 100 else None,
        }
    ]


TRAJECTORY_FIELDS = ["index", "value", "log_value", "exponent"]


def trajectory_records(traj: ModelTrajectory) -> list[Record]:
    recs: list[Record] = []
    length = len(traj)
    for i in range(length):
        recs.append(
            {
                "index": i + 1,
                "value": fmt_fraction(traj.values[i]) if traj.values is not None else None,
                "log_value": traj.log_values[i] if traj.log_values is not None else None,
                "exponent": traj.exponents[i - 4] if i >= 4 else None,
            }
        )
    return recs


HISTOGRAM_FIELDS = ["class", "count"]


def histogram_records(hist: Histogram) -> list[Record]:
    return [{"class": cls, "count": n} for cls, n in hist.rows()]
