"""Attack traces: parsing, replay cost, synthesis, and pair statistics.

A trace is a JSON document:

    {"meta": {"method": "...", "b": 4, "model": "...", "dataset": "..."},
     "changes": [{"layer": "...", "index": 0, "old": -1, "new": 7}, ...]}

Replay cost is the total number of bit flips the recorded weight changes
need under a chosen representation: plain two's complement, or one of the
encoding maps.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from random import Random
from typing import Iterable, Mapping, Sequence

from .encoding import EncodingMap
from .quantize import flip_count, signed_value, twos_complement_bits, value_range

__all__ = [
    "AttackTrace",
    "CostStats",
    "DEFAULT_MSB_FRACTION",
    "DEFAULT_MULTIFLIP_WEIGHTS",
    "ROWHAMMER_FLIPS_PER_SECOND",
    "TraceMeta",
    "TraceParseError",
    "WeightChange",
    "cost_of_change",
    "cost_of_trace",
    "estimated_seconds",
    "load_trace",
    "pair_frequency",
    "parse_trace",
    "synthesize_trace",
    "trace_stats",
    "trace_to_json",
]

# Observed Rowhammer productivity on DRAM: usable bit flips per second.
ROWHAMMER_FLIPS_PER_SECOND = 0.31

# Share of recorded weight changes that touch the sign bit, per width.
DEFAULT_MSB_FRACTION = {4: 0.714, 8: 0.804}

# How many bits a single weight change flips, per width.
DEFAULT_MULTIFLIP_WEIGHTS = {
    4: {1: 0.85, 2: 0.14, 3: 0.0099, 4: 0.0001},
    8: {1: 0.60, 2: 0.36, 3: 0.037, 4: 0.003},
}


class TraceParseError(ValueError):
    """A trace document violates the schema; message carries the field path."""


@dataclass(frozen=True)
class TraceMeta:
    method: str
    b: int
    model: str
    dataset: str


@dataclass(frozen=True)
class WeightChange:
    layer: str
    index: int
    old: int
    new: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"index must be nonnegative, got {self.index}")
        if self.old == self.new:
            raise ValueError(f"change at index {self.index} leaves the value alone")


@dataclass(frozen=True)
class AttackTrace:
    meta: TraceMeta
    changes: tuple[WeightChange, ...]

    def __post_init__(self) -> None:
        lo, hi = value_range(self.meta.b)
        for c in self.changes:
            for side, v in (("old", c.old), ("new", c.new)):
                if not lo <= v <= hi:
                    raise ValueError(
                        f"{side} value {v} at index {c.index} outside [{lo}, {hi}]"
                    )


def _want(obj: Mapping, key: str, kind: type, where: str):
    if key not in obj:
        raise TraceParseError(f"{where}: missing field {key!r}")
    val = obj[key]
    # bool is an int subclass; never acceptable where an int is expected
    if not isinstance(val, kind) or isinstance(val, bool):
        raise TraceParseError(
            f"{where}.{key}: expected {kind.__name__}, got {type(val).__name__}"
        )
    return val


def parse_trace(text: str) -> AttackTrace:
    """Parse and validate a trace document from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise TraceParseError(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise TraceParseError(f"top level: expected object, got {type(doc).__name__}")
    meta_obj = _want(doc, "meta", dict, "top level")
    meta = TraceMeta(
        method=_want(meta_obj, "method", str, "meta"),
        b=_want(meta_obj, "b", int, "meta"),
        model=_want(meta_obj, "model", str, "meta"),
        dataset=_want(meta_obj, "dataset", str, "meta"),
    )
    try:
        lo, hi = value_range(meta.b)
    except ValueError as e:
        raise TraceParseError(f"meta.b: {e}") from None
    raw_changes = _want(doc, "changes", list, "top level")
    changes = []
    for i, entry in enumerate(raw_changes):
        where = f"changes[{i}]"
        if not isinstance(entry, dict):
            raise TraceParseError(f"{where}: expected object, got {type(entry).__name__}")
        layer = _want(entry, "layer", str, where)
        index = _want(entry, "index", int, where)
        old = _want(entry, "old", int, where)
        new = _want(entry, "new", int, where)
        for key, v in (("old", old), ("new", new)):
            if not lo <= v <= hi:
                raise TraceParseError(
                    f"{where}.{key}: expected integer in [{lo}, {hi}], got {v}"
                )
        if old == new:
            raise TraceParseError(f"{where}: old and new are both {old}")
        if index < 0:
            raise TraceParseError(f"{where}.index: must be nonnegative, got {index}")
        changes.append(WeightChange(layer, index, old, new))
    return AttackTrace(meta, tuple(changes))


def load_trace(path) -> AttackTrace:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise TraceParseError(f"{path}: {e}") from None
    try:
        return parse_trace(text)
    except TraceParseError as e:
        raise TraceParseError(f"{path}: {e}") from None


def trace_to_json(trace: AttackTrace) -> str:
    """Stable serialization: sorted keys, no volatile fields."""
    doc = {
        "meta": {
            "method": trace.meta.method,
            "b": trace.meta.b,
            "model": trace.meta.model,
            "dataset": trace.meta.dataset,
        },
        "changes": [
            {"layer": c.layer, "index": c.index, "old": c.old, "new": c.new}
            for c in trace.changes
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def cost_of_change(change: WeightChange, b: int, encoding: EncodingMap | None = None) -> int:
    """Bit flips this one change needs under the given representation."""
    if encoding is None:
        return flip_count(change.old, change.new, b)
    if encoding.b != b:
        raise ValueError(f"map is {encoding.b}-bit but trace is {b}-bit")
    mask = (1 << b) - 1
    u = encoding.table[change.old & mask]
    v = encoding.table[change.new & mask]
    return (u.bits ^ v.bits).bit_count()


def cost_of_trace(trace: AttackTrace, encoding: EncodingMap | None = None) -> int:
    """Total bit flips to replay the trace.

    ``encoding=None`` replays against plain two's-complement storage.
    """
    return sum(cost_of_change(c, trace.meta.b, encoding) for c in trace.changes)


@dataclass(frozen=True)
class CostStats:
    """Per-trace replay cost summary; avg is exact."""

    min_flips: int
    avg_flips: Fraction
    max_flips: int


def trace_stats(traces: Sequence[AttackTrace], encoding: EncodingMap | None = None) -> CostStats:
    if not traces:
        raise ValueError("need at least one trace")
    costs = [cost_of_trace(t, encoding) for t in traces]
    return CostStats(min(costs), Fraction(sum(costs), len(costs)), max(costs))


def estimated_seconds(flips: int | float) -> float:
    """Wall-clock Rowhammer effort for a flip budget."""
    if flips < 0:
        raise ValueError("flip count must be nonnegative")
    return flips / ROWHAMMER_FLIPS_PER_SECOND


def _validate_multiflip(weights: Mapping[int, float], b: int) -> list[tuple[int, float]]:
    if not weights:
        raise ValueError("multiflip_weights must not be empty")
    items = sorted(weights.items())
    for k, p in items:
        if not (isinstance(k, int) and 1 <= k <= b):
            raise ValueError(f"flip count {k!r} outside 1..{b}")
        if p < 0:
            raise ValueError(f"weight for {k} flips is negative")
    total = sum(p for _, p in items)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"multiflip weights sum to {total}, expected 1")
    return items


def synthesize_trace(
    b: int,
    num_changes: int,
    *,
    msb_fraction: float | None = None,
    multiflip_weights: Mapping[int, float] | None = None,
    seed: int = 0,
) -> AttackTrace:
    """Generate a synthetic trace with the recorded attack shape.

    Each change draws a uniform in-range old value and flips k bits of its
    pattern, k weighted by ``multiflip_weights``. The first flipped bit is
    the MSB with probability ``msb_fraction`` (otherwise uniform over the
    rest); any remaining flips land uniformly on unused positions. Same
    seed, same trace.
    """
    lo, hi = value_range(b)
    if num_changes < 0:
        raise ValueError("num_changes must be nonnegative")
    if msb_fraction is None:
        msb_fraction = DEFAULT_MSB_FRACTION[b]
    if not 0.0 <= msb_fraction <= 1.0:
        raise ValueError(f"msb_fraction must lie in [0, 1], got {msb_fraction}")
    if multiflip_weights is None:
        multiflip_weights = DEFAULT_MULTIFLIP_WEIGHTS[b]
    dist = _validate_multiflip(multiflip_weights, b)

    rng = Random(seed)
    changes = []
    for i in range(num_changes):
        old = rng.randint(lo, hi)
        r = rng.random()
        k = dist[-1][0]
        for kk, p in dist:
            r -= p
            if r < 0:
                k = kk
                break
        if rng.random() < msb_fraction:
            first = 1
        else:
            first = rng.randrange(2, b + 1)
        rest = rng.sample([p for p in range(1, b + 1) if p != first], k - 1)
        word = twos_complement_bits(old, b)
        for pos in (first, *rest):
            word = word.flip(pos)
        changes.append(WeightChange("synthetic", i, old, signed_value(word.bits, b)))
    meta = TraceMeta("synthetic", b, "synthetic", "synthetic")
    return AttackTrace(meta, tuple(changes))


def pair_frequency(traces: Iterable[AttackTrace]) -> list[list[int]]:
    """(old, new) change counts, rows and columns ascending by signed value."""
    traces = list(traces)
    if not traces:
        raise ValueError("need at least one trace")
    b = traces[0].meta.b
    if any(t.meta.b != b for t in traces):
        raise ValueError("traces mix bit widths")
    half = 1 << (b - 1)
    counts = [[0] * (2 * half) for _ in range(2 * half)]
    for t in traces:
        for c in t.changes:
            counts[c.old + half][c.new + half] += 1
    return counts
