"""Cantor-type interval systems and the certified deletion loop.

A state is an outer interval plus an ordered list of deleted open
intervals with pairwise disjoint closures.  Deleted intervals carry their
length as a separate float: at the default growth schedule the lengths
shrink super-exponentially and fall below the ulp of their left endpoint
around depth 6, so ``right - left`` would silently collapse to zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

from .errors import (
    ConstructionStallError,
    PrecisionExhaustedError,
    StageIndexError,
)

__all__ = [
    "Interval",
    "CantorState",
    "ConstructionParams",
    "AuditRecord",
    "blocks",
    "trapped_length",
    "next_candidate",
    "construct",
    "construction_discs",
]


@dataclass(frozen=True)
class Interval:
    """A nondegenerate real interval stored as (left, exact length)."""

    left: float
    length: float

    def __init__(self, left: float, right: float | None = None, *, length: float | None = None):
        if (right is None) == (length is None):
            raise ValueError("give exactly one of right= or length=")
        if length is None:
            length = right - left
        if not (math.isfinite(left) and math.isfinite(length)):
            raise ValueError("interval endpoints must be finite")
        if length <= 0.0:
            raise ValueError(f"degenerate interval: left={left!r}, length={length!r}")
        object.__setattr__(self, "left", float(left))
        object.__setattr__(self, "length", float(length))

    @classmethod
    def from_length(cls, left: float, length: float) -> "Interval":
        return cls(left, length=length)

    @property
    def right(self) -> float:
        # may round to left when length is below one ulp; length stays exact
        return self.left + self.length

    @property
    def midpoint(self) -> float:
        return self.left + 0.5 * self.length

    def contains(self, x: float) -> bool:
        return self.left <= x <= self.right

    def overlap_length(self, other: "Interval") -> float:
        lo = max(self.left, other.left)
        hi = min(self.right, other.right)
        return max(0.0, hi - lo)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"Interval({self.left!r}, {self.right!r})"


def _validate_deleted(outer: Interval, deleted: Sequence[Interval]) -> None:
    for iv in deleted:
        if not (iv.left > outer.left and iv.right < outer.right and iv.left < outer.right):
            raise ValueError(f"deleted interval {iv} not strictly inside outer {outer}")
    order = sorted(deleted, key=lambda iv: iv.left)
    for a, b in zip(order, order[1:]):
        if not (a.right < b.left):
            raise ValueError(f"deleted closures intersect: {a} and {b}")


@dataclass(frozen=True)
class CantorState:
    """Outer interval plus ordered deleted intervals (insertion order)."""

    outer: Interval = field(default_factory=lambda: Interval(-1.0, 1.0))
    deleted: tuple[Interval, ...] = ()

    def __post_init__(self):
        _validate_deleted(self.outer, self.deleted)

    @property
    def depth(self) -> int:
        return len(self.deleted)

    def add_deleted(self, iv: Interval) -> "CantorState":
        return replace(self, deleted=self.deleted + (iv,))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "outer": [self.outer.left, self.outer.right],
            "deleted": [[iv.left, iv.right] for iv in self.deleted],
            "lengths": [iv.length for iv in self.deleted],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "CantorState":
        doc = json.loads(text)
        outer = Interval(doc["outer"][0], doc["outer"][1])
        lengths = doc.get("lengths")
        if lengths is None:
            lengths = [b - a for a, b in doc["deleted"]]
        deleted = tuple(
            Interval.from_length(pair[0], ln) for pair, ln in zip(doc["deleted"], lengths)
        )
        return cls(outer, deleted)


def blocks(state: CantorState, n: int) -> list[Interval]:
    """The n+1 closed blocks of outer minus the first n deleted intervals.

    Sorted ascending; together with those n intervals they partition outer.
    """
    if not (0 <= n <= state.depth):
        raise StageIndexError(f"stage {n} outside 0..{state.depth}")
    gaps = sorted(state.deleted[:n], key=lambda iv: iv.left)
    out = []
    left = state.outer.left
    for gap in gaps:
        out.append(Interval(left, gap.left))
        left = gap.right
    out.append(Interval(left, state.outer.right))
    return out


def trapped_length(state: CantorState, window: Interval, n: int) -> float:
    """Total length of the intersection of the stage-n blocks with window.

    Nonincreasing in n; its limit over n is the measure trapped by the
    limiting compact set inside the window.
    """
    if window.right <= state.outer.left or window.left >= state.outer.right:
        raise ValueError("window does not overlap the outer interval")
    return sum(b.overlap_length(window) for b in blocks(state, n))


def next_candidate(state: CantorState) -> float:
    """Midpoint of the largest block at current depth; ties go leftmost."""
    best = None
    for b in blocks(state, state.depth):
        if best is None or b.length > best.length:
            best = b
    return best.midpoint


def construction_discs(state: CantorState) -> list[tuple[float, float]]:
    """(center, radius) of the disc removed at each step: radius 2^j * d_j."""
    return [
        (iv.left, math.ldexp(iv.length, j))
        for j, iv in enumerate(state.deleted, start=1)
    ]


@dataclass(frozen=True)
class ConstructionParams:
    """Knobs of the certified deletion loop.

    growth is the positive nondecreasing schedule driving the size rule
    d_j < 4**(-j * growth[j-1]); None means growth[j-1] = j.
    """

    target_depth: int = 6
    growth: Optional[tuple[float, ...]] = None
    certification_threshold: float = 0.012
    shrink_factor: float = 0.5
    rng_seed: int = 0
    max_halvings: int = 60
    outer: Interval = field(default_factory=lambda: Interval(-1.0, 1.0))

    def __post_init__(self):
        if self.target_depth < 0:
            raise ValueError("target_depth must be >= 0")
        if not (0.0 < self.certification_threshold < 1.0):
            raise ValueError("certification_threshold must lie in (0, 1)")
        if not (0.0 < self.shrink_factor < 1.0):
            raise ValueError("shrink_factor must lie in (0, 1)")
        if self.max_halvings < 1:
            raise ValueError("max_halvings must be >= 1")
        g = self.growth
        if g is not None:
            g = tuple(float(v) for v in g)
            if len(g) < self.target_depth:
                raise ValueError("growth shorter than target_depth")
            if any(v <= 0 for v in g):
                raise ValueError("growth values must be positive")
            if any(b < a for a, b in zip(g, g[1:])):
                raise ValueError("growth must be nondecreasing")
            object.__setattr__(self, "growth", g)

    def growth_at(self, j: int) -> float:
        """Growth value for step j (1-based)."""
        return float(j) if self.growth is None else self.growth[j - 1]


@dataclass(frozen=True)
class AuditRecord:
    """One line of the construction audit log."""

    n: int
    a: float
    d: float
    halvings: int
    omega_lower: Optional[float]
    accepted: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "a": self.a,
                "d": self.d,
                "halvings": self.halvings,
                "omega_lower": self.omega_lower,
                "accepted": self.accepted,
            }
        )


# geometry the certification domain must keep clear of
_TARGET = (0.0, -0.75, 0.125)
_PROBE = (0.0, 0.75, 0.125)


def _disc_admissible(a: float, r: float) -> bool:
    # removed discs may overlap each other (only the intervals must be
    # disjoint); they must stay inside the disk and clear of target/probe
    if abs(a) + r >= 1.0:
        return False
    for cx, cy, rr in (_TARGET, _PROBE):
        if math.hypot(a - cx, cy) <= r + rr:
            return False
    return True


def construct(
    params: ConstructionParams,
    certifier: Optional[Callable[[list[tuple[float, float]]], float]] = None,
) -> tuple[CantorState, list[AuditRecord]]:
    """Run the deletion loop to target_depth.

    Each step takes the midpoint of the largest block, initialises the
    interval length from the size rule, and halves it until the interval
    sits strictly inside its block, the removed disc (radius 2^j d_j) is
    admissible, and the certifier accepts the enlarged domain.

    certifier maps the full disc list [(center, radius), ...] to a
    certified lower bound for the harmonic measure over the probe disc;
    None accepts every admissible geometry (size-rule-only construction).
    """
    state = CantorState(params.outer)
    audit: list[AuditRecord] = []
    discs: list[tuple[float, float]] = []
    for j in range(1, params.target_depth + 1):
        host = max(blocks(state, state.depth), key=lambda b: b.length)
        a = host.midpoint
        gap_right = host.right - a  # room to the right inside the host
        d0 = min(4.0 ** (-j * params.growth_at(j)) * params.shrink_factor, 0.5 * host.length)
        d = d0
        accepted = False
        bound: Optional[float] = None
        halvings = 0
        while halvings <= params.max_halvings:
            if d <= 0.0:
                raise PrecisionExhaustedError(
                    f"step {j}: interval length underflowed to zero", audit
                )
            r = math.ldexp(d, j)
            if d < gap_right and _disc_admissible(a, r):
                if certifier is None:
                    accepted = True
                    break
                bound = certifier(discs + [(a, r)])
                if bound > params.certification_threshold:
                    accepted = True
                    break
            d *= 0.5
            halvings += 1
        if not accepted:
            audit.append(AuditRecord(j, a, d, halvings, bound, False))
            raise ConstructionStallError(
                f"step {j}: certifier never accepted within {params.max_halvings} halvings",
                audit,
            )
        state = state.add_deleted(Interval.from_length(a, d))
        discs.append((a, math.ldexp(d, j)))
        audit.append(AuditRecord(j, a, d, halvings, bound, True))
    return state, audit
