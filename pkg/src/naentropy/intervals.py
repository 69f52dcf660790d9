"""Finite unions of closed intervals in canonical form."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidArgument


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, merged tuple of closed intervals ``(lo, hi)`` with ``lo <= hi``.

    Degenerate intervals (single points) are allowed. Intervals that touch are
    merged, so the canonical form of a set is unique.
    """

    intervals: tuple = ()

    def __post_init__(self):
        items = []
        for lo, hi in self.intervals:
            lo, hi = float(lo), float(hi)
            if lo > hi:
                raise InvalidArgument(f"interval with lo > hi: ({lo}, {hi})")
            items.append((lo, hi))
        items.sort()
        merged = []
        for lo, hi in items:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        object.__setattr__(self, "intervals", tuple(merged))

    @classmethod
    def of(cls, lo, hi):
        return cls(((lo, hi),))

    @classmethod
    def empty(cls):
        return cls(())

    def __bool__(self):
        return bool(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    @property
    def is_empty(self):
        return not self.intervals

    @property
    def measure(self):
        return sum(hi - lo for lo, hi in self.intervals)

    @property
    def hull(self):
        if not self.intervals:
            return None
        return (self.intervals[0][0], self.intervals[-1][1])

    @property
    def diameter(self):
        if not self.intervals:
            return 0.0
        return self.intervals[-1][1] - self.intervals[0][0]

    def union(self, other):
        return IntervalSet(self.intervals + tuple(other))

    def intersection(self, other):
        out = []
        a, b = list(self.intervals), list(other)
        i = j = 0
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(tuple(out))

    def clip(self, lo, hi):
        return self.intersection(IntervalSet.of(lo, hi))

    def contains_point(self, x, tol=0.0):
        return any(lo - tol <= x <= hi + tol for lo, hi in self.intervals)

    def contains(self, other, tol=0.0):
        """True if every interval of ``other`` lies inside one interval of ``self``."""
        for lo, hi in other:
            if not any(a - tol <= lo and hi <= b + tol for a, b in self.intervals):
                return False
        return True

    def midpoint(self):
        lo, hi = self.hull
        return (lo + hi) / 2
