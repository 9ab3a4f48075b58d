"""Sparsify a small-valued collapsed fractional matching by sampling color classes.

Entries are bucketed by value: bucket i holds values in
[(1+eps)^-i, (1+eps)^-(i-1)).  Each bucket keeps a proper edge coloring
from a palette of 3*ceil((1+eps)^i) colors (greedy smallest free color), and
a fixed random set of 3*min(ceil(d), ceil((1+eps)^i)) of those colors, with
d = 4 ln(2/eps) / eps^2.  The sparse graph K is the union of the entries
whose color is sampled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .config import stream
from .graph import GroupKey, WeightedMultigraph
from .static_match import static_weighted_match


class SparsifierError(ValueError):
    pass


def sample_parameter(eps: Fraction) -> float:
    return 4 * math.log(2 / eps) / eps ** 2


def _ceil_fraction(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


class BucketColoring:
    """Proper edge coloring of one bucket, smallest free color on insert."""

    def __init__(self, palette: int):
        self.palette = palette
        self.color: dict[GroupKey, int] = {}
        self.at: dict[int, dict[int, GroupKey]] = {}   # vertex -> color -> entry

    def insert(self, key: GroupKey) -> int:
        u, v, _ = key
        cu, cv = self.at.setdefault(u, {}), self.at.setdefault(v, {})
        c = 0
        while c in cu or c in cv:
            c += 1
        if c >= self.palette:
            raise SparsifierError(f"palette of {self.palette} colors exhausted inserting {key}")
        self.color[key] = c
        cu[c] = key
        cv[c] = key
        return c

    def delete(self, key: GroupKey) -> int:
        c = self.color.pop(key)
        u, v, _ = key
        del self.at[u][c]
        del self.at[v][c]
        return c

    def max_degree(self) -> int:
        return max((len(cs) for cs in self.at.values()), default=0)

    def is_proper(self) -> bool:
        seen: dict[tuple[int, int], GroupKey] = {}
        for key, c in self.color.items():
            if not 0 <= c < self.palette:
                return False
            for v in key[:2]:
                if seen.setdefault((v, c), key) != key:
                    return False
        return True


@dataclass
class Update:
    kind: str            # "remove" or "decrease"
    key: GroupKey
    value: Fraction | None = None


class Sparsifier:
    def __init__(self, xC: Mapping[GroupKey, Fraction], eps, seed: int, theta, n: int, W: int,
                 stream_path: tuple[int, ...] = ()):
        self.eps = Fraction(eps)
        self.theta = Fraction(theta)
        over = {k: v for k, v in xC.items() if v > self.theta}
        if over:
            raise SparsifierError(f"entries above threshold {self.theta}: {sorted(over.items())[:5]}")
        self.d = sample_parameter(self.eps)
        self.ceil_d = math.ceil(self.d)
        base = 1 + self.eps
        self.max_index = max(1, math.ceil(2 * math.log(max(2, n) * W / self.eps) / math.log(base)))
        self.seed = seed
        self.stream_path = tuple(stream_path)
        self._pow: dict[int, Fraction] = {0: Fraction(1)}
        self.value: dict[GroupKey, Fraction] = {}
        self.bucket_of: dict[GroupKey, int] = {}
        self.buckets: dict[int, BucketColoring] = {}
        self.samples: dict[int, frozenset[int]] = {}
        self.K: set[GroupKey] = set()
        self.dropped: set[GroupKey] = set()
        for key in sorted(xC):
            if xC[key] > 0:
                self._insert(key, Fraction(xC[key]))

    # bucket arithmetic

    def power(self, i: int) -> Fraction:
        if i not in self._pow:
            top = max(self._pow)
            val = self._pow[top]
            for j in range(top + 1, i + 1):
                val = val * (1 + self.eps)
                self._pow[j] = val
        return self._pow[i]

    def bucket_index(self, value: Fraction) -> int:
        """Smallest i with (1+eps)^-i <= value, i.e. (1+eps)^i >= 1/value."""
        target = 1 / value
        i = max(0, int(math.log(float(target)) / math.log(float(1 + self.eps))) - 1)
        while self.power(i) < target:
            i += 1
        while i > 0 and self.power(i - 1) >= target:
            i -= 1
        return i

    def palette_size(self, i: int) -> int:
        return 3 * _ceil_fraction(self.power(i))

    def sample_size(self, i: int) -> int:
        return 3 * min(self.ceil_d, _ceil_fraction(self.power(i)))

    def membership_probability(self, i: int) -> Fraction:
        return Fraction(min(self.sample_size(i), self.palette_size(i)), self.palette_size(i))

    def _sample(self, i: int) -> frozenset[int]:
        if i not in self.samples:
            pal, size = self.palette_size(i), self.sample_size(i)
            if size >= pal:
                self.samples[i] = frozenset(range(pal))
            else:
                rng = stream(self.seed, *self.stream_path, i)
                self.samples[i] = frozenset(int(c) for c in rng.choice(pal, size=size, replace=False))
        return self.samples[i]

    # mutation

    def _insert(self, key: GroupKey, value: Fraction) -> None:
        i = self.bucket_index(value)
        self.value[key] = value
        if i > self.max_index:
            self.dropped.add(key)
            return
        col = self.buckets.get(i)
        if col is None:
            col = self.buckets[i] = BucketColoring(self.palette_size(i))
        c = col.insert(key)
        self.bucket_of[key] = i
        if c in self._sample(i):
            self.K.add(key)

    def _remove(self, key: GroupKey) -> None:
        del self.value[key]
        if key in self.dropped:
            self.dropped.discard(key)
            return
        i = self.bucket_of.pop(key)
        self.buckets[i].delete(key)
        if not self.buckets[i].color:
            del self.buckets[i]
        self.K.discard(key)

    def update(self, up: Update) -> set[GroupKey]:
        """Apply a removal or a decrease; returns the entries whose K membership changed."""
        if up.key not in self.value:
            raise SparsifierError(f"unknown entry {up.key}")
        before = up.key in self.K
        if up.kind == "remove" or (up.kind == "decrease" and up.value == 0):
            self._remove(up.key)
        elif up.kind == "decrease":
            new = Fraction(up.value)
            old = self.value[up.key]
            if not 0 <= new < old:
                raise SparsifierError(f"decrease of {up.key} must lower {old}, got {new}")
            if up.key in self.bucket_of and self.bucket_index(new) == self.bucket_of[up.key]:
                self.value[up.key] = new
            else:
                self._remove(up.key)
                self._insert(up.key, new)
        else:
            raise SparsifierError(f"unknown update kind {up.kind!r}")
        return {up.key} if before != (up.key in self.K) else set()

    # inspection

    def is_proper(self) -> bool:
        return all(col.is_proper() for col in self.buckets.values())

    def size_bound(self) -> int:
        """Edges K can hold: per bucket, sampled colors times the matched pairs a color class covers."""
        total = 0
        for i, col in self.buckets.items():
            verts = sum(1 for cs in col.at.values() if cs)
            total += min(len(col.color), self.sample_size(i) * (verts // 2))
        return total


def representative(g: WeightedMultigraph, key: GroupKey) -> int:
    members = g.group(*key)
    if not members:
        raise SparsifierError(f"group {key} has no alive edge")
    return min(members)


def round_to_integral(g: WeightedMultigraph, K, zC: Mapping[GroupKey, Fraction], eps) -> list[int]:
    """Static matching on K plus one alive edge per integral group."""
    z_keys = [k for k, v in zC.items() if v > 0 and g.group(*k)]
    kv = {v for k in K for v in k[:2]}
    zv = {v for k in z_keys for v in k[:2]}
    if kv & zv:
        raise SparsifierError(f"K and integral part share vertices {sorted(kv & zv)}")
    k_edges = [representative(g, k) for k in K if g.group(*k)]
    cert = static_weighted_match(g.restrict(k_edges), eps)
    return sorted(cert.matching + [representative(g, k) for k in z_keys])
