"""Few-items welfare: every set partition of the items, each solved as an assignment problem."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import Allocation, ItemSet, SizeGuard, items_of
from .valuations import Valuation, scale_to_integers
from .walrasian import WelfareSolution, infer_num_items

PARTITION_LIMIT = 12


def enumerate_set_partitions(k: int, items: Sequence[int] | None = None) -> Iterator[tuple[ItemSet, ...]]:
    """Set partitions of ``k`` items (or of ``items``) via restricted-growth strings.

    Blocks are ordered by their smallest item; the all-in-one-block
    partition comes first.
    """
    items = list(range(k)) if items is None else list(items)
    k = len(items)
    if k > PARTITION_LIMIT:
        raise SizeGuard(f"{k} items exceed the partition limit of {PARTITION_LIMIT}")
    if k == 0:
        yield ()
        return
    a = [0] * k

    def rec(i: int, top: int):
        if i == k:
            blocks = [0] * (top + 1)
            for j, g in zip(items, a):
                blocks[g] |= 1 << j
            yield tuple(blocks)
            return
        for g in range(top + 2):
            a[i] = g
            yield from rec(i + 1, max(top, g))

    yield from rec(1, 0)


@dataclass(frozen=True)
class PartitionBlockValuation:
    blocks: tuple[ItemSet, ...]
    values: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def build(cls, blocks: Sequence[ItemSet], valuations: Sequence[Valuation]) -> PartitionBlockValuation:
        seen = 0
        for s in blocks:
            if not s or s & seen:
                raise ValueError("blocks must be nonempty and pairwise disjoint")
            seen |= s
        return cls(tuple(blocks), tuple(tuple(v.value(s) for s in blocks) for v in valuations))


@dataclass(frozen=True)
class Matching:
    """``pairs[b]`` is the column matched to row ``b``, or None."""

    pairs: tuple[int | None, ...]
    weight: Fraction


def _hungarian_min(cost: list[list[int]]) -> list[int]:
    # rows <= columns; returns the column of each row
    n, m = len(cost), len(cost[0])
    inf = float("inf")
    u = [0] * (n + 1)
    v = [0] * (m + 1)
    p = [0] * (m + 1)
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            for j in range(1, m + 1):
                if not used[j]:
                    cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col = [0] * n
    for j in range(1, m + 1):
        if p[j]:
            col[p[j] - 1] = j - 1
    return col


def hungarian_max_matching(weights: Sequence[Sequence]) -> Matching:
    """Maximum-weight partial matching of rows to columns.

    Among optimal matchings, the column vector (unmatched ranked after every
    column) is lexicographically least; this is enforced by perturbing the
    integer-scaled weights, so the tie-break is exact.
    """
    n = len(weights)
    if n == 0:
        return Matching((), Fraction(0))
    cols = len(weights[0])
    rows = [[Fraction(x) for x in row] for row in weights]
    for row in rows:
        if len(row) != cols:
            raise ValueError("weight matrix is not rectangular")
        if any(x < 0 for x in row):
            raise ValueError("weights must be non-negative")
    ints, denom = scale_to_integers(rows)
    base = cols + 1
    scale = base ** n
    width = cols + n  # one "unmatched" column per row
    big = [[0] * width for _ in range(n)]
    for b in range(n):
        place = base ** (n - 1 - b)
        for c in range(width):
            w = ints[b][c] if c < cols else 0
            rank = c if c < cols else cols
            big[b][c] = w * scale - rank * place
    top = max(max(row) for row in big)
    cost = [[top - x for x in row] for row in big]
    col = _hungarian_min(cost)
    pairs = tuple(c if c < cols else None for c in col)
    total = sum((rows[b][c] for b, c in enumerate(pairs) if c is not None), Fraction(0))
    return Matching(pairs, total)


def smallk_max_welfare(items: ItemSet, valuations: Sequence[Valuation], num_items: int | None = None) -> WelfareSolution:
    """Best matching of bidders to blocks over all set partitions of ``items``."""
    infer_num_items(items, valuations, num_items)
    n = len(valuations)
    item_list = items_of(items)
    if len(item_list) > PARTITION_LIMIT:
        raise SizeGuard(f"{len(item_list)} items exceed the partition limit of {PARTITION_LIMIT}")
    if not n or not item_list:
        return WelfareSolution(Allocation.empty(n), Fraction(0))
    best: WelfareSolution | None = None
    for blocks in enumerate_set_partitions(len(item_list), item_list):
        pbv = PartitionBlockValuation.build(blocks, valuations)
        match = hungarian_max_matching(pbv.values)
        if best is None or match.weight > best.welfare:
            bundles = [0] * n
            for b, c in enumerate(match.pairs):
                if c is not None:
                    bundles[b] = blocks[c]
            best = WelfareSolution(Allocation(tuple(bundles)), match.weight)
    return best
