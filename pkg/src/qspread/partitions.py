"""Set partitions of {1..m}, the non-crossing lattice, and its Mobius function.

Partitions are stored in canonical form: blocks are sorted tuples, listed in
increasing order of their minima.  Ground sets are always {1..m}; callers
working with other ordered sets relabel by position first.

All Mobius values are exact (Python integers, which embed in the rationals
used downstream).
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator, Sequence

NC_ENUMERATION_LIMIT = 12


class GroundSetError(ValueError):
    """Two partitions live on different ground sets."""


class OrderError(ValueError):
    """A Mobius query with arguments not comparable in the lattice."""


class Partition:
    """A partition of {1..m} with canonically ordered blocks.

    Immutable and hashable; the non-crossing flag is computed on first use
    and cached.
    """

    __slots__ = ("m", "blocks", "_block_of", "_noncrossing", "_hash")

    def __init__(self, m: int, blocks: Iterable[Iterable[int]]):
        if m < 0:
            raise ValueError(f"ground-set size must be >= 0, got {m}")
        cleaned = [tuple(sorted(b)) for b in blocks]
        if any(not b for b in cleaned):
            raise ValueError("empty block")
        canon = tuple(sorted(cleaned, key=lambda b: b[0]))
        seen: set[int] = set()
        for block in canon:
            for x in block:
                if not 1 <= x <= m:
                    raise ValueError(f"element {x} outside ground set {{1..{m}}}")
                if x in seen:
                    raise ValueError(f"element {x} appears in two blocks")
                seen.add(x)
        if len(seen) != m:
            raise ValueError("blocks do not cover the ground set")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "blocks", canon)
        block_of = {}
        for idx, block in enumerate(canon):
            for x in block:
                block_of[x] = idx
        object.__setattr__(self, "_block_of", block_of)
        object.__setattr__(self, "_noncrossing", None)
        object.__setattr__(self, "_hash", hash((m, canon)))

    def __setattr__(self, name, value):
        raise AttributeError("Partition is immutable")

    @staticmethod
    def singletons(m: int) -> "Partition":
        """The minimum of P(m): every element alone."""
        return Partition(m, [(i,) for i in range(1, m + 1)])

    @staticmethod
    def full(m: int) -> "Partition":
        """The maximum of P(m): one block (empty partition when m = 0)."""
        return Partition(m, [tuple(range(1, m + 1))] if m else [])

    def size(self) -> int:
        """Number of blocks."""
        return len(self.blocks)

    def block_index(self, x: int) -> int:
        return self._block_of[x]

    def same_block(self, x: int, y: int) -> bool:
        return self._block_of[x] == self._block_of[y]

    def is_noncrossing(self) -> bool:
        flag = self._noncrossing
        if flag is None:
            flag = _noncrossing_scan(self)
            object.__setattr__(self, "_noncrossing", flag)
        return flag

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Partition)
            and self.m == other.m
            and self.blocks == other.blocks
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = "/".join(",".join(map(str, b)) for b in self.blocks)
        return f"Partition({self.m}: {inner})"


def _noncrossing_scan(p: Partition) -> bool:
    # s1 < t1 < s2 < t2 with s's and t's in two distinct blocks.
    for x in range(1, p.m + 1):
        for y in range(x + 1, p.m + 1):
            if p.same_block(x, y):
                continue
            # look for x < y < x' < y' with x~x', y~y'
            for x2 in range(y + 1, p.m + 1):
                if not p.same_block(x, x2):
                    continue
                for y2 in range(x2 + 1, p.m + 1):
                    if p.same_block(y, y2):
                        return False
    return True


def is_noncrossing(p: Partition) -> bool:
    """True iff no two blocks interleave."""
    return p.is_noncrossing()


def kernel(indices: Sequence) -> Partition:
    """Partition of positions {1..m} grouping equal values of ``indices``."""
    if not indices:
        raise ValueError("kernel of an empty index tuple")
    classes: dict = {}
    for pos, value in enumerate(indices, start=1):
        classes.setdefault(value, []).append(pos)
    return Partition(len(indices), classes.values())


def leq(p: Partition, q: Partition) -> bool:
    """True iff every block of p is contained in a block of q."""
    if p.m != q.m:
        raise GroundSetError(f"ground sets differ: {p.m} vs {q.m}")
    for block in p.blocks:
        root = q.block_index(block[0])
        if any(q.block_index(x) != root for x in block[1:]):
            return False
    return True


def meet(p: Partition, q: Partition) -> Partition:
    """Common refinement: x ~ y iff x ~ y in both p and q."""
    if p.m != q.m:
        raise GroundSetError(f"ground sets differ: {p.m} vs {q.m}")
    classes: dict = {}
    for x in range(1, p.m + 1):
        classes.setdefault((p.block_index(x), q.block_index(x)), []).append(x)
    return Partition(p.m, classes.values())


def join(p: Partition, q: Partition) -> Partition:
    """Least common coarsening in P(m) (transitive closure of p union q)."""
    if p.m != q.m:
        raise GroundSetError(f"ground sets differ: {p.m} vs {q.m}")
    parent = list(range(p.m + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in (p, q):
        for block in part.blocks:
            for x in block[1:]:
                parent[find(x)] = find(block[0])
    classes: dict = {}
    for x in range(1, p.m + 1):
        classes.setdefault(find(x), []).append(x)
    return Partition(p.m, classes.values())


def enumerate_all(m: int) -> Iterator[Partition]:
    """All of P(m), by the usual insert-largest-element recursion."""

    def rec(n: int) -> Iterator[tuple[tuple[int, ...], ...]]:
        if n == 0:
            yield ()
            return
        for smaller in rec(n - 1):
            yield smaller + ((n,),)
            for i, block in enumerate(smaller):
                yield smaller[:i] + (block + (n,),) + smaller[i + 1 :]

    for blocks in rec(m):
        yield Partition(m, blocks)


def enumerate_nc(m: int, limit: int = NC_ENUMERATION_LIMIT) -> list[Partition]:
    """All non-crossing partitions of {1..m}, canonical, no duplicates.

    For m = 0 the list holds the single empty partition.  Built directly by
    choosing the block of the least element and recursing on the gaps it
    leaves, so nothing is enumerated and thrown away.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if m > limit:
        raise ValueError(f"m={m} exceeds enumeration limit {limit}")

    def rec(elems: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
        if not elems:
            yield ()
            return
        first, rest = elems[0], elems[1:]
        for r in range(len(rest) + 1):
            for mates in itertools.combinations(rest, r):
                block = (first,) + mates
                # rest splits into intervals between consecutive block members
                cuts = [rest.index(x) for x in mates]
                segments = []
                prev = 0
                for c in cuts:
                    segments.append(rest[prev:c])
                    prev = c + 1
                segments.append(rest[prev:])
                for combo in itertools.product(*(list(rec(s)) for s in segments)):
                    yield (block,) + tuple(itertools.chain.from_iterable(combo))

    return [Partition(m, blocks) for blocks in rec(tuple(range(1, m + 1)))]


def catalan(m: int) -> int:
    """The m-th Catalan number, |NC(m)|."""
    return comb(2 * m, m) // (m + 1)


class MobiusCache:
    """Memoized Mobius function of the NC(m) lattices, m up to ``limit``.

    Fill is single-threaded on demand; afterwards reads are lookups into
    plain dicts, safe to share.
    """

    def __init__(self, limit: int = NC_ENUMERATION_LIMIT):
        self.limit = limit
        self._nc: dict[int, tuple[Partition, ...]] = {}
        self._below: dict[Partition, tuple[Partition, ...]] = {}
        self._mu: dict[tuple[Partition, Partition], int] = {}

    def nc(self, m: int) -> tuple[Partition, ...]:
        """The non-crossing partitions of {1..m} (cached)."""
        if m not in self._nc:
            self._nc[m] = tuple(enumerate_nc(m, self.limit))
        return self._nc[m]

    def below(self, p: Partition) -> tuple[Partition, ...]:
        """Non-crossing partitions <= p (cached; includes p)."""
        if p not in self._below:
            self._below[p] = tuple(s for s in self.nc(p.m) if leq(s, p))
        return self._below[p]

    def mobius(self, s: Partition, p: Partition) -> int:
        """mu(s, p) on NC(m); requires s <= p, both non-crossing."""
        if not (s.is_noncrossing() and p.is_noncrossing()):
            raise OrderError("Mobius arguments must be non-crossing")
        if not leq(s, p):
            raise OrderError(f"{s!r} is not <= {p!r}")
        return self._mu_rec(s, p)

    def _mu_rec(self, s: Partition, p: Partition) -> int:
        key = (s, p)
        value = self._mu.get(key)
        if value is None:
            if s == p:
                value = 1
            else:
                # mu(s, p) = -sum over s <= rho < p of mu(s, rho)
                value = -sum(
                    self._mu_rec(s, rho)
                    for rho in self.below(p)
                    if rho != p and leq(s, rho)
                )
            self._mu[key] = value
        return value


_DEFAULT_CACHE = MobiusCache()


def default_cache() -> MobiusCache:
    return _DEFAULT_CACHE


def mobius(s: Partition, p: Partition, cache: MobiusCache | None = None) -> int:
    """Exact Mobius value mu(s, p) of the non-crossing lattice."""
    return (cache or _DEFAULT_CACHE).mobius(s, p)


def mobius_column_oracle(m: int, cache: MobiusCache | None = None) -> dict[Partition, int]:
    """Solve the zeta system for the column mu(., full) by back-substitution.

    Independent of the memoized recursion above, which expands on the upper
    argument: here x(p) = -sum over rho > p of zeta(p, rho) x(rho), seeded
    with x(full) = 1.  Used as a cross-check oracle.
    """
    cache = cache or _DEFAULT_CACHE
    elems = sorted(cache.nc(m), key=lambda p: -p.size())  # finer first
    top = Partition.full(m)
    column: dict[Partition, int] = {}
    for p in sorted(elems, key=lambda p: p.size()):  # coarser first
        if p == top:
            column[p] = 1
        else:
            column[p] = -sum(
                column[rho] for rho in elems if rho != p and rho in column and leq(p, rho)
            )
    return column


def zeta_inverse_table(
    m: int, cache: MobiusCache | None = None
) -> dict[tuple[Partition, Partition], Fraction]:
    """Invert the zeta matrix of NC(m) by exact Gauss-Jordan elimination.

    Brute-force oracle for the full Mobius table; O(|NC(m)|^3) Fraction
    operations, intended for small m only.
    """
    cache = cache or _DEFAULT_CACHE
    elems = list(cache.nc(m))
    order = {p: i for i, p in enumerate(elems)}
    size = len(elems)
    aug = [
        [Fraction(1 if leq(elems[r], elems[c]) else 0) for c in range(size)]
        + [Fraction(1 if r == c else 0) for c in range(size)]
        for r in range(size)
    ]
    for col in range(size):
        pivot = next(r for r in range(col, size) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    table = {}
    for p in elems:
        for q in elems:
            if leq(p, q):
                table[(p, q)] = aug[order[p]][size + order[q]]
    return table
