"""Modular difference sets with lambda = 1 (cyclic Golomb rulers).

A set D of residues mod v has lambda = 1 when every difference
x - y (x != y in D) occurs exactly once. Perfect sets, with
v = K(K-1) + 1, hit every nonzero residue.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidInputError

#: Largest power-of-two exponent accepted: phases 2*pi*N/2^d must stay
#: resolvable in double precision.
MAX_POWER_OF_TWO_EXPONENT = 53


@dataclass(frozen=True)
class DifferenceSet:
    modulus: int
    elements: tuple[int, ...]
    lam: int | None = None
    verified: bool = False
    status: str = "found"

    @property
    def size(self) -> int:
        return len(self.elements)

    def to_json(self) -> dict:
        return {
            "v": self.modulus,
            "K": self.size,
            "elements": list(self.elements),
            "lambda": self.lam,
            "status": self.status,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DifferenceSet":
        try:
            v, elems = int(obj["v"]), [int(x) for x in obj["elements"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"bad difference-set JSON: {exc}") from None
        return make_difference_set(v, elems)


@dataclass(frozen=True)
class SearchOutcome:
    modulus: int
    size: int
    status: str  # "found" | "not_found" | "inconclusive"
    result: DifferenceSet | None
    nodes: int

    def to_json(self) -> dict:
        return {
            "v": self.modulus,
            "K": self.size,
            "elements": list(self.result.elements) if self.result else [],
            "lambda": 1 if self.result else None,
            "status": self.status,
            "nodes": self.nodes,
        }


def _check_elements(modulus: int, elements: Iterable[int]) -> list[int]:
    if int(modulus) != modulus or modulus < 1:
        raise InvalidInputError(f"modulus must be a positive integer, got {modulus}")
    elems = [int(x) for x in elements]
    if not elems:
        raise InvalidInputError("empty element list")
    if any(x < 0 or x >= modulus for x in elems):
        raise InvalidInputError(f"elements must lie in [0, {modulus})")
    if len(set(elems)) != len(elems):
        raise InvalidInputError("duplicate elements")
    return elems


def difference_histogram(modulus: int, elements: Sequence[int]) -> Counter:
    return Counter((x - y) % modulus for x in elements for y in elements if x != y)


def verify_difference_set(modulus: int, elements: Sequence[int]) -> tuple[bool, Counter]:
    """True iff every occurring nonzero difference has multiplicity one.

    The histogram maps each difference residue to its count, so a set with
    a uniform multiplicity above one can be read off from it.
    """
    elems = _check_elements(modulus, elements)
    hist = difference_histogram(modulus, elems)
    return all(c == 1 for c in hist.values()), hist


def common_multiplicity(hist: Counter) -> int | None:
    counts = set(hist.values())
    return counts.pop() if len(counts) == 1 else None


def make_difference_set(modulus: int, elements: Sequence[int]) -> DifferenceSet:
    ok, hist = verify_difference_set(modulus, elements)
    lam = 1 if ok else common_multiplicity(hist)
    return DifferenceSet(modulus, tuple(sorted(int(x) for x in elements)), lam, ok)


def mian_chowla(n: int) -> list[int]:
    """First n terms of the greedy sequence with all pairwise differences distinct."""
    if int(n) != n or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n}")
    seq, diffs = [1], set()
    cand = 1
    while len(seq) < n:
        cand += 1
        new = {cand - a for a in seq}
        if new.isdisjoint(diffs):
            seq.append(cand)
            diffs |= new
    return seq


def mian_chowla_set(dim: int) -> DifferenceSet:
    """Mian-Chowla prefix of length ``dim`` on the smallest modulus 2 a_n + 1."""
    seq = mian_chowla(dim)
    return make_difference_set(2 * seq[-1] + 1, seq)


def power_of_two_set(d: int) -> DifferenceSet:
    """{1, 2, 4, ..., 2^(d-1)} modulo 2^d."""
    if int(d) != d or d < 1:
        raise InvalidInputError(f"d must be a positive integer, got {d}")
    if d > MAX_POWER_OF_TWO_EXPONENT:
        raise OverflowError(f"2^{d} exceeds the supported range (d <= {MAX_POWER_OF_TWO_EXPONENT})")
    ds = make_difference_set(2 ** d, [2 ** i for i in range(d)])
    assert ds.verified
    return ds


def search_difference_set(modulus: int, size: int, budget: int | None = 10_000_000) -> SearchOutcome:
    """Exhaustive backtracking for a lambda = 1 set of ``size`` residues mod ``modulus``.

    Each translation class is visited once: 0 is always included and the
    gap from 0 to the next element must be the strictly smallest cyclic gap
    (cyclic gaps are themselves differences, hence pairwise distinct).
    Elements are chosen in increasing order, so the first hit is the
    lexicographically smallest canonical set. ``budget`` caps visited nodes;
    running out yields status "inconclusive", never "not_found".
    """
    if int(modulus) != modulus or int(size) != size or size < 1:
        raise InvalidInputError("modulus and size must be positive integers")
    v, K = int(modulus), int(size)
    if v < K * (K - 1) + 1:
        raise InvalidInputError(f"modulus {v} < K(K-1)+1 = {K * (K - 1) + 1}: no lambda=1 set possible")
    if K == 1:
        return SearchOutcome(v, K, "found", make_difference_set(v, [0]), 1)

    nodes = 0
    used = [False] * v
    chosen = [0]

    class _Budget(Exception):
        pass

    def extend() -> bool:
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise _Budget
        if len(chosen) == K:
            g0 = chosen[1]
            # closing gap back to 0 must exceed the first gap as well
            return v - chosen[-1] > g0
        g0 = chosen[1] if len(chosen) > 1 else None
        lo = chosen[-1] + 1
        for x in range(lo, v):
            if g0 is not None and x - chosen[-1] <= g0:
                continue
            remaining = K - len(chosen) - 1
            # each later gap exceeds g0, and the wrap-around gap too
            if g0 is not None and x + remaining * (g0 + 1) + g0 + 1 > v:
                break
            new = []
            ok = True
            for y in chosen:
                for dlt in ((x - y) % v, (y - x) % v):
                    if used[dlt] or dlt in new:
                        ok = False
                        break
                    new.append(dlt)
                if not ok:
                    break
            if not ok:
                continue
            for dlt in new:
                used[dlt] = True
            chosen.append(x)
            if extend():
                return True
            chosen.pop()
            for dlt in new:
                used[dlt] = False
        return False

    try:
        found = extend()
    except _Budget:
        return SearchOutcome(v, K, "inconclusive", None, nodes)
    if found:
        ds = make_difference_set(v, chosen)
        return SearchOutcome(v, K, "found", ds, nodes)
    return SearchOutcome(v, K, "not_found", None, nodes)
