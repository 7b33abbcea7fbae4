"""Multi-index bookkeeping for monomials x^nu * t^J.

Even exponents nu are plain integer tuples.  Odd index sets J are bitmasks:
bit j set means the (j+1)-th odd generator occurs in the product, and
products are always written with odd factors in increasing index order.
All indices are 0-based in code; surface syntax (x1, t2, {1,3}) is 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator


def degree(nu: tuple[int, ...]) -> int:
    return sum(nu)


def multi_factorial(nu: tuple[int, ...]) -> int:
    out = 1
    for n in nu:
        out *= math.factorial(n)
    return out


def bump(nu: tuple[int, ...], i: int) -> tuple[int, ...]:
    """nu + delta_i."""
    return nu[:i] + (nu[i] + 1,) + nu[i + 1:]


def iter_multi_indices(nvars: int, max_degree: int) -> Iterator[tuple[int, ...]]:
    """All nu in N^nvars with |nu| <= max_degree, in lexicographic order."""
    if nvars == 0:
        yield ()
        return
    for head in range(max_degree + 1):
        for tail in iter_multi_indices(nvars - 1, max_degree - head):
            yield (head,) + tail


def mask_from_indices(indices: Iterable[int]) -> int:
    mask = 0
    for j in indices:
        bit = 1 << j
        if mask & bit:
            raise ValueError(f"repeated odd index {j}")
        mask |= bit
    return mask


def mask_members(mask: int) -> tuple[int, ...]:
    out = []
    j = 0
    while mask >> j:
        if mask >> j & 1:
            out.append(j)
        j += 1
    return tuple(out)


def mask_degree(mask: int) -> int:
    return bin(mask).count("1")


def merge_sign(left: int, right: int) -> int:
    """Sign of reordering t^left * t^right into increasing order; 0 on overlap.

    Counts the transpositions needed to interleave the two increasing
    products, i.e. pairs (a in left, b in right) with a > b.
    """
    if left & right:
        return 0
    inversions = 0
    for a in mask_members(left):
        inversions += mask_degree(right & ((1 << a) - 1))
    return -1 if inversions % 2 else 1


def removal_sign(mask: int, j: int) -> int:
    """Sign picked up moving t_j to the front of the increasing product t^mask."""
    below = mask_degree(mask & ((1 << j) - 1))
    return -1 if below % 2 else 1


@dataclass(frozen=True)
class SuperMonomial:
    """A basis monomial x^even * t^odd in a fixed generator alphabet."""

    even: tuple[int, ...]
    odd: int

    @property
    def total_degree(self) -> int:
        return degree(self.even) + mask_degree(self.odd)

    @property
    def parity(self) -> int:
        return mask_degree(self.odd) % 2

    def sort_key(self) -> tuple:
        # Graded order: total degree, then even exponents lexicographically,
        # then the odd bitmask as an integer.
        return (self.total_degree, self.even, self.odd)

    def label(self) -> str:
        if self.total_degree == 0:
            return "1"
        parts = [f"x{i + 1}^{n}" for i, n in enumerate(self.even) if n > 0]
        parts += [f"t{j + 1}" for j in mask_members(self.odd)]
        return " ".join(parts)


def monomial_product(a: SuperMonomial, b: SuperMonomial) -> tuple[int, SuperMonomial]:
    """Product with supercommutative sign; sign 0 when an odd index repeats."""
    sign = merge_sign(a.odd, b.odd)
    if sign == 0:
        return 0, a
    even = tuple(x + y for x, y in zip(a.even, b.even))
    return sign, SuperMonomial(even, a.odd | b.odd)
