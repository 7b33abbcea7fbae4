"""Exact Gaussian elimination over the rationals for span computations."""

from __future__ import annotations

from fractions import Fraction


def echelon(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Reduced row echelon basis of the span of `rows` (zero rows dropped)."""
    basis: list[list[Fraction]] = []
    pivots: list[int] = []
    for row in rows:
        row = list(row)
        for pivot, base in zip(pivots, basis):
            if row[pivot]:
                factor = row[pivot]
                for i in range(len(row)):
                    row[i] -= factor * base[i]
        lead = next((i for i, v in enumerate(row) if v), None)
        if lead is None:
            continue
        inv = Fraction(1) / row[lead]
        row = [v * inv for v in row]
        for pivot, base in zip(pivots, basis):
            if base[lead]:
                factor = base[lead]
                for i in range(len(base)):
                    base[i] -= factor * row[i]
        basis.append(row)
        pivots.append(lead)
    order = sorted(range(len(basis)), key=lambda i: pivots[i])
    return [basis[i] for i in order]


def rank(rows: list[list[Fraction]]) -> int:
    return len(echelon(rows))
