"""Truncated formal-series families between superdomains.

A family assigns to each target coordinate a truncated series
sum f^k_{nu,J}(x) X^nu Theta^J with function coefficients on the source box.
Such families act on algebra-valued points of bounded height, and a family
comes from an actual superdomain morphism exactly when its coefficients
satisfy the derivative recursion  d_i f_{nu,J} = (nu_i + 1) f_{nu+delta_i,J},
which is checked numerically at sampled base points.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .algebra import Scalar, WeilElement
from .errors import DomainMismatch, NotSmooth, ParityError, TruncationError
from .expr import ZERO as _ZERO
from .expr import ScalarExpr, const, diff_multi, is_zero_expr, mul
from .multiindex import (
    bump,
    iter_multi_indices,
    mask_degree,
    mask_members,
    multi_factorial,
)
from .points import WeilPoint, SuperdomainMorphism
from .sections import Section, Superdomain

CoefficientMap = Mapping[tuple[tuple[int, ...], int], ScalarExpr]


@dataclass(frozen=True)
class FormalSeriesFamily:
    """One truncated series per target coordinate; even slots first.

    Slot k < target.p only carries even odd-index sets, slot k >= target.p
    only odd ones.  The zeroth coefficients of the even slots must land in
    the target box (checked on a sample grid).
    """

    source: Superdomain
    target: Superdomain
    order: int
    coefficients: tuple[CoefficientMap, ...]
    grid_per_axis: int = 7

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("truncation order must be nonnegative")
        m, n = self.target.p, self.target.q
        if len(self.coefficients) != m + n:
            raise DomainMismatch(f"expected {m + n} coefficient maps")
        norm = []
        for k, cmap in enumerate(self.coefficients):
            want = 0 if k < m else 1
            clean = {}
            for (nu, mask), f in cmap.items():
                nu = tuple(nu)
                if len(nu) != self.source.p or mask >> self.source.q:
                    raise DomainMismatch(
                        f"slot {k}: index ({nu}, {mask:b}) does not fit the source"
                    )
                if sum(nu) + mask_degree(mask) > self.order:
                    raise DomainMismatch(
                        f"slot {k}: coefficient at ({nu}, {mask:b}) exceeds order"
                    )
                if f.max_var() >= self.source.p:
                    raise DomainMismatch(
                        f"slot {k}: coefficient references a variable beyond the source"
                    )
                if mask_degree(mask) % 2 != want:
                    raise ParityError(
                        f"slot {k}: odd-index set {mask:b} has the wrong parity"
                    )
                if not is_zero_expr(f):
                    clean[(nu, mask)] = f
            norm.append(clean)
        object.__setattr__(self, "coefficients", tuple(norm))
        if any(lo is not None or hi is not None for lo, hi in self.target.box):
            for x in self.source.grid_points(self.grid_per_axis):
                image = tuple(
                    self.coefficients[k].get(((0,) * self.source.p, 0), _ZERO).evaluate(x)
                    for k in range(m)
                )
                if not self.target.contains(image):
                    raise DomainMismatch(
                        f"range condition fails: base image {image} of {x}"
                    )


def apply_series(family: FormalSeriesFamily, point: WeilPoint) -> WeilPoint:
    """Act on a point: slot k evaluates sum f^k_{nu,J}(base) soul^nu theta^J."""
    if point.domain != family.source:
        raise DomainMismatch("point does not live on the family source")
    algebra = point.algebra
    if algebra.height > family.order:
        raise TruncationError(
            f"algebra height {algebra.height} exceeds truncation order {family.order}"
        )
    base = point.base_point()
    souls = point.souls()
    power_cache: dict[tuple[int, ...], WeilElement] = {(0,) * family.source.p: algebra.one()}

    def soul_power(nu: tuple[int, ...]) -> WeilElement:
        if nu in power_cache:
            return power_cache[nu]
        i = next(idx for idx, n in enumerate(nu) if n > 0)
        prev = soul_power(nu[:i] + (nu[i] - 1,) + nu[i + 1:])
        out = prev * souls[i]
        power_cache[nu] = out
        return out

    values = []
    for cmap in family.coefficients:
        acc = algebra.zero()
        for (nu, mask) in sorted(cmap):
            elem = soul_power(nu)
            for j in mask_members(mask):
                elem = elem * point.odd_values[j]
                if elem.is_zero():
                    break
            if elem.is_zero():
                continue
            acc = acc + elem * cmap[(nu, mask)].evaluate(base)
        values.append(acc)
    m = family.target.p
    return WeilPoint(family.target, algebra, tuple(values[:m]), tuple(values[m:]))


def series_from_morphism(phi: SuperdomainMorphism, order: int) -> FormalSeriesFamily:
    """Taylor coefficients of the pullbacks: f^k_{nu,J} = (1/nu!) d^nu s_{k,J}."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    maps = []
    for pb in phi.pullbacks:
        cmap: dict[tuple[tuple[int, ...], int], ScalarExpr] = {}
        for mask, expr in pb.components.items():
            room = order - mask_degree(mask)
            for nu in iter_multi_indices(phi.source.p, room):
                coeff = mul(const(Fraction(1, multi_factorial(nu))), diff_multi(expr, nu))
                if not is_zero_expr(coeff):
                    cmap[(nu, mask)] = coeff
        maps.append(cmap)
    return FormalSeriesFamily(phi.source, phi.target, order, tuple(maps))


@dataclass(frozen=True)
class SmoothnessWitness:
    slot: int
    variable: int
    nu: tuple[int, ...]
    mask: int
    point: tuple[Scalar, ...]
    lhs: Scalar
    rhs: Scalar

    def __str__(self) -> str:
        members = ",".join(str(j + 1) for j in mask_members(self.mask))
        return (
            f"slot {self.slot + 1}, d/dx{self.variable + 1} of f[nu={self.nu}, "
            f"J={{{members}}}] at {tuple(map(float, self.point))}: "
            f"derivative {self.lhs} != recursion value {self.rhs}"
        )


@dataclass(frozen=True)
class SmoothnessReport:
    passed: bool
    checks: int
    witness: SmoothnessWitness | None


def smoothness_check(family: FormalSeriesFamily, samples: int = 50,
                     tol: float = 1e-7, seed: int = 0) -> SmoothnessReport:
    """Test the derivative recursion at sampled base points.

    For every slot, variable i, and index (nu, J) with |nu|+1+|J| within the
    truncation order, the residual  |d_i f_{nu,J} - (nu_i+1) f_{nu+delta_i,J}|
    must stay below tol * (1 + magnitude).  Missing coefficients count as
    zero, so a truncated family must carry all recursion consequences of its
    low-order terms to pass.
    """
    rng = random.Random(seed)
    points = [family.source.random_point(rng) for _ in range(max(1, samples))]
    p = family.source.p
    checks = 0
    for k, cmap in enumerate(family.coefficients):
        want = 0 if k < family.target.p else 1
        for mask in range(1 << family.source.q):
            if mask_degree(mask) % 2 != want:
                continue
            room = family.order - 1 - mask_degree(mask)
            if room < 0:
                continue
            for nu in iter_multi_indices(p, room):
                f_here = cmap.get((nu, mask), _ZERO)
                for i in range(p):
                    f_next = cmap.get((bump(nu, i), mask), _ZERO)
                    if is_zero_expr(f_here) and is_zero_expr(f_next):
                        continue
                    lhs_expr = f_here.diff(i)
                    factor = nu[i] + 1
                    for x in points:
                        lhs = lhs_expr.evaluate(x)
                        rhs = factor * f_next.evaluate(x)
                        checks += 1
                        scale = 1 + max(abs(lhs), abs(rhs))
                        if abs(lhs - rhs) > tol * scale:
                            return SmoothnessReport(
                                False, checks,
                                SmoothnessWitness(k, i, nu, mask, x, lhs, rhs),
                            )
    return SmoothnessReport(True, checks, None)


def morphism_from_series(family: FormalSeriesFamily, samples: int = 50,
                         tol: float = 1e-7, seed: int = 0) -> SuperdomainMorphism:
    """Rebuild the morphism from the order-zero coefficients.

    Requires the recursion check to pass; the pullback of coordinate k is
    sum_J f^k_{0,J} t^J.
    """
    report = smoothness_check(family, samples, tol, seed)
    if not report.passed:
        raise NotSmooth(str(report.witness))
    zero_nu = (0,) * family.source.p
    pullbacks = []
    for cmap in family.coefficients:
        comps = {
            mask: f for (nu, mask), f in cmap.items() if nu == zero_nu
        }
        pullbacks.append(Section(family.source, comps))
    return SuperdomainMorphism(family.source, family.target, tuple(pullbacks))
