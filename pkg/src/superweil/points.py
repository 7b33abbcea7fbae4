"""Algebra-valued points of superdomains and the evaluation morphism.

A point valued in an algebra A assigns an even A-element to every even
coordinate and an odd one to every odd coordinate; its body row is an honest
point of the box.  Evaluating a section at such a point means Taylor
expanding every coefficient around the body in the nilpotent parts:

    sum over nu, J of (1/nu!) d^nu f_J(base) * soul(x)^nu * theta^J.

The nu-sum stops at the algebra height because higher soul powers vanish,
so the expansion is finite by construction and exact for rational data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import Scalar, WeilAlgebra, WeilElement, as_scalar
from .errors import AlgebraMismatch, DomainMismatch, ParityError
from .expr import ScalarExpr, const, is_zero_expr, mul
from .morphism import AlgebraMorphism
from .multiindex import mask_members
from .sections import Section, Superdomain, coordinate_sections, product_domain, section_from_expr


@dataclass(frozen=True)
class WeilPoint:
    """Coordinate images (even values, odd values) with base point in the box."""

    domain: Superdomain
    algebra: WeilAlgebra
    even_values: tuple[WeilElement, ...]
    odd_values: tuple[WeilElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "even_values", tuple(self.even_values))
        object.__setattr__(self, "odd_values", tuple(self.odd_values))
        if len(self.even_values) != self.domain.p or len(self.odd_values) != self.domain.q:
            raise DomainMismatch(
                f"point needs {self.domain.p}+{self.domain.q} coordinates, got "
                f"{len(self.even_values)}+{len(self.odd_values)}"
            )
        for v in self.even_values + self.odd_values:
            if v.algebra != self.algebra:
                raise AlgebraMismatch("coordinate value lives in the wrong algebra")
        for i, v in enumerate(self.even_values):
            if not v.is_zero() and v.parity() != 0:
                raise ParityError(f"even coordinate {i} has odd components")
        for j, v in enumerate(self.odd_values):
            if not v.is_zero() and v.parity() != 1:
                raise ParityError(f"odd coordinate {j} has even components")
        base = self.base_point()
        if not self.domain.contains(base):
            raise DomainMismatch(f"base point {base} is outside the box")

    def base_point(self) -> tuple[Scalar, ...]:
        return tuple(v.body() for v in self.even_values)

    def souls(self) -> tuple[WeilElement, ...]:
        return tuple(v.soul() for v in self.even_values)


def real_point(domain: Superdomain, algebra: WeilAlgebra,
               coords: Sequence[Scalar]) -> WeilPoint:
    """The embedding of an ordinary point of the box: scalar evens, zero odds."""
    evens = [algebra.scalar_element(c) for c in coords]
    odds = [algebra.zero() for _ in range(domain.q)]
    return WeilPoint(domain, algebra, tuple(evens), tuple(odds))


def evaluate(section: Section, point: WeilPoint) -> WeilElement:
    """Evaluate a section at an algebra-valued point; a superalgebra morphism."""
    if section.domain != point.domain:
        raise DomainMismatch("section and point live on different superdomains")
    algebra = point.algebra
    base = point.base_point()
    souls = point.souls()
    height = algebra.height
    p = point.domain.p
    total = algebra.zero()

    def taylor(expr: ScalarExpr, i: int, soul_pow: WeilElement, fact: int,
               remaining: int) -> WeilElement:
        if is_zero_expr(expr):
            return algebra.zero()
        if i == p:
            return soul_pow * (expr.evaluate(base) / fact)
        acc = algebra.zero()
        cur_expr = expr
        cur_pow = soul_pow
        cur_fact = fact
        t = 0
        while True:
            acc = acc + taylor(cur_expr, i + 1, cur_pow, cur_fact, remaining - t)
            t += 1
            if t > remaining:
                break
            cur_pow = cur_pow * souls[i]
            if cur_pow.is_zero():
                break
            cur_expr = cur_expr.diff(i)
            if is_zero_expr(cur_expr):
                break
            cur_fact *= t
        return acc

    for mask in sorted(section.components):
        theta = algebra.one()
        for j in mask_members(mask):
            theta = theta * point.odd_values[j]
            if theta.is_zero():
                break
        if theta.is_zero():
            continue
        coeff = taylor(section.components[mask], 0, algebra.one(), 1, height)
        total = total + coeff * theta
    return total


def pushforward_algebra(rho: AlgebraMorphism, point: WeilPoint) -> WeilPoint:
    """Apply an algebra morphism to every coordinate; the base is unchanged."""
    if rho.source != point.algebra:
        raise AlgebraMismatch("morphism source does not match the point's algebra")
    return WeilPoint(
        point.domain,
        rho.target,
        tuple(rho.apply(v) for v in point.even_values),
        tuple(rho.apply(v) for v in point.odd_values),
    )


@dataclass(frozen=True)
class SuperdomainMorphism:
    """A map between superdomains, stored as coordinate pullbacks on the source.

    The first `target.p` pullbacks are even sections, the remaining
    `target.q` are odd.  The range condition (body images land in the target
    box) is checked on a deterministic sample grid, not proven; violations
    are reported with the witnessing grid point.
    """

    source: Superdomain
    target: Superdomain
    pullbacks: tuple[Section, ...]
    grid_per_axis: int = 7

    def __post_init__(self):
        object.__setattr__(self, "pullbacks", tuple(self.pullbacks))
        m, n = self.target.p, self.target.q
        if len(self.pullbacks) != m + n:
            raise DomainMismatch(f"expected {m + n} pullbacks, got {len(self.pullbacks)}")
        for k, pb in enumerate(self.pullbacks):
            if pb.domain != self.source:
                raise DomainMismatch(f"pullback {k} lives on the wrong superdomain")
            want = 0 if k < m else 1
            got = pb.parity()
            if got is not None and got != want:
                raise ParityError(f"pullback {k} has parity {got}, expected {want}")
            if got is None and not pb.is_zero():
                raise ParityError(f"pullback {k} is not parity homogeneous")
        if any(lo is not None or hi is not None for lo, hi in self.target.box):
            for x in self.source.grid_points(self.grid_per_axis):
                image = tuple(
                    self.pullbacks[k].component(0).evaluate(x) for k in range(m)
                )
                if not self.target.contains(image):
                    raise DomainMismatch(
                        f"range condition fails: base image {image} of {x} "
                        "is outside the target box"
                    )

    @classmethod
    def identity(cls, domain: Superdomain) -> "SuperdomainMorphism":
        return cls(domain, domain, tuple(coordinate_sections(domain)))

    def even_pullbacks(self) -> tuple[Section, ...]:
        return self.pullbacks[: self.target.p]

    def odd_pullbacks(self) -> tuple[Section, ...]:
        return self.pullbacks[self.target.p:]


def pushforward_morphism(phi: SuperdomainMorphism, point: WeilPoint) -> WeilPoint:
    """The induced map on algebra-valued points: evaluate every pullback."""
    if point.domain != phi.source:
        raise DomainMismatch("point does not live on the morphism source")
    values = [evaluate(pb, point) for pb in phi.pullbacks]
    m = phi.target.p
    return WeilPoint(phi.target, point.algebra, tuple(values[:m]), tuple(values[m:]))


def substitute_section(section: Section, phi: SuperdomainMorphism) -> Section:
    """Pull a section on phi's target back along phi.

    Even coordinates substitute through a finite Taylor expansion in the
    nilpotent section parts (those with at least two odd factors), odd
    coordinates substitute directly; the expansion terminates on its own
    because products of enough nilpotent parts vanish.
    """
    if section.domain != phi.target:
        raise DomainMismatch("section does not live on the morphism target")
    source = phi.source
    m = phi.target.p
    evens = phi.even_pullbacks()
    odds = phi.odd_pullbacks()
    bodies = {i: evens[i].component(0) for i in range(m)}
    nils = [evens[i] - section_from_expr(source, bodies[i]) for i in range(m)]
    one_section = Section(source, {0: const(1)})
    bound = source.q  # soul parts carry >= 2 odd factors each; q caps the sum

    def expand(expr: ScalarExpr, k: int, nil_pow: Section, fact: int,
               remaining: int) -> Section:
        if is_zero_expr(expr):
            return Section(source, {})
        if k == m:
            composed = mul(const(Fraction(1, fact)), expr.substitute(bodies))
            return nil_pow * section_from_expr(source, composed)
        acc = Section(source, {})
        cur_expr = expr
        cur_pow = nil_pow
        cur_fact = fact
        t = 0
        while True:
            acc = acc + expand(cur_expr, k + 1, cur_pow, cur_fact, remaining - t)
            t += 1
            if t > remaining:
                break
            cur_pow = cur_pow * nils[k]
            if cur_pow.is_zero():
                break
            cur_expr = cur_expr.diff(k)
            if is_zero_expr(cur_expr):
                break
            cur_fact *= t
        return acc

    result = Section(source, {})
    for mask, expr in section.components.items():
        theta = one_section
        for l in mask_members(mask):
            theta = theta * odds[l]
            if theta.is_zero():
                break
        if theta.is_zero():
            continue
        result = result + expand(expr, 0, one_section, 1, bound) * theta
    return result


def compose_morphisms(psi: SuperdomainMorphism,
                      phi: SuperdomainMorphism) -> SuperdomainMorphism:
    """psi after phi; pullbacks compose contravariantly."""
    if phi.target != psi.source:
        raise DomainMismatch("morphism chain does not line up")
    pullbacks = tuple(substitute_section(pb, phi) for pb in psi.pullbacks)
    return SuperdomainMorphism(phi.source, psi.target, pullbacks)


def product_pair(x: WeilPoint, y: WeilPoint) -> WeilPoint:
    """The point on the product superdomain with concatenated coordinates."""
    if x.algebra != y.algebra:
        raise AlgebraMismatch("product factors must share the algebra")
    dom = product_domain(x.domain, y.domain)
    return WeilPoint(
        dom, x.algebra, x.even_values + y.even_values, x.odd_values + y.odd_values
    )


def product_split(z: WeilPoint, left: Superdomain,
                  right: Superdomain) -> tuple[WeilPoint, WeilPoint]:
    if z.domain != product_domain(left, right):
        raise DomainMismatch("point does not live on the stated product")
    x = WeilPoint(left, z.algebra, z.even_values[: left.p], z.odd_values[: left.q])
    y = WeilPoint(right, z.algebra, z.even_values[left.p:], z.odd_values[left.q:])
    return x, y
