"""Differential calculus at algebra-valued points.

Covers the tangent-vector dictionary through the height-one algebra with one
even and one odd nilpotent (dual pair e, eps), derivations anchored at a
point, distributions supported at a point with finite order, and the
regrouping between points valued in A with scalars extended by a purely even
B0 and points valued in A (x) B0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import (
    DEFAULT_MAX_DIM,
    Scalar,
    SuperDual,
    TruncatedPoly,
    WeilAlgebra,
    WeilElement,
    as_scalar,
    canonical,
    make_algebra,
    tensor_even,
)
from .errors import AlgebraMismatch, DomainMismatch, ParityError
from .multiindex import (
    iter_multi_indices,
    mask_degree,
    mask_members,
    multi_factorial,
)
from .points import WeilPoint, evaluate
from .sections import Section, Superdomain

_SUPER_DUAL_CANON = canonical(SuperDual())


def super_dual_algebra() -> WeilAlgebra:
    return make_algebra(SuperDual())


def _super_dual_slots(algebra: WeilAlgebra) -> tuple[int, int]:
    """Basis indices of the even and odd nilpotent generators e, eps."""
    e = next(iter(algebra.even_generator(0).coeffs))
    eps = next(iter(algebra.odd_generator(0).coeffs))
    return e, eps


@dataclass(frozen=True)
class TangentVector:
    """A derivation at a base point: even coefficients over d/dx, odd over d/dt."""

    domain: Superdomain
    base: tuple[Scalar, ...]
    even_part: tuple[Scalar, ...]
    odd_part: tuple[Scalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(as_scalar(c) for c in self.base))
        object.__setattr__(self, "even_part", tuple(as_scalar(c) for c in self.even_part))
        object.__setattr__(self, "odd_part", tuple(as_scalar(c) for c in self.odd_part))
        if len(self.base) != self.domain.p:
            raise DomainMismatch("base point has the wrong dimension")
        if len(self.even_part) != self.domain.p or len(self.odd_part) != self.domain.q:
            raise DomainMismatch("tangent coefficients have the wrong dimension")
        if not self.domain.contains(self.base):
            raise DomainMismatch(f"base point {self.base} is outside the box")


def apoint_from_tangent(v: TangentVector) -> WeilPoint:
    """base + v0*e on even coordinates, v1*eps on odd ones."""
    algebra = super_dual_algebra()
    e = algebra.even_generator(0)
    eps = algebra.odd_generator(0)
    evens = [algebra.scalar_element(c) + e * w for c, w in zip(v.base, v.even_part)]
    odds = [eps * w for w in v.odd_part]
    return WeilPoint(v.domain, algebra, tuple(evens), tuple(odds))


def tangent_from_superdual(point: WeilPoint) -> TangentVector:
    if canonical(point.algebra.descriptor) != _SUPER_DUAL_CANON:
        raise AlgebraMismatch("tangent extraction needs the super dual numbers")
    e, eps = _super_dual_slots(point.algebra)
    return TangentVector(
        point.domain,
        point.base_point(),
        tuple(v.coefficient(e) for v in point.even_values),
        tuple(v.coefficient(eps) for v in point.odd_values),
    )


def tangent_pairing(v: TangentVector, section: Section) -> Scalar:
    """v acting on a section: the nilpotent coefficients of the evaluation."""
    point = apoint_from_tangent(v)
    e, eps = _super_dual_slots(point.algebra)
    value = evaluate(section, point)
    return value.coefficient(e) + value.coefficient(eps)


# ---------------------------------------------------------------------------
# Derivations anchored at a point


@dataclass(frozen=True)
class Derivation:
    """X(s) = sum_i f_i x(ds/dx_i) + sum_j F_j x(ds/dt_j) at the point x."""

    point: WeilPoint
    even_coeffs: tuple[WeilElement, ...]
    odd_coeffs: tuple[WeilElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "even_coeffs", tuple(self.even_coeffs))
        object.__setattr__(self, "odd_coeffs", tuple(self.odd_coeffs))
        dom = self.point.domain
        if len(self.even_coeffs) != dom.p or len(self.odd_coeffs) != dom.q:
            raise DomainMismatch("derivation needs one coefficient per coordinate")
        for c in self.even_coeffs + self.odd_coeffs:
            if c.algebra != self.point.algebra:
                raise AlgebraMismatch("derivation coefficient in the wrong algebra")

    def parity(self) -> int | None:
        """0 or 1 when homogeneous: even coefficients carry the parity of X,
        odd-slot coefficients the opposite."""
        candidates = set()
        for c in self.even_coeffs:
            if not c.is_zero():
                p = c.parity()
                if p is None:
                    return None
                candidates.add(p)
        for c in self.odd_coeffs:
            if not c.is_zero():
                p = c.parity()
                if p is None:
                    return None
                candidates.add(1 - p)
        if len(candidates) == 1:
            return candidates.pop()
        return None


def derivation_apply(x: Derivation, section: Section) -> WeilElement:
    if section.domain != x.point.domain:
        raise DomainMismatch("section and derivation live on different superdomains")
    out = x.point.algebra.zero()
    for i, f in enumerate(x.even_coeffs):
        if not f.is_zero():
            out = out + f * evaluate(section.partial_even(i), x.point)
    for j, big_f in enumerate(x.odd_coeffs):
        if not big_f.is_zero():
            out = out + big_f * evaluate(section.odd_derivative(j), x.point)
    return out


def derivation_from_values(point: WeilPoint,
                           values: Sequence[WeilElement]) -> Derivation:
    """The unique derivation taking the given values on the coordinates."""
    dom = point.domain
    if len(values) != dom.p + dom.q:
        raise DomainMismatch(f"expected {dom.p + dom.q} coordinate values")
    return Derivation(point, tuple(values[: dom.p]), tuple(values[dom.p:]))


# ---------------------------------------------------------------------------
# Distributions with support at a point


@dataclass(frozen=True)
class Distribution:
    """sum a_{nu,J} ev_x d^nu/dx d^J/dt, vanishing beyond the stated order.

    The odd operator applies d/dt_j for j in J in increasing index order
    innermost first, so pairing with the monomial (x-x0)^nu t^J yields
    exactly nu! a_{nu,J}.
    """

    domain: Superdomain
    support: tuple[Scalar, ...]
    order: int
    coefficients: Mapping[tuple[tuple[int, ...], int], Scalar]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(as_scalar(c) for c in self.support))
        norm = {}
        for (nu, mask), a in self.coefficients.items():
            nu = tuple(nu)
            if len(nu) != self.domain.p or mask >> self.domain.q:
                raise DomainMismatch(f"index ({nu}, {mask:b}) does not fit the domain")
            if sum(nu) + mask_degree(mask) > self.order:
                raise DomainMismatch(
                    f"coefficient at ({nu}, {mask:b}) exceeds order {self.order}"
                )
            a = as_scalar(a)
            if a != 0:
                norm[(nu, mask)] = a
        object.__setattr__(self, "coefficients", norm)
        if len(self.support) != self.domain.p:
            raise DomainMismatch("support has the wrong dimension")
        if not self.domain.contains(self.support):
            raise DomainMismatch(f"support {self.support} is outside the box")

    def apply(self, section: Section) -> Scalar:
        from .expr import diff_multi

        if section.domain != self.domain:
            raise DomainMismatch("section lives on a different superdomain")
        total: Scalar = Fraction(0)
        for (nu, mask), a in sorted(self.coefficients.items()):
            reduced = section
            for j in mask_members(mask):
                reduced = reduced.odd_derivative(j)
            value = diff_multi(reduced.component(0), nu).evaluate(self.support)
            total = total + a * value
        return total


def distribution_from_functional(omega: Sequence[Scalar],
                                 point: WeilPoint) -> Distribution:
    """The functional omega composed with evaluation at the point.

    Coefficients are extracted by pairing with the monomial sections
    (x-x0)^nu t^J, whose evaluations are soul^nu theta^J, divided by nu!.
    """
    algebra = point.algebra
    if len(omega) != algebra.dim:
        raise AlgebraMismatch("functional row does not match the algebra dimension")
    omega = [as_scalar(c) for c in omega]
    dom = point.domain
    souls = point.souls()
    height = algebra.height
    coeffs = {}
    top = 0
    for mask in range(1 << dom.q):
        if mask_degree(mask) > height:
            continue
        theta = algebra.one()
        for j in mask_members(mask):
            theta = theta * point.odd_values[j]
        for nu in iter_multi_indices(dom.p, height - mask_degree(mask)):
            elem = theta
            for i, n in enumerate(nu):
                for _ in range(n):
                    elem = elem * souls[i]
            if elem.is_zero():
                continue
            value = sum((omega[k] * c for k, c in elem.coeffs.items()), Fraction(0))
            value = value / multi_factorial(nu)
            if value != 0:
                coeffs[(nu, mask)] = value
                top = max(top, sum(nu) + mask_degree(mask))
    return Distribution(dom, point.base_point(), top, coeffs)


def distribution_to_point(v: Distribution, max_dim: int = DEFAULT_MAX_DIM):
    """Realize a distribution as (jet algebra, tautological point, functional).

    The algebra is the truncation at degree order+1, the point sends each
    coordinate to support + generator, and the functional row holds
    nu! a_{nu,J} against the monomial basis.  Feeding the result back into
    `distribution_from_functional` reproduces the distribution exactly.
    """
    dom = v.domain
    algebra = make_algebra(TruncatedPoly(dom.p, dom.q, v.order + 1), max_dim)
    evens = [
        algebra.scalar_element(c) + algebra.even_generator(i)
        for i, c in enumerate(v.support)
    ]
    odds = [algebra.odd_generator(j) for j in range(dom.q)]
    point = WeilPoint(dom, algebra, tuple(evens), tuple(odds))
    omega = []
    for mono in algebra.monomials:
        a = v.coefficients.get((mono.even, mono.odd), Fraction(0))
        omega.append(multi_factorial(mono.even) * a)
    return algebra, point, tuple(omega)


# ---------------------------------------------------------------------------
# Purely even scalar extension and the regrouping isomorphism


@dataclass(frozen=True)
class ClassicalWeilPoint:
    """A point of the flattened chart of A-valued points, with values in B0.

    The chart of the manifold of A-points of a superdomain U splits one real
    coordinate per pair (coordinate of U, basis element of the matching
    parity part of A).  `even_rows[i]` is indexed by `algebra.even_indices`,
    `odd_rows[j]` by `algebra.odd_indices`; entries live in the purely even
    algebra `scalars`.
    """

    domain: Superdomain
    algebra: WeilAlgebra
    scalars: WeilAlgebra
    even_rows: tuple[tuple[WeilElement, ...], ...]
    odd_rows: tuple[tuple[WeilElement, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "even_rows", tuple(tuple(r) for r in self.even_rows))
        object.__setattr__(self, "odd_rows", tuple(tuple(r) for r in self.odd_rows))
        if not self.scalars.is_purely_even:
            raise ParityError("scalar extension algebra must be purely even")
        if len(self.even_rows) != self.domain.p or len(self.odd_rows) != self.domain.q:
            raise DomainMismatch("one flattened row per coordinate required")
        ncols_even = len(self.algebra.even_indices)
        ncols_odd = len(self.algebra.odd_indices)
        for row in self.even_rows:
            if len(row) != ncols_even:
                raise DomainMismatch("even row length does not match the even basis")
        for row in self.odd_rows:
            if len(row) != ncols_odd:
                raise DomainMismatch("odd row length does not match the odd basis")
        for row in self.even_rows + self.odd_rows:
            for entry in row:
                if entry.algebra != self.scalars:
                    raise AlgebraMismatch("flattened value in the wrong algebra")
        base = self.base_point()
        if not self.domain.contains(base):
            raise DomainMismatch(f"base point {base} is outside the box")

    def _unit_column(self) -> int:
        return self.algebra.even_indices.index(self.algebra.unit)

    def base_point(self) -> tuple[Scalar, ...]:
        col = self._unit_column()
        return tuple(row[col].body() for row in self.even_rows)


def classical_from_point(point: WeilPoint, scalars: WeilAlgebra,
                         rows: Mapping[tuple[str, int, int], WeilElement] | None = None
                         ) -> ClassicalWeilPoint:
    """Flatten an A-valued point into the chart with scalar entries in B0.

    Each A-coefficient becomes the matching flattened coordinate, embedded as
    a scalar multiple of the unit of B0; `rows` entries override individual
    flattened values, keyed by ('x'|'t', coordinate, basis index of A).
    """
    algebra = point.algebra
    even_rows = [
        [scalars.scalar_element(v.coefficient(a)) for a in algebra.even_indices]
        for v in point.even_values
    ]
    odd_rows = [
        [scalars.scalar_element(v.coefficient(a)) for a in algebra.odd_indices]
        for v in point.odd_values
    ]
    if rows:
        for (kind, coord, basis_index), value in rows.items():
            if kind == "x":
                even_rows[coord][algebra.even_indices.index(basis_index)] = value
            else:
                odd_rows[coord][algebra.odd_indices.index(basis_index)] = value
    return ClassicalWeilPoint(
        point.domain, algebra, scalars,
        tuple(tuple(r) for r in even_rows), tuple(tuple(r) for r in odd_rows),
    )


def transit(x: ClassicalWeilPoint, max_dim: int = DEFAULT_MAX_DIM) -> WeilPoint:
    """Regroup flattened B0-values into a point valued in A (x) B0.

    The flattened value t at (coordinate i, basis element a of A) contributes
    a (x) t to coordinate i; on charts this is a pure reshuffle of
    coefficients and `transit_split` inverts it exactly.
    """
    tensor = tensor_even(x.algebra, x.scalars, max_dim)
    dim_left = x.algebra.dim

    def regroup(row: Sequence[WeilElement], indices: Sequence[int]) -> WeilElement:
        coeffs: dict[int, Scalar] = {}
        for a, entry in zip(indices, row):
            for b, c in entry.coeffs.items():
                coeffs[b * dim_left + a] = c
        return WeilElement(tensor, coeffs)

    evens = [regroup(row, x.algebra.even_indices) for row in x.even_rows]
    odds = [regroup(row, x.algebra.odd_indices) for row in x.odd_rows]
    return WeilPoint(x.domain, tensor, tuple(evens), tuple(odds))


def transit_split(point: WeilPoint) -> ClassicalWeilPoint:
    """Inverse reshuffle: read A (x) B0 coefficients back into flattened rows."""
    factors = point.algebra.factors
    if factors is None:
        raise AlgebraMismatch("point is not valued in a tensor algebra")
    left, right = factors
    dim_left = left.dim

    def split_value(v: WeilElement, indices: Sequence[int]) -> tuple[WeilElement, ...]:
        per_a: dict[int, dict[int, Scalar]] = {a: {} for a in indices}
        for idx, c in v.coeffs.items():
            a, b = idx % dim_left, idx // dim_left
            per_a[a][b] = c
        return tuple(WeilElement(right, per_a[a]) for a in indices)

    even_rows = [split_value(v, left.even_indices) for v in point.even_values]
    odd_rows = [split_value(v, left.odd_indices) for v in point.odd_values]
    return ClassicalWeilPoint(
        point.domain, left, right, tuple(even_rows), tuple(odd_rows)
    )
