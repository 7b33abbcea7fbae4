"""Superdomains and the superfunctions living on them.

A superdomain is an open box in R^p together with q anticommuting
coordinates.  A section is a finite sum  sum_J f_J(x) t^J  with
expression-tree coefficients, the odd index set J stored as a bitmask.
Products follow the sign rule of the odd generators; repeated odd indices
annihilate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import Scalar, as_scalar
from .errors import DomainMismatch
from .expr import (
    ScalarExpr,
    add,
    const,
    diff_multi,
    is_zero_expr,
    mul,
    pow_,
    var,
)
from .multiindex import (
    iter_multi_indices,
    mask_degree,
    mask_members,
    merge_sign,
    multi_factorial,
    removal_sign,
)

Bound = Scalar | None
Interval = tuple[Bound, Bound]

_WINDOW = 3  # half-width used to sample axes without finite bounds


@dataclass(frozen=True)
class Superdomain:
    """An open box in R^p with q odd coordinates; `None` bounds are infinite."""

    p: int
    q: int
    box: tuple[Interval, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError("dimensions must be nonnegative")
        box = self.box
        if box is None:
            box = ((None, None),) * self.p
        if len(box) != self.p:
            raise ValueError("box must have one interval per even dimension")
        norm = []
        for lo, hi in box:
            lo = None if lo is None else as_scalar(lo)
            hi = None if hi is None else as_scalar(hi)
            if lo is not None and hi is not None and not lo < hi:
                raise ValueError(f"empty interval ({lo}, {hi})")
            norm.append((lo, hi))
        object.__setattr__(self, "box", tuple(norm))

    def contains(self, point: Sequence[Scalar]) -> bool:
        if len(point) != self.p:
            return False
        for x, (lo, hi) in zip(point, self.box):
            if lo is not None and not lo < x:
                return False
            if hi is not None and not x < hi:
                return False
        return True

    def _windows(self) -> list[tuple[Scalar, Scalar]]:
        out = []
        for lo, hi in self.box:
            if lo is None and hi is None:
                out.append((Fraction(-_WINDOW), Fraction(_WINDOW)))
            elif lo is None:
                out.append((hi - 2 * _WINDOW, hi))
            elif hi is None:
                out.append((lo, lo + 2 * _WINDOW))
            else:
                out.append((lo, hi))
        return out

    def grid_points(self, per_axis: int = 7, cap: int = 10000) -> list[tuple[Scalar, ...]]:
        """Deterministic interior sample grid, at most `cap` points."""
        if self.p == 0:
            return [()]
        while per_axis > 1 and per_axis ** self.p > cap:
            per_axis -= 1
        axes = []
        for lo, hi in self._windows():
            axes.append([
                lo + (hi - lo) * Fraction(k + 1, per_axis + 1) for k in range(per_axis)
            ])
        points = [()]
        for axis in axes:
            points = [pt + (x,) for pt in points for x in axis]
        return points

    def random_point(self, rng, denominator: int = 64) -> tuple[Scalar, ...]:
        """A rational point in the interior, driven by the supplied generator."""
        out = []
        for lo, hi in self._windows():
            t = Fraction(rng.randint(1, denominator - 1), denominator)
            out.append(lo + (hi - lo) * t)
        return tuple(out)


def product_domain(left: Superdomain, right: Superdomain) -> Superdomain:
    return Superdomain(left.p + right.p, left.q + right.q, left.box + right.box)


@dataclass(frozen=True)
class Section:
    """sum_J f_J(x) t^J with expression-tree coefficients."""

    domain: Superdomain
    components: Mapping[int, ScalarExpr] = field(default_factory=dict)

    def __post_init__(self):
        norm = {}
        for mask, expr in self.components.items():
            if mask >> self.domain.q:
                raise ValueError(f"odd index set {mask:b} exceeds {self.domain.q} generators")
            if expr.max_var() >= self.domain.p:
                raise ValueError("coefficient references a variable beyond the domain")
            if not is_zero_expr(expr):
                norm[mask] = expr
        object.__setattr__(self, "components", norm)

    def component(self, mask: int) -> ScalarExpr:
        from .expr import ZERO

        return self.components.get(mask, ZERO)

    def is_zero(self) -> bool:
        return not self.components

    def parity(self) -> int | None:
        seen = {mask_degree(mask) % 2 for mask in self.components}
        if len(seen) == 1:
            return seen.pop()
        return None

    def homogeneous_part(self, parity: int) -> "Section":
        return Section(
            self.domain,
            {m: e for m, e in self.components.items() if mask_degree(m) % 2 == parity},
        )

    def _require_same_domain(self, other: "Section") -> None:
        if self.domain != other.domain:
            raise DomainMismatch("sections live on different superdomains")

    def __add__(self, other):
        if isinstance(other, (int, float, Fraction)):
            other = constant_section(self.domain, other)
        if not isinstance(other, Section):
            return NotImplemented
        self._require_same_domain(other)
        out = dict(self.components)
        for mask, expr in other.components.items():
            out[mask] = add(out[mask], expr) if mask in out else expr
        return Section(self.domain, out)

    __radd__ = __add__

    def __neg__(self):
        return Section(
            self.domain, {m: mul(const(-1), e) for m, e in self.components.items()}
        )

    def __sub__(self, other):
        if isinstance(other, (int, float, Fraction)):
            other = constant_section(self.domain, other)
        if not isinstance(other, Section):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, Fraction)):
            c = const(other)
            return Section(
                self.domain, {m: mul(c, e) for m, e in self.components.items()}
            )
        if not isinstance(other, Section):
            return NotImplemented
        self._require_same_domain(other)
        out: dict[int, list[ScalarExpr]] = {}
        for m1, e1 in self.components.items():
            for m2, e2 in other.components.items():
                sign = merge_sign(m1, m2)
                if sign == 0:
                    continue
                term = mul(e1, e2) if sign == 1 else mul(const(-1), e1, e2)
                out.setdefault(m1 | m2, []).append(term)
        return Section(self.domain, {m: add(*terms) for m, terms in out.items()})

    def __rmul__(self, other):
        if isinstance(other, (int, float, Fraction)):
            return self * other
        return NotImplemented

    def partial_even(self, i: int) -> "Section":
        """d/dx_i, applied to every coefficient."""
        if not 0 <= i < self.domain.p:
            raise ValueError(f"even index {i} out of range")
        return Section(
            self.domain, {m: e.diff(i) for m, e in self.components.items()}
        )

    def odd_derivative(self, j: int) -> "Section":
        """Left derivative d/dt_j: kills components without t_j, signs the rest."""
        if not 0 <= j < self.domain.q:
            raise ValueError(f"odd index {j} out of range")
        bit = 1 << j
        out = {}
        for mask, expr in self.components.items():
            if mask & bit:
                sign = removal_sign(mask, j)
                out[mask ^ bit] = expr if sign == 1 else mul(const(-1), expr)
        return Section(self.domain, out)

    def taylor_polynomial(self, x0: Sequence[Scalar], order: int) -> "Section":
        """The polynomial with the same derivatives below `order` at x0.

        Components are sum over |nu|+|J| < order of
        (1/nu!) d^nu f_J(x0) (x-x0)^nu t^J; the difference to the original
        section has all mixed derivatives through order-1 vanishing at x0.
        """
        if not self.domain.contains(x0):
            raise DomainMismatch(f"expansion point {x0} is outside the box")
        if order < 0:
            raise ValueError("order must be nonnegative")
        x0 = [as_scalar(c) for c in x0]
        out = {}
        for mask, expr in self.components.items():
            room = order - mask_degree(mask)
            if room <= 0:
                continue
            terms = []
            for nu in iter_multi_indices(self.domain.p, room - 1):
                value = diff_multi(expr, nu).evaluate(x0)
                coeff = value / multi_factorial(nu)
                if coeff == 0:
                    continue
                factors = [const(coeff)]
                for i, n in enumerate(nu):
                    if n:
                        factors.append(pow_(add(var(i), const(-x0[i])), n))
                terms.append(mul(*factors))
            out[mask] = add(*terms)
        return Section(self.domain, out)

    def __str__(self) -> str:
        if not self.components:
            return "{}: 0"
        lines = []
        for mask in sorted(self.components):
            members = ",".join(str(j + 1) for j in mask_members(mask))
            lines.append(f"{{{members}}}: {self.components[mask]}")
        return "\n".join(lines)


def constant_section(domain: Superdomain, c) -> Section:
    return Section(domain, {0: const(c)})


def section_from_expr(domain: Superdomain, expr: ScalarExpr) -> Section:
    return Section(domain, {0: expr})


def even_coordinate(domain: Superdomain, i: int) -> Section:
    if not 0 <= i < domain.p:
        raise ValueError(f"even coordinate {i} out of range")
    return Section(domain, {0: var(i)})


def odd_coordinate(domain: Superdomain, j: int) -> Section:
    if not 0 <= j < domain.q:
        raise ValueError(f"odd coordinate {j} out of range")
    from .expr import ONE

    return Section(domain, {1 << j: ONE})


def coordinate_sections(domain: Superdomain) -> list[Section]:
    """The p + q coordinate sections, even ones first."""
    evens = [even_coordinate(domain, i) for i in range(domain.p)]
    odds = [odd_coordinate(domain, j) for j in range(domain.q)]
    return evens + odds


def tensor_sections(left: Section, right: Section) -> Section:
    """left (x) right on the product domain, with right's indices shifted."""
    dom = product_domain(left.domain, right.domain)
    shift = {i: var(i + left.domain.p) for i in range(right.domain.p)}
    out: dict[int, list[ScalarExpr]] = {}
    for m1, e1 in left.components.items():
        for m2, e2 in right.components.items():
            # Left indices all precede shifted right indices: no sign.
            mask = m1 | (m2 << left.domain.q)
            out.setdefault(mask, []).append(mul(e1, e2.substitute(shift)))
    return Section(dom, {m: add(*terms) for m, terms in out.items()})
