"""Finite-dimensional supercommutative algebras R + nilpotent, on explicit bases.

An algebra here is the ground field plus a graded nilpotent ideal, presented
on a finite monomial basis with exact rational structure constants.  The
supported presentations are Grassmann algebras, truncated polynomial algebras
R[x_1..x_k] (x) Lambda(t_1..t_l) / m^s, the dual and super dual numbers, even
scalar extensions A (x) B0, and raw multiplication tables (validated).

Elements are sparse coefficient vectors over the basis.  Coefficients are
exact `Fraction`s by default; `float` coefficients interoperate through the
normal numeric tower and comparisons then carry a relative tolerance.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import AlgebraMismatch, AxiomViolation, NotInvertible, ParityError
from .linalg import echelon
from .multiindex import SuperMonomial, iter_multi_indices, mask_degree, monomial_product

Scalar = Union[Fraction, float]

DEFAULT_MAX_DIM = 64


def as_scalar(value) -> Scalar:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, numbers.Rational):
        return Fraction(value)
    raise TypeError(f"unsupported scalar type {type(value).__name__}")


def scalars_close(a: Scalar, b: Scalar, tol: float = 1e-9) -> bool:
    """Exact comparison for rationals, relative tolerance once floats enter."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    scale = max(1.0, abs(a), abs(b))
    return abs(a - b) <= tol * scale


def format_scalar(c: Scalar) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return repr(c)


# ---------------------------------------------------------------------------
# Descriptors


@dataclass(frozen=True)
class Grassmann:
    q: int


@dataclass(frozen=True)
class TruncatedPoly:
    k: int
    l: int
    s: int


@dataclass(frozen=True)
class Dual:
    pass


@dataclass(frozen=True)
class SuperDual:
    pass


@dataclass(frozen=True)
class TensorEven:
    left: "Descriptor"
    right: "Descriptor"


@dataclass(frozen=True)
class Table:
    """Explicit presentation: parities per basis index, sparse products, unit index.

    `products` is a tuple of ((i, j), ((k, coeff), ...)) entries; missing pairs
    multiply to zero.  Use `table_descriptor` to build one from dicts.
    """

    parities: tuple[int, ...]
    products: tuple
    unit: int = 0
    labels: tuple[str, ...] | None = None


Descriptor = Union[Grassmann, TruncatedPoly, Dual, SuperDual, TensorEven, Table]


def table_descriptor(parities, products: Mapping, unit: int = 0, labels=None) -> Table:
    """Normalize dict-of-dicts structure constants into a hashable Table."""
    norm = []
    for (i, j), row in sorted(products.items()):
        entries = tuple(sorted((k, Fraction(c)) for k, c in row.items() if c))
        if entries:
            norm.append(((i, j), entries))
    return Table(
        parities=tuple(int(p) % 2 for p in parities),
        products=tuple(norm),
        unit=unit,
        labels=None if labels is None else tuple(labels),
    )


def poly_form(desc: Descriptor) -> TruncatedPoly | None:
    """The truncated-polynomial presentation behind a descriptor, if it has one."""
    if isinstance(desc, TruncatedPoly):
        return desc
    if isinstance(desc, Grassmann):
        return TruncatedPoly(0, desc.q, desc.q + 1)
    if isinstance(desc, Dual):
        return TruncatedPoly(1, 0, 2)
    if isinstance(desc, SuperDual):
        return TruncatedPoly(1, 1, 2)
    return None


def canonical(desc: Descriptor) -> tuple:
    pf = poly_form(desc)
    if pf is not None:
        return ("poly", pf.k, pf.l, pf.s)
    if isinstance(desc, TensorEven):
        return ("tensor", canonical(desc.left), canonical(desc.right))
    if isinstance(desc, Table):
        return ("table", desc.parities, desc.products, desc.unit)
    raise TypeError(f"not a descriptor: {desc!r}")


def format_descriptor(desc: Descriptor) -> str:
    if isinstance(desc, Dual):
        return "dual"
    if isinstance(desc, SuperDual):
        return "superdual"
    if isinstance(desc, Grassmann):
        return f"grassmann({desc.q})"
    if isinstance(desc, TruncatedPoly):
        return f"poly({desc.k},{desc.l},{desc.s})"
    if isinstance(desc, TensorEven):
        return f"tensor({format_descriptor(desc.left)},{format_descriptor(desc.right)})"
    return "table"


# ---------------------------------------------------------------------------
# Algebras


class WeilAlgebra:
    """An algebra on an explicit basis with its full multiplication table.

    Never constructed directly; use `make_algebra` or `tensor_even`.  The
    basis is enumerated deterministically (graded order for monomial
    presentations), index `unit` carries the identity, and every other basis
    element is nilpotent.  Instances are immutable; `height` and `width` are
    computed once at construction by iterating powers of the nilpotent ideal.
    """

    __slots__ = (
        "descriptor", "dim", "parities", "labels", "unit", "monomials",
        "ngens_even", "ngens_odd", "factors", "height", "width",
        "even_indices", "odd_indices", "_table", "_canon", "_monomial_index",
    )

    def __init__(self, *, descriptor, parities, labels, unit, table,
                 monomials=None, ngens_even=0, ngens_odd=0, factors=None):
        self.descriptor = descriptor
        self.dim = len(parities)
        self.parities = tuple(parities)
        self.labels = tuple(labels)
        self.unit = unit
        self.monomials = monomials
        self.ngens_even = ngens_even
        self.ngens_odd = ngens_odd
        self.factors = factors
        self._table = table
        self._canon = canonical(descriptor)
        self.even_indices = tuple(i for i, p in enumerate(self.parities) if p == 0)
        self.odd_indices = tuple(i for i, p in enumerate(self.parities) if p == 1)
        self._monomial_index = (
            None if monomials is None else {m: i for i, m in enumerate(monomials)}
        )
        self.height, self.width = self._nilpotent_profile()

    # -- construction internals ------------------------------------------

    def _nilpotent_profile(self) -> tuple[int, int]:
        nil = [i for i in range(self.dim) if i != self.unit]
        rows = []
        for i in nil:
            vec = [Fraction(0)] * self.dim
            vec[i] = Fraction(1)
            rows.append(vec)
        current = echelon(rows)
        dims = []
        while current:
            dims.append(len(current))
            nxt = []
            for i in nil:
                for vec in current:
                    nxt.append(self._mul_basis_vector(i, vec))
            new = echelon(nxt)
            if len(new) == len(current):
                raise AxiomViolation(
                    "nilpotency: the span complement of the unit is not nilpotent"
                )
            current = new
        height = len(dims)
        width = dims[0] - (dims[1] if len(dims) > 1 else 0) if dims else 0
        return height, width

    def _mul_basis_vector(self, i: int, vec: list[Fraction]) -> list[Fraction]:
        out = [Fraction(0)] * self.dim
        for j, cj in enumerate(vec):
            if not cj:
                continue
            for k, c in self._table[i][j].items():
                out[k] += c * cj
        return out

    # -- identity ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, WeilAlgebra) and self._canon == other._canon

    def __hash__(self) -> int:
        return hash(self._canon)

    def __repr__(self) -> str:
        return f"WeilAlgebra({format_descriptor(self.descriptor)}, dim={self.dim})"

    @property
    def is_purely_even(self) -> bool:
        return not self.odd_indices

    # -- element factories --------------------------------------------------

    def mul_basis(self, i: int, j: int) -> Mapping[int, Fraction]:
        return self._table[i][j]

    def zero(self) -> "WeilElement":
        return WeilElement(self, {})

    def one(self) -> "WeilElement":
        return WeilElement(self, {self.unit: Fraction(1)})

    def scalar_element(self, c) -> "WeilElement":
        return WeilElement(self, {self.unit: as_scalar(c)})

    def basis_element(self, k: int) -> "WeilElement":
        return WeilElement(self, {k: Fraction(1)})

    def from_coeffs(self, coeffs: Mapping[int, object]) -> "WeilElement":
        return WeilElement(self, {k: as_scalar(v) for k, v in coeffs.items()})

    def has_generators(self) -> bool:
        return self.monomials is not None

    def even_generator(self, i: int) -> "WeilElement":
        """The class of the generator x_{i+1}; zero when truncation kills it."""
        if self.monomials is None:
            raise AxiomViolation("algebra has no generator presentation")
        if not 0 <= i < self.ngens_even:
            raise IndexError(f"even generator index {i} out of range")
        mono = SuperMonomial(tuple(1 if a == i else 0 for a in range(self.ngens_even)), 0)
        idx = self._monomial_index.get(mono)
        return self.zero() if idx is None else self.basis_element(idx)

    def odd_generator(self, j: int) -> "WeilElement":
        if self.monomials is None:
            raise AxiomViolation("algebra has no generator presentation")
        if not 0 <= j < self.ngens_odd:
            raise IndexError(f"odd generator index {j} out of range")
        mono = SuperMonomial((0,) * self.ngens_even, 1 << j)
        idx = self._monomial_index.get(mono)
        return self.zero() if idx is None else self.basis_element(idx)

    def generators(self) -> list["WeilElement"]:
        evens = [self.even_generator(i) for i in range(self.ngens_even)]
        odds = [self.odd_generator(j) for j in range(self.ngens_odd)]
        return evens + odds


def make_algebra(desc: Descriptor, max_dim: int = DEFAULT_MAX_DIM) -> WeilAlgebra:
    """Build the algebra for a descriptor on its canonical basis.

    Raises AxiomViolation when a Table presentation fails validation or the
    dimension exceeds `max_dim`.
    """
    pf = poly_form(desc)
    if pf is not None:
        return _from_truncation(desc, pf, max_dim)
    if isinstance(desc, TensorEven):
        left = make_algebra(desc.left, max_dim)
        right = make_algebra(desc.right, max_dim)
        return tensor_even(left, right, max_dim)
    if isinstance(desc, Table):
        return _from_table(desc, max_dim)
    raise TypeError(f"not a descriptor: {desc!r}")


def _check_dim(dim: int, max_dim: int) -> None:
    if dim > max_dim:
        raise AxiomViolation(f"dimension {dim} exceeds the configured cap {max_dim}")


def _from_truncation(desc: Descriptor, pf: TruncatedPoly, max_dim: int) -> WeilAlgebra:
    k, l, s = pf.k, pf.l, pf.s
    if k < 0 or l < 0 or s < 1:
        raise AxiomViolation(f"invalid truncation parameters ({k},{l},{s})")
    monomials = []
    for mask in range(1 << l):
        room = s - 1 - mask_degree(mask)
        if room < 0:
            continue
        for nu in iter_multi_indices(k, room):
            monomials.append(SuperMonomial(nu, mask))
    monomials.sort(key=SuperMonomial.sort_key)
    _check_dim(len(monomials), max_dim)
    index = {m: i for i, m in enumerate(monomials)}
    table = []
    for a in monomials:
        row = []
        for b in monomials:
            sign, prod = monomial_product(a, b)
            if sign == 0 or prod.total_degree >= s:
                row.append({})
            else:
                row.append({index[prod]: Fraction(sign)})
        table.append(tuple(row))
    return WeilAlgebra(
        descriptor=desc,
        parities=[m.parity for m in monomials],
        labels=[m.label() for m in monomials],
        unit=index[SuperMonomial((0,) * k, 0)],
        table=tuple(table),
        monomials=tuple(monomials),
        ngens_even=k,
        ngens_odd=l,
    )


def tensor_even(left: WeilAlgebra, right: WeilAlgebra,
                max_dim: int = DEFAULT_MAX_DIM) -> WeilAlgebra:
    """A (x) B0 for purely even B0; parity and signs come from the left factor.

    Basis elements are the pairs (a_i, b_j), enumerated with the left index
    varying fastest.
    """
    if not right.is_purely_even:
        raise ParityError("right tensor factor must be purely even")
    dim = left.dim * right.dim
    _check_dim(dim, max_dim)

    def pair_index(a: int, b: int) -> int:
        return b * left.dim + a

    parities = [0] * dim
    labels = [""] * dim
    monomials = None
    if left.monomials is not None and right.monomials is not None:
        monomials = [None] * dim
    for b in range(right.dim):
        for a in range(left.dim):
            idx = pair_index(a, b)
            parities[idx] = left.parities[a]
            if monomials is not None:
                combined = SuperMonomial(
                    left.monomials[a].even + right.monomials[b].even,
                    left.monomials[a].odd | (right.monomials[b].odd << left.ngens_odd),
                )
                monomials[idx] = combined
                labels[idx] = combined.label()
            else:
                labels[idx] = f"({left.labels[a]})@({right.labels[b]})"

    table = [[None] * dim for _ in range(dim)]
    for b1 in range(right.dim):
        for a1 in range(left.dim):
            for b2 in range(right.dim):
                rrow = right.mul_basis(b1, b2)
                for a2 in range(left.dim):
                    lrow = left.mul_basis(a1, a2)
                    out: dict[int, Fraction] = {}
                    for ka, ca in lrow.items():
                        for kb, cb in rrow.items():
                            out[pair_index(ka, kb)] = ca * cb
                    table[pair_index(a1, b1)][pair_index(a2, b2)] = out
    return WeilAlgebra(
        descriptor=TensorEven(left.descriptor, right.descriptor),
        parities=parities,
        labels=labels,
        unit=pair_index(left.unit, right.unit),
        table=tuple(tuple(row) for row in table),
        monomials=None if monomials is None else tuple(monomials),
        ngens_even=left.ngens_even + right.ngens_even,
        ngens_odd=left.ngens_odd + right.ngens_odd,
        factors=(left, right),
    )


def _from_table(desc: Table, max_dim: int) -> WeilAlgebra:
    dim = len(desc.parities)
    _check_dim(dim, max_dim)
    if not 0 <= desc.unit < dim:
        raise AxiomViolation(f"unit index {desc.unit} out of range")
    table = [[{} for _ in range(dim)] for _ in range(dim)]
    for (i, j), entries in desc.products:
        if not (0 <= i < dim and 0 <= j < dim):
            raise AxiomViolation(f"product entry ({i},{j}) out of range")
        table[i][j] = {k: Fraction(c) for k, c in entries}
        for k in table[i][j]:
            if not 0 <= k < dim:
                raise AxiomViolation(f"product ({i},{j}) hits invalid index {k}")
    u = desc.unit
    p = desc.parities
    if p[u] != 0:
        raise AxiomViolation("unit: the unit basis element must be even")
    for j in range(dim):
        if table[u][j] != {j: Fraction(1)}:
            raise AxiomViolation(f"unit: 1*e{j} != e{j}")
        if table[j][u] != {j: Fraction(1)}:
            raise AxiomViolation(f"unit: e{j}*1 != e{j}")
    for i in range(dim):
        for j in range(dim):
            want = (p[i] + p[j]) % 2
            for k, c in table[i][j].items():
                if c and p[k] != want:
                    raise AxiomViolation(f"grading: e{i}*e{j} has a parity-{p[k]} term")
            sign = -1 if p[i] and p[j] else 1
            flipped = {k: sign * c for k, c in table[j][i].items() if c}
            if {k: c for k, c in table[i][j].items() if c} != flipped:
                raise AxiomViolation(f"supercommutativity: pair (e{i}, e{j})")
            if i != u and j != u and table[i][j].get(u):
                raise AxiomViolation(f"ideal: e{i}*e{j} has a unit component")
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                left: dict[int, Fraction] = {}
                for m, c in table[i][j].items():
                    for n, d in table[m][k].items():
                        left[n] = left.get(n, Fraction(0)) + c * d
                right: dict[int, Fraction] = {}
                for m, c in table[j][k].items():
                    for n, d in table[i][m].items():
                        right[n] = right.get(n, Fraction(0)) + c * d
                if {k2: v for k2, v in left.items() if v} != {k2: v for k2, v in right.items() if v}:
                    raise AxiomViolation(f"associativity: triple (e{i}, e{j}, e{k})")
    labels = desc.labels or tuple(
        "1" if i == u else f"b{i}" for i in range(dim)
    )
    return WeilAlgebra(
        descriptor=desc,
        parities=desc.parities,
        labels=labels,
        unit=u,
        table=tuple(tuple(row) for row in table),
    )


# ---------------------------------------------------------------------------
# Elements


class WeilElement:
    """A sparse coefficient vector over an algebra's basis."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: WeilAlgebra, coeffs: Mapping[int, Scalar]):
        self.algebra = algebra
        self.coeffs = {k: v for k, v in coeffs.items() if v != 0}

    def _require_same(self, other: "WeilElement") -> None:
        if self.algebra != other.algebra:
            raise AlgebraMismatch(
                f"elements of {self.algebra!r} and {other.algebra!r} cannot be combined"
            )

    # -- ring structure ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, WeilElement):
            self._require_same(other)
            out = dict(self.coeffs)
            for k, v in other.coeffs.items():
                out[k] = out.get(k, 0) + v
            return WeilElement(self.algebra, out)
        if isinstance(other, (int, float, Fraction)):
            return self + self.algebra.scalar_element(other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return WeilElement(self.algebra, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, Fraction)):
            other = self.algebra.scalar_element(other)
        if not isinstance(other, WeilElement):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, WeilElement):
            self._require_same(other)
            table = self.algebra._table
            out: dict[int, Scalar] = {}
            for i, ci in self.coeffs.items():
                row = table[i]
                for j, cj in other.coeffs.items():
                    cij = ci * cj
                    for k, c in row[j].items():
                        out[k] = out.get(k, 0) + c * cij
            return WeilElement(self.algebra, out)
        if isinstance(other, (int, float, Fraction)):
            c = as_scalar(other)
            return WeilElement(self.algebra, {k: v * c for k, v in self.coeffs.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, Fraction)):
            c = as_scalar(other)
            if c == 0:
                raise ZeroDivisionError("division of an element by scalar zero")
            if isinstance(c, Fraction):
                return self * (Fraction(1) / c)
            return self * (1.0 / c)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("element powers take a nonnegative integer exponent")
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    # -- structure ----------------------------------------------------------

    def coefficient(self, k: int) -> Scalar:
        return self.coeffs.get(k, Fraction(0))

    def body(self) -> Scalar:
        return self.coeffs.get(self.algebra.unit, Fraction(0))

    def soul(self) -> "WeilElement":
        out = dict(self.coeffs)
        out.pop(self.algebra.unit, None)
        return WeilElement(self.algebra, out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements, None for mixed or zero."""
        seen = {self.algebra.parities[k] for k in self.coeffs}
        if len(seen) == 1:
            return seen.pop()
        return None

    def homogeneous_part(self, parity: int) -> "WeilElement":
        return WeilElement(
            self.algebra,
            {k: v for k, v in self.coeffs.items() if self.algebra.parities[k] == parity},
        )

    def invert(self) -> "WeilElement":
        """Geometric-series inverse; exact for rational coefficients.

        a = b(1 + n/b) with nilpotent n, so 1/a = (1/b) sum_t (-n/b)^t, the
        sum stopping at the algebra height.
        """
        b = self.body()
        if b == 0:
            raise NotInvertible("element has zero body")
        if isinstance(b, Fraction):
            binv = Fraction(1) / b
        else:
            binv = 1.0 / b
        x = self.soul() * (-binv)
        acc = self.algebra.one()
        term = self.algebra.one()
        for _ in range(self.algebra.height):
            term = term * x
            if term.is_zero():
                break
            acc = acc + term
        return acc * binv

    # -- comparison and display ---------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeilElement):
            return NotImplemented
        return self.algebra == other.algebra and self.coeffs == other.coeffs

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def close_to(self, other: "WeilElement", tol: float = 1e-9) -> bool:
        self._require_same(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(
            scalars_close(self.coefficient(k), other.coefficient(k), tol) for k in keys
        )

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            label = self.algebra.labels[k]
            if k == self.algebra.unit:
                parts.append(format_scalar(c))
            else:
                parts.append(f"{format_scalar(c)}*{label}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"<{self} in {format_descriptor(self.algebra.descriptor)}>"


def elements_close(a: WeilElement, b: WeilElement, tol: float = 1e-9) -> bool:
    return a.close_to(b, tol)
