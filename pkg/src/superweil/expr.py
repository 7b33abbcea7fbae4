"""Smooth scalar expressions in finitely many even variables.

Expression trees are immutable and closed under differentiation: the
primitive set (rational constants, variables, sums, products, nonnegative
integer powers, exp, sin, cos, log, reciprocal) was chosen so that the
derivative of every node is again a tree, which the Taylor-style evaluators
require at arbitrary order.

Only constant folding and zero/one elimination happen on construction.
Equality of expressions is decided by evaluation at sample points, never
syntactically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import Scalar, as_scalar
from .errors import EvaluationDomainError


class ScalarExpr:
    """Base class; build nodes with the module factories or operators."""

    __slots__ = ()

    def diff(self, i: int) -> "ScalarExpr":
        raise NotImplementedError

    def evaluate(self, args: Sequence[Scalar]) -> Scalar:
        raise NotImplementedError

    def substitute(self, mapping: Mapping[int, "ScalarExpr"]) -> "ScalarExpr":
        raise NotImplementedError

    @property
    def is_polynomial(self) -> bool:
        raise NotImplementedError

    def max_var(self) -> int:
        """Largest variable index occurring, -1 when constant."""
        raise NotImplementedError

    # Building via operators; numbers coerce through `const`.

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return add(self, mul(const(-1), _coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), mul(const(-1), self))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __neg__(self):
        return mul(const(-1), self)

    def __pow__(self, n: int):
        return pow_(self, n)

    def __truediv__(self, other):
        if isinstance(other, (int, float, Fraction)):
            c = as_scalar(other)
            if c == 0:
                raise ZeroDivisionError("division by constant zero")
            one_over = Fraction(1) / c if isinstance(c, Fraction) else 1.0 / c
            return mul(const(one_over), self)
        return mul(self, inv(_coerce(other)))


def _coerce(value) -> ScalarExpr:
    if isinstance(value, ScalarExpr):
        return value
    return const(value)


@dataclass(frozen=True)
class Const(ScalarExpr):
    value: Scalar

    def diff(self, i):
        return ZERO

    def evaluate(self, args):
        return self.value

    def substitute(self, mapping):
        return self

    @property
    def is_polynomial(self):
        return True

    def max_var(self):
        return -1

    def __str__(self):
        return _format_const(self.value)


@dataclass(frozen=True)
class Var(ScalarExpr):
    index: int

    def diff(self, i):
        return ONE if i == self.index else ZERO

    def evaluate(self, args):
        return args[self.index]

    def substitute(self, mapping):
        return mapping.get(self.index, self)

    @property
    def is_polynomial(self):
        return True

    def max_var(self):
        return self.index

    def __str__(self):
        return f"x{self.index + 1}"


@dataclass(frozen=True)
class Sum(ScalarExpr):
    terms: tuple[ScalarExpr, ...]

    def diff(self, i):
        return add(*[t.diff(i) for t in self.terms])

    def evaluate(self, args):
        total: Scalar = Fraction(0)
        for t in self.terms:
            total = total + t.evaluate(args)
        return total

    def substitute(self, mapping):
        return add(*[t.substitute(mapping) for t in self.terms])

    @property
    def is_polynomial(self):
        return all(t.is_polynomial for t in self.terms)

    def max_var(self):
        return max(t.max_var() for t in self.terms)

    def __str__(self):
        return " + ".join(str(t) for t in self.terms).replace("+ -", "- ")


@dataclass(frozen=True)
class Prod(ScalarExpr):
    factors: tuple[ScalarExpr, ...]

    def diff(self, i):
        terms = []
        for k, f in enumerate(self.factors):
            rest = self.factors[:k] + (f.diff(i),) + self.factors[k + 1:]
            terms.append(mul(*rest))
        return add(*terms)

    def evaluate(self, args):
        # No short-circuit on zero: later factors must still be defined.
        total: Scalar = Fraction(1)
        for f in self.factors:
            total = total * f.evaluate(args)
        return total

    def substitute(self, mapping):
        return mul(*[f.substitute(mapping) for f in self.factors])

    @property
    def is_polynomial(self):
        return all(f.is_polynomial for f in self.factors)

    def max_var(self):
        return max(f.max_var() for f in self.factors)

    def __str__(self):
        return "*".join(_wrap(f, 2) for f in self.factors)


@dataclass(frozen=True)
class Pow(ScalarExpr):
    base: ScalarExpr
    exponent: int

    def diff(self, i):
        return mul(const(self.exponent), pow_(self.base, self.exponent - 1),
                   self.base.diff(i))

    def evaluate(self, args):
        return self.base.evaluate(args) ** self.exponent

    def substitute(self, mapping):
        return pow_(self.base.substitute(mapping), self.exponent)

    @property
    def is_polynomial(self):
        return self.base.is_polynomial

    def max_var(self):
        return self.base.max_var()

    def __str__(self):
        return f"{_wrap(self.base, 3)}^{self.exponent}"


@dataclass(frozen=True)
class Exp(ScalarExpr):
    arg: ScalarExpr

    def diff(self, i):
        return mul(Exp(self.arg), self.arg.diff(i))

    def evaluate(self, args):
        v = self.arg.evaluate(args)
        try:
            return math.exp(float(v))
        except OverflowError as err:
            raise EvaluationDomainError(f"exp overflow at argument {v}") from err

    def substitute(self, mapping):
        return exp(self.arg.substitute(mapping))

    @property
    def is_polynomial(self):
        return False

    def max_var(self):
        return self.arg.max_var()

    def __str__(self):
        return f"exp({self.arg})"


@dataclass(frozen=True)
class Sin(ScalarExpr):
    arg: ScalarExpr

    def diff(self, i):
        return mul(Cos(self.arg), self.arg.diff(i))

    def evaluate(self, args):
        return math.sin(float(self.arg.evaluate(args)))

    def substitute(self, mapping):
        return sin(self.arg.substitute(mapping))

    @property
    def is_polynomial(self):
        return False

    def max_var(self):
        return self.arg.max_var()

    def __str__(self):
        return f"sin({self.arg})"


@dataclass(frozen=True)
class Cos(ScalarExpr):
    arg: ScalarExpr

    def diff(self, i):
        return mul(const(-1), Sin(self.arg), self.arg.diff(i))

    def evaluate(self, args):
        return math.cos(float(self.arg.evaluate(args)))

    def substitute(self, mapping):
        return cos(self.arg.substitute(mapping))

    @property
    def is_polynomial(self):
        return False

    def max_var(self):
        return self.arg.max_var()

    def __str__(self):
        return f"cos({self.arg})"


@dataclass(frozen=True)
class Log(ScalarExpr):
    arg: ScalarExpr

    def diff(self, i):
        return mul(Inv(self.arg), self.arg.diff(i))

    def evaluate(self, args):
        v = self.arg.evaluate(args)
        if v <= 0:
            raise EvaluationDomainError(f"log of nonpositive value {v}")
        return math.log(float(v))

    def substitute(self, mapping):
        return log(self.arg.substitute(mapping))

    @property
    def is_polynomial(self):
        return False

    def max_var(self):
        return self.arg.max_var()

    def __str__(self):
        return f"log({self.arg})"


@dataclass(frozen=True)
class Inv(ScalarExpr):
    arg: ScalarExpr

    def diff(self, i):
        return mul(const(-1), Inv(self.arg), Inv(self.arg), self.arg.diff(i))

    def evaluate(self, args):
        v = self.arg.evaluate(args)
        if v == 0:
            raise EvaluationDomainError("reciprocal of zero")
        if isinstance(v, Fraction):
            return Fraction(1) / v
        return 1.0 / v

    def substitute(self, mapping):
        return inv(self.arg.substitute(mapping))

    @property
    def is_polynomial(self):
        return False

    def max_var(self):
        return self.arg.max_var()

    def __str__(self):
        return f"inv({self.arg})"


# ---------------------------------------------------------------------------
# Smart constructors


def const(value) -> Const:
    return Const(as_scalar(value))


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def var(index: int) -> Var:
    if index < 0:
        raise ValueError("variable index must be nonnegative")
    return Var(index)


def add(*terms: ScalarExpr) -> ScalarExpr:
    flat: list[ScalarExpr] = []
    constant: Scalar = Fraction(0)
    for t in terms:
        if isinstance(t, Sum):
            flat.extend(t.terms)
        else:
            flat.append(t)
    rest = []
    for t in flat:
        if isinstance(t, Const):
            constant = constant + t.value
        else:
            rest.append(t)
    if constant != 0:
        rest = [Const(constant)] + rest
    if not rest:
        return ZERO
    if len(rest) == 1:
        return rest[0]
    return Sum(tuple(rest))


def mul(*factors: ScalarExpr) -> ScalarExpr:
    flat: list[ScalarExpr] = []
    constant: Scalar = Fraction(1)
    for f in factors:
        if isinstance(f, Prod):
            flat.extend(f.factors)
        else:
            flat.append(f)
    rest = []
    for f in flat:
        if isinstance(f, Const):
            constant = constant * f.value
        else:
            rest.append(f)
    if constant == 0:
        return ZERO
    if constant != 1:
        rest = [Const(constant)] + rest
    if not rest:
        return ONE
    if len(rest) == 1:
        return rest[0]
    return Prod(tuple(rest))


def pow_(base: ScalarExpr, n: int) -> ScalarExpr:
    if not isinstance(n, int) or n < 0:
        raise ValueError("powers take a nonnegative integer exponent")
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Const):
        return Const(base.value ** n)
    return Pow(base, n)


def exp(a: ScalarExpr) -> ScalarExpr:
    if isinstance(a, Const) and a.value == 0:
        return ONE
    return Exp(a)


def sin(a: ScalarExpr) -> ScalarExpr:
    if isinstance(a, Const) and a.value == 0:
        return ZERO
    return Sin(a)


def cos(a: ScalarExpr) -> ScalarExpr:
    if isinstance(a, Const) and a.value == 0:
        return ONE
    return Cos(a)


def log(a: ScalarExpr) -> ScalarExpr:
    if isinstance(a, Const) and a.value == 1:
        return ZERO
    return Log(a)


def inv(a: ScalarExpr) -> ScalarExpr:
    if isinstance(a, Const) and isinstance(a.value, Fraction) and a.value != 0:
        return Const(Fraction(1) / a.value)
    return Inv(a)


def is_zero_expr(e: ScalarExpr) -> bool:
    return isinstance(e, Const) and e.value == 0


def differentiate(e: ScalarExpr, i: int) -> ScalarExpr:
    """Exact symbolic partial derivative with respect to variable i (0-based)."""
    return e.diff(i)


def diff_multi(e: ScalarExpr, nu: Sequence[int]) -> ScalarExpr:
    for i, n in enumerate(nu):
        for _ in range(n):
            e = e.diff(i)
    return e


def _format_const(value: Scalar) -> str:
    return str(value) if isinstance(value, Fraction) else repr(value)


def _wrap(e: ScalarExpr, parent_precedence: int) -> str:
    own = 1 if isinstance(e, Sum) else 2 if isinstance(e, Prod) else 3
    if isinstance(e, Const):
        v = e.value
        negative = v < 0
        fractional = isinstance(v, Fraction) and v.denominator != 1
        if (negative or fractional) and parent_precedence >= 3:
            return f"({e})"
        if negative and parent_precedence >= 2:
            # Keep leading constants bare: -3*x1 reads fine and reparses.
            return str(e)
        return str(e)
    if own < parent_precedence:
        return f"({e})"
    return str(e)
