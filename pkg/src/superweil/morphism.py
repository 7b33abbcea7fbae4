"""Structure-preserving maps between algebras.

A morphism is stored by its images on the source basis.  For truncated
polynomial presentations it is built from generator images, extended
multiplicatively, and checked to kill the defining relations (every monomial
of the truncation degree must map to zero).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    DEFAULT_MAX_DIM,
    TruncatedPoly,
    WeilAlgebra,
    WeilElement,
    make_algebra,
    poly_form,
)
from .errors import AlgebraMismatch, NotWellDefined, ParityError, UnsupportedPresentation
from .multiindex import SuperMonomial, iter_multi_indices, mask_degree, mask_members


@dataclass(frozen=True)
class AlgebraMorphism:
    source: WeilAlgebra
    target: WeilAlgebra
    images: tuple[WeilElement, ...]

    def apply(self, element: WeilElement) -> WeilElement:
        if element.algebra != self.source:
            raise AlgebraMismatch("element does not live in the morphism source")
        out = self.target.zero()
        for k, c in element.coeffs.items():
            out = out + self.images[k] * c
        return out

    __call__ = apply

    def validate(self) -> None:
        """Exhaustive check: unit, parity, multiplicativity on all basis pairs."""
        src, tgt = self.source, self.target
        if self.images[src.unit] != tgt.one():
            raise NotWellDefined("unit does not map to unit")
        for i in range(src.dim):
            img = self.images[i]
            if not img.is_zero() and img.parity() != src.parities[i]:
                raise ParityError(f"image of basis element {i} has wrong parity")
        for i in range(src.dim):
            for j in range(src.dim):
                via_source = tgt.zero()
                for k, c in src.mul_basis(i, j).items():
                    via_source = via_source + self.images[k] * c
                if via_source != self.images[i] * self.images[j]:
                    raise NotWellDefined(
                        f"not multiplicative on basis pair ({i}, {j})"
                    )


def identity_morphism(algebra: WeilAlgebra) -> AlgebraMorphism:
    return AlgebraMorphism(
        algebra, algebra, tuple(algebra.basis_element(i) for i in range(algebra.dim))
    )


def body_morphism(algebra: WeilAlgebra) -> AlgebraMorphism:
    """The projection onto the ground field, killing the nilpotent ideal."""
    reals = make_algebra(TruncatedPoly(0, 0, 1))
    images = tuple(
        reals.one() if i == algebra.unit else reals.zero() for i in range(algebra.dim)
    )
    return AlgebraMorphism(algebra, reals, images)


def make_morphism(source: WeilAlgebra, target: WeilAlgebra,
                  generator_images: list[WeilElement]) -> AlgebraMorphism:
    """Morphism from generator images, for truncated-polynomial sources.

    Images must be parity-homogeneous with zero body (the generators are
    nilpotent).  Well-definedness is certified by mapping every monomial of
    the truncation degree to zero; odd squares vanish automatically.
    """
    if source.monomials is None or poly_form(source.descriptor) is None:
        raise UnsupportedPresentation(
            "generator images require a truncated-polynomial source"
        )
    k, l = source.ngens_even, source.ngens_odd
    s = poly_form(source.descriptor).s
    if len(generator_images) != k + l:
        raise NotWellDefined(
            f"expected {k + l} generator images, got {len(generator_images)}"
        )
    for img in generator_images:
        if img.algebra != target:
            raise AlgebraMismatch("generator image lives in the wrong algebra")
    even_images = generator_images[:k]
    odd_images = generator_images[k:]
    for i, img in enumerate(even_images):
        if not img.is_zero() and img.parity() != 0:
            raise ParityError(f"image of even generator x{i + 1} is not even")
        if img.body() != 0:
            raise NotWellDefined(
                f"image of nilpotent generator x{i + 1} has nonzero body"
            )
    for j, img in enumerate(odd_images):
        if not img.is_zero() and img.parity() != 1:
            raise ParityError(f"image of odd generator t{j + 1} is not odd")

    def monomial_image(mono: SuperMonomial) -> WeilElement:
        out = target.one()
        for i, n in enumerate(mono.even):
            for _ in range(n):
                out = out * even_images[i]
                if out.is_zero():
                    return out
        for j in mask_members(mono.odd):
            out = out * odd_images[j]
            if out.is_zero():
                return out
        return out

    # Relations: every monomial of total degree s in the generators dies.
    for mask in range(1 << l):
        room = s - mask_degree(mask)
        if room < 0:
            continue
        for nu in iter_multi_indices(k, room):
            if sum(nu) + mask_degree(mask) != s:
                continue
            mono = SuperMonomial(nu, mask)
            if not monomial_image(mono).is_zero():
                raise NotWellDefined(
                    f"relation not killed: image of {mono.label()} is nonzero"
                )
    images = tuple(monomial_image(m) for m in source.monomials)
    return AlgebraMorphism(source, target, images)


def morphism_from_basis_images(source: WeilAlgebra, target: WeilAlgebra,
                               images: list[WeilElement]) -> AlgebraMorphism:
    """Morphism given directly on the basis; validated exhaustively."""
    if len(images) != source.dim:
        raise NotWellDefined(f"expected {source.dim} basis images")
    for img in images:
        if img.algebra != target:
            raise AlgebraMismatch("basis image lives in the wrong algebra")
    rho = AlgebraMorphism(source, target, tuple(images))
    rho.validate()
    return rho


def compose(rho: AlgebraMorphism, sigma: AlgebraMorphism) -> AlgebraMorphism:
    """rho after sigma."""
    if sigma.target != rho.source:
        raise AlgebraMismatch("morphism chain does not line up")
    return AlgebraMorphism(
        sigma.source, rho.target, tuple(rho.apply(img) for img in sigma.images)
    )


def common_refinement(a1: WeilAlgebra, a2: WeilAlgebra,
                      max_dim: int = DEFAULT_MAX_DIM):
    """A single truncation covering both algebras, with its two projections.

    Both inputs must carry truncated-polynomial presentations; the cover is
    the truncation with the larger generator counts and degree, and each
    projection keeps the matching generators and kills the extra ones.
    """
    pf1 = poly_form(a1.descriptor)
    pf2 = poly_form(a2.descriptor)
    if pf1 is None or pf2 is None:
        raise UnsupportedPresentation(
            "common refinement needs truncated-polynomial presentations"
        )
    k = max(pf1.k, pf2.k)
    l = max(pf1.l, pf2.l)
    s = max(pf1.s, pf2.s)
    cover = make_algebra(TruncatedPoly(k, l, s), max_dim)

    def projection(target: WeilAlgebra, pf: TruncatedPoly) -> AlgebraMorphism:
        gens = [
            target.even_generator(i) if i < pf.k else target.zero() for i in range(k)
        ]
        gens += [
            target.odd_generator(j) if j < pf.l else target.zero() for j in range(l)
        ]
        return make_morphism(cover, target, gens)

    return cover, projection(a1, pf1), projection(a2, pf2)
