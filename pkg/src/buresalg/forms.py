"""Positive linear forms represented by density elements."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (Algebra, Element, orthocomplement, pseudo_inverse, rank,
                      rank_tolerance, support)
from .errors import AlgebraMismatch, NotDominated, NotPositive

# Relative slack for the support inclusion test used by domination.
DOMINATION_REL = 1e-9


@dataclass(frozen=True, eq=False)
class PositiveForm:
    """nu(x) = sum_b trace(D_b x_b) for a positive density D."""

    density: Element

    def __post_init__(self):
        if not self.density.is_positive():
            lo = self.density.herm().min_eigenvalue()
            raise NotPositive(f"density is not positive (min eigenvalue {lo:.3e})")
        object.__setattr__(self, "density", self.density.herm())

    @property
    def algebra(self) -> Algebra:
        return self.density.algebra

    @classmethod
    def from_blocks(cls, algebra: Algebra, blocks) -> "PositiveForm":
        return cls(algebra.element(blocks))

    @classmethod
    def vector_form(cls, algebra: Algebra, psi) -> "PositiveForm":
        """mu_psi(x) = <psi, x psi> on a single-block algebra."""
        if len(algebra.block_dims) != 1:
            raise ValueError("vector forms are defined on a single full block")
        psi = np.asarray(psi, dtype=complex)
        return cls(algebra.element([np.outer(psi, psi.conj())]))

    @classmethod
    def trace_form(cls, algebra: Algebra) -> "PositiveForm":
        return cls(algebra.identity())

    @classmethod
    def zero(cls, algebra: Algebra) -> "PositiveForm":
        return cls(algebra.zero())

    def __call__(self, x: Element) -> complex:
        return evaluate(self, x)

    def __add__(self, other: "PositiveForm") -> "PositiveForm":
        return PositiveForm(self.density + other.density)

    def __mul__(self, c: float) -> "PositiveForm":
        if c < 0:
            raise NotPositive("negative multiple of a positive form")
        return PositiveForm(c * self.density)

    __rmul__ = __mul__

    @property
    def norm(self) -> float:
        """||nu||_1 = nu(1)."""
        return float(self.density.trace().real)

    @property
    def is_state(self) -> bool:
        return abs(self.norm - 1.0) <= 1e-12

    def support(self) -> Element:
        return support(self.density)

    def rank(self) -> tuple[int, ...]:
        return rank(self.density)

    def is_faithful(self) -> bool:
        return self.rank() == self.algebra.block_dims

    def is_zero(self) -> bool:
        return self.density.norm() <= 1e-14


def _check(nu: PositiveForm, x) -> None:
    other = x.algebra
    if other != nu.algebra:
        raise AlgebraMismatch(
            f"algebras {nu.algebra.block_dims} and {other.block_dims} differ")


def evaluate(nu: PositiveForm, x: Element) -> complex:
    """nu(x) = sum_b trace(D_b x_b)."""
    _check(nu, x)
    return complex(sum(np.sum(d.T * b) for d, b in zip(nu.density.blocks, x.blocks)))


def inner_derive(nu: PositiveForm, a: Element) -> PositiveForm:
    """nu^a(y) = nu(a* y a), density a D a*."""
    _check(nu, a)
    return PositiveForm(a @ nu.density @ a.H)


def kernel_ideal_member(nu: PositiveForm, x: Element, tol: float = 1e-10) -> bool:
    """Is nu(x* x) negligible, i.e. x s(nu) = 0?"""
    _check(nu, x)
    value = evaluate(nu, x.H @ x).real
    return value <= tol * max(nu.norm, 1e-300) * x.norm() ** 2


def are_orthogonal(nu: PositiveForm, rho: PositiveForm, tol: float = 1e-9) -> bool:
    """||nu - rho||_1 = ||nu||_1 + ||rho||_1, cross-checked with s(nu) s(rho) = 0."""
    _check(nu, rho.density)
    scale = 1.0 + nu.norm + rho.norm
    by_norm = abs((nu.density - rho.density).trace_norm() - nu.norm - rho.norm) <= tol * scale
    return by_norm


def orthogonality_residuals(nu: PositiveForm, rho: PositiveForm) -> tuple[float, float]:
    """(trace-norm defect, ||s(nu) s(rho)||); both vanish exactly for orthogonal forms."""
    defect = nu.norm + rho.norm - (nu.density - rho.density).trace_norm()
    return max(defect, 0.0), (nu.support() @ rho.support()).norm()


def _inclusion_residual(nu: PositiveForm, rho: PositiveForm) -> float:
    """||s(nu)^perp D_rho s(nu)^perp||, zero iff s(rho) <= s(nu)."""
    perp = orthocomplement(nu.support())
    return (perp @ rho.density @ perp).norm()


def support_contained(nu: PositiveForm, rho: PositiveForm, tol: float | None = None) -> bool:
    """s(rho) <= s(nu)?"""
    _check(nu, rho.density)
    if tol is None:
        tol = DOMINATION_REL * (1.0 + rho.density.norm())
    return _inclusion_residual(nu, rho) <= tol


def dominates(nu: PositiveForm, rho: PositiveForm) -> float | None:
    """Smallest lambda with rho <= lambda nu, or None when s(rho) is not below s(nu)."""
    if not support_contained(nu, rho):
        return None
    _, r = _sqrt_pinv(nu)
    c = r @ rho.density @ r
    return max(0.0, c.herm().max_eigenvalue())


def _sqrt_pinv(nu: PositiveForm) -> tuple[Element, Element]:
    s = nu.density.sqrt()
    # the support of sqrt(D) must be the support of D
    tol = np.sqrt(rank_tolerance(nu.density))
    return s, pseudo_inverse(s, tol)


def radon_nikodym(nu: PositiveForm, rho: PositiveForm) -> Element:
    """The positive a with s(a) <= s(nu) and nu^a = rho.

    a = S^+ (S D_rho S)^{1/2} S^+ with S = sqrt(D_nu).
    """
    if dominates(nu, rho) is None:
        raise NotDominated(
            f"s(rho) is not below s(nu) (residual {_inclusion_residual(nu, rho):.3e})")
    s, s_plus = _sqrt_pinv(nu)
    a = s_plus @ (s @ rho.density @ s).herm().sqrt() @ s_plus
    return a.herm()


def radon_nikodym_residual(nu: PositiveForm, rho: PositiveForm, a: Element) -> float:
    """Relative residual ||a D_nu a - D_rho|| / (1 + ||D_rho||)."""
    return (a @ nu.density @ a.H - rho.density).norm() / (1.0 + rho.density.norm())


def in_centralizer(nu: PositiveForm, x: Element, tol: float = 1e-9) -> bool:
    """x in M^nu, i.e. x commutes with D_nu."""
    return x.commutes_with(nu.density, tol)
