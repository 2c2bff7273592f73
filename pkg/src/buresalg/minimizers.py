"""Minimizing elements of F(x) = (nu(x) + rho(x^-1)) / 2.

x is minimizing iff D_nu = x^-1 D_rho x^-1, i.e. rho = nu^x.  Such an x
exists iff rho = nu^a for some invertible positive a; all minimizers then form
x + {k hermitian : k s(nu) = 0} intersected with the invertible positive cone.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .algebra import Element, rank_tolerance, support
from .errors import NotInvertiblePositive
from .fidelity import sqrt_p
from .forms import PositiveForm, are_orthogonal, evaluate, inner_derive, radon_nikodym

MIN_REL = 1e-9


def _require_invertible(*xs: Element) -> None:
    for x in xs:
        if not x.is_invertible_positive():
            raise NotInvertiblePositive("expected an invertible positive element")


def minimizing_residual(nu: PositiveForm, rho: PositiveForm, x: Element) -> float:
    """||D_nu - x^-1 D_rho x^-1|| / (1 + ||D_nu||)."""
    _require_invertible(x)
    xi = x.inv()
    return (nu.density - xi @ rho.density @ xi).norm() / (1.0 + nu.density.norm())


def is_minimizing_element(nu: PositiveForm, rho: PositiveForm, x: Element,
                          tol: float = MIN_REL) -> bool:
    return minimizing_residual(nu, rho, x) <= tol


@dataclass(frozen=True, eq=False)
class MinSetDescription:
    status: str  # "NonEmpty" or "Empty"
    reason: str = ""
    representative: Element | None = None
    unique: bool = False
    kernel_dimension: int = 0
    ranks: tuple[tuple[int, ...], tuple[int, ...]] = ((), ())

    @property
    def nonempty(self) -> bool:
        return self.status == "NonEmpty"


def _factor(d: np.ndarray, tol: float) -> np.ndarray:
    """V with V V* = d and orthogonal columns, one per eigenvalue above tol."""
    w, v = np.linalg.eigh(0.5 * (d + d.conj().T))
    keep = w > tol
    return v[:, keep] * np.sqrt(w[keep])


def _derived_block(dn: np.ndarray, dr: np.ndarray, tol_n: float, tol_r: float):
    """Invertible positive a with a dn a = dr on one block, or a reason for failure.

    With dn = Vn Vn* and dr = Vr Vr*, pick the unitary U making P = Vn* Vr U
    positive and set W = Vr U.  In the basis [Vn | N] (N spanning ker dn) the
    conditions a Vn = W fix every entry but the kernel corner, which is chosen
    so that the whole Gram matrix is positive definite.
    """
    n = dn.shape[0]
    vn, vr = _factor(dn, tol_n), _factor(dr, tol_r)
    r = vn.shape[1]
    if vr.shape[1] != r:
        return None, "support rank mismatch"
    if r == 0:
        return np.eye(n, dtype=complex), ""
    t = vn.conj().T @ vr
    sv = np.linalg.svd(t, compute_uv=False)
    if sv[-1] <= 1e-8 * max(sv[0], 1e-300):
        return None, "supports in degenerate position"
    q, p = scipy.linalg.polar(t, side="left")  # t = p q
    w = vr @ q.conj().T
    p = 0.5 * (p + p.conj().T)
    if r == n:
        basis = vn
        gram = p
    else:
        kern = scipy.linalg.null_space(vn.conj().T)
        basis = np.hstack([vn, kern])
        off = kern.conj().T @ w
        corner = off @ np.linalg.solve(p, off.conj().T) + np.eye(n - r)
        gram = np.block([[p, off.conj().T], [off, corner]])
    binv = np.linalg.inv(basis)
    a = binv.conj().T @ gram @ binv
    return 0.5 * (a + a.conj().T), ""


def derived_representative(nu: PositiveForm, rho: PositiveForm) -> tuple[Element | None, str]:
    """An invertible positive a with rho = nu^a, or (None, reason)."""
    alg = nu.algebra
    tn, tr = rank_tolerance(nu.density), rank_tolerance(rho.density)
    blocks = []
    for dn, dr in zip(nu.density.blocks, rho.density.blocks):
        a, reason = _derived_block(dn, dr, tn, tr)
        if a is None:
            return None, reason
        blocks.append(a)
    return alg.element(blocks), ""


def kernel_dimension(nu: PositiveForm) -> int:
    """Real dimension of {k hermitian : k s(nu) = 0}."""
    return int(sum((n - r) ** 2 for n, r in zip(nu.algebra.block_dims, nu.rank())))


def min_set(nu: PositiveForm, rho: PositiveForm, tol: float = 1e-8) -> MinSetDescription:
    """Decide whether the arithmetic-mean infimum is attained, and describe the minimizers."""
    ranks = (nu.rank(), rho.rank())
    kdim = kernel_dimension(nu)
    if nu.is_zero() and rho.is_zero():
        return MinSetDescription("NonEmpty", "", nu.algebra.identity(), kdim == 0, kdim, ranks)
    if are_orthogonal(nu, rho):
        return MinSetDescription("Empty", "orthogonal forms", ranks=ranks, kernel_dimension=kdim)
    if nu.is_faithful() != rho.is_faithful():
        return MinSetDescription("Empty", "faithfulness mismatch", ranks=ranks,
                                 kernel_dimension=kdim)
    a, reason = derived_representative(nu, rho)
    if a is None:
        return MinSetDescription("Empty", reason, ranks=ranks, kernel_dimension=kdim)
    if not a.is_invertible_positive() or minimizing_residual(nu, rho, a) > tol:
        return MinSetDescription("Empty", "no invertible inner derivation", ranks=ranks,
                                 kernel_dimension=kdim)
    return MinSetDescription("NonEmpty", "", a, nu.is_faithful(), kdim, ranks)


def canonical_representative(nu: PositiveForm, rho: PositiveForm) -> Element:
    """RN operator plus s(nu)^perp; minimizing whenever s(rho) = s(nu)."""
    s = nu.support()
    return radon_nikodym(nu, rho) + (nu.algebra.identity() - s)


# -- the inverse perturbation identity ----------------------------------------


@dataclass(frozen=True)
class PerturbationResiduals:
    inverse: float  # z^-1 - (x^-1 - x^-1 d x^-1 + Delta)
    alternative: float  # the two expressions for m(z, x)
    value: float  # the change of F split into linear and Delta parts
    delta_norm: float
    Delta_norm: float

    def worst(self) -> float:
        return max(self.inverse, self.alternative, self.value)


def perturbation_terms(z: Element, x: Element) -> tuple[Element, Element, Element]:
    """(delta, m, Delta) with m = (x^-1/2 d x^-1/2)(x^-1/2 z x^-1/2)^-1/2 x^-1/2."""
    _require_invertible(z, x)
    delta = z - x
    xr = x.apply(lambda w: w ** -0.5)
    c = (xr @ z @ xr).herm().apply(lambda w: w ** -0.5)
    m = (xr @ delta @ xr) @ c @ xr
    return delta, m, m.H @ m


def inverse_perturbation_identity(z: Element, x: Element, nu: PositiveForm | None = None,
                                  rho: PositiveForm | None = None) -> PerturbationResiduals:
    """Relative residuals of the identities linking z^-1, x^-1 and Delta(z, x).

    ``nu`` and ``rho`` enter only the value identity; both default to the trace.
    """
    alg = x.algebra
    nu = PositiveForm.trace_form(alg) if nu is None else nu
    rho = PositiveForm.trace_form(alg) if rho is None else rho
    delta, m, big = perturbation_terms(z, x)
    xi, zi = x.inv(), z.inv()
    scale = 1.0 + zi.norm() + xi.norm() + xi.norm() ** 2 * delta.norm()
    r1 = (zi - (xi - xi @ delta @ xi + big)).norm() / scale

    xr = x.apply(lambda w: w ** -0.5)
    c = (xr @ z @ xr).herm().apply(lambda w: w ** -0.5)
    m2 = c @ xr @ delta @ xi
    r2 = (m - m2).norm() / (1.0 + m.norm())

    lhs = 0.5 * (evaluate(nu, z) + evaluate(rho, zi)) - 0.5 * (evaluate(nu, x) + evaluate(rho, xi))
    rhs = 0.5 * (evaluate(nu, delta) - evaluate(rho, xi @ delta @ xi)) + 0.5 * evaluate(rho, big)
    vscale = 1.0 + abs(evaluate(nu, z)) + abs(evaluate(rho, zi)) + abs(evaluate(nu, x)) \
        + abs(evaluate(rho, xi))
    r3 = abs(lhs - rhs) / vscale
    return PerturbationResiduals(r1, r2, r3, delta.norm(), big.norm())


# -- approximate minimizers ----------------------------------------------------


def _balanced(nu: PositiveForm, rho: PositiveForm, x: Element) -> Element:
    """Rescale x so that nu(x) = rho(x^-1); then both means coincide."""
    a, b = evaluate(nu, x).real, evaluate(rho, x.inv()).real
    if a <= 0 or b <= 0:
        return x
    return np.sqrt(b / a) * x


def near_minimizer(nu: PositiveForm, rho: PositiveForm, gap: float = 1e-6) -> Element:
    """Invertible x > 0 with (nu(x) + rho(x^-1)) / 2 <= sqrt(P) + gap.

    Exact minimizers are returned when they exist.  Otherwise, with s = s(nu),
    a = RN(nu, rho^s) and q = s - s(a), the element x = a + eps q + t s^perp has
    nu(x) = sqrt(P) + eps nu(q) and rho(x^-1) = sqrt(P) + rho(s^perp) / t.
    eps and t are picked for the gap; when that needs a condition number past
    the invertibility tolerance, the gap is widened until x is invertible.
    """
    desc = min_set(nu, rho)
    if desc.nonempty:
        return desc.representative
    alg = nu.algebra
    one = alg.identity()
    if nu.is_zero() or rho.is_zero():
        # one term vanishes; push the other one below the gap with a scalar
        c = rho.norm / gap if nu.is_zero() else gap / max(nu.norm, 1e-300)
        return c * one
    s = nu.support()
    perp = one - s
    a = radon_nikodym(nu, inner_derive(rho, s))
    q = (s - support(a)).herm()
    nq, rp = evaluate(nu, q).real, evaluate(rho, perp).real
    unit = max(a.norm(), 1.0)
    x = None
    for widen in 10.0 ** np.arange(0, 12, 0.5):
        g = gap * widen
        eps = min(g / nq, unit) if nq > 0 else unit
        t = max(rp / g, unit) if rp > 0 else unit
        x = _balanced(nu, rho, a + eps * q + t * perp)
        if x.is_invertible_positive():
            break
    return x


@dataclass
class MinStructureCheck:
    """Outcome of the two directions of the structure theorem on one instance."""

    shifted_minimizing: list[bool] = field(default_factory=list)
    difference_in_kernel: list[bool] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.shifted_minimizing) and all(self.difference_in_kernel)


def kernel_direction(nu: PositiveForm, h: Element) -> Element:
    """Compress a hermitian h into s(nu)^perp: then k s(nu) = 0."""
    perp = nu.algebra.identity() - nu.support()
    return (perp @ h @ perp).herm()


def check_min_structure(nu: PositiveForm, rho: PositiveForm, x: Element,
                        directions, others=()) -> MinStructureCheck:
    """x + k stays minimizing for k in s(nu)^perp M_h s(nu)^perp; other minimizers differ by such k."""
    out = MinStructureCheck()
    s = nu.support()
    for h in directions:
        k = kernel_direction(nu, h)
        z = x + k
        # keep the shifted element invertible
        lo = z.min_eigenvalue()
        if lo <= 0:
            z = z + (1.0 - lo) * (nu.algebra.identity() - s)
        out.shifted_minimizing.append(is_minimizing_element(nu, rho, z))
    for z in others:
        out.difference_in_kernel.append(((z - x) @ s).norm() <= 1e-7 * (1 + z.norm()))
    return out


def reverse_minimizing(nu: PositiveForm, rho: PositiveForm, x: Element) -> tuple[bool, bool]:
    """(x minimizing for (nu, rho), x^-1 minimizing for (rho, nu))."""
    return is_minimizing_element(nu, rho, x), is_minimizing_element(rho, nu, x.inv())


def eqvalb_residuals(nu: PositiveForm, rho: PositiveForm, x: Element) -> tuple[float, float]:
    """|nu(x) - sqrt P| and |rho(x^-1) - sqrt P|."""
    s = sqrt_p(nu, rho)
    return abs(evaluate(nu, x).real - s), abs(evaluate(rho, x.inv()).real - s)

