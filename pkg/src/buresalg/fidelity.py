"""Transition probability, Bures distance and the Gamma-set supremum.

Three independent numerical routes compute the same quantity:

* ``transition_probability``: trace norm of sqrt(D_rho) sqrt(D_nu);
* ``gamma_sup_svd``: singular values of sqrt(D_rho) z* sqrt(D_nu);
* ``gamma_sup_gns``: an explicit purification on C^n (x) C^n per block,
  with the supremum over the commutant unit ball {1 (x) W : ||W|| <= 1}
  evaluated through the partial-trace overlap operator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Element
from .forms import PositiveForm, _check, evaluate, inner_derive
from .errors import PositivityViolated
from .verdict import Verdict, check

ORACLE_REL = 1e-9


@dataclass(frozen=True)
class FidelityResult:
    sqrt_p: float
    bures_distance: float
    norms: tuple[float, float]

    @property
    def p(self) -> float:
        return self.sqrt_p ** 2


def _nuclear(m: np.ndarray) -> float:
    return float(np.linalg.svd(m, compute_uv=False).sum())


def _bures(n1: float, n2: float, sqrt_p: float) -> float:
    return float(np.sqrt(max(n1 + n2 - 2.0 * sqrt_p, 0.0)))


def transition_probability(nu: PositiveForm, rho: PositiveForm) -> FidelityResult:
    """sqrt(P) = sum over blocks of ||sqrt(D_rho) sqrt(D_nu)||_1."""
    _check(nu, rho.density)
    n1, n2 = nu.norm, rho.norm
    if n1 <= 0.0 or n2 <= 0.0:
        return FidelityResult(0.0, _bures(n1, n2, 0.0), (n1, n2))
    sn, sr = nu.density.sqrt(), rho.density.sqrt()
    sqrt_p = sum(_nuclear(r @ n) for r, n in zip(sr.blocks, sn.blocks))
    # round-off can push the value a hair past the Cauchy-Schwarz bound
    sqrt_p = min(sqrt_p, np.sqrt(n1 * n2))
    return FidelityResult(float(sqrt_p), _bures(n1, n2, sqrt_p), (n1, n2))


def sqrt_p(nu: PositiveForm, rho: PositiveForm) -> float:
    return transition_probability(nu, rho).sqrt_p


def bures_distance(nu: PositiveForm, rho: PositiveForm) -> float:
    return transition_probability(nu, rho).bures_distance


def gamma_sup_svd(nu: PositiveForm, rho: PositiveForm, z: Element) -> float:
    """sup |f(z)| over f in Gamma(nu, rho) as ||sqrt(D_rho) z* sqrt(D_nu)||_1."""
    _check(nu, z)
    sn, sr = nu.density.sqrt(), rho.density.sqrt()
    return sum(_nuclear(r @ zb.conj().T @ n)
               for r, zb, n in zip(sr.blocks, z.blocks, sn.blocks))


def purification(density: np.ndarray) -> np.ndarray:
    """Vector phi in C^n (x) C^n with <phi, (x (x) 1) phi> = trace(D x).

    phi = sum_i sqrt(lambda_i) e_i (x) conj(e_i) over an eigenbasis of D.
    """
    w, v = np.linalg.eigh(0.5 * (density + density.conj().T))
    # eigenvalues at round-off level are zeros; their square roots are not small
    w = np.where(w > 64 * np.finfo(float).eps * max(w.max(initial=0.0), 0.0), w, 0.0)
    n = density.shape[0]
    phi = np.zeros(n * n, dtype=complex)
    for lam, e in zip(w, v.T):
        phi += np.sqrt(lam) * np.kron(e, e.conj())
    return phi


def overlap_operator(phi_nu: np.ndarray, phi_rho: np.ndarray, z: np.ndarray) -> np.ndarray:
    """B on the second factor with <phi_nu, (z (x) W) phi_rho> = trace(W B)."""
    n = z.shape[0]
    left = np.kron(z, np.eye(n)) @ phi_rho
    # |left><phi_nu|, then trace out the first tensor factor
    outer = np.outer(left, phi_nu.conj()).reshape(n, n, n, n)
    return np.einsum("ijil->jl", outer)


def gns_gamma_value(nu: PositiveForm, rho: PositiveForm, z: Element, ws) -> complex:
    """f(z) for the Gamma-member given by commutant contractions ws (one per block)."""
    _check(nu, z)
    total = 0.0 + 0.0j
    for dn, dr, zb, w in zip(nu.density.blocks, rho.density.blocks, z.blocks, ws):
        b = overlap_operator(purification(dn), purification(dr), zb)
        total += np.trace(w @ b)
    return complex(total)


def gamma_sup_gns(nu: PositiveForm, rho: PositiveForm, z: Element) -> float:
    """sup over the commutant unit ball, blockwise sum of singular values of B."""
    _check(nu, z)
    total = 0.0
    for dn, dr, zb in zip(nu.density.blocks, rho.density.blocks, z.blocks):
        b = overlap_operator(purification(dn), purification(dr), zb)
        total += _nuclear(b)
    return float(total)


def optimal_contractions(nu: PositiveForm, rho: PositiveForm, z: Element) -> list[np.ndarray]:
    """Unitaries W_b attaining the commutant supremum: W = V U* from B = U S V*."""
    ws = []
    for dn, dr, zb in zip(nu.density.blocks, rho.density.blocks, z.blocks):
        b = overlap_operator(purification(dn), purification(dr), zb)
        u, _, vh = np.linalg.svd(b)
        ws.append(vh.conj().T @ u.conj().T)
    return ws


def gamma_sup(nu: PositiveForm, rho: PositiveForm, z: Element) -> float:
    """sup |f(z)| over Gamma(nu, rho), by both routes; they must agree."""
    a = gamma_sup_svd(nu, rho, z)
    b = gamma_sup_gns(nu, rho, z)
    scale = max(abs(a), abs(b), np.sqrt(nu.norm * rho.norm), 1e-300)
    if abs(a - b) > 10 * ORACLE_REL * scale:
        raise ArithmeticError(f"gamma_sup routes disagree: svd {a!r} vs gns {b!r}")
    return a


def check_uhlmann_formula(mu: PositiveForm, a: Element, b: Element,
                          tol: float = 1e-8) -> Verdict:
    """|sqrt P(mu^a, mu^b) - mu(a* b)| for a* b positive."""
    h = a.H @ b
    if not h.is_positive(1e-9 * (1.0 + h.norm())):
        raise PositivityViolated("a* b is not positive")
    lhs = sqrt_p(inner_derive(mu, a), inner_derive(mu, b))
    rhs = evaluate(mu, h)
    unit = max(1.0, mu.norm * a.norm() * b.norm())
    return check("uhlmann_formula", abs(lhs - rhs) / unit, tol, lhs=lhs, rhs=rhs.real)


@dataclass(frozen=True)
class BoundSlacks:
    """Non-negative slacks of the fidelity and distance bounds."""

    fidelity_lower: float  # P - |f(1)|^2
    fidelity_upper: float  # nu(a) rho(a^-1) - P
    distance_lower: float  # d_B - d_1 / c
    distance_upper: float  # sqrt(d_1) - d_B

    def as_dict(self) -> dict[str, float]:
        return {"fidelity_lower": self.fidelity_lower, "fidelity_upper": self.fidelity_upper,
                "distance_lower": self.distance_lower, "distance_upper": self.distance_upper}

    def worst(self) -> float:
        return min(self.as_dict().values())


def check_bounds(nu: PositiveForm, rho: PositiveForm, f_value: float, a: Element,
                 tol: float = 1e-9) -> tuple[Verdict, BoundSlacks]:
    """|f(1)|^2 <= P <= nu(a) rho(a^-1) and d_1 / c <= d_B <= sqrt(d_1)."""
    res = transition_probability(nu, rho)
    p = res.p
    upper = (evaluate(nu, a) * evaluate(rho, a.inv())).real
    d1 = (nu.density - rho.density).trace_norm()
    c = np.sqrt(nu.norm) + np.sqrt(rho.norm)
    db = res.bures_distance
    slacks = BoundSlacks(
        fidelity_lower=p - f_value ** 2,
        fidelity_upper=upper - p,
        distance_lower=db - (d1 / c if c > 0 else 0.0),
        distance_upper=np.sqrt(d1) - db,
    )
    scale = 1.0 + nu.norm + rho.norm
    return check("bounds", max(0.0, -slacks.worst()), tol * scale, **slacks.as_dict()), slacks
