"""The seminorm tau(z) = sqrt P(nu, rho^z) and the factorization formulas built on it.

tau(z) is the infimum of (nu(y* y) + rho(x* x)) / 2 over double systems with
sum y_j* x_j = z; the infimum over minimal systems (one pair) is the same
number, and both equal sup_{f in Gamma(nu, rho)} |f(z)|.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import Element
from .errors import SplitMismatch
from .estimators import DoubleSystem, arithmetic_mean_value, double_system_cost
from .fidelity import bures_distance, gamma_sup, sqrt_p
from .forms import PositiveForm, _check, evaluate, inner_derive
from .verdict import Verdict, check


@dataclass(frozen=True, eq=False)
class SeminormReport:
    tau: float
    upsilon_witness: tuple[Element, Element]
    gamma_witness_value: float
    witness_value: float

    @property
    def witness_gap(self) -> float:
        return self.witness_value - self.tau


def minimal_witness(nu: PositiveForm, rho: PositiveForm, z: Element,
                    gap: float = 1e-6) -> tuple[Element, Element]:
    """y = sqrt(g), x = sqrt(g)^-1 z for a near-minimizing g of the pair (nu, rho^z)."""
    from .minimizers import near_minimizer
    g = near_minimizer(nu, inner_derive(rho, z), gap=gap)
    y = g.sqrt()
    return y, y.inv() @ z


def tau(nu: PositiveForm, rho: PositiveForm, z: Element, gap: float = 1e-6) -> SeminormReport:
    _check(nu, z)
    value = sqrt_p(nu, inner_derive(rho, z))
    y, x = minimal_witness(nu, rho, z, gap)
    system = DoubleSystem(((y, x),), z)
    return SeminormReport(value, (y, x), gamma_sup(nu, rho, z),
                          double_system_cost(nu, rho, system))


def tau_value(nu: PositiveForm, rho: PositiveForm, z: Element) -> float:
    return sqrt_p(nu, inner_derive(rho, z))


def factorization_fidelity(nu: PositiveForm, rho: PositiveForm, a: Element, b: Element) -> float:
    """sqrt P(nu^a, rho^b); raises if it differs from the Gamma supremum at a* b."""
    value = sqrt_p(inner_derive(nu, a), inner_derive(rho, b))
    g = gamma_sup(nu, rho, a.H @ b)
    if abs(value - g) > 1e-9 * max(1.0, value, g):
        raise ArithmeticError(f"factorization fidelity {value!r} differs from gamma_sup {g!r}")
    return value


def factorization_residual(nu: PositiveForm, rho: PositiveForm, a: Element, b: Element) -> float:
    """Relative gap between sqrt P(nu^a, rho^b) and gamma_sup(nu, rho, a* b)."""
    value = sqrt_p(inner_derive(nu, a), inner_derive(rho, b))
    g = gamma_sup(nu, rho, a.H @ b)
    return abs(value - g) / max(value, g, 1e-300) if max(value, g) > 0 else 0.0


@dataclass(frozen=True)
class BuresVariationalReport:
    oracle: float  # d_B(nu^a, rho^b)^2
    witness_values: tuple[float, ...]

    @property
    def best(self) -> float:
        return max(self.witness_values) if self.witness_values else -np.inf

    @property
    def worst_excess(self) -> float:
        """Largest amount by which a witness exceeds the oracle (should be <= 0)."""
        return max((v - self.oracle for v in self.witness_values), default=0.0)

    @property
    def best_gap(self) -> float:
        return self.oracle - self.best


def bures_witness_value(nu: PositiveForm, rho: PositiveForm, a: Element, b: Element,
                        g: Element) -> float:
    """nu(a* a - y* y) + rho(b* b - x* x) with y = sqrt(g), x = sqrt(g)^-1 a* b."""
    y = g.sqrt()
    x = y.inv() @ (a.H @ b)
    return (evaluate(nu, a.H @ a - y.H @ y) + evaluate(rho, b.H @ b - x.H @ x)).real


def bures_variational(nu: PositiveForm, rho: PositiveForm, a: Element, b: Element,
                      g_witnesses: Sequence[Element]) -> BuresVariationalReport:
    oracle = bures_distance(inner_derive(nu, a), inner_derive(rho, b)) ** 2
    values = tuple(bures_witness_value(nu, rho, a, b, g) for g in g_witnesses)
    return BuresVariationalReport(oracle, values)


def subadditivity_check(nu: PositiveForm, rho: PositiveForm,
                        split: Sequence[tuple[Element, Element]], a: Element, b: Element,
                        tol: float = 1e-9) -> Verdict:
    """sqrt P(nu^a, rho^b) <= sum_j sqrt P(nu^{a_j}, rho^{b_j}) when sum a_j* b_j = a* b."""
    target = a.H @ b
    total = a.algebra.zero()
    for aj, bj in split:
        total = total + aj.H @ bj
    mismatch = (total - target).norm()
    if mismatch > 1e-10 * (1.0 + target.norm()):
        raise SplitMismatch(f"split misses a* b by {mismatch:.3e}")
    lhs = sqrt_p(inner_derive(nu, a), inner_derive(rho, b))
    rhs = sum(sqrt_p(inner_derive(nu, aj), inner_derive(rho, bj)) for aj, bj in split)
    return check("subadditivity", max(0.0, lhs - rhs), tol, lhs=lhs, rhs=rhs)


def random_gamma_value(rng: np.random.Generator, nu: PositiveForm, rho: PositiveForm,
                       z: Element) -> complex:
    """f(z) for a random Gamma-member realized by random commutant contractions."""
    from .fidelity import gns_gamma_value
    ws = []
    for n in nu.algebra.block_dims:
        w = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        w = w / max(np.linalg.norm(w, 2), 1e-300) * rng.uniform(0.0, 1.0)
        ws.append(w)
    return gns_gamma_value(nu, rho, z, ws)


@dataclass
class SeminormLawCheck:
    homogeneity: float = 0.0
    triangle_excess: float = 0.0


def seminorm_laws(nu: PositiveForm, rho: PositiveForm, z: Element, w: Element,
                  lam: complex) -> SeminormLawCheck:
    tz, tw = tau_value(nu, rho, z), tau_value(nu, rho, w)
    hom = abs(tau_value(nu, rho, lam * z) - abs(lam) * tz) / (1.0 + abs(lam) * tz)
    tri = tau_value(nu, rho, z + w) - tz - tw
    return SeminormLawCheck(hom, max(tri, 0.0))


def random_double_system(rng: np.random.Generator, z: Element, terms: int = 3,
                         scale: float = 1.0) -> DoubleSystem:
    """Random pairs with the last one, (c 1, (z - sum_j y_j* x_j) / c), closing the sum at z."""
    from .sampling import random_element
    alg = z.algebra
    pairs, total = [], alg.zero()
    for _ in range(terms - 1):
        y, x = scale * random_element(rng, alg), scale * random_element(rng, alg)
        pairs.append((y, x))
        total = total + y.H @ x
    c = float(rng.uniform(0.5, 2.0))
    pairs.append((c * alg.identity(), (z - total) / c))
    return DoubleSystem(tuple(pairs), z)


def arithmetic_at(nu: PositiveForm, rho: PositiveForm, z: Element, g: Element) -> float:
    return arithmetic_mean_value(nu, inner_derive(rho, z), g)
