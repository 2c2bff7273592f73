"""Variational upper estimators of sqrt(P) and the witnesses attaining them.

Every estimator here is bounded below by the oracle sqrt(P):

* geometric mean      sqrt(nu(x) rho(x^-1)),   x > 0 invertible;
* arithmetic mean     (nu(x) + rho(x^-1)) / 2;
* decompositions      sum_j sqrt(nu(e_j) rho(e_j)) over partitions of unity;
* double systems      sum_j (nu(y_j* y_j) + rho(x_j* x_j)) / 2 with sum_j y_j* x_j = 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import Element, spectral_resolution
from .errors import (ConfigError, InvalidDecomposition, NotInvertiblePositive,
                     TargetMismatch)
from .fidelity import sqrt_p
from .forms import PositiveForm, dominates, evaluate, radon_nikodym
from .verdict import Verdict, check

COND_LIMIT = 1e12


def _require_invertible(x: Element) -> None:
    if not x.is_invertible_positive():
        raise NotInvertiblePositive("expected an invertible positive element")


@dataclass(frozen=True)
class EstimateReport:
    """An estimator value next to the oracle value it bounds."""

    kind: str
    value: float
    oracle: float
    witness: object = None

    @property
    def gap(self) -> float:
        return self.value - self.oracle


# -- element estimators ---------------------------------------------------------


def _terms(nu: PositiveForm, rho: PositiveForm, x: Element) -> tuple[float, float]:
    _require_invertible(x)
    return evaluate(nu, x).real, evaluate(rho, x.inv()).real


def geometric_mean_value(nu: PositiveForm, rho: PositiveForm, x: Element) -> float:
    a, b = _terms(nu, rho, x)
    return float(np.sqrt(max(a * b, 0.0)))


def arithmetic_mean_value(nu: PositiveForm, rho: PositiveForm, x: Element) -> float:
    a, b = _terms(nu, rho, x)
    return 0.5 * (a + b)


def am_gm_identity_residual(nu: PositiveForm, rho: PositiveForm, x: Element) -> float:
    """|AM - GM - (sqrt(nu(x)) - sqrt(rho(x^-1)))^2 / 2|."""
    a, b = _terms(nu, rho, x)
    am, gm = 0.5 * (a + b), np.sqrt(max(a * b, 0.0))
    return abs(am - gm - 0.5 * (np.sqrt(max(a, 0.0)) - np.sqrt(max(b, 0.0))) ** 2)


def gradient(nu: PositiveForm, rho: PositiveForm, x: Element) -> Element:
    """G = (D_nu - x^-1 D_rho x^-1) / 2, so that dF(x)[y] = trace(G y)."""
    _require_invertible(x)
    xi = x.inv()
    return (0.5 * (nu.density - xi @ rho.density @ xi)).herm()


def objective(nu: PositiveForm, rho: PositiveForm, x: Element) -> float:
    return arithmetic_mean_value(nu, rho, x)


# -- descent --------------------------------------------------------------------


@dataclass(frozen=True)
class DescentConfig:
    max_iters: int = 2000
    step_rule: str = "backtracking"
    tol: float = 1e-8
    initial_step: float = 1.0
    x0: Element | None = None

    def __post_init__(self):
        if not isinstance(self.max_iters, (int, np.integer)) or self.max_iters < 0:
            raise ConfigError(f"max_iters must be a non-negative integer, got {self.max_iters!r}")
        if self.step_rule not in ("backtracking", "fixed"):
            raise ConfigError(f"unknown step rule {self.step_rule!r}")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if not self.initial_step > 0:
            raise ConfigError("initial_step must be positive")


@dataclass
class DescentTrace:
    iterates: list[tuple[float, float]] = field(default_factory=list)
    final_x: Element | None = None
    converged: bool = False
    reason: str = ""
    condition_numbers: list[float] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.iterates])

    @property
    def final_value(self) -> float:
        return self.iterates[-1][0]


def _condition(x: Element) -> float:
    w = x.eigvalsh()
    return float(w[-1] / w[0]) if w[0] > 0 else np.inf


def warm_start(nu: PositiveForm, rho: PositiveForm, eps: float = 1e-3) -> Element:
    """Regularized Radon-Nikodym element when rho << nu, else a balanced scalar."""
    alg = nu.algebra
    if dominates(nu, rho) is not None:
        return radon_nikodym(nu, rho) + eps * alg.identity()
    scale = np.sqrt(rho.norm / nu.norm) if nu.norm > 0 and rho.norm > 0 else 1.0
    return scale * alg.identity()


def minimize_arithmetic(nu: PositiveForm, rho: PositiveForm,
                        config: DescentConfig | None = None) -> DescentTrace:
    """Gradient descent on F(x) = (nu(x) + rho(x^-1)) / 2 over invertible x > 0.

    Steps are additive, x - eta G, with eta halved until the iterate stays
    positive definite and (for backtracking) F satisfies the Armijo condition.
    The descent stops with reason "infimum not attained" when the condition
    number of the iterate exceeds 1e12.
    """
    config = DescentConfig() if config is None else config
    if nu.is_zero() and rho.is_zero():
        raise ConfigError("both forms vanish")
    x = config.x0 if config.x0 is not None else warm_start(nu, rho)
    _require_invertible(x)
    trace = DescentTrace()
    value = objective(nu, rho, x)
    eta = config.initial_step
    for it in range(config.max_iters + 1):
        g = gradient(nu, rho, x)
        gnorm = g.fro()
        trace.iterates.append((value, gnorm))
        trace.condition_numbers.append(_condition(x))
        if gnorm <= config.tol:
            trace.converged, trace.reason = True, "gradient below tolerance"
            break
        if trace.condition_numbers[-1] > COND_LIMIT:
            trace.reason = "infimum not attained"
            break
        if it == config.max_iters:
            trace.reason = "iteration limit"
            break
        step = eta
        accepted = False
        for _ in range(80):
            cand = (x - step * g).herm()
            if cand.is_invertible_positive():
                cval = objective(nu, rho, cand)
                armijo = cval <= value - 1e-4 * step * gnorm ** 2
                if config.step_rule == "fixed" or armijo:
                    accepted = cval <= value + 1e-12 * (1 + abs(value))
                    if accepted:
                        break
            step *= 0.5
        if not accepted:
            trace.reason = "no descent step found"
            break
        x, value = cand, cval
        if config.step_rule == "backtracking":
            eta = 2.0 * step
    trace.final_x = x
    return trace


# -- decompositions and double systems -----------------------------------------


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Partition of unity into positive elements; orthoprojections when ``orthogonal``."""

    parts: tuple[Element, ...]
    orthogonal: bool = True

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise InvalidDecomposition("empty decomposition")
        alg = parts[0].algebra
        total = alg.zero()
        for i, p in enumerate(parts):
            if p.algebra != alg:
                raise InvalidDecomposition("parts from different algebras")
            if self.orthogonal and not p.is_projection(1e-8):
                raise InvalidDecomposition(f"part {i} is not a projection")
            if not p.is_positive(1e-9):
                raise InvalidDecomposition(f"part {i} is not positive")
            total = total + p
        if not total.allclose(alg.identity(), 1e-8 * len(parts)):
            raise InvalidDecomposition("parts do not sum to the identity")
        if self.orthogonal:
            for i in range(len(parts)):
                for j in range(i + 1, len(parts)):
                    if (parts[i] @ parts[j]).norm() > 1e-8:
                        raise InvalidDecomposition(f"parts {i} and {j} are not orthogonal")

    @classmethod
    def spectral(cls, x: Element, cluster_tol: float | None = None) -> "Decomposition":
        return cls(spectral_resolution(x, cluster_tol).projections)

    @property
    def projections(self) -> tuple[Element, ...]:
        return self.parts

    def split(self, weights: Sequence[float]) -> "Decomposition":
        """Convex splitting e_j -> (t_j e_j, (1 - t_j) e_j); a positive decomposition."""
        out = []
        for p, t in zip(self.parts, weights):
            out.extend([t * p, (1.0 - t) * p])
        return Decomposition(tuple(out), orthogonal=False)


def decomposition_value(nu: PositiveForm, rho: PositiveForm, d: Decomposition) -> float:
    return float(sum(np.sqrt(max(evaluate(nu, e).real * evaluate(rho, e).real, 0.0))
                     for e in d.parts))


def projection_decomposition_value(nu: PositiveForm, rho: PositiveForm,
                                   d: Decomposition | Sequence[Element]) -> float:
    if not isinstance(d, Decomposition):
        d = Decomposition(tuple(d))
    if not d.orthogonal:
        raise InvalidDecomposition("expected a decomposition into orthoprojections")
    return decomposition_value(nu, rho, d)


@dataclass(frozen=True, eq=False)
class DoubleSystem:
    """Pairs (y_j, x_j) with sum_j y_j* x_j = target."""

    pairs: tuple[tuple[Element, Element], ...]
    target: Element

    def __post_init__(self):
        pairs = tuple((y, x) for y, x in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise TargetMismatch("a double system needs at least one pair")
        if self.residual() > 1e-10 * (1.0 + self.target.norm()):
            raise TargetMismatch(f"sum y* x misses the target by {self.residual():.3e}")

    def residual(self) -> float:
        total = self.target.algebra.zero()
        for y, x in self.pairs:
            total = total + y.H @ x
        return (total - self.target).norm()

    @property
    def is_minimal(self) -> bool:
        return len(self.pairs) == 1


def double_system_cost(nu: PositiveForm, rho: PositiveForm, s: DoubleSystem) -> float:
    """sum_j (nu(y_j* y_j) + rho(x_j* x_j)) / 2 for any target."""
    return float(sum(0.5 * (evaluate(nu, y.H @ y).real + evaluate(rho, x.H @ x).real)
                     for y, x in s.pairs))


def double_system_value(nu: PositiveForm, rho: PositiveForm, s: DoubleSystem) -> float:
    if not s.target.allclose(s.target.algebra.identity(), 1e-10):
        raise TargetMismatch("double_system_value expects the target 1")
    return double_system_cost(nu, rho, s)


def minimal_pair(x: Element) -> DoubleSystem:
    """(sqrt(x), sqrt(x)^-1): its value is the arithmetic mean at x."""
    _require_invertible(x)
    r = x.sqrt()
    return DoubleSystem(((r, r.inv()),), x.algebra.identity())


def delta_scheme(nu: PositiveForm, rho: PositiveForm, d: Decomposition,
                 delta: float) -> DoubleSystem:
    """x_j = mu_j e_j, y_j = e_j / mu_j, mu_j = ((nu(e_j)+delta)/(rho(e_j)+delta))^(1/4)."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    pairs = []
    for e in d.parts:
        mu = ((evaluate(nu, e).real + delta) / (evaluate(rho, e).real + delta)) ** 0.25
        pairs.append((e / mu, mu * e))
    return DoubleSystem(tuple(pairs), d.parts[0].algebra.identity())


def snap_spectrum(x: Element, step: float) -> Element:
    """Round log-eigenvalues of x to multiples of ``step``: a finite-spectrum element."""
    return x.apply(lambda w: np.exp(step * np.round(np.log(w) / step)))


@dataclass(frozen=True)
class EpsilonSchemeResult:
    element: Element
    decomposition: Decomposition
    product: float  # nu(x) rho(x^-1)
    value: float  # sum_j sqrt(nu(e_j) rho(e_j))
    p: float
    eps: float
    step: float

    @property
    def ok(self) -> bool:
        return self.product < self.p + self.eps and self.value <= np.sqrt(self.p + self.eps)


def epsilon_scheme(nu: PositiveForm, rho: PositiveForm, eps: float,
                   x: Element | None = None) -> EpsilonSchemeResult:
    """Finite-spectrum element with nu(x) rho(x^-1) < P + eps and its spectral partition.

    ``x`` is any invertible element whose product is below P + eps; by default
    one is taken from :func:`buresalg.minimizers.near_minimizer`.  Its spectrum
    is then snapped to a geometric grid, refined until the bound still holds.
    """
    p = sqrt_p(nu, rho) ** 2
    if x is None:
        from .minimizers import near_minimizer
        x = near_minimizer(nu, rho, gap=eps / 4)
    step = 1.0
    for _ in range(60):
        xs = snap_spectrum(x, step)
        a, b = _terms(nu, rho, xs)
        if a * b < p + eps:
            break
        step *= 0.5
    d = Decomposition.spectral(xs)
    return EpsilonSchemeResult(xs, d, a * b, decomposition_value(nu, rho, d), p, eps, step)


# -- sequences -----------------------------------------------------------------


def sequence_criterion(nu: PositiveForm, rho: PositiveForm, xs: Sequence[Element],
                       tol: float = 1e-3) -> Verdict:
    """Do the arithmetic means of ``xs`` approach sqrt(P)?

    Limits are estimated by the last element.  The verdict passes when the
    means converge; ``details["equivalent"]`` records whether the split
    criterion, nu(x_n) -> sqrt(P) and rho(x_n^-1) -> sqrt(P), gives the same
    answer, as it must.
    """
    if not xs:
        raise ValueError("empty sequence")
    target = sqrt_p(nu, rho)
    a, b = _terms(nu, rho, xs[-1])
    mean = 0.5 * (a + b)
    scale = 1.0 + target
    mean_side = abs(mean - target) <= tol * scale
    split_side = abs(a - target) <= tol * scale and abs(b - target) <= tol * scale
    return Verdict("sequence_criterion", mean_side, abs(mean - target), tol * scale,
                   {"mean_limit": mean, "nu_limit": a, "rho_limit": b,
                    "sqrt_p": target, "mean_converges": mean_side,
                    "split_converges": split_side, "equivalent": mean_side == split_side})


def estimator_sandwich(value: float, oracle: float, tol: float = 1e-9) -> Verdict:
    return check("estimator_sandwich", max(0.0, oracle - value), tol * (1.0 + oracle),
                 value=value, oracle=oracle)
