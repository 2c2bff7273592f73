"""Seeded verification suites, one per checked statement.

A suite draws ``trials`` independent instances from ``spawn(seed, trials)``,
runs its checks and aggregates them with max/counter reductions only, so the
result does not depend on evaluation order.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .algebra import AbelianSubalgebra, Algebra, generated_abelian_algebra
from .constructions import (faithful_m2_instance, flip_instance, jump_instance,
                            tilted_pure_instance)
from .errors import UnknownSuite
from .estimators import (Decomposition, arithmetic_mean_value, decomposition_value,
                         delta_scheme, double_system_value, epsilon_scheme,
                         geometric_mean_value, gradient, minimal_pair, objective)
from .fidelity import (check_bounds, check_uhlmann_formula, gamma_sup_gns, gamma_sup_svd,
                       sqrt_p, transition_probability)
from .forms import PositiveForm, evaluate, inner_derive, radon_nikodym
from .minimizers import (inverse_perturbation_identity, min_set,
                         minimizing_residual)
from .sampling import (SHAPES, random_form, random_hermitian, random_invertible_positive,
                       random_positive, random_projection_partition,
                       random_spread_positive, random_ranks,
                       random_unitary, random_vector, spawn)
from .seminorms import (bures_variational, factorization_residual, minimal_witness,
                        random_gamma_value)
from .subalgebras import (aux0_family_check, bloch_sweep, coarsen, intersect,
                          is_minimizing_subalgebra, lemma_opt_condition,
                          least_minimizing_algebra, random_kernel_corner,
                          restricted_transition_probability, same_algebra)


@dataclass
class CheckStats:
    count: int = 0
    failures: int = 0
    worst_residual: float = 0.0
    tolerance: float = 0.0

    def as_dict(self) -> dict:
        return {"count": self.count, "failures": self.failures,
                "worst_residual": self.worst_residual, "tolerance": self.tolerance}


class Tally:
    """Per-check worst residuals, failure records and class counters."""

    max_failures = 20

    def __init__(self, tol: float | None = None):
        self.tol = tol
        self.checks: dict[str, CheckStats] = {}
        self.failures: list[dict] = []
        self.counts: Counter = Counter()

    def add(self, name: str, residual: float, tolerance: float, trial: int) -> bool:
        tolerance = self.tol if self.tol is not None else tolerance
        residual = float(residual)
        ok = bool(residual <= tolerance)  # NaN fails
        st = self.checks.setdefault(name, CheckStats(tolerance=float(tolerance)))
        st.count += 1
        st.worst_residual = max(st.worst_residual, residual) if residual == residual else float("inf")
        if not ok:
            st.failures += 1
            if len(self.failures) < self.max_failures:
                self.failures.append({"check": name, "trial": trial, "residual": residual,
                                      "tolerance": float(tolerance)})
        return ok

    def flag(self, name: str, ok: bool, trial: int) -> bool:
        """Boolean check: residual 1 on failure, tolerance 0."""
        st = self.checks.setdefault(name, CheckStats())
        st.count += 1
        if not ok:
            st.failures += 1
            st.worst_residual = 1.0
            if len(self.failures) < self.max_failures:
                self.failures.append({"check": name, "trial": trial, "residual": 1.0,
                                      "tolerance": 0.0})
        return bool(ok)


@dataclass
class SuiteReport:
    name: str
    trials: int
    seed: int
    checks: dict[str, CheckStats] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.failures == 0 for c in self.checks.values())

    def worst(self, check: str) -> float:
        return self.checks[check].worst_residual

    def as_dict(self) -> dict:
        return {"suite": self.name, "trials": self.trials, "seed": self.seed,
                "passed": self.passed,
                "checks": {k: v.as_dict() for k, v in sorted(self.checks.items())},
                "counts": dict(sorted(self.counts.items())), "failures": self.failures}


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300) if max(abs(a), abs(b)) > 0 else 0.0


# -- instance streams (shared with the bounds suite) ---------------------------


def oracle_instances(trials: int, seed: int) -> Iterator[tuple[str, PositiveForm, PositiveForm]]:
    rngs = spawn(seed, trials * len(SHAPES))
    for si, (name, dims) in enumerate(SHAPES.items()):
        alg = Algebra(dims)
        for rng in rngs[si * trials:(si + 1) * trials]:
            # every second pair is rank deficient
            ranks = (None, None) if rng.random() < 0.5 else \
                (random_ranks(rng, alg), random_ranks(rng, alg))
            yield name, random_form(rng, alg, ranks[0]), random_form(rng, alg, ranks[1])


def _shape(rng) -> Algebra:
    names = list(SHAPES)
    return Algebra(SHAPES[names[int(rng.integers(len(names)))]])


def uhlmann_instances(trials: int, seed: int):
    for rng in spawn(seed, trials):
        alg = _shape(rng)
        mu = random_form(rng, alg, random_ranks(rng, alg) if rng.random() < 0.3 else None)
        a = random_invertible_positive(rng, alg)
        h = random_positive(rng, alg)
        yield mu, a, a.inv() @ h


def pure_instances(trials: int, seed: int):
    for rng in spawn(seed, trials):
        n = int(rng.integers(2, 5))
        psi = random_vector(rng, n) * rng.uniform(0.5, 2.0)
        phi = random_vector(rng, n) * rng.uniform(0.5, 2.0)
        yield Algebra.full(n), psi, phi


def factorization_instances(trials: int, seed: int):
    for rng in spawn(seed, trials):
        alg = _shape(rng)
        nu, rho = random_form(rng, alg), random_form(rng, alg)
        a, b = random_invertible_positive(rng, alg), random_invertible_positive(rng, alg)
        # general invertible factors
        yield rng, nu, rho, random_unitary(rng, alg) @ a, random_unitary(rng, alg) @ b


def derived_instances(trials: int, seed: int):
    for rng in spawn(seed, trials):
        alg = _shape(rng)
        ranks = random_ranks(rng, alg) if rng.random() < 0.4 else None
        nu = random_form(rng, alg, ranks)
        a = random_invertible_positive(rng, alg)
        yield nu, a, inner_derive(nu, a)


# -- suites ---------------------------------------------------------------------


def suite_oracle(trials: int, seed: int, tally: Tally) -> None:
    """Trace-norm fidelity, commutant supremum at 1 and SVD path agree pairwise."""
    for t, (shape, nu, rho) in enumerate(oracle_instances(trials, seed)):
        one = nu.algebra.identity()
        a = transition_probability(nu, rho).sqrt_p
        b = gamma_sup_gns(nu, rho, one)
        c = gamma_sup_svd(nu, rho, one)
        tally.add("trace_vs_gns", _rel(a, b), 1e-9, t)
        tally.add("trace_vs_svd", _rel(a, c), 1e-9, t)
        tally.add("gns_vs_svd", _rel(b, c), 1e-9, t)
        tally.counts[shape] += 1


def suite_uhlrem2(trials: int, seed: int, tally: Tally) -> None:
    """sqrt P(mu^a, mu^b) = mu(a* b) for a* b >= 0, and P(mu^a, mu) = mu(a)^2."""
    for t, (mu, a, b) in enumerate(uhlmann_instances(trials, seed)):
        v = check_uhlmann_formula(mu, a, b)
        tally.add("uhlmann_formula", v.residual, 1e-8, t)
        p = sqrt_p(inner_derive(mu, a), mu) ** 2
        ma = evaluate(mu, a).real
        tally.add("derived_specialization", abs(p - ma ** 2) / max(1.0, ma ** 2), 1e-8, t)


def _vector_split(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Isometries onto span(phi) and its complement, from one QR factorization."""
    q, _ = np.linalg.qr(np.column_stack([phi, np.eye(len(phi))]))
    return q[:, :1], q[:, 1:len(phi)]


def _spectral_vector_value(psi: np.ndarray, terms) -> float:
    """<x psi, psi> for x = sum_j lam_j U_j U_j*, as sum_j lam_j ||U_j* psi||^2.

    With lam up to 1e6 this avoids the cancellation of forming x first.
    """
    return float(sum(lam * np.linalg.norm(u.conj().T @ psi) ** 2 for lam, u in terms))


def suite_pure(trials: int, seed: int, tally: Tally) -> None:
    """P = |<psi, phi>|^2 for vector forms and the upper-bound family converges."""
    for t, (alg, psi, phi) in enumerate(pure_instances(trials, seed)):
        nu, rho = PositiveForm.vector_form(alg, phi), PositiveForm.vector_form(alg, psi)
        overlap = abs(np.vdot(phi, psi)) ** 2
        p = sqrt_p(nu, rho) ** 2
        tally.add("vector_overlap", abs(p - overlap), 1e-10, t)
        u, v = _vector_split(phi)
        mass = _spectral_vector_value(psi, [(1.0, v)])
        for k in range(1, 7):
            eps = 10.0 ** -k
            # a = p_phi + p_phi^perp / eps and its inverse, in spectral form
            upper = (_spectral_vector_value(phi, [(1.0, u), (1.0 / eps, v)])
                     * _spectral_vector_value(psi, [(1.0, u), (eps, v)]))
            allowed = eps * np.vdot(phi, phi).real * mass
            tally.add("upper_bound_excess", max(0.0, upper - p - allowed), 1e-10, t)
            tally.add("upper_bound_below", max(0.0, p - upper), 1e-10, t)


def suite_buch00(trials: int, seed: int, tally: Tally) -> None:
    """sqrt P(nu^a, rho^b) = gamma_sup(nu, rho, a* b) and the Bures variational witnesses."""
    for t, (rng, nu, rho, a, b) in enumerate(factorization_instances(trials, seed)):
        tally.add("factorization", factorization_residual(nu, rho, a, b), 1e-9, t)
        z = a.H @ b
        g_best = minimal_witness(nu, rho, z)[0]
        g_best = g_best.H @ g_best
        probes = [random_invertible_positive(rng, nu.algebra) for _ in range(4)]
        rep = bures_variational(nu, rho, a, b, probes + [g_best])
        tally.add("witness_below_oracle", max(0.0, rep.worst_excess), 1e-9, t)
        tally.add("near_minimizing_witness", abs(rep.oracle - rep.witness_values[-1]), 1e-4, t)


def suite_genproba(trials: int, seed: int, tally: Tally) -> None:
    """Estimators at constructed witnesses sandwich sqrt P; the finite-spectrum scheme."""
    for t, (nu, a, rho) in enumerate(derived_instances(trials, seed)):
        oracle = sqrt_p(nu, rho)
        d = Decomposition.spectral(a)
        values = {
            "geometric_mean": geometric_mean_value(nu, rho, a),
            "arithmetic_mean": arithmetic_mean_value(nu, rho, a),
            "spectral_decomposition": decomposition_value(nu, rho, d),
            "delta_scheme": double_system_value(nu, rho, delta_scheme(nu, rho, d, 1e-6)),
            "minimal_pair": double_system_value(nu, rho, minimal_pair(a)),
        }
        for k, v in values.items():
            tally.add(f"{k}_close", abs(v - oracle), 1e-4, t)
            tally.add(f"{k}_not_below", max(0.0, oracle - v), 1e-9, t)
        eps = 1e-3
        res = epsilon_scheme(nu, rho, eps)
        tally.flag("epsilon_scheme_product", res.product < res.p + eps, t)
        tally.flag("epsilon_scheme_value", res.value <= np.sqrt(res.p + eps), t)


def suite_bounds(trials: int, seed: int, tally: Tally) -> None:
    """Fidelity and distance bounds with non-negative slack on the streams of suites 1 to 5."""

    def record(t, nu, rho, rng, f=None, a=None):
        alg = nu.algebra
        if f is None:
            f = abs(random_gamma_value(rng, nu, rho, alg.identity()))
        if a is None:
            a = random_invertible_positive(rng, alg)
        _, slacks = check_bounds(nu, rho, f, a)
        scale = 1.0 + nu.norm + rho.norm
        for k, v in slacks.as_dict().items():
            tally.add(k, max(0.0, -v) / scale, 1e-9, t)

    # each stream stops at its own suite's default length, so trials >= 200
    # replays every instance of suites 1 to 5
    n = {k: min(trials, DEFAULT_TRIALS[k]) for k in ("oracle", "uhlrem2", "pure", "buch00",
                                                      "genproba")}
    rng = np.random.default_rng(seed)
    t = 0
    for _, nu, rho in oracle_instances(n["oracle"], seed):
        record(t, nu, rho, rng); t += 1
    for mu, a, b in uhlmann_instances(n["uhlrem2"], seed):
        record(t, inner_derive(mu, a), inner_derive(mu, b), rng); t += 1
    for alg, psi, phi in pure_instances(n["pure"], seed):
        nu, rho = PositiveForm.vector_form(alg, phi), PositiveForm.vector_form(alg, psi)
        u, v = _vector_split(phi)
        a = alg.element([u @ u.conj().T + 1e3 * (v @ v.conj().T)])
        record(t, nu, rho, rng, f=abs(np.vdot(phi, psi)), a=a); t += 1
    for _, nu, rho, a, b in factorization_instances(n["buch00"], seed):
        record(t, inner_derive(nu, a), inner_derive(rho, b), rng); t += 1
    for nu, a, rho in derived_instances(n["genproba"], seed):
        record(t, nu, rho, rng, a=a); t += 1
    tally.counts["instances"] = t


def _finite_difference(nu, rho, x, y, h=1e-5) -> float:
    return (objective(nu, rho, x + h * y) - objective(nu, rho, x - h * y)) / (2 * h)


def suite_stabi(trials: int, seed: int, tally: Tally) -> None:
    """Trichotomy of the minimizer set, uniqueness, perturbation identities and gradient."""
    for t, rng in enumerate(spawn(seed, trials)):
        alg = _shape(rng)
        # constructed: rho derived from nu by an invertible element
        faithful = rng.random() < 0.5
        nu = random_form(rng, alg, None if faithful else _deficient(rng, alg))
        a = random_invertible_positive(rng, alg)
        rho = inner_derive(nu, a)
        desc = min_set(nu, rho)
        tally.flag("derived_nonempty", desc.nonempty, t)
        tally.counts["derived"] += 1
        if desc.nonempty:
            tally.add("representative_minimizing", minimizing_residual(nu, rho, desc.representative), 1e-8, t)
            if nu.is_faithful():
                x = radon_nikodym(nu, rho)
                tally.add("representative_is_rn", (desc.representative - x).norm() / (1 + x.norm()), 1e-7, t)
        tally.flag("unique_iff_faithful", desc.unique == nu.is_faithful(), t)

        # orthogonal pair: both supports non-trivial and orthogonal
        nu_o, rho_o = _orthogonal_pair(rng, alg)
        d_o = min_set(nu_o, rho_o)
        tally.flag("orthogonal_empty", not d_o.nonempty, t)
        tally.counts["orthogonal"] += 1

        # exactly one faithful form
        nu_f = random_form(rng, alg)
        rho_f = random_form(rng, alg, _deficient(rng, alg))
        if rng.random() < 0.5:
            nu_f, rho_f = rho_f, nu_f
        tally.flag("one_faithful_empty", not min_set(nu_f, rho_f).nonempty, t)
        tally.counts["one_faithful"] += 1

        x = random_invertible_positive(rng, alg)
        z = random_invertible_positive(rng, alg)
        res = inverse_perturbation_identity(z, x, nu, rho)
        tally.add("inverse_identity", max(res.inverse, res.alternative), 1e-9, t)
        tally.add("value_identity", res.value, 1e-9, t)

        fr = random_form(rng, alg)
        g = gradient(nu, fr, x)
        for _ in range(5):
            y = random_hermitian(rng, alg)
            exact = (g @ y).trace().real
            fd = _finite_difference(nu, fr, x, y)
            tally.add("gradient_vs_fd", abs(exact - fd) / max(abs(exact), 1e-3), 1e-5, t)


def _deficient(rng, alg: Algebra) -> tuple[int, ...]:
    """Blockwise ranks with at least one deficient block."""
    while True:
        r = random_ranks(rng, alg, allow_zero=True)
        if any(k < n for k, n in zip(r, alg.block_dims)):
            return r


def _orthogonal_pair(rng, alg: Algebra) -> tuple[PositiveForm, PositiveForm]:
    parts = random_projection_partition(rng, alg, 2)
    if alg.dim < 2:
        raise ValueError("orthogonal pairs need dimension >= 2")
    p, q = parts
    g1, g2 = random_positive(rng, alg), random_positive(rng, alg)
    return (PositiveForm((p @ g1 @ p).herm() / (p @ g1 @ p).trace().real),
            PositiveForm((q @ g2 @ q).herm() / (q @ g2 @ q).trace().real))


def suite_least_algebra(trials: int, seed: int, tally: Tally) -> None:
    """Least minimizing subalgebra decisions on random and constructed instances."""
    for t, rng in enumerate(spawn(seed, trials)):
        alg = _shape(rng)
        nu = random_form(rng, alg)
        rho = inner_derive(nu, random_positive(rng, alg))
        v = least_minimizing_algebra(nu, rho)
        rx = generated_abelian_algebra(radon_nikodym(nu, rho))
        ok = v.decision == "Exists" and same_algebra(v.algebra, rx) \
            and is_minimizing_subalgebra(nu, rho, v.algebra)
        tally.flag("faithful_exists", ok, t)
        tally.counts[f"faithful:{v.decision}"] += 1

    jump = 1.7
    inst = jump_instance(16, jump)
    v = least_minimizing_algebra(inst.nu, inst.rho, inst.probes)
    perp = inst.nu.algebra.identity() - inst.nu.support()
    target = generated_abelian_algebra(inst.x + v.lambda0 * perp)
    tally.flag("jump_exists", v.decision == "Exists" and same_algebra(v.algebra, target), 0)
    tally.add("jump_lambda0", abs(v.lambda0 - jump), 1e-9, 0)
    tally.counts[f"jump:{v.decision}"] += 1

    inst = flip_instance(8)
    v = least_minimizing_algebra(inst.nu, inst.rho, inst.probes)
    tally.flag("flip_not_exists", v.decision == "NotExists" and v.reason == "automorphism obstruction", 0)
    tally.counts[f"flip:{v.decision}"] += 1

    inst = tilted_pure_instance()
    v = least_minimizing_algebra(inst.nu, inst.rho, inst.probes)
    minimizing = [r for _, r, m in v.family if m]
    distinct = [r for i, r in enumerate(minimizing)
                if all(not same_algebra(r, s) for s in minimizing[:i])]
    meet_trivial = len(distinct) >= 2 and intersect(distinct[0], distinct[1]).is_trivial
    trivial_min = is_minimizing_subalgebra(inst.nu, inst.rho, AbelianSubalgebra.trivial(inst.nu.algebra))
    tally.flag("tilted_two_minimizing_trivial_meet", meet_trivial and not trivial_min, 0)
    tally.flag("tilted_not_exists", v.decision == "NotExists", 0)
    tally.counts[f"tilted:{v.decision}"] += 1

    angle = np.deg2rad(37.0)
    inst = faithful_m2_instance(angle)
    thetas, gaps = bloch_sweep(inst.nu, inst.rho, 360)
    rx = generated_abelian_algebra(inst.x)
    hits = [i for i, g in enumerate(gaps) if abs(g) <= 1e-7]
    target = {37, 217}
    tally.flag("bloch_unique", set(hits) == target, 0)
    tally.counts["bloch_hits"] = len(hits)
    tally.add("bloch_hit_gap", max(abs(gaps[i]) for i in target), 1e-7, 0)
    tally.flag("bloch_hit_is_rx", is_minimizing_subalgebra(inst.nu, inst.rho, rx, 1e-7), 0)


def suite_subalgebras(trials: int, seed: int, tally: Tally) -> None:
    """Anti-monotonicity, the kernel-corner family and the support condition."""
    for t, rng in enumerate(spawn(seed, trials)):
        alg = _shape(rng)
        nu = random_form(rng, alg, random_ranks(rng, alg) if rng.random() < 0.5 else None)
        rho = random_form(rng, alg)
        fine = AbelianSubalgebra(alg, tuple(random_projection_partition(rng, alg)))
        mid = coarsen(fine, rng)
        coarse = coarsen(mid, rng)
        pm = sqrt_p(nu, rho) ** 2
        pf, pmid, pc = (restricted_transition_probability(nu, rho, r) for r in (fine, mid, coarse))
        tally.add("monotone_coarse_mid", max(0.0, pmid - pc), 1e-9, t)
        tally.add("monotone_mid_fine", max(0.0, pf - pmid), 1e-9, t)
        tally.add("monotone_fine_full", max(0.0, pm - pf), 1e-9, t)

        # kernel-corner family for a dominated pair with non-faithful nu
        if alg.dim >= 2:
            ranks = _deficient(rng, alg)
            nu_d = random_form(rng, alg, ranks)
            s = nu_d.support()
            rho_d = inner_derive(nu_d, (s @ random_positive(rng, alg) @ s).herm())
            ks = [random_kernel_corner(rng, nu_d) for _ in range(5)]
            for mini, proj in aux0_family_check(nu_d, rho_d, ks):
                tally.flag("kernel_family_minimizing", mini, t)
                tally.flag("kernel_family_projective", proj, t)

        # support condition for rho = nu^a, R = R[a], p = s(rho)
        a = random_spread_positive(rng, alg, random_ranks(rng, alg) if rng.random() < 0.5 else None)
        rho_a = inner_derive(nu, a)
        if rho_a.norm <= 1e-12:
            continue
        r = generated_abelian_algebra(a)
        v = lemma_opt_condition(nu, rho_a, r, rho_a.support(), a)
        tally.add("support_condition", v.residual / (1.0 + abs(v.details["rhs"])), 1e-8, t)


SUITES: dict[str, Callable[[int, int, Tally], None]] = {
    "oracle": suite_oracle,
    "uhlrem2": suite_uhlrem2,
    "pure": suite_pure,
    "buch00": suite_buch00,
    "genproba": suite_genproba,
    "bounds": suite_bounds,
    "stabi": suite_stabi,
    "least_algebra": suite_least_algebra,
    "subalgebras": suite_subalgebras,
}

DEFAULT_TRIALS = {"oracle": 200, "uhlrem2": 200, "pure": 100, "buch00": 200, "genproba": 100,
                  "bounds": 200, "stabi": 100, "least_algebra": 20, "subalgebras": 100}


def run_suite(name: str, trials: int | None = None, seed: int = 7,
              tol: float | None = None) -> SuiteReport:
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    trials = DEFAULT_TRIALS[name] if trials is None else int(trials)
    if trials < 0:
        raise ValueError("trials must be non-negative")
    tally = Tally(tol)
    if trials > 0:
        SUITES[name](trials, seed, tally)
    return SuiteReport(name, trials, seed, tally.checks, dict(tally.counts), tally.failures)
