"""Abelian subalgebras: restricted fidelity, minimizing and projective tests, and
the decision procedure for a least minimizing subalgebra.

An abelian subalgebra R is stored as its atoms, a partition of unity into
orthogonal projections.  For commutative restrictions the transition
probability is a Bhattacharyya sum over atoms,

    P_R = (sum_p sqrt(nu(p) rho(p)))^2  >=  P_M.

R is minimizing when equality holds.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .algebra import (AbelianSubalgebra, Algebra, Element, cluster_tolerance,
                      generated_abelian_algebra, orthocomplement, spectral_resolution,
                      support)
from .errors import (FullSupport, InvalidPartition, NotDominated, NotDominatedOnR,
                     PreconditionViolated)
from .fidelity import sqrt_p
from .forms import PositiveForm, evaluate, radon_nikodym, support_contained
from .verdict import Verdict, check

MINIMIZING_REL = 1e-8
OVERLAP_TOL = 1e-6


def _require(nu: PositiveForm, r: AbelianSubalgebra) -> None:
    if r.algebra != nu.algebra:
        raise InvalidPartition("subalgebra lives in a different algebra")


def _atom_values(nu: PositiveForm, rho: PositiveForm, r: AbelianSubalgebra):
    """(nu(p), rho(p)) per atom, with round-off sized values set to zero.

    Square roots turn a 1e-17 residue into 1e-9, enough to spoil the
    minimizing test on atoms that a form does not charge.
    """
    eps = 64 * np.finfo(float).eps
    fn, fr = eps * nu.norm, eps * rho.norm
    out = []
    for p in r.atoms:
        a, b = evaluate(nu, p).real, evaluate(rho, p).real
        out.append((a if a > fn else 0.0, b if b > fr else 0.0))
    return out


def restricted_transition_probability(nu: PositiveForm, rho: PositiveForm,
                                      r: AbelianSubalgebra) -> float:
    """P_R(nu|R, rho|R) = (sum over atoms of sqrt(nu(p) rho(p)))^2."""
    _require(nu, r)
    s = sum(np.sqrt(max(a, 0.0) * max(b, 0.0)) for a, b in _atom_values(nu, rho, r))
    return float(s * s)


def minimizing_gap(nu: PositiveForm, rho: PositiveForm, r: AbelianSubalgebra) -> float:
    """(P_R - P_M) / (1 + P_M); non-negative up to round-off."""
    pm = sqrt_p(nu, rho) ** 2
    return (restricted_transition_probability(nu, rho, r) - pm) / (1.0 + pm)


def is_minimizing_subalgebra(nu: PositiveForm, rho: PositiveForm, r: AbelianSubalgebra,
                             tol: float = MINIMIZING_REL) -> bool:
    return abs(minimizing_gap(nu, rho, r)) <= tol


def projectivity_residual(nu: PositiveForm, rho: PositiveForm, r: AbelianSubalgebra) -> float:
    """max over atoms p of |nu(s p s) - nu(p s)| with s = s(rho)."""
    _require(nu, r)
    s = rho.support()
    return max(abs(evaluate(nu, s @ p @ s) - evaluate(nu, p @ s)) for p in r.atoms)


def is_projective(nu: PositiveForm, rho: PositiveForm, r: AbelianSubalgebra,
                  tol: float = 1e-9) -> bool:
    return projectivity_residual(nu, rho, r) <= tol * (1.0 + nu.norm)


def relative_radon_nikodym(nu: PositiveForm, rho: PositiveForm, r: AbelianSubalgebra,
                           tol: float = 1e-12) -> Element:
    """z = sum_p sqrt(rho(p) / nu(p)) p over atoms with nu(p) > 0; rho|R = (nu|R)^z."""
    _require(nu, r)
    scale = tol * (1.0 + nu.norm + rho.norm)
    z = nu.algebra.zero()
    for p, (a, b) in zip(r.atoms, _atom_values(nu, rho, r)):
        if a <= scale:
            if b > scale:
                raise NotDominatedOnR(f"rho(p) = {b:.3e} on an atom with nu(p) = {a:.3e}")
            continue
        z = z + np.sqrt(max(b, 0.0) / a) * p
    return z


# -- lattice operations ---------------------------------------------------------


def _components(n: int, edges: list[tuple[int, int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _vec(x: Element) -> np.ndarray:
    return np.concatenate([b.ravel() for b in x.blocks])


def _intersect_by_nullspace(r1: AbelianSubalgebra, r2: AbelianSubalgebra) -> AbelianSubalgebra:
    """Solve sum a_i p_i = sum b_j q_j, then split a generic solution spectrally."""
    cols = [_vec(p) for p in r1.atoms] + [-_vec(q) for q in r2.atoms]
    mat = np.stack(cols, axis=1)
    # real coefficients suffice: the atoms are hermitian
    mat = np.vstack([mat.real, mat.imag])
    null = scipy.linalg.null_space(mat, rcond=1e-9)
    if null.shape[1] <= 1:
        return AbelianSubalgebra.trivial(r1.algebra)
    rng = np.random.default_rng(12345)
    coef = null @ rng.standard_normal(null.shape[1])
    y = r1.element(coef[:len(r1.atoms)])
    return generated_abelian_algebra(y, 1e-6 * (1.0 + y.norm()))


def intersect(r1: AbelianSubalgebra, r2: AbelianSubalgebra,
              overlap_tol: float = OVERLAP_TOL) -> AbelianSubalgebra:
    """R1 cap R2 from the connected components of the overlap graph.

    Atoms p_i and q_j are joined when ||p_i q_j|| > overlap_tol.  A component
    whose two sums agree is an atom of the intersection.  Should some component
    fail that test, the intersection is recomputed by linear algebra.
    """
    if r1.algebra != r2.algebra:
        raise InvalidPartition("subalgebras of different algebras")
    n1, n2 = len(r1.atoms), len(r2.atoms)
    edges = [(i, n1 + j) for i, p in enumerate(r1.atoms) for j, q in enumerate(r2.atoms)
             if (p @ q).norm() > overlap_tol]
    atoms = []
    for comp in _components(n1 + n2, edges):
        zero = r1.algebra.zero()
        sp = sum((r1.atoms[i] for i in comp if i < n1), zero)
        sq = sum((r2.atoms[i - n1] for i in comp if i >= n1), zero)
        if not sp.allclose(sq, 1e-6):
            return _intersect_by_nullspace(r1, r2)
        atoms.append(sp)
    return AbelianSubalgebra(r1.algebra, tuple(atoms))


def intersect_all(algebras: Sequence[AbelianSubalgebra]) -> AbelianSubalgebra:
    out = algebras[0]
    for r in algebras[1:]:
        out = intersect(out, r)
    return out


def is_contained(r1: AbelianSubalgebra, r2: AbelianSubalgebra, tol: float = 1e-7) -> bool:
    """R1 subset R2."""
    return r1.is_subalgebra_of(r2, tol)


def same_algebra(r1: AbelianSubalgebra, r2: AbelianSubalgebra, tol: float = 1e-7) -> bool:
    return r1.same_as(r2, tol)


def refine(r: AbelianSubalgebra, rng: np.random.Generator) -> AbelianSubalgebra:
    """Split each atom of rank > 1 into two random orthogonal subprojections."""
    atoms = []
    for p in r.atoms:
        blocks_all = []
        for bi, b in enumerate(p.blocks):
            w, v = np.linalg.eigh(0.5 * (b + b.conj().T))
            vecs = v[:, w > 0.5]
            for col in vecs.T:
                blocks_all.append((bi, col))
        if len(blocks_all) <= 1:
            atoms.append(p)
            continue
        # random unitary mixing inside each block keeps the pieces in the atom
        mixed = []
        for bi in sorted({bi for bi, _ in blocks_all}):
            cols = np.stack([c for b, c in blocks_all if b == bi], axis=1)
            k = cols.shape[1]
            g = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
            q, _ = np.linalg.qr(g)
            cols = cols @ q
            mixed.extend((bi, c) for c in cols.T)
        cut = int(rng.integers(1, len(mixed)))
        for part in (mixed[:cut], mixed[cut:]):
            blocks = [np.zeros((n, n), dtype=complex) for n in r.algebra.block_dims]
            for bi, c in part:
                blocks[bi] += np.outer(c, c.conj())
            atoms.append(r.algebra.element(blocks))
    return AbelianSubalgebra(r.algebra, tuple(atoms))


def coarsen(r: AbelianSubalgebra, rng: np.random.Generator) -> AbelianSubalgebra:
    """Merge atoms into random groups."""
    n = len(r.atoms)
    if n == 1:
        return r
    groups = int(rng.integers(1, n))
    labels = np.concatenate([np.arange(groups), rng.integers(0, groups, n - groups)])
    rng.shuffle(labels)
    atoms = []
    for g in range(groups):
        members = [r.atoms[i] for i in range(n) if labels[i] == g]
        atoms.append(sum(members[1:], members[0]))
    return AbelianSubalgebra(r.algebra, tuple(atoms))


# -- Support and projectivity checks ------------------------------------------


def lemma_opt_condition(nu: PositiveForm, rho: PositiveForm, r: AbelianSubalgebra,
                        p: Element, a: Element | None = None, tol: float = 1e-8) -> Verdict:
    """nu(p a p) - nu(p^perp a p^perp) = nu(a) for minimizing R and p^perp in I_rho.

    ``a`` defaults to the R-relative Radon-Nikodym operator.
    """
    _require(nu, r)
    if not is_minimizing_subalgebra(nu, rho, r):
        raise PreconditionViolated("R minimizing", f"gap {minimizing_gap(nu, rho, r):.3e}")
    if not p.is_projection(1e-8):
        raise PreconditionViolated("p projection", "p is not an orthoprojection")
    pp = orthocomplement(p)
    leak = evaluate(rho, pp).real
    if leak > 1e-10 * (1.0 + rho.norm):
        raise PreconditionViolated("p^perp in the kernel ideal of rho", f"rho(p^perp) = {leak:.3e}")
    if a is None:
        a = relative_radon_nikodym(nu, rho, r)
    else:
        if not r.contains(a) or not a.is_positive():
            raise PreconditionViolated("a in R_+", "a is not a positive element of R")
        derived = [(evaluate(nu, a @ q @ a).real, evaluate(rho, q).real) for q in r.atoms]
        if max(abs(x - y) for x, y in derived) > 1e-9 * (1.0 + rho.norm):
            raise PreconditionViolated("rho|R = (nu|R)^a", "a does not derive rho on R")
    lhs = (evaluate(nu, p @ a @ p) - evaluate(nu, pp @ a @ pp)).real
    rhs = evaluate(nu, a).real
    return check("lemma_opt", abs(lhs - rhs), tol * (1.0 + abs(rhs)), lhs=lhs, rhs=rhs)


def in_kernel_corner(nu: PositiveForm, k: Element, tol: float = 1e-9) -> bool:
    """k in s(nu)^perp M_+ s(nu)^perp."""
    perp = orthocomplement(nu.support())
    scale = tol * (1.0 + k.norm())
    return k.is_positive(scale) and (k - perp @ k @ perp).norm() <= scale


def random_kernel_corner(rng: np.random.Generator, nu: PositiveForm) -> Element:
    """Random positive element of s(nu)^perp M s(nu)^perp."""
    from .sampling import random_positive
    perp = orthocomplement(nu.support())
    g = random_positive(rng, nu.algebra)
    return (perp @ g @ perp).herm()


def aux0_family_check(nu: PositiveForm, rho: PositiveForm, ks: Sequence[Element]
                      ) -> list[tuple[bool, bool]]:
    """(minimizing, projective) for R[x + k], x the Radon-Nikodym operator, k in the kernel corner."""
    x = radon_nikodym(nu, rho)
    out = []
    for k in ks:
        if not in_kernel_corner(nu, k):
            raise PreconditionViolated("k in s(nu)^perp M_+ s(nu)^perp", "probe outside the corner")
        r = generated_abelian_algebra(x + k)
        out.append((is_minimizing_subalgebra(nu, rho, r), is_projective(nu, rho, r)))
    return out


# -- spectral case analysis -----------------------------------------------------


def _nonspectral(values: Sequence[float], tol: float, start: float) -> float:
    """A positive number at distance > 100 tol from every value, near ``start``."""
    lam = start
    golden = (1 + 5 ** 0.5) / 2
    for _ in range(100):
        if all(abs(lam - v) > 100 * tol for v in values):
            return lam
        lam = lam * golden + 0.1
    return lam


@dataclass(frozen=True, eq=False)
class R0Analysis:
    label: str
    r0: AbelianSubalgebra
    probes: tuple[float, ...]
    nonzero_eigenvalues: tuple[float, ...]
    distinct_from_probes: bool  # R0 differs from every probed R[x + g s(x)^perp]


def shifted_algebra(x: Element, perp: Element, lam: float,
                    cluster_tol: float | None = None) -> AbelianSubalgebra:
    return generated_abelian_algebra(x + lam * perp, cluster_tol)


def r0_case_analysis(x: Element, cluster_tol: float | None = None) -> R0Analysis:
    """R0(x): the intersection of R[x + g s(x)^perp] over probed g >= 0.

    Probes are 0, every nonzero eigenvalue and one value off the spectrum.
    """
    s = support(x)
    perp = orthocomplement(s)
    if perp.trace().real < 0.5:
        raise FullSupport("x has full support")
    tol = cluster_tolerance(x) if cluster_tol is None else cluster_tol
    res = spectral_resolution(x, tol)
    rank_tol = 1e-10 * (1.0 + x.norm())
    nonzero = tuple(v for v in res.eigenvalues if v > rank_tol)
    probes = (0.0,) + nonzero + (_nonspectral(res.eigenvalues, tol, 1.0 + max(nonzero, default=0.0)),)
    algebras = [shifted_algebra(x, perp, g, tol) for g in probes]
    r0 = intersect_all(algebras)
    distinct = all(not same_algebra(r0, r) for r in algebras)
    if not nonzero:
        label = "no nonzero eigenvalue"
    elif len(nonzero) == 1:
        label = "one nonzero eigenvalue"
    else:
        label = "two or more nonzero eigenvalues"
    return R0Analysis(label, r0, probes, nonzero, distinct)


# -- hereditary compression -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class Compression:
    """The corner q M q realized as a block algebra, with the isometries V_b."""

    q: Element
    algebra: Algebra
    isometries: tuple[np.ndarray, ...]  # one n_b x m_b isometry per block (m_b may be 0)
    nu_q: PositiveForm
    rho_q: PositiveForm
    spectrum: tuple[float, ...]
    spectrum_q: tuple[float, ...]
    spectra_match: bool

    def compress(self, y: Element) -> Element:
        blocks = [v.conj().T @ b @ v for v, b in zip(self.isometries, y.blocks) if v.shape[1]]
        return self.algebra.element(blocks)

    def embed(self, y: Element) -> Element:
        out, it = [], iter(y.blocks)
        for v in self.isometries:
            out.append(v @ next(it) @ v.conj().T if v.shape[1] else np.zeros((v.shape[0],) * 2))
        return self.q.algebra.element(out)


def _spectrum_set(x: Element) -> list[float]:
    return list(spectral_resolution(x).eigenvalues)


def _set_equal(a: Sequence[float], b: Sequence[float], tol: float) -> bool:
    return all(any(abs(u - v) <= tol for v in b) for u in a) and \
        all(any(abs(u - v) <= tol for v in a) for u in b)


def hereditary_compression(nu: PositiveForm, rho: PositiveForm) -> Compression:
    """Cut M down to q M q with q = s(rho) + s(nu)^perp.

    The spectra of the two Radon-Nikodym operators are compared as sets after
    adjoining 0 to both, with spec(x_q) required to lie inside spec(x).
    """
    if not support_contained(nu, rho):
        raise NotDominated("rho is not dominated by nu")
    q = rho.support() + orthocomplement(nu.support())
    isos, dims = [], []
    for b in q.blocks:
        w, v = np.linalg.eigh(0.5 * (b + b.conj().T))
        iso = v[:, w > 0.5]
        isos.append(iso)
        if iso.shape[1]:
            dims.append(iso.shape[1])
    alg = Algebra(tuple(dims))
    comp = Compression(q, alg, tuple(isos), None, None, (), (), False)
    nu_q = PositiveForm(comp.compress(nu.density))
    rho_q = PositiveForm(comp.compress(rho.density))
    x = radon_nikodym(nu, rho)
    xq = radon_nikodym(nu_q, rho_q)
    spec, spec_q = _spectrum_set(x), _spectrum_set(xq)
    tol = 1e-7 * (1.0 + x.norm())
    match = (_set_equal(spec + [0.0], spec_q + [0.0], tol)
             and all(any(abs(u - v) <= tol for v in spec) for u in spec_q)
             and comp.embed(xq).allclose(x, 1e-7 * (1.0 + x.norm())))
    return Compression(q, alg, tuple(isos), nu_q, rho_q, tuple(spec), tuple(spec_q), match)


# -- automorphisms ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Automorphism:
    """y -> u pi(y) u*, pi a permutation of equal-sized blocks (new block i = old block perm[i])."""

    algebra: Algebra
    unitary: Element | None = None
    permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.permutation is not None:
            perm = tuple(int(i) for i in self.permutation)
            dims = self.algebra.block_dims
            if sorted(perm) != list(range(len(dims))):
                raise ValueError("permutation must reorder all blocks")
            if any(dims[i] != dims[j] for i, j in enumerate(perm)):
                raise ValueError("a block permutation must preserve block sizes")
            object.__setattr__(self, "permutation", perm)
        if self.unitary is not None:
            u = self.unitary
            if not (u @ u.H).allclose(self.algebra.identity(), 1e-9):
                raise ValueError("automorphism probe needs a unitary")

    def __call__(self, y: Element) -> Element:
        if self.permutation is not None:
            y = self.algebra.element([y.blocks[i] for i in self.permutation])
        if self.unitary is not None:
            y = self.unitary @ y @ self.unitary.H
        return y

    def fixes(self, y: Element, tol: float = 1e-9) -> bool:
        return (self(y) - y).norm() <= tol * (1.0 + y.norm())


@dataclass(frozen=True, eq=False)
class Probes:
    """Witnesses for the least-algebra decision: automorphisms and kernel-corner shifts k."""

    automorphisms: tuple[Automorphism, ...] = ()
    ks: tuple[Element, ...] = ()


# -- least minimizing subalgebra --------------------------------------------------


@dataclass(frozen=True, eq=False)
class LeastAlgebraVerdict:
    decision: str  # "Exists", "NotExists" or "Undecided"
    reason: str
    algebra: AbelianSubalgebra | None
    lambda0: float
    radokondi_ok: bool
    r_infinity: AbelianSubalgebra
    candidate: AbelianSubalgebra
    probe_lambdas: tuple[float, ...]
    family: tuple[tuple[str, AbelianSubalgebra, bool], ...] = ()
    evidence: dict = field(default_factory=dict)


def spectrum_condition(x: Element, nu: PositiveForm, rho: PositiveForm,
                       tol: float | None = None) -> tuple[bool, int, bool]:
    """(condition holds, #spec(x), s(rho) = s(nu)).

    For non-faithful nu a least algebra needs #spec(x) <= 2 when the supports
    agree and #spec(x) = 1 otherwise.  Faithful nu passes vacuously.
    """
    count = len(spectral_resolution(x, tol).eigenvalues)
    equal = rho.support().allclose(nu.support(), 1e-8)
    if nu.is_faithful():
        return True, count, equal
    return (count <= 2 if equal else count == 1), count, equal


def _generator(nu: PositiveForm, rho: PositiveForm) -> tuple[Element, bool]:
    """(x, dominated): the Radon-Nikodym operator, or an invertible x with rho = nu^x."""
    if support_contained(nu, rho):
        return radon_nikodym(nu, rho), True
    from .minimizers import min_set
    desc = min_set(nu, rho)
    if desc.nonempty:
        return desc.representative, False
    raise NotDominated("rho is not dominated by nu and no positive x with rho = nu^x was found")


def least_minimizing_algebra(nu: PositiveForm, rho: PositiveForm,
                             probes: Probes | None = None,
                             cluster_tol: float | None = None) -> LeastAlgebraVerdict:
    """Decide existence of the least minimizing abelian subalgebra from proven criteria.

    Exists/NotExists are issued only along sufficient or necessary conditions
    that are theorems; everything else is Undecided with the gathered evidence.
    The probe family is R[x + lam s(nu)^perp] for lam in {0, lam0, lam0 + 1,
    one non-spectral value}, together with R[x + k] for supplied k.
    """
    probes = Probes() if probes is None else probes
    alg = nu.algebra
    x, dominated = _generator(nu, rho)
    s = nu.support()
    perp = orthocomplement(s)
    faithful = nu.is_faithful()
    tol = cluster_tolerance(x) if cluster_tol is None else cluster_tol
    res = spectral_resolution(x, tol)
    lambda0 = max(float(res.eigenvalues[-1]), 0.0)
    rado_ok, count, equal_supports = spectrum_condition(x, nu, rho, tol)
    if not dominated:
        rado_ok = False

    lambdas = [0.0, lambda0, lambda0 + 1.0,
               _nonspectral(list(res.eigenvalues) + [lambda0 + 1.0], tol, 0.5 * lambda0 + 0.37)]
    generators = [(f"x + {lam:.6g} s(nu)^perp", x + lam * perp) for lam in lambdas]
    for i, k in enumerate(probes.ks):
        if not in_kernel_corner(nu, k):
            raise PreconditionViolated("k in s(nu)^perp M_+ s(nu)^perp", f"probe {i}")
        generators.append((f"x + k[{i}]", x + k))
    family = []
    for label, g in generators:
        r = generated_abelian_algebra(g, tol)
        family.append((label, r, is_minimizing_subalgebra(nu, rho, r)))
    candidate = generated_abelian_algebra(x + lambda0 * perp, tol)
    r_inf = intersect_all([r for _, r, _ in family])
    trivial = AbelianSubalgebra.trivial(alg)
    evidence = {"dominated": dominated, "nu_faithful": faithful, "rho_faithful": rho.is_faithful(),
                "spectrum_size": count, "equal_supports": equal_supports,
                "centralizer": rho.support().commutes_with(nu.density, 1e-9)}

    def verdict(decision, reason, algebra=None):
        if decision == "Exists":
            ok = (is_minimizing_subalgebra(nu, rho, algebra)
                  and same_algebra(algebra, r_inf) and same_algebra(candidate, r_inf)
                  and all(is_contained(algebra, r) for _, r, m in family if m))
            if not ok:
                decision, reason = "Undecided", f"{reason}; verification of the algebra failed"
                algebra = None
        return LeastAlgebraVerdict(decision, reason, algebra, float(lambda0), bool(rado_ok),
                                   r_inf, candidate, tuple(lambdas), tuple(family), evidence)

    # the trivial algebra sits inside every algebra
    if is_minimizing_subalgebra(nu, rho, trivial):
        return verdict("Exists", "trivial algebra is minimizing", trivial)

    if dominated:
        target = x + lambda0 * perp
        for i, phi in enumerate(probes.automorphisms):
            for label, g in generators:
                if phi.fixes(g) and not phi.fixes(target):
                    evidence["automorphism"] = {"probe": i, "fixed_generator": label}
                    return verdict("NotExists", "automorphism obstruction")

    verified = [r for _, r, m in family if m]
    if len(verified) >= 2:
        meet = intersect_all(verified)
        if not is_minimizing_subalgebra(nu, rho, meet):
            evidence["meet_gap"] = minimizing_gap(nu, rho, meet)
            return verdict("NotExists", "intersection of minimizing algebras is not minimizing")

    if not dominated:
        return verdict("Undecided", "rho is not dominated by nu")

    if not faithful:
        if not rado_ok:
            return verdict("NotExists", "spectrum condition violated")
        if evidence["centralizer"] and is_minimizing_subalgebra(nu, rho, r_inf):
            return verdict("Exists", "support of rho in the centralizer, probed intersection "
                           "is minimizing", r_inf)
        return verdict("Undecided", "support of rho outside the centralizer")

    rx = generated_abelian_algebra(x, tol)
    if rho.is_faithful():
        return verdict("Exists", "both forms faithful", rx)
    if evidence["centralizer"]:
        return verdict("Exists", "faithful nu, support of rho in the centralizer", rx)
    if alg.block_dims == (2,):
        return verdict("Exists", "faithful nu on M2", rx)
    return verdict("Undecided", "faithful nu, support of rho outside the centralizer")


# -- Minimizing-algebra equivalences -------------------------------------------


@dataclass(frozen=True)
class Opt1Report:
    projective_inside: bool
    condition: bool
    residual: float
    k: Element | None = None

    @property
    def equivalent(self) -> bool:
        return self.projective_inside == self.condition


def _embedded_shift(nu: PositiveForm, x: Element, r: AbelianSubalgebra,
                    extra: Sequence[float] = (0.0, 1.0)) -> Element | None:
    """k in s(nu)^perp M_+ s(nu)^perp with x + k in R, if one is found.

    x + k = sum c_i p_i forces sum c_i p_i s(nu) = x; atoms with p s(nu) = 0
    are free and are tried at several non-negative values.
    """
    s = nu.support()
    cols = np.stack([_vec(p @ s) for p in r.atoms], axis=1)
    target = _vec(x)
    mat = np.vstack([cols.real, cols.imag])
    rhs = np.concatenate([target.real, target.imag])
    c, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    if np.linalg.norm(mat @ c - rhs) > 1e-8 * (1.0 + np.linalg.norm(rhs)):
        return None
    free = [i for i, p in enumerate(r.atoms) if (p @ s).norm() <= 1e-9]
    for base in extra:
        cc = c.copy()
        for i in free:
            cc[i] = base + abs(c[i])
        k = (r.element(cc) - x).herm()
        if in_kernel_corner(nu, k, 1e-7):
            return k
    return None


def opt1_equivalence(nu: PositiveForm, rho: PositiveForm, r: AbelianSubalgebra,
                     tol: float = 1e-8) -> Opt1Report:
    """Minimizing projective R[x + k] inside R  <=>  nu(s(rho) z s(rho)) = nu(z)."""
    _require(nu, r)
    if not support_contained(nu, rho):
        raise PreconditionViolated("rho << nu", "rho is not dominated")
    if not is_minimizing_subalgebra(nu, rho, r):
        raise PreconditionViolated("R minimizing", f"gap {minimizing_gap(nu, rho, r):.3e}")
    z = relative_radon_nikodym(nu, rho, r)
    sr = rho.support()
    residual = abs(evaluate(nu, sr @ z @ sr) - evaluate(nu, z))
    condition = residual <= tol * (1.0 + abs(evaluate(nu, z)))
    x = radon_nikodym(nu, rho)
    k = _embedded_shift(nu, x, r)
    inside = False
    if k is not None:
        r1 = generated_abelian_algebra(x + k)
        inside = (is_minimizing_subalgebra(nu, rho, r1) and is_projective(nu, rho, r1)
                  and is_contained(r1, r))
    return Opt1Report(inside, condition, float(residual), k)


# -- M2 sweep -------------------------------------------------------------------------


def bloch_projection(theta: float) -> np.ndarray:
    """(1 + cos(theta) sz + sin(theta) sx) / 2."""
    c, s = np.cos(theta), np.sin(theta)
    return 0.5 * np.array([[1 + c, s], [s, 1 - c]], dtype=complex)


def bloch_sweep(nu: PositiveForm, rho: PositiveForm, points: int = 360
                ) -> tuple[np.ndarray, np.ndarray]:
    """Angles and normalized gaps (P_R - P_M)/(1 + P_M) for R = {p(theta), p(theta)^perp}."""
    alg = nu.algebra
    if alg.block_dims != (2,):
        raise ValueError("the Bloch sweep needs M2")
    thetas = 2 * np.pi * np.arange(points) / points
    gaps = np.empty(points)
    for i, t in enumerate(thetas):
        p = alg.element([bloch_projection(t)])
        r = AbelianSubalgebra(alg, (p, alg.identity() - p))
        gaps[i] = minimizing_gap(nu, rho, r)
    return thetas, gaps
