import numpy as np
import pytest
from hypothesis import given

from buresalg.algebra import AbelianSubalgebra, Algebra, generated_abelian_algebra
from buresalg.constructions import (faithful_m2_instance, flip_instance, jump_instance,
                                    tilted_pure_instance, x_algebra)
from buresalg.errors import (FullSupport, InvalidPartition, NotDominated, NotDominatedOnR,
                             PreconditionViolated)
from buresalg.fidelity import sqrt_p
from buresalg.forms import PositiveForm, inner_derive, radon_nikodym
from buresalg.sampling import (random_form, random_invertible_positive, random_positive,
                               random_projection_partition, random_ranks,
                               random_spread_positive)
from buresalg.subalgebras import (Automorphism, Probes, aux0_family_check, bloch_projection,
                                  bloch_sweep, coarsen, hereditary_compression, intersect,
                                  intersect_all, is_contained, is_minimizing_subalgebra,
                                  is_projective, least_minimizing_algebra,
                                  lemma_opt_condition, minimizing_gap, opt1_equivalence,
                                  r0_case_analysis, random_kernel_corner, refine,
                                  relative_radon_nikodym, restricted_transition_probability,
                                  same_algebra, spectrum_condition)

from conftest import algebra_of, seeds, shapes

M2 = Algebra.full(2)


def partition(alg, *diagonals):
    return AbelianSubalgebra(alg, tuple(alg.diag(d) for d in diagonals))


def test_restricted_probability_examples(qubit):
    alg, nu, rho = qubit
    trivial = AbelianSubalgebra.trivial(alg)
    rho2 = 2.0 * rho
    assert restricted_transition_probability(nu, rho2, trivial) == pytest.approx(2.0)
    diag = partition(alg, [1, 0], [0, 1])
    p = restricted_transition_probability(nu, rho, diag)
    assert p == pytest.approx(sqrt_p(nu, rho) ** 2, abs=1e-12)
    assert p == pytest.approx(0.933013, abs=1e-6)
    assert restricted_transition_probability(nu, rho, trivial) >= p


def test_restricted_probability_checks_algebra(qubit):
    _, nu, rho = qubit
    with pytest.raises(InvalidPartition):
        restricted_transition_probability(nu, rho, AbelianSubalgebra.trivial(Algebra.full(3)))


def test_minimizing_examples():
    rng = np.random.default_rng(4)
    alg = Algebra.full(3)
    nu = random_form(rng, alg)
    a = random_invertible_positive(rng, alg)
    rho = inner_derive(nu, a)
    ra = generated_abelian_algebra(a)
    assert is_minimizing_subalgebra(nu, rho, ra)
    assert not is_minimizing_subalgebra(nu, rho, AbelianSubalgebra.trivial(alg))
    assert is_minimizing_subalgebra(nu, 3.0 * nu, AbelianSubalgebra.trivial(alg))
    # a refinement of a minimizing algebra is minimizing
    assert is_minimizing_subalgebra(nu, rho, refine(ra, rng))


def test_projective_examples():
    rng = np.random.default_rng(5)
    nu = PositiveForm(M2.diag([0.7, 0.3]))
    rho = PositiveForm(M2.diag([0.4, 0.0]))
    for _ in range(3):
        r = AbelianSubalgebra(M2, tuple(random_projection_partition(rng, M2)))
        assert is_projective(nu, rho, r)
    sigma = random_form(rng, M2)
    for _ in range(3):
        r = AbelianSubalgebra(M2, tuple(random_projection_partition(rng, M2)))
        assert is_projective(sigma, random_form(rng, M2), r)
    pure = PositiveForm(M2.element([bloch_projection(0.6)]))
    p = M2.element([bloch_projection(1.3)])
    r = AbelianSubalgebra(M2, (p, M2.identity() - p))
    assert not is_projective(nu, pure, r)


def test_relative_rn_examples(qubit):
    alg, nu, rho = qubit
    rho2 = 2.0 * rho
    z = relative_radon_nikodym(nu, rho2, AbelianSubalgebra.trivial(alg))
    assert z.allclose(np.sqrt(2.0) * alg.identity(), 1e-12)
    z = relative_radon_nikodym(nu, rho, partition(alg, [1, 0], [0, 1]))
    assert z.allclose(alg.diag([np.sqrt(1.5), np.sqrt(0.5)]), 1e-12)
    assert relative_radon_nikodym(nu, nu, partition(alg, [1, 0], [0, 1])).allclose(alg.identity())


def test_relative_rn_not_dominated():
    nu, rho = PositiveForm(M2.diag([1.0, 0.0])), PositiveForm(M2.diag([0.5, 0.5]))
    with pytest.raises(NotDominatedOnR):
        relative_radon_nikodym(nu, rho, partition(M2, [1, 0], [0, 1]))


def comma_pair(seed):
    """Non-faithful nu, rho = nu^a with a positive, s(a) = s(nu)."""
    rng = np.random.default_rng(seed)
    alg = Algebra((2, 3))
    ranks = (1, 2)
    nu = PositiveForm(random_spread_positive(rng, alg, ranks))
    s = nu.support()
    a = (s @ random_spread_positive(rng, alg) @ s).herm()
    return alg, nu, a, inner_derive(nu, a)


def test_lemma_opt_examples():
    alg, nu, a, rho = comma_pair(3)
    ra = generated_abelian_algebra(a + 1.0 * (alg.identity() - nu.support()))
    assert lemma_opt_condition(nu, rho, ra, alg.identity())
    v = lemma_opt_condition(nu, rho, ra, rho.support())
    assert v and v.residual <= 1e-8


def test_lemma_opt_preconditions():
    alg, nu, a, rho = comma_pair(4)
    trivial = AbelianSubalgebra.trivial(alg)
    with pytest.raises(PreconditionViolated) as err:
        lemma_opt_condition(nu, rho, trivial, alg.identity())
    assert err.value.premise == "R minimizing"
    ra = generated_abelian_algebra(a + 1.0 * (alg.identity() - nu.support()))
    with pytest.raises(PreconditionViolated):
        lemma_opt_condition(nu, rho, ra, alg.zero())
    with pytest.raises(PreconditionViolated):
        lemma_opt_condition(nu, rho, ra, alg.identity(), a=random_positive(
            np.random.default_rng(0), alg))


def test_lemma_opt_identity_fails_off_minimizing():
    # the bare identity, evaluated on a non-minimizing algebra, leaves a residual
    nu = PositiveForm(M2.element([[[0.6, 0.2], [0.2, 0.4]]]))
    rho = PositiveForm(M2.element([bloch_projection(0.6)]))
    q = M2.element([bloch_projection(2.0)])
    r = AbelianSubalgebra(M2, (q, M2.identity() - q))
    assert not is_minimizing_subalgebra(nu, rho, r)
    z = relative_radon_nikodym(nu, rho, r)
    p = rho.support()
    pp = M2.identity() - p
    lhs = (nu(p @ z @ p) - nu(pp @ z @ pp)).real
    assert abs(lhs - nu(z).real) > 1e-3


def test_intersect_examples():
    alg = Algebra.diagonal(3)
    fine = partition(alg, [1, 0, 0], [0, 1, 0], [0, 0, 1])
    coarse = partition(alg, [1, 1, 0], [0, 0, 1])
    meet = intersect(fine, coarse)
    assert same_algebra(meet, coarse)
    assert same_algebra(intersect(fine, fine), fine)
    p, q = M2.element([bloch_projection(0.0)]), M2.element([bloch_projection(1.0)])
    r1 = AbelianSubalgebra(M2, (p, M2.identity() - p))
    r2 = AbelianSubalgebra(M2, (q, M2.identity() - q))
    assert intersect(r1, r2).is_trivial


def test_least_algebra_faithful_pair():
    rng = np.random.default_rng(7)
    alg = Algebra((2, 3))
    nu = random_form(rng, alg)
    rho = inner_derive(nu, random_invertible_positive(rng, alg))
    v = least_minimizing_algebra(nu, rho)
    assert v.decision == "Exists"
    rx = generated_abelian_algebra(radon_nikodym(nu, rho))
    assert same_algebra(v.algebra, rx)
    assert is_minimizing_subalgebra(nu, rho, v.algebra)
    assert v.lambda0 >= 0


def test_least_algebra_jump():
    inst = jump_instance(16, 1.7)
    v = least_minimizing_algebra(inst.nu, inst.rho)
    assert v.decision == "Exists"
    assert v.lambda0 == pytest.approx(1.7, abs=1e-12)
    perp = inst.nu.algebra.identity() - inst.nu.support()
    assert same_algebra(v.algebra, generated_abelian_algebra(inst.x + 1.7 * perp))
    assert same_algebra(v.candidate, v.r_infinity)


def test_least_algebra_flip():
    inst = flip_instance(8)
    v = least_minimizing_algebra(inst.nu, inst.rho, inst.probes)
    assert v.decision == "NotExists" and v.reason == "automorphism obstruction"
    assert v.evidence["automorphism"]["fixed_generator"] == "x + k[0]"
    # without the probe nothing can be concluded from the spectrum alone
    assert least_minimizing_algebra(inst.nu, inst.rho).decision != "Exists"


def test_least_algebra_tilted_pure():
    inst = tilted_pure_instance()
    v = least_minimizing_algebra(inst.nu, inst.rho)
    minimizing = [r for _, r, m in v.family if m]
    assert len(minimizing) >= 2
    assert intersect_all(minimizing).is_trivial
    assert not is_minimizing_subalgebra(inst.nu, inst.rho, AbelianSubalgebra.trivial(M2))
    assert v.decision == "NotExists"


def test_least_algebra_spectrum_condition():
    # three-point spectrum with equal supports under a non-faithful nu
    alg = Algebra.diagonal(3)
    nu = PositiveForm(alg.diag([0.5, 0.5, 0.0]))
    x = alg.diag([1.0, 2.0, 0.0])
    rho = inner_derive(nu, x)
    ok, count, equal = spectrum_condition(x, nu, rho)
    assert (ok, count, equal) == (False, 3, True)
    v = least_minimizing_algebra(nu, rho)
    assert v.decision == "NotExists" and not v.radokondi_ok


def test_least_algebra_not_dominated():
    alg = Algebra.diagonal(2)
    with pytest.raises(NotDominated):
        least_minimizing_algebra(PositiveForm(alg.diag([1.0, 0.0])),
                                 PositiveForm(alg.diag([0.0, 1.0])))


def test_compression_examples():
    rng = np.random.default_rng(8)
    alg = Algebra((2, 3))
    nu = random_form(rng, alg)
    rho = random_form(rng, alg)
    c = hereditary_compression(nu, rho)
    assert c.q.allclose(alg.identity(), 1e-9) and c.algebra.block_dims == alg.block_dims
    assert c.spectra_match

    inst = jump_instance(16, 1.7)
    c = hereditary_compression(inst.nu, inst.rho)
    assert c.algebra.dim == 17 and c.spectra_match

    # s(rho) < s(nu) < 1
    alg = Algebra.diagonal(5)
    nu = PositiveForm(alg.diag([0.3, 0.3, 0.2, 0.2, 0.0]))
    rho = inner_derive(nu, alg.diag([1.0, 2.0, 0.0, 0.0, 0.0]))
    c = hereditary_compression(nu, rho)
    assert c.algebra.dim == 2 + 1
    assert c.spectra_match
    y = random_positive(rng, alg)
    assert c.compress(c.embed(c.compress(y))).allclose(c.compress(y), 1e-12)


def test_compression_requires_domination():
    with pytest.raises(NotDominated):
        hereditary_compression(PositiveForm(M2.diag([1.0, 0.0])), PositiveForm(M2.diag([0.0, 1.0])))


def test_r0_examples():
    alg = Algebra.diagonal(3)
    r = r0_case_analysis(alg.diag([0.5, 0.5, 0.0]))
    assert r.label == "one nonzero eigenvalue" and r.r0.is_trivial
    r = r0_case_analysis(Algebra.diagonal(2).diag([1.0, 0.0]))
    assert r.label == "one nonzero eigenvalue" and r.r0.is_trivial
    r = r0_case_analysis(alg.diag([2.0, 1.0, 0.0]))
    assert r.label == "two or more nonzero eigenvalues" and r.distinct_from_probes
    with pytest.raises(FullSupport):
        r0_case_analysis(alg.diag([1.0, 2.0, 3.0]))


def test_opt1_examples():
    inst = jump_instance(6, 1.3)
    rep = opt1_equivalence(inst.nu, inst.rho, x_algebra(inst))
    assert rep.projective_inside and rep.condition
    rng = np.random.default_rng(9)
    alg = Algebra.full(3)
    nu = random_form(rng, alg)
    rho = inner_derive(nu, random_invertible_positive(rng, alg))
    rep = opt1_equivalence(nu, rho, generated_abelian_algebra(radon_nikodym(nu, rho)))
    assert rep.projective_inside and rep.condition and rep.equivalent


def test_bloch_sweep_singles_out_rx():
    inst = faithful_m2_instance(angle=np.deg2rad(37))
    thetas, gaps = bloch_sweep(inst.nu, inst.rho, 360)
    hits = np.flatnonzero(np.abs(gaps) <= 1e-7)
    assert sorted(np.round(np.rad2deg(thetas[hits])).astype(int)) == [37, 217]
    assert np.all(gaps >= -1e-9)
    p = M2.element([bloch_projection(thetas[hits[0]])])
    r = AbelianSubalgebra(M2, (p, M2.identity() - p))
    assert same_algebra(r, x_algebra(inst))


def test_automorphism_probe():
    alg = Algebra.diagonal(3)
    flip = Automorphism(alg, permutation=(2, 1, 0))
    assert flip(alg.diag([1.0, 2.0, 3.0])).allclose(alg.diag([3.0, 2.0, 1.0]))
    assert flip.fixes(alg.diag([1.0, 5.0, 1.0]))
    with pytest.raises(ValueError):
        Automorphism(Algebra((1, 2)), permutation=(1, 0))
    u = M2.element([np.array([[0, 1], [1, 0]])])
    swap = Automorphism(M2, unitary=u)
    assert swap(M2.diag([1.0, 0.0])).allclose(M2.diag([0.0, 1.0]))


@given(seeds, shapes)
def test_monotonicity(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    nu = random_form(rng, alg, random_ranks(rng, alg))
    rho = random_form(rng, alg, random_ranks(rng, alg))
    mid = AbelianSubalgebra(alg, tuple(random_projection_partition(rng, alg, 2 + alg.dim // 2)))
    fine, coarse = refine(mid, rng), coarsen(mid, rng)
    assert is_contained(coarse, mid) and is_contained(mid, fine)
    pm = sqrt_p(nu, rho) ** 2
    pc, pmid, pf = (restricted_transition_probability(nu, rho, r) for r in (coarse, mid, fine))
    assert pc - pmid >= -1e-9 and pmid - pf >= -1e-9 and pf - pm >= -1e-9


@given(seeds, shapes)
def test_aux0_family(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    nu = random_form(rng, alg, random_ranks(rng, alg))
    s = nu.support()
    rho = inner_derive(nu, (s @ random_positive(rng, alg) @ s).herm())
    ks = [random_kernel_corner(rng, nu) for _ in range(5)]
    assert all(m and p for m, p in aux0_family_check(nu, rho, ks))


@given(seeds, shapes)
def test_kernel_shift_stays_minimizing(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    nu = random_form(rng, alg, random_ranks(rng, alg))
    x = random_invertible_positive(rng, alg)
    rho = inner_derive(nu, x)
    assert is_minimizing_subalgebra(nu, rho, generated_abelian_algebra(x))
    k = random_kernel_corner(rng, nu)
    assert is_minimizing_subalgebra(nu, rho, generated_abelian_algebra(x + k))


@given(seeds)
def test_minimizing_gap_nonnegative(seed):
    rng = np.random.default_rng(seed)
    alg = Algebra.full(3)
    nu, rho = random_form(rng, alg), random_form(rng, alg)
    r = AbelianSubalgebra(alg, tuple(random_projection_partition(rng, alg)))
    assert minimizing_gap(nu, rho, r) >= -1e-9


@given(seeds)
def test_least_algebra_verdict_invariants(seed):
    rng = np.random.default_rng(seed)
    alg = Algebra.diagonal(4) if seed % 2 else Algebra((1, 2))
    nu = random_form(rng, alg, random_ranks(rng, alg))
    s = nu.support()
    rho = inner_derive(nu, (s @ random_spread_positive(rng, alg) @ s).herm())
    v = least_minimizing_algebra(nu, rho, Probes(ks=(random_kernel_corner(rng, nu),)))
    assert v.lambda0 >= 0
    assert v.decision in ("Exists", "NotExists", "Undecided")
    if v.decision == "Exists":
        assert same_algebra(v.candidate, v.r_infinity)
        assert is_minimizing_subalgebra(nu, rho, v.algebra)
        for _, r, m in v.family:
            if m:
                assert is_contained(v.algebra, r)
