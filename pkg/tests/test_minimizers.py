import numpy as np
import pytest
from hypothesis import given

from buresalg.algebra import Algebra
from buresalg.estimators import arithmetic_mean_value, gradient
from buresalg.fidelity import sqrt_p
from buresalg.forms import PositiveForm, inner_derive
from buresalg.minimizers import (MIN_REL, canonical_representative, check_min_structure,
                                 eqvalb_residuals, inverse_perturbation_identity,
                                 is_minimizing_element, kernel_dimension, min_set,
                                 minimizing_residual, near_minimizer, reverse_minimizing)
from buresalg.sampling import (random_form, random_hermitian, random_invertible_positive,
                               random_positive, random_ranks)

from conftest import algebra_of, seeds, shapes

M2 = Algebra.full(2)


def test_is_minimizing_examples(qubit):
    rng = np.random.default_rng(1)
    alg, nu, _ = qubit
    a = random_invertible_positive(rng, alg)
    assert is_minimizing_element(nu, inner_derive(nu, a), a)
    assert is_minimizing_element(nu, nu, alg.identity())
    mu, sigma = random_form(rng, alg), random_form(rng, alg)
    assert not is_minimizing_element(mu, sigma, alg.identity())


def test_min_set_examples():
    rng = np.random.default_rng(2)
    alg = Algebra((2, 3))
    nu = random_form(rng, alg)
    a = random_invertible_positive(rng, alg)
    desc = min_set(nu, inner_derive(nu, a))
    assert desc.status == "NonEmpty" and desc.unique and desc.kernel_dimension == 0
    assert desc.representative.allclose(a, 1e-8 * (1 + a.norm()))

    up, down = PositiveForm(M2.diag([1.0, 0.0])), PositiveForm(M2.diag([0.0, 1.0]))
    desc = min_set(up, down)
    assert desc.status == "Empty" and desc.reason == "orthogonal forms"

    faithful = PositiveForm(M2.diag([0.5, 0.5]))
    pure = PositiveForm(M2.element([[[0.5, 0.5], [0.5, 0.5]]]))
    assert min_set(faithful, pure).reason == "faithfulness mismatch"
    assert min_set(pure, faithful).reason == "faithfulness mismatch"


def test_min_set_non_faithful_pair():
    alg = Algebra.full(3)
    nu = PositiveForm(alg.diag([0.5, 0.5, 0.0]))
    a = alg.diag([1.3, 0.6, 2.0])
    desc = min_set(nu, inner_derive(nu, a))
    assert desc.nonempty and not desc.unique
    assert desc.kernel_dimension == 1
    assert is_minimizing_element(nu, inner_derive(nu, a), desc.representative)
    assert kernel_dimension(PositiveForm(Algebra((2, 3)).diag([1, 0, 1, 0, 0]))) == 1 + 4


def test_canonical_representative():
    alg = Algebra.full(3)
    nu = PositiveForm(alg.diag([0.5, 0.5, 0.0]))
    a = alg.diag([1.3, 0.6, 2.0])
    x = canonical_representative(nu, inner_derive(nu, a))
    assert x.allclose(alg.diag([1.3, 0.6, 1.0]), 1e-10)


def test_perturbation_identity_examples():
    rng = np.random.default_rng(3)
    alg = Algebra.full(3)
    x = random_invertible_positive(rng, alg)
    res = inverse_perturbation_identity(x, x)
    assert res.delta_norm == 0 and res.Delta_norm <= 1e-14 and res.worst() <= 1e-14
    d = Algebra.diagonal(4)
    res = inverse_perturbation_identity(d.diag([1.0, 2.0, 0.5, 3.0]), d.diag([2.0, 1.0, 0.7, 0.2]))
    assert res.worst() <= 1e-12
    z = random_invertible_positive(rng, alg)
    nu, rho = random_form(rng, alg), random_form(rng, alg)
    assert inverse_perturbation_identity(z, x, nu, rho).worst() <= 1e-9


@given(seeds, shapes)
def test_min_structure(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    nu = random_form(rng, alg, random_ranks(rng, alg))
    a = random_invertible_positive(rng, alg)
    rho = inner_derive(nu, a)
    desc = min_set(nu, rho)
    assert desc.nonempty
    x = desc.representative
    dirs = [random_hermitian(rng, alg) for _ in range(3)]
    chk = check_min_structure(nu, rho, x, dirs, others=[a])
    assert chk.ok
    assert desc.unique == nu.is_faithful()


@given(seeds, shapes)
def test_eqvalb(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    nu = random_form(rng, alg)
    a = random_invertible_positive(rng, alg)
    rho = inner_derive(nu, a)
    r1, r2 = eqvalb_residuals(nu, rho, a)
    assert r1 <= 1e-8 and r2 <= 1e-8
    assert arithmetic_mean_value(nu, rho, a) == pytest.approx(sqrt_p(nu, rho), abs=1e-8)


@given(seeds, shapes)
def test_gradient_vanishing_equivalence(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    nu = random_form(rng, alg)
    a = random_invertible_positive(rng, alg)
    rho = inner_derive(nu, a)
    for x in (a, random_invertible_positive(rng, alg)):
        gnorm = gradient(nu, rho, x).norm() / (1 + nu.density.norm())
        assert is_minimizing_element(nu, rho, x) == (2 * gnorm <= MIN_REL)
        assert minimizing_residual(nu, rho, x) == pytest.approx(2 * gnorm, rel=1e-9, abs=1e-15)


@given(seeds, shapes)
def test_inversion_antisymmetry(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    nu = random_form(rng, alg)
    a = random_invertible_positive(rng, alg)
    rho = inner_derive(nu, a)
    assert reverse_minimizing(nu, rho, a) == (True, True)
    x = random_invertible_positive(rng, alg)
    fwd, back = reverse_minimizing(nu, rho, x)
    assert fwd == back


@given(seeds, shapes)
def test_near_minimizer_gap(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    nu = random_form(rng, alg, random_ranks(rng, alg))
    rho = random_form(rng, alg, random_ranks(rng, alg))
    x = near_minimizer(nu, rho, gap=1e-6)
    assert x.is_invertible_positive()
    gap = arithmetic_mean_value(nu, rho, x) - sqrt_p(nu, rho)
    # with both s(nu)^perp and the kernel of rho inside s(nu) charged, the gap
    # scales like 1 / sqrt(condition number), capped by the invertibility test
    s = nu.support()
    doubly = (not nu.is_faithful()
              and inner_derive(rho, s).rank() != nu.rank()
              and rho(nu.algebra.identity() - s).real > 0)
    assert -1e-9 <= gap <= (1e-4 if doubly else 1e-6)


@given(seeds, shapes)
def test_one_faithful_is_empty(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    ranks = tuple(max(n - 1, 0) for n in alg.block_dims)
    if sum(ranks) == 0:
        ranks = (1,) + ranks[1:]
        ranks = tuple(min(r, n) for r, n in zip(ranks, alg.block_dims))
    deficient = PositiveForm(random_positive(rng, alg, ranks))
    faithful = random_form(rng, alg)
    assert min_set(deficient, faithful).status == "Empty"
    assert min_set(faithful, deficient).status == "Empty"
