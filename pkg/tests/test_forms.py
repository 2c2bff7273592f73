import numpy as np
import pytest
from hypothesis import given

from buresalg.algebra import Algebra
from buresalg.errors import AlgebraMismatch, NotDominated, NotPositive
from buresalg.forms import (PositiveForm, are_orthogonal, dominates, evaluate, inner_derive,
                            kernel_ideal_member, radon_nikodym)
from buresalg.sampling import (random_element, random_form, random_invertible_positive,
                               random_positive, random_ranks)

from conftest import algebra_of, seeds, shapes

M2 = Algebra.full(2)


def test_density_must_be_positive():
    with pytest.raises(NotPositive):
        PositiveForm(M2.diag([1.2, -0.2]))


def test_evaluate_examples(qubit):
    alg, nu, rho = qubit
    assert evaluate(nu, alg.identity()) == pytest.approx(1.0)
    assert evaluate(PositiveForm(alg.diag([1.0, 0.0])), alg.diag([0.0, 1.0])) == 0
    assert evaluate(nu, alg.diag([2.0, 1.0])) == pytest.approx(1.5)


def test_evaluate_algebra_mismatch(qubit):
    _, nu, _ = qubit
    with pytest.raises(AlgebraMismatch):
        evaluate(nu, Algebra.full(3).identity())


def test_inner_derive_examples(qubit):
    alg, nu, _ = qubit
    assert inner_derive(nu, alg.identity()).density.allclose(nu.density)
    assert inner_derive(nu, alg.zero()).is_zero()
    assert inner_derive(nu, alg.diag([2.0, 1.0])).density.allclose(alg.diag([2.0, 0.5]))


def test_kernel_ideal_examples(qubit):
    alg, nu, _ = qubit
    x = random_element(np.random.default_rng(3), alg)
    assert not kernel_ideal_member(nu, x)
    assert kernel_ideal_member(nu, alg.zero())
    assert kernel_ideal_member(PositiveForm(alg.diag([1.0, 0.0])), alg.diag([0.0, 1.0]))


def test_orthogonality_examples(qubit):
    alg, nu, rho = qubit
    up, down = PositiveForm(alg.diag([1.0, 0.0])), PositiveForm(alg.diag([0.0, 1.0]))
    assert are_orthogonal(up, down)
    assert not are_orthogonal(nu, nu)
    assert not are_orthogonal(nu, rho)
    assert (nu.density - rho.density).trace_norm() == pytest.approx(0.5)


def test_dominates_examples(qubit):
    alg, nu, rho = qubit
    assert dominates(nu, nu) == pytest.approx(1.0)
    assert dominates(PositiveForm(alg.diag([1.0, 0.0])), PositiveForm(alg.diag([0.0, 1.0]))) is None
    assert dominates(nu, rho) == pytest.approx(1.5)


def test_radon_nikodym_examples(qubit):
    alg, nu, rho = qubit
    assert radon_nikodym(nu, nu).allclose(nu.support(), 1e-12)
    a = radon_nikodym(nu, rho)
    assert a.allclose(alg.diag([np.sqrt(1.5), np.sqrt(0.5)]), 1e-12)
    assert (a @ nu.density @ a).allclose(rho.density, 1e-12)
    assert radon_nikodym(nu, PositiveForm.zero(alg)).allclose(alg.zero())


def test_radon_nikodym_not_dominated():
    with pytest.raises(NotDominated):
        radon_nikodym(PositiveForm(M2.diag([1.0, 0.0])), PositiveForm(M2.diag([0.0, 1.0])))


def test_norm_and_state(qubit):
    _, nu, _ = qubit
    assert nu.norm == pytest.approx(1.0)
    assert nu.is_state
    assert (2.0 * nu).norm == pytest.approx(2.0)


@given(seeds, shapes)
def test_cauchy_schwarz(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    g = random_form(rng, alg, random_ranks(rng, alg))
    x, y = random_element(rng, alg), random_element(rng, alg)
    lhs = abs(evaluate(g, y.H @ x)) ** 2
    rhs = evaluate(g, y.H @ y).real * evaluate(g, x.H @ x).real
    assert rhs - lhs >= -1e-10 * (1 + rhs)


@given(seeds, shapes)
def test_inner_derivation_composes(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    nu = random_form(rng, alg)
    a, b = random_element(rng, alg), random_element(rng, alg)
    lhs = inner_derive(inner_derive(nu, a), b).density
    rhs = inner_derive(nu, b @ a).density
    assert (lhs - rhs).norm() <= 1e-12 * (1 + rhs.norm())
    y = random_element(rng, alg)
    assert abs(evaluate(inner_derive(nu, a), y) - evaluate(nu, a.H @ y @ a)) <= 1e-12 * (
        1 + abs(evaluate(nu, a.H @ y @ a)))


@given(seeds, shapes)
def test_radon_nikodym_round_trip(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    nu = random_form(rng, alg, random_ranks(rng, alg))
    # rho = nu^g compressed to s(nu) is dominated by nu
    s = nu.support()
    g = random_invertible_positive(rng, alg)
    rho = inner_derive(nu, s @ g @ s)
    assert dominates(nu, rho) is not None
    a = radon_nikodym(nu, rho)
    back = inner_derive(nu, a).density
    assert (back - rho.density).norm() <= 1e-9 * (1 + rho.density.norm())
    assert (a - s @ a @ s).norm() <= 1e-9 * (1 + a.norm())


@given(seeds, shapes)
def test_kernel_ideal_is_left_ideal(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    nu = random_form(rng, alg, random_ranks(rng, alg))
    if nu.is_faithful():
        return
    perp = alg.identity() - nu.support()
    x = random_element(rng, alg) @ perp
    assert kernel_ideal_member(nu, x)
    m = random_element(rng, alg)
    assert kernel_ideal_member(nu, m @ x)


@given(seeds, shapes)
def test_faithfulness_characterizations(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    ranks = random_ranks(rng, alg)
    nu = random_form(rng, alg, ranks)
    faithful = ranks == alg.block_dims
    assert nu.is_faithful() == faithful
    assert nu.support().allclose(alg.identity(), 1e-9) == faithful
    # matrix units span the algebra; the ideal is trivial iff none of them lies in it
    units = []
    for b, n in enumerate(alg.block_dims):
        for i in range(n):
            for j in range(n):
                blocks = [np.zeros((m, m)) for m in alg.block_dims]
                blocks[b][i, j] = 1.0
                units.append(alg.element(blocks))
    trivial = not any(kernel_ideal_member(nu, u @ w) for u in units
                      for w in (alg.identity(), random_positive(rng, alg)))
    if faithful:
        assert trivial
    else:
        assert kernel_ideal_member(nu, alg.identity() - nu.support())
