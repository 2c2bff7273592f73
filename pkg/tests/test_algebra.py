import numpy as np
import pytest
from hypothesis import given

from buresalg.algebra import (AbelianSubalgebra, Algebra, generated_abelian_algebra,
                              orthocomplement, pseudo_inverse, rank, spectral_resolution,
                              support)
from buresalg.errors import InvalidPartition, NonHermitian, NotPositive
from buresalg.sampling import random_hermitian, random_invertible_positive, random_positive

from conftest import algebra_of, seeds, shapes

M2 = Algebra.full(2)
X = M2.element([[[2.0, 1.0], [1.0, 2.0]]])


def test_algebra_requires_blocks():
    with pytest.raises(ValueError):
        Algebra(())
    with pytest.raises(ValueError):
        Algebra((2, 0))


def test_dimensions():
    alg = Algebra((2, 3))
    assert alg.dim == 5
    assert alg.linear_dim == 13
    assert Algebra.diagonal(4).is_commutative
    assert not alg.is_commutative


def test_element_shape_checked():
    with pytest.raises(ValueError):
        M2.element([np.eye(3)])


def test_spectral_resolution_diagonal():
    alg = Algebra.full(3)
    res = spectral_resolution(alg.diag([1.5, 0.5, 0.0]))
    assert np.allclose(res.eigenvalues, [0.0, 0.5, 1.5])
    assert all(abs(p.trace().real - 1) < 1e-12 for p in res.projections)


def test_spectral_resolution_identity():
    res = spectral_resolution(M2.identity())
    assert np.allclose(res.eigenvalues, [1.0])
    assert res.projections[0].allclose(M2.identity())


def test_spectral_resolution_full_matrix():
    res = spectral_resolution(X)
    assert np.allclose(res.eigenvalues, [1.0, 3.0])
    minus = 0.5 * np.array([[1, -1], [-1, 1]])
    plus = 0.5 * np.array([[1, 1], [1, 1]])
    assert np.allclose(res.projections[0].blocks[0], minus)
    assert np.allclose(res.projections[1].blocks[0], plus)
    for p in res.projections:
        assert (p @ p).allclose(p, 1e-12)
    assert res.reconstruct().allclose(X, 1e-12)


def test_spectral_resolution_rejects_nonhermitian():
    with pytest.raises(NonHermitian):
        spectral_resolution(M2.element([[[0.0, 1.0], [0.0, 0.0]]]))


def test_clustering_merges_close_eigenvalues():
    res = spectral_resolution(Algebra.full(3).diag([1.0, 1.0 + 1e-12, 2.0]))
    assert len(res) == 2
    assert res.projections[0].trace().real == pytest.approx(2.0)


def test_support_examples():
    alg = Algebra.full(3)
    assert support(alg.diag([0.7, 0.0, 0.3])).allclose(alg.diag([1.0, 0.0, 1.0]))
    assert support(alg.zero()).allclose(alg.zero())
    assert support(random_invertible_positive(np.random.default_rng(1), alg)).allclose(
        alg.identity(), 1e-10)


def test_support_rejects_nonpositive():
    with pytest.raises(NotPositive):
        support(M2.diag([1.0, -1.0]))


def test_pseudo_inverse_examples():
    assert pseudo_inverse(M2.diag([2.0, 0.0])).allclose(M2.diag([0.5, 0.0]))
    assert pseudo_inverse(M2.identity()).allclose(M2.identity())
    r = pseudo_inverse(X)
    assert np.allclose(r.blocks[0], [[2 / 3, -1 / 3], [-1 / 3, 2 / 3]])
    assert (X @ r).allclose(M2.identity(), 1e-12)


def test_pseudo_inverse_rejects_nonpositive():
    with pytest.raises(NotPositive):
        pseudo_inverse(M2.diag([1.0, -1.0]))


def test_generated_algebra_examples():
    alg = Algebra.full(3)
    r = generated_abelian_algebra(alg.diag([1.0, 1.0, 2.0]))
    assert len(r) == 2
    assert r.atoms[0].allclose(alg.diag([1.0, 1.0, 0.0]))
    assert r.atoms[1].allclose(alg.diag([0.0, 0.0, 1.0]))
    assert generated_abelian_algebra(M2.identity()).is_trivial
    rx = generated_abelian_algebra(X)
    assert len(rx) == 2 and all(abs(p.trace().real - 1) < 1e-12 for p in rx.atoms)
    assert rx.contains(X) and rx.contains(M2.identity())


def test_partition_validation():
    with pytest.raises(InvalidPartition):
        AbelianSubalgebra(M2, (M2.diag([1.0, 0.0]),))
    with pytest.raises(InvalidPartition):
        AbelianSubalgebra(M2, (M2.diag([1.0, 0.0]), M2.diag([1.0, 1.0])))
    AbelianSubalgebra(M2, (M2.diag([1.0, 0.0]), M2.diag([0.0, 1.0])))


@given(seeds, shapes)
def test_spectral_round_trip(seed, shape):
    x = random_hermitian(np.random.default_rng(seed), algebra_of(shape))
    res = spectral_resolution(x)
    tol = 1e-8 * (1 + x.norm())
    assert (x - res.reconstruct()).norm() <= 10 * tol * x.norm() + 1e-12
    assert np.all(np.diff(res.eigenvalues) > tol)
    total = sum(res.projections[1:], res.projections[0])
    assert total.allclose(x.algebra.identity(), 1e-9)


@given(seeds, shapes)
def test_support_minimality(seed, shape):
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    ranks = tuple(int(rng.integers(0, n + 1)) for n in alg.block_dims)
    x = random_positive(rng, alg, ranks)
    s = support(x)
    assert (s @ x @ s).allclose(x, 1e-10)
    assert rank(x) == ranks
    assert tuple(int(round(b.trace().real)) for b in s.blocks) == ranks


@given(seeds, shapes)
def test_pseudo_inverse_involution(seed, shape):
    x = random_invertible_positive(np.random.default_rng(seed), algebra_of(shape))
    back = pseudo_inverse(pseudo_inverse(x))
    assert (back - x).norm() <= 1e-10 * x.norm()
    r = pseudo_inverse(x)
    assert (x @ r).allclose(x.algebra.identity(), 1e-10)


@given(seeds, shapes)
def test_eigenprojection_shift_law(seed, shape):
    # the spectral projection of x + lam s(x)^perp at lam is s(x)^perp + E_x({lam})
    rng = np.random.default_rng(seed)
    alg = algebra_of(shape)
    ranks = tuple(int(rng.integers(0, n)) if n > 1 else 0 for n in alg.block_dims)
    if all(r == n for r, n in zip(ranks, alg.block_dims)):
        return
    x = random_positive(rng, alg, ranks)
    perp = orthocomplement(support(x))
    if perp.trace().real < 0.5:
        return
    res = spectral_resolution(x)
    nonzero = [v for v in res.eigenvalues if v > 1e-9]
    lams = nonzero[:1] + [max(nonzero, default=0.0) + 0.731]
    for lam in lams:
        shifted = spectral_resolution(x + lam * perp)
        got = shifted.projection_for(lam, 1e-7)
        want = perp + res.projection_for(lam, 1e-7)
        assert got.allclose(want, 1e-7)
    # at 0 the shifted element has no kernel unless 0 was a spectral value of x on s(x)
    shifted = spectral_resolution(x + lams[-1] * perp)
    assert shifted.projection_for(0.0, 1e-7).allclose(alg.zero(), 1e-7)
