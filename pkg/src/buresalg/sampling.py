"""Seeded random instances for tests and suites."""
from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from .algebra import Algebra, Element
from .forms import PositiveForm

SHAPES = {
    "M2": (2,),
    "M3": (3,),
    "M2+M3": (2, 3),
    "diag4": (1, 1, 1, 1),
}


def ginibre(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    if n == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(n, random_state=rng)


def random_element(rng, algebra: Algebra) -> Element:
    return algebra.element([ginibre(rng, n) for n in algebra.block_dims])


def random_hermitian(rng, algebra: Algebra) -> Element:
    return random_element(rng, algebra).herm()


def random_unitary(rng, algebra: Algebra) -> Element:
    return algebra.element([unitary(rng, n) for n in algebra.block_dims])


def random_positive(rng, algebra: Algebra, ranks: Sequence[int] | None = None) -> Element:
    """G G* with G of the requested blockwise rank (full rank by default)."""
    ranks = algebra.block_dims if ranks is None else ranks
    blocks = []
    for n, r in zip(algebra.block_dims, ranks):
        g = ginibre(rng, n, r) if r > 0 else np.zeros((n, 1))
        blocks.append(g @ g.conj().T)
    return algebra.element(blocks)


def random_invertible_positive(rng, algebra: Algebra, cond: float = 20.0) -> Element:
    """Invertible positive element with eigenvalues spread over [1, cond]."""
    blocks = []
    for n in algebra.block_dims:
        u = unitary(rng, n)
        w = np.exp(rng.uniform(0.0, np.log(cond), n))
        blocks.append((u * w) @ u.conj().T)
    return algebra.element(blocks)


def random_spread_positive(rng, algebra: Algebra, ranks: Sequence[int] | None = None,
                           low: float = 0.5, high: float = 3.0) -> Element:
    """Positive element whose nonzero eigenvalues lie in [low, high]; exact zeros elsewhere."""
    ranks = algebra.block_dims if ranks is None else ranks
    blocks = []
    for n, r in zip(algebra.block_dims, ranks):
        u = unitary(rng, n)
        w = np.zeros(n)
        w[:r] = rng.uniform(low, high, r)
        blocks.append((u * w) @ u.conj().T)
    return algebra.element(blocks)


def random_form(rng, algebra: Algebra, ranks: Sequence[int] | None = None,
                normalize: bool = True) -> PositiveForm:
    d = random_positive(rng, algebra, ranks)
    if normalize:
        d = d / d.trace().real
    return PositiveForm(d)


def random_ranks(rng, algebra: Algebra, allow_zero: bool = False) -> tuple[int, ...]:
    lo = 0 if allow_zero else 1
    ranks = tuple(int(rng.integers(lo, n + 1)) for n in algebra.block_dims)
    if sum(ranks) == 0:
        ranks = (1,) + ranks[1:]
    return ranks


def random_vector(rng, n: int) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_projection_partition(rng, algebra: Algebra, pieces: int | None = None) -> list[Element]:
    """Random partition of unity into orthogonal projections."""
    eigvecs = []
    for bi, n in enumerate(algebra.block_dims):
        u = unitary(rng, n)
        for j in range(n):
            eigvecs.append((bi, u[:, j]))
    total = len(eigvecs)
    pieces = total if pieces is None else max(1, min(pieces, total))
    order = rng.permutation(total)
    labels = np.empty(total, dtype=int)
    labels[order[:pieces]] = np.arange(pieces)
    labels[order[pieces:]] = rng.integers(0, pieces, total - pieces)
    out = []
    for lab in range(pieces):
        blocks = [np.zeros((n, n), dtype=complex) for n in algebra.block_dims]
        for (bi, v), l in zip(eigvecs, labels):
            if l == lab:
                blocks[bi] += np.outer(v, v.conj())
        out.append(algebra.element(blocks))
    return out


def spawn(seed: int, trials: int) -> list[np.random.Generator]:
    """One independent generator per trial."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]
