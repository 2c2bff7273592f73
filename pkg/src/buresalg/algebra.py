"""Finite-dimensional *-algebras realized as direct sums of full matrix blocks.

Every finite-dimensional *-algebra is *-isomorphic to a direct sum
M_{n_1} + ... + M_{n_k}; an :class:`Element` stores one complex matrix per
block.  Commutative algebras are the case where every block has size 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import AlgebraMismatch, InvalidPartition, NonHermitian, NotPositive

# Relative tolerances; each is multiplied by (1 + ||x||) of the element at hand.
CLUSTER_REL = 1e-8
RANK_REL = 1e-10
HERMITIAN_REL = 1e-9
POSITIVE_REL = 1e-10

# Eigenvalues below this multiple of eps * ||x|| are numerical zeros.
_SQRT_FLOOR = 64 * np.finfo(float).eps


def cluster_tolerance(x: "Element") -> float:
    return CLUSTER_REL * (1.0 + x.norm())


def rank_tolerance(x: "Element") -> float:
    return RANK_REL * (1.0 + x.norm())


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Algebra:
    """Ordered block dimensions of a block-diagonal *-algebra."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims:
            raise ValueError("an algebra needs at least one block")
        if any(n < 1 for n in dims):
            raise ValueError(f"block dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @classmethod
    def full(cls, n: int) -> "Algebra":
        return cls((n,))

    @classmethod
    def diagonal(cls, n: int) -> "Algebra":
        return cls((1,) * n)

    @property
    def dim(self) -> int:
        """Total matrix size N = sum of block dimensions."""
        return sum(self.block_dims)

    @property
    def linear_dim(self) -> int:
        return sum(n * n for n in self.block_dims)

    @property
    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.block_dims)

    def element(self, blocks: Sequence) -> "Element":
        return Element(self, tuple(_frozen(b) for b in blocks))

    def identity(self) -> "Element":
        return self.element([np.eye(n) for n in self.block_dims])

    def zero(self) -> "Element":
        return self.element([np.zeros((n, n)) for n in self.block_dims])

    def scalar(self, c: complex) -> "Element":
        return self.element([c * np.eye(n) for n in self.block_dims])

    def diag(self, values: Sequence[complex]) -> "Element":
        """Diagonal element from N values, split consecutively over the blocks."""
        values = np.asarray(values, dtype=complex)
        if values.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} diagonal values, got {values.shape}")
        blocks, start = [], 0
        for n in self.block_dims:
            blocks.append(np.diag(values[start:start + n]))
            start += n
        return self.element(blocks)

    def from_dense(self, m) -> "Element":
        """Cut the diagonal blocks out of an N x N matrix.

        Off-block entries are discarded, so this is the conditional expectation
        onto the block-diagonal algebra.
        """
        m = np.asarray(m, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix, got {m.shape}")
        blocks, start = [], 0
        for n in self.block_dims:
            blocks.append(m[start:start + n, start:start + n])
            start += n
        return self.element(blocks)


@dataclass(frozen=True, eq=False)
class Element:
    """An element of an :class:`Algebra`: one square complex matrix per block."""

    algebra: Algebra
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.algebra.block_dims):
            raise ValueError(
                f"{len(self.blocks)} blocks given for algebra {self.algebra.block_dims}")
        frozen = []
        for b, n in zip(self.blocks, self.algebra.block_dims):
            if b.shape != (n, n):
                raise ValueError(f"block of shape {b.shape} does not match dimension {n}")
            if b.flags.writeable or b.dtype != complex:
                b = _frozen(b)
            frozen.append(b)
        object.__setattr__(self, "blocks", tuple(frozen))

    # -- arithmetic ---------------------------------------------------------

    def _same(self, other: "Element") -> None:
        if not isinstance(other, Element):
            raise TypeError(f"expected an Element, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise AlgebraMismatch(
                f"algebras {self.algebra.block_dims} and {other.algebra.block_dims} differ")

    def _map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "Element":
        return self.algebra.element([fn(b) for b in self.blocks])

    def _zip(self, other: "Element", fn) -> "Element":
        self._same(other)
        return self.algebra.element([fn(a, b) for a, b in zip(self.blocks, other.blocks)])

    def __add__(self, other):
        if isinstance(other, Element):
            return self._zip(other, np.add)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Element):
            return self._zip(other, np.subtract)
        return NotImplemented

    def __neg__(self):
        return self._map(np.negative)

    def __mul__(self, c):
        if isinstance(c, Element):
            raise TypeError("use @ for algebra products")
        return self._map(lambda b: b * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self._map(lambda b: b / c)

    def __matmul__(self, other):
        if isinstance(other, Element):
            return self._zip(other, np.matmul)
        return NotImplemented

    @property
    def H(self) -> "Element":
        """The involution x -> x*."""
        return self._map(lambda b: b.conj().T)

    # -- scalar quantities --------------------------------------------------

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks))

    def norm(self) -> float:
        """C*-norm: the largest block operator norm."""
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks)

    def fro(self) -> float:
        return float(np.sqrt(sum(np.sum(np.abs(b) ** 2) for b in self.blocks)))

    def trace_norm(self) -> float:
        return float(sum(np.linalg.svd(b, compute_uv=False).sum() for b in self.blocks))

    def to_dense(self) -> np.ndarray:
        return scipy.linalg.block_diag(*self.blocks)

    # -- predicates ---------------------------------------------------------

    def hermitian_residual(self) -> float:
        return max(float(np.linalg.norm(b - b.conj().T, 2)) for b in self.blocks)

    def is_hermitian(self, tol: float | None = None) -> bool:
        if tol is None:
            tol = HERMITIAN_REL * (1.0 + self.norm())
        return self.hermitian_residual() <= tol

    def is_positive(self, tol: float | None = None) -> bool:
        if tol is None:
            tol = POSITIVE_REL * (1.0 + self.norm())
        if not self.is_hermitian(max(tol, HERMITIAN_REL * (1.0 + self.norm()))):
            return False
        return self.herm().min_eigenvalue() >= -tol

    def is_invertible_positive(self, tol: float | None = None) -> bool:
        if tol is None:
            tol = RANK_REL * (1.0 + self.norm())
        return self.is_hermitian() and self.herm().min_eigenvalue() > tol

    def is_projection(self, tol: float = 1e-8) -> bool:
        return self.is_hermitian(tol) and (self @ self - self).norm() <= tol

    def is_zero(self, atol: float = 1e-12) -> bool:
        return self.norm() <= atol

    def allclose(self, other: "Element", atol: float = 1e-9) -> bool:
        return (self - other).norm() <= atol

    def commutes_with(self, other: "Element", tol: float = 1e-9) -> bool:
        return (self @ other - other @ self).norm() <= tol * (1.0 + self.norm() * other.norm())

    # -- hermitian functional calculus -------------------------------------

    def herm(self) -> "Element":
        """Hermitian part (x + x*)/2."""
        return self._map(lambda b: 0.5 * (b + b.conj().T))

    def _require_hermitian(self) -> None:
        if not self.is_hermitian():
            raise NonHermitian(f"hermiticity residual {self.hermitian_residual():.3e}")

    def eigvalsh(self) -> np.ndarray:
        """All eigenvalues of a hermitian element, pooled over blocks, ascending."""
        self._require_hermitian()
        h = self.herm()
        return np.sort(np.concatenate([np.linalg.eigvalsh(b) for b in h.blocks]))

    def min_eigenvalue(self) -> float:
        return float(min(np.linalg.eigvalsh(b)[0] for b in self.herm().blocks))

    def max_eigenvalue(self) -> float:
        return float(max(np.linalg.eigvalsh(b)[-1] for b in self.herm().blocks))

    def apply(self, fn: Callable[[np.ndarray], np.ndarray]) -> "Element":
        """f(x) for hermitian x, blockwise through the eigendecomposition."""
        self._require_hermitian()
        out = []
        for b in self.herm().blocks:
            w, v = np.linalg.eigh(b)
            out.append((v * fn(w)) @ v.conj().T)
        return self.algebra.element(out)

    def sqrt(self) -> "Element":
        """Positive square root; eigenvalues at round-off level map to 0."""
        floor = _SQRT_FLOOR * self.norm()

        def f(w):
            return np.sqrt(np.where(w > floor, w, 0.0))

        return self.apply(f)

    def inv(self) -> "Element":
        return self._map(np.linalg.inv)


# -- spectral data -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpectralResolution:
    """x = sum_i eigenvalues[i] * projections[i] with clustered eigenvalues."""

    eigenvalues: tuple[float, ...]
    projections: tuple[Element, ...]
    source: Element

    def reconstruct(self) -> Element:
        out = self.source.algebra.zero()
        for lam, e in zip(self.eigenvalues, self.projections):
            out = out + lam * e
        return out

    def projection_for(self, value: float, tol: float) -> Element:
        """Spectral projection at ``value``; zero if value is not an eigenvalue."""
        for lam, e in zip(self.eigenvalues, self.projections):
            if abs(lam - value) <= tol:
                return e
        return self.source.algebra.zero()

    def __len__(self):
        return len(self.eigenvalues)


def spectral_resolution(x: Element, cluster_tol: float | None = None) -> SpectralResolution:
    """Spectral resolution of a hermitian element with eigenvalue clustering.

    Eigenvalues from all blocks are pooled and sorted; consecutive values whose
    gap is at most ``cluster_tol`` are merged and represented by their mean.
    The default tolerance is ``1e-8 * (1 + ||x||)``.
    """
    x._require_hermitian()
    if cluster_tol is None:
        cluster_tol = cluster_tolerance(x)
    h = x.herm()
    entries = []  # (eigenvalue, block index, eigenvector)
    for bi, b in enumerate(h.blocks):
        w, v = np.linalg.eigh(b)
        for j in range(len(w)):
            entries.append((float(w[j]), bi, v[:, j]))
    entries.sort(key=lambda t: t[0])

    clusters: list[list] = []
    for ent in entries:
        if clusters and ent[0] - clusters[-1][-1][0] <= cluster_tol:
            clusters[-1].append(ent)
        else:
            clusters.append([ent])

    eigenvalues, projections = [], []
    for cl in clusters:
        blocks = [np.zeros((n, n), dtype=complex) for n in x.algebra.block_dims]
        for _, bi, vec in cl:
            blocks[bi] += np.outer(vec, vec.conj())
        eigenvalues.append(float(np.mean([c[0] for c in cl])))
        projections.append(x.algebra.element(blocks))
    return SpectralResolution(tuple(eigenvalues), tuple(projections), x)


def _require_positive(x: Element) -> None:
    if not x.is_positive():
        lo = x.herm().min_eigenvalue() if x.is_hermitian() else float("nan")
        raise NotPositive(f"element is not positive (min eigenvalue {lo:.3e}, "
                          f"hermiticity residual {x.hermitian_residual():.3e})")


def support(x: Element, rank_tol: float | None = None) -> Element:
    """Support projection s(x) of a positive element.

    Eigenvalues above ``rank_tol`` (default ``1e-10 * (1 + ||x||)``) count as
    nonzero.  This single threshold decides faithfulness downstream.
    """
    _require_positive(x)
    if rank_tol is None:
        rank_tol = rank_tolerance(x)
    out = []
    for b in x.herm().blocks:
        w, v = np.linalg.eigh(b)
        keep = v[:, w > rank_tol]
        out.append(keep @ keep.conj().T)
    return x.algebra.element(out)


def rank(x: Element, rank_tol: float | None = None) -> tuple[int, ...]:
    """Blockwise numerical rank of a positive element."""
    _require_positive(x)
    if rank_tol is None:
        rank_tol = rank_tolerance(x)
    return tuple(int(np.sum(np.linalg.eigvalsh(b) > rank_tol)) for b in x.herm().blocks)


def pseudo_inverse(x: Element, rank_tol: float | None = None) -> Element:
    """Inverse of a positive element on its support, zero on the kernel."""
    _require_positive(x)
    if rank_tol is None:
        rank_tol = rank_tolerance(x)

    def f(w):
        safe = np.where(w > rank_tol, w, 1.0)
        return np.where(w > rank_tol, 1.0 / safe, 0.0)

    return x.apply(f)


def orthocomplement(p: Element) -> Element:
    return p.algebra.identity() - p


# -- abelian subalgebras -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AbelianSubalgebra:
    """A unital abelian subalgebra, given by the partition of unity into its atoms."""

    algebra: Algebra
    atoms: tuple[Element, ...]

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        validate_partition(self.algebra, atoms)

    @classmethod
    def trivial(cls, algebra: Algebra) -> "AbelianSubalgebra":
        return cls(algebra, (algebra.identity(),))

    @classmethod
    def from_projections(cls, algebra: Algebra, projections: Iterable[Element],
                         tol: float = 1e-8) -> "AbelianSubalgebra":
        """Drop zero projections, then build the algebra."""
        atoms = tuple(p for p in projections if p.trace().real > tol)
        return cls(algebra, atoms)

    def __len__(self):
        return len(self.atoms)

    @property
    def is_trivial(self) -> bool:
        return len(self.atoms) == 1

    def element(self, coefficients: Sequence[complex]) -> Element:
        if len(coefficients) != len(self.atoms):
            raise ValueError("one coefficient per atom expected")
        out = self.algebra.zero()
        for c, p in zip(coefficients, self.atoms):
            out = out + c * p
        return out

    def conditional(self, y: Element) -> Element:
        """Trace-preserving projection of y onto span(atoms)."""
        out = self.algebra.zero()
        for p in self.atoms:
            out = out + ((p @ y).trace() / p.trace()) * p
        return out

    def contains(self, y: Element, tol: float = 1e-8) -> bool:
        if y.algebra != self.algebra:
            raise AlgebraMismatch("element from a different algebra")
        return (y - self.conditional(y)).norm() <= tol * (1.0 + y.norm())

    def is_subalgebra_of(self, other: "AbelianSubalgebra", tol: float = 1e-8) -> bool:
        return all(other.contains(p, tol) for p in self.atoms)

    def same_as(self, other: "AbelianSubalgebra", tol: float = 1e-8) -> bool:
        return (len(self) == len(other) and self.is_subalgebra_of(other, tol)
                and other.is_subalgebra_of(self, tol))


def validate_partition(algebra: Algebra, atoms: Sequence[Element], tol: float = 1e-8) -> None:
    if not atoms:
        raise InvalidPartition("a partition of unity needs at least one atom")
    total = algebra.zero()
    for i, p in enumerate(atoms):
        if p.algebra != algebra:
            raise InvalidPartition(f"atom {i} belongs to another algebra")
        if not p.is_projection(tol):
            raise InvalidPartition(f"atom {i} is not a projection")
        if p.trace().real < 0.5:
            raise InvalidPartition(f"atom {i} is zero")
        total = total + p
    if not total.allclose(algebra.identity(), tol * len(atoms)):
        raise InvalidPartition("atoms do not sum to the identity")
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            if (atoms[i] @ atoms[j]).norm() > tol:
                raise InvalidPartition(f"atoms {i} and {j} are not orthogonal")


def generated_abelian_algebra(x: Element, cluster_tol: float | None = None) -> AbelianSubalgebra:
    """R[x]: the unital abelian algebra generated by a hermitian element."""
    res = spectral_resolution(x, cluster_tol)
    return AbelianSubalgebra(x.algebra, res.projections)
