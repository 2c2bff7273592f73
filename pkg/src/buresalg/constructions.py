"""Named test instances with known least-algebra behaviour."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AbelianSubalgebra, Algebra, Element, generated_abelian_algebra
from .forms import PositiveForm, inner_derive
from .subalgebras import Automorphism, Probes, bloch_projection


@dataclass(frozen=True, eq=False)
class Instance:
    name: str
    nu: PositiveForm
    rho: PositiveForm
    x: Element
    probes: Probes = Probes()
    meta: dict | None = None


def jump_instance(n: int = 16, jump: float = 1.7) -> Instance:
    """Diagonal algebra of dimension n + 1, nu uniform off the first coordinate.

    The density ratio takes the single value ``jump`` on s(nu), so x has spectrum
    {0, jump} and s(rho) = s(nu) < 1.
    """
    alg = Algebra.diagonal(n + 1)
    nu = PositiveForm(alg.diag([0.0] + [1.0 / n] * n))
    x = alg.diag([0.0] + [jump] * n)
    return Instance("jump", nu, inner_derive(nu, x), x, meta={"jump": jump})


def flip_instance(n: int = 8) -> Instance:
    """Diagonal algebra of dimension 2n, nu uniform on the first half.

    x is strictly decreasing on the first half; the probe k copies x, flipped,
    onto the second half so that the flip permutation fixes x + k.
    """
    alg = Algebra.diagonal(2 * n)
    nu = PositiveForm(alg.diag([1.0 / n] * n + [0.0] * n))
    xs = 2.0 - np.arange(n) / n
    x = alg.diag(list(xs) + [0.0] * n)
    k = alg.diag([0.0] * n + list(xs[::-1]))
    flip = Automorphism(alg, permutation=tuple(range(2 * n - 1, -1, -1)))
    return Instance("flip", nu, inner_derive(nu, x), x, Probes((flip,), (k,)))


def tilted_pure_instance(theta: float = 0.7, eps: float = 0.3) -> Instance:
    """M2 with nu the pure state on q^perp and rho = nu^x, x = p + eps p^perp.

    p is tilted by ``theta`` against q, so rho is not dominated by nu while
    positive invertible solutions of rho = nu^x exist.
    """
    alg = Algebra.full(2)
    q = alg.element([bloch_projection(0.0)])
    p = alg.element([bloch_projection(theta)])
    one = alg.identity()
    nu = PositiveForm(one - q)
    x = p + eps * (one - p)
    return Instance("tilted_pure", nu, inner_derive(nu, x), x, meta={"q": q})


def derived_instance(nu: PositiveForm, a: Element) -> Instance:
    """rho = nu^a with a positive; R[a] is minimizing."""
    return Instance("derived", nu, inner_derive(nu, a), a)


def faithful_m2_instance(angle: float = 0.0, eigenvalues=(1.6, 0.5),
                         nu_diag=(0.6, 0.4), tilt: float = 0.4) -> Instance:
    """M2 with a real faithful nu and rho = nu^x, x real with eigenvector at Bloch ``angle``.

    ``tilt`` rotates D_nu away from the eigenbasis of x so the pair is generic.
    """
    alg = Algebra.full(2)
    p = bloch_projection(angle)
    x = alg.element([eigenvalues[0] * p + eigenvalues[1] * (np.eye(2) - p)])
    c, s = np.cos(tilt), np.sin(tilt)
    u = np.array([[c, -s], [s, c]])
    d = u @ np.diag(nu_diag) @ u.T
    nu = PositiveForm(alg.element([d]))
    return Instance("faithful_m2", nu, inner_derive(nu, x), x, meta={"angle": angle})


def x_algebra(inst: Instance) -> AbelianSubalgebra:
    return generated_abelian_algebra(inst.x)
