"""Transition probability and Bures distance between positive forms on finite-dimensional *-algebras."""
from .algebra import (AbelianSubalgebra, Algebra, Element, SpectralResolution,
                      generated_abelian_algebra, pseudo_inverse, spectral_resolution,
                      support)
from .forms import (PositiveForm, are_orthogonal, dominates, evaluate, inner_derive,
                    kernel_ideal_member, radon_nikodym)
from .fidelity import FidelityResult, gamma_sup, transition_probability

__version__ = "0.1.0"
