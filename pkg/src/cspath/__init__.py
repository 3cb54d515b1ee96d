"""Coherent-state path integrals for single-mode bosonic Hamiltonians.

The package is layered: exact operator algebra (:mod:`cspath.algebra`), Fock-space
reference values (:mod:`cspath.oracle`), time-sliced lattices
(:mod:`cspath.lattice`), the auxiliary-field frequency integral
(:mod:`cspath.hs`), semiclassics (:mod:`cspath.semiclassical`), a Hamiltonian
expression language (:mod:`cspath.dsl`) and a command-line front end
(:mod:`cspath.cli`).
"""

from .algebra import (BosonPolynomial, ClassicalSymbol, NumberPolynomial, PhaseSpacePolynomial, ZSymbol,
                      antinormal_symbol, bose_hubbard, classical_symbol, fock_matrix, harmonic,
                      normal_order, to_phase_space, weyl_symbol, weyl_transform)
from .coeff import Coeff
from .dsl import ParseError, lower, parse, to_text
from .errors import (ContourError, CSPathError, DegenerateError, DivergenceError, InputError,
                     NumericalError, QuadratureError, SaddleError, ShapeError, TruncationError)
from .hs import constrained_partition, omega_propagator_quadrature, omega_propagator_series
from .lattice import (LatticeScheme, ModeCutoff, lattice_propagator, matsubara_partition, moment_map,
                      polar_pitfall_partition, richardson, scheme_factor_check, sliced_action,
                      transfer_partition)
from .oracle import (FockTruncation, PropagatorSpec, coherent_overlap, harmonic_propagator_closed,
                     partition_exact, propagator_fock)
from .semiclassical import (SaddleProblem, extract_coefficients, find_saddle, phi_omega,
                            stationary_phase_propagator)

__version__ = "0.1.0"
