"""Quantum operations on the torus: non-unitality, phase-space contraction and invariant states."""

from .channels import (AffineRep, KrausChannel, TracePreservationError, affine_representation,
                       apply, check_tp, compose, eta, eta_from_affine, eta_from_purity,
                       gamma_operator, identity_channel, is_unital, maximally_mixed, purity,
                       superoperator_matrix, validate_density)
from .maps import (classical_attractor, classical_step, quantum_baker, quantum_standard_map,
                   unitary_channel)
from .noise import (GadModel, amplitude_damping_qubit, gad_channel, gad_eta, rup_gaussian,
                    sdc_channel, sdc_eta_analytic, sdc_eta_exact, sloppy_noise)
from .steady import ConvergenceReport, invariant_state, invariant_state_spectral, subleading_modulus
from .torus import (DimensionError, HusimiGrid, TorusSpace, coherent_state, fourier_matrix, husimi,
                    make_space, translation)

__version__ = "0.1.0"
