"""Exact formal star products, Fedosov quantization and flux on flat tori."""
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    RepresentationError,
    StarfluxError,
    UnsupportedPathError,
)
from .formal import FormalScalar, GaussQ, TimeFun, gq, series_exp, series_mul, time_integrate
from .torus import (
    H1Class,
    TorusField,
    TorusForm,
    TorusFun,
    dfun,
    h1_class,
    ham_field,
    lambda_matrix,
    omega_matrix,
    poisson,
    primitive,
    symplectic_form,
)
from .star import MoyalProduct, StarProduct, axiom_residuals, check_associativity, extract_cochain, moyal
from .weyl import (
    SymplecticConnection,
    WeylSection,
    circ,
    curvature_section,
    delta,
    delta_inv,
    scaled_commutator,
)
from .fedosov import FedosovData, FedosovProduct, omega_series
from .dynamics import (
    AutPath,
    Automorphism,
    Derivation,
    ModeOperator,
    PathOperator,
    derivation_class,
    hamiltonianize,
    heisenberg_flow,
    log_vertical,
    quasi_inner,
)
from .flux import (
    LoopDescriptor,
    classical_flux,
    flux_def_closed_form,
    flux_def_generic,
    flux_def_of_loop,
    flux_of_path,
    flux_order1,
    gamma_generators,
    loop_lift,
    order1_form,
)
from .equivalence import EquivalenceOperator, check_flux_invariance, conjugate_automorphism, transport

__version__ = "0.1.0"
