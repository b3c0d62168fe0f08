"""Symbolic and numeric toolkit for theta-deformed spheres, noncommutative tori and their projective modules."""

from .algebra import (
    AlgebraElement,
    Presentation,
    PresentationMismatch,
    adjoint,
    alg_mul,
    ball,
    even_sphere,
    format_element,
    hom_check,
    normal_form,
    odd_sphere,
    relations,
    substitute,
    torus,
    trace_coeff,
)
from .clutching import (
    ClutchingDatum,
    ModuleClass,
    build_idempotent,
    cancellation_test,
    classical_chern,
    direct_sum,
    idempotent_report,
    make_class,
    make_x_datum,
    paper_module_class,
    recover_invariants,
)
from .field import FieldElement, boundary_check, eval_s3, eval_s4, homotopy_check, retraction_check, spectrum_c, winding
from .matrices import AlgMatrix, alg_trace, builtin, compute_h, is_projection, mat_mul
from .parser import ParseError, parse_element
from .phase import PhaseScalar, Theta
from .report import Check, Report
from .torus_rep import Rep, clock_shift, represent, rieffel_projection

__version__ = "0.1.0"
