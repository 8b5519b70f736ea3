"""Exact-arithmetic toolkit for toric foliated pairs: singularity
classification, resolutions, and the toric foliated minimal model program."""

from .classify import (
    Verdict,
    has_simple_singularities,
    is_canonical,
    is_f_dlt,
    is_log_canonical,
    is_non_dicritical,
    is_non_resonant,
    is_tangent,
    is_terminal_at,
    singular_locus,
)
from .divisor import SupportFunction, discrepancy_at, evaluate_phi, support_function
from .errors import TorifolError
from .fan import Fan, faces_and_walls, locate_cone, star_subdivide, validate_fan
from .foliation import (
    GaussianSubspace,
    ToricFoliatedPair,
    canonical_divisor,
    is_algebraically_integrable,
    quotient_foliation,
    ray_iota,
)
from .gaussian import (
    GaussRat,
    RatSubspace,
    kernel_basis,
    matrix_rank,
    primitive_vector,
    real_trace_subspace,
    rref,
    solve_linear,
)
from .mmp import (
    ExtremalClass,
    MMPStep,
    MMPTrace,
    WallRelation,
    cone_certificate,
    contract_ray,
    curve_class,
    extremal_rays,
    run_mmp,
    wall_relation,
)
from .polyhedra import (
    RatPolyhedron,
    enumerate_lattice_points,
    lattice_feasible,
    strict_meet,
    strict_meet_witness,
)
from .problemio import load_problem
from .resolve import (
    RefinementMorphism,
    dagger_resolution,
    fdlt_modification,
    foliated_log_resolution,
    simplicialize_same_rays,
    smooth_refinement,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
