"""Exact tools for Mori cones of smooth projective surfaces described by
finite configurations of curves."""
from __future__ import annotations

from .ample import (
    AmpleCertificate,
    effective_bounds,
    enumerate_gram,
    make_ample,
    minimal_ample,
    pf_eigen,
    reider_class,
)
from .blowup import blow_up, run_script, seed_config, tower_script
from .cone import certify_fpmc, check_almost_fpmc, extreme_rays, two_curve_criterion
from .config import CurveConfiguration, canonical_class, find_exceptional_subsets, validate
from .errors import (
    AdjunctionInconsistent,
    AmbiguousStructure,
    FPMCError,
    GeometricInconsistency,
    Infeasible,
    InputInvalid,
    NotAntimultiple,
    UnsupportedPrecondition,
)
from .fixtures import fixture, fixture_ids
from .lattice import Lattice, discriminant_group_and_form, enumerate_bounded_classes
from .linalg import kernel_basis, signature, smith_normal_form, solve_linear
from .roots import case2b_criterion, classify_minus2_components, mw_group, parse_fibers, verify_mw_table

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
