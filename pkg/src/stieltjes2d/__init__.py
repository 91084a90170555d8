"""Riemann-Stieltjes double integrals on rectangles: oracle, cubature rules, certified bounds."""

from .bounds import BoundKind, CertBundle, certify, is_satisfied
from .core import (Bimonotone, BoundedBivariation, Box, BracketCertificate, CertificateMismatch, CornerGrowth,
                   DataError, DegenerateIntegrator, Direction, DomainError, ErrorCertificate, GridPartition, Holder,
                   HypothesisError, IncrementExtremes, Lipschitz, Measured, NodeOutOfDomain, PartialRange,
                   QuadrantBivariation, Range, Rect, Surface, corners, delta11)
from .cubature import RuleId, mercer_bracket, refinement_table, rs_midpoint_rule, rs_trapezoid_rule
from .gridio import load_grid, write_grid
from .gruss import chebyshev, gruss_bound, korkine_residual
from .rs_sum import integration_by_parts, rs_double_sum, rs_oracle
from .taylor import DnField, taylor_blend_An, taylor_bounds, taylor_midpoint, taylor_remainder_Bn
from .variation import arzela_variation, bimonotone_check, vitali_bivariation

__version__ = "0.1.0"
