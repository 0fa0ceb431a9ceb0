"""Exact and numerical tools for proper actions, temperedness and dynamical
volumes on homogeneous spaces of real reductive groups."""

__version__ = "0.1.0"

from .cartan import MatrixGroupSpec, cartan_dims, cartan_projection_gl, real_rank
from .catalog import radon_hurwitz, space_form_pair, tangential_table_audit
from .cones import ConeUnion, PolyCone, RationalSubspace
from .kernels import BACKEND
from .properness import ReductivePair, is_proper_reductive, is_similar_reductive
from .rootdata import RootDatum, build_root_datum
from .tempered import WeightSystem, p_V
from .volume import MCConfig, Shape, mc_overlap, q_estimate

__all__ = [
    "BACKEND",
    "ConeUnion",
    "MCConfig",
    "MatrixGroupSpec",
    "PolyCone",
    "RationalSubspace",
    "ReductivePair",
    "RootDatum",
    "Shape",
    "WeightSystem",
    "build_root_datum",
    "cartan_dims",
    "cartan_projection_gl",
    "is_proper_reductive",
    "is_similar_reductive",
    "mc_overlap",
    "p_V",
    "q_estimate",
    "radon_hurwitz",
    "real_rank",
    "space_form_pair",
    "tangential_table_audit",
]
