"""Enumeration and realizability analysis of 2-simple 2-simplicial 3-spheres."""

from .complexes import (
    FaceLattice,
    FacetList,
    FacetListError,
    FlagVector,
    LatticeError,
    NotGradedError,
    PVector,
    RankOverflowError,
    canonical_form,
    dual,
    dual_facet_list,
    face_lattice,
    flag_vector,
    is_2simple,
    is_2simplicial,
    is_eulerian,
    is_isomorphic,
    p_vector,
    parse_facet_list,
    simple_vertices,
)

__all__ = [
    "FaceLattice",
    "FacetList",
    "FacetListError",
    "FlagVector",
    "LatticeError",
    "NotGradedError",
    "PVector",
    "RankOverflowError",
    "canonical_form",
    "dual",
    "dual_facet_list",
    "face_lattice",
    "flag_vector",
    "is_2simple",
    "is_2simplicial",
    "is_eulerian",
    "is_isomorphic",
    "p_vector",
    "parse_facet_list",
    "simple_vertices",
]

__version__ = "0.1.0"
