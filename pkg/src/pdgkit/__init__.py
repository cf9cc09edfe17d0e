"""Exact computations with N-complexes, p-DG modules over k[x_1..x_n] and
rank certificates for complexes over elementary abelian p-groups."""

from .field import FieldSpec, field_make
from .qcombinat import QContext
from .ncomplex import NComplexFin, ncx_homology
from .groupchain import GComplex, gc_circle, gc_free, gc_homology, gc_iota, gc_torus
from .pdg import (FreeAComplex, PDGModule, pdg_beta, pdg_composition_series, pdg_homology,
                  pdg_homology_acomplex, pdg_koszul, pdg_minimal_model)
from .certify import Certificate, cert_bound_report, cert_check, cert_search

__all__ = [
    "FieldSpec", "field_make", "QContext", "NComplexFin", "ncx_homology", "GComplex", "gc_circle", "gc_free",
    "gc_homology", "gc_iota", "gc_torus", "FreeAComplex", "PDGModule", "pdg_beta", "pdg_composition_series",
    "pdg_homology", "pdg_homology_acomplex", "pdg_koszul", "pdg_minimal_model", "Certificate",
    "cert_bound_report", "cert_check", "cert_search",
]

__version__ = "0.1.0"
