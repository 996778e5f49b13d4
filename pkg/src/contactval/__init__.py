"""Numerical verification toolkit for contact valuations.

Modules
-------
matnum
    Pfaffians, skew canonical forms, mixed discriminants, exact tables.
contact_local
    Contact points of graph hypersurfaces and their local areas.
surfaces
    Built-in surfaces and the surface-spec mini-language.
sphere_contact
    Exact rational tables for the contact sphere.
grassmann_mc
    Haar sampling of Grassmannians, Kähler angles, moment experiments.
crofton_flat
    Crofton experiments in linear symplectic space.
checks
    The acceptance checks shared by the CLI and the test suite.
"""

from .errors import (ConsistencyError, ContactValError, ContractError, DegeneracyError,
                     DimensionError, DomainError, PoleError, TransversalityError,
                     ValidationError)

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError", "ContactValError", "ContractError", "DegeneracyError",
    "DimensionError", "DomainError", "PoleError", "TransversalityError", "ValidationError",
    "__version__",
]
