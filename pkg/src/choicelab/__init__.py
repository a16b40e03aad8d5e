"""Irresolute social choice functions, Kelly-extension manipulation and axiom checks."""

from .prefcore import (
    DomainSpec,
    MarginMatrix,
    PreferenceRelation,
    Profile,
    condorcet_winner,
    enumerate_profiles,
    enumerate_relations,
    kelly_strict,
    kelly_weak,
    margin_matrix,
    relation_from_tiers,
    restrict,
    weaken_variants,
)
from .solutions import REGISTRY, apply_scf, get_scf

__version__ = "0.1.0"

__all__ = [
    "DomainSpec",
    "MarginMatrix",
    "PreferenceRelation",
    "Profile",
    "REGISTRY",
    "apply_scf",
    "condorcet_winner",
    "enumerate_profiles",
    "enumerate_relations",
    "get_scf",
    "kelly_strict",
    "kelly_weak",
    "margin_matrix",
    "relation_from_tiers",
    "restrict",
    "weaken_variants",
]
