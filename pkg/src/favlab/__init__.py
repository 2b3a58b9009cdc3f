"""Planar self-similar sets with dense rotations: dimension, projections,
relative-closeness certificates, density witnesses, and projection-length
decay experiments."""

__version__ = "0.1.0"

from .errors import FavlabError
from .ifs import IFS, Similitude, TailWord, similarity_dimension
from .relclose import (
    RelCloseCertificate,
    check_relclose,
    double_family,
    find_pair,
    grow_family,
    power_family,
)
from .rotation import diophantine_profile, epsilon_net, sigma_arithmetic
from .projection import density_witness, level_measure, project, visibility_estimate
from .favard import favard, fit_decay, projection_sweep, schedule
from .counting import avoidance_count, removal_recursion

__all__ = [
    "FavlabError",
    "IFS",
    "Similitude",
    "TailWord",
    "similarity_dimension",
    "RelCloseCertificate",
    "check_relclose",
    "find_pair",
    "double_family",
    "grow_family",
    "power_family",
    "diophantine_profile",
    "epsilon_net",
    "sigma_arithmetic",
    "project",
    "level_measure",
    "density_witness",
    "visibility_estimate",
    "favard",
    "projection_sweep",
    "fit_decay",
    "schedule",
    "avoidance_count",
    "removal_recursion",
]
