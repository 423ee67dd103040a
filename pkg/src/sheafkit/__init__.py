"""Executable sheaf theory on finite T0 spaces with finite ring stalks.

Subpackages: finspace (spaces), finalg (rings, matrices, submodules),
presheaf (presheaves, stalks, sheafification, pullbacks), vecsheaf (module
sheaves, cocycles, weighted embeddings), grassmann (Grassmann presheaves and
the section/subsheaf classification), cli (JSON front end).
"""

from . import cli, finalg, finspace, grassmann, presheaf, vecsheaf  # noqa: F401

__version__ = "0.1.0"
