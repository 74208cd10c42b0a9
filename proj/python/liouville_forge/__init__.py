"""Python front end for the liouville-forge C++ core.

The heavy lifting happens in the compiled ``_core`` module; functions that
return reports hand back plain dicts parsed from the same JSON the command
line tool writes.
"""

import json

from . import _core
from ._core import LiouvilleError, char_poly, companion_matrix, determinant, run_cli

__version__ = _core.__version__

__all__ = [
    "LiouvilleError",
    "certify",
    "char_poly",
    "companion_matrix",
    "descent",
    "determinant",
    "find_matrix",
    "run_cli",
    "skeleton_dimension",
]


def find_matrix(n, mu=(), eps=0.5, k1_max=100000, seed=0):
    return json.loads(_core.find_matrix_json(n, list(mu), eps, k1_max, seed))


def certify(model, samples=10000, tol=1e-8, seed=0, params=None, matrix=None):
    return json.loads(_core.certify_json(model, samples, tol, seed, params or {}, matrix or []))


def descent(model, samples=1000, tol=1e-9, force_G=None, seed=0, matrix=None):
    return json.loads(_core.descent_json(model, samples, tol, force_G, seed, matrix or []))


def skeleton_dimension(model, depth=8, seeds=100000, scales=(), theta0=0.0, thickness=0.05, seed=0, matrix=None):
    return json.loads(_core.skeleton_json(model, depth, seeds, list(scales), theta0, thickness, seed, matrix or []))
