"""Exact SIC fiducials: a recipe catalogue, high-precision evaluation and
equiangularity certification, plus real-quadratic-field utilities."""

from .catalogue import list_entries, lookup, parse_recipe
from .evaluation import build_fiducial, certify_branches, certified_recipe
from .numeric import DEFAULT_DIGITS, Kernel
from .verification import verify_entry, verify_fiducial

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_DIGITS",
    "Kernel",
    "build_fiducial",
    "certified_recipe",
    "certify_branches",
    "list_entries",
    "lookup",
    "parse_recipe",
    "verify_entry",
    "verify_fiducial",
    "__version__",
]
