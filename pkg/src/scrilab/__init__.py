"""scrilab: numerical laboratory for constraint-damped wave equations,
characteristic transport, and decay diagnostics near null infinity."""

__version__ = "0.1.0"

from . import bondi, chart, gr_ops, maxwell, profiles, scri_solver, tensors  # noqa: F401
