"""High-precision laboratory for the semi-local explicit-formula quadratic
form, prolate spheroidal projections, and the perturbed scaling Dirac
operator whose spectrum tracks the critical zeros of zeta.
"""

from .context import NumContext, DEFAULT_CONTEXT, ContextError

__all__ = ["NumContext", "DEFAULT_CONTEXT", "ContextError"]

__version__ = "0.1.0"
