"""Shared numerical context.

Every numerical routine in this package takes an explicit ``NumContext``
carrying the working precision and discretization defaults, so that a whole
pipeline can be re-run at a different precision by changing one object and the
output is a deterministic function of (inputs, context).

Resolution order for defaults: built-in < config file < environment < explicit
argument.  The config file is TOML (path in ``WEILZETA_CONFIG``, else
``./weilzeta.toml`` if present); recognized keys are ``digits``,
``quad_order``, ``trunc_n``, ``backend``.  Environment variables use the same
names upper-cased with a ``WEILZETA_`` prefix.

Two arithmetic lanes exist:

* ``backend="mp"`` (default): mpmath arbitrary precision at ``digits``
  significant digits.  All contracts are stated for this lane.
* ``backend="f64"``: hardware float64 via numpy, mirroring the prolate ->
  projection -> Dirac pipeline for sweep-scale work where tolerances are
  coarse (~1e-2).  ``digits`` then only controls bookkeeping thresholds.
"""

import os
try:
    import tomllib
except ImportError:                          # 3.10
    import tomli as tomllib
from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import Optional

from mpmath import mp

# Extra working digits used internally by routines so that results are good
# to the contract tolerance at ctx.digits.
GUARD_DIGITS = 10

# chi(mu, m) >= NU_THRESHOLD defines the band count nu(mu).  The
# characteristic values plateau near 1 and then fall off a cliff, so any
# threshold well inside (0.6, 0.97) selects the same m; 0.9 is the calibrated
# default.
NU_THRESHOLD = 0.9

_ENV_PREFIX = "WEILZETA_"

_MIN_DIGITS = 30
_MIN_QUAD_ORDER = 16
_MIN_TRUNC_N = 8


class ContextError(ValueError):
    pass


def _config_file_values() -> dict:
    path = os.environ.get(_ENV_PREFIX + "CONFIG")
    if path is None:
        path = "weilzeta.toml"
        if not os.path.exists(path):
            return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ContextError("cannot read config file %r: %s" % (path, exc))
    if "weilzeta" in data and isinstance(data["weilzeta"], dict):
        data = data["weilzeta"]
    out = {}
    for key in ("digits", "quad_order", "trunc_n", "backend"):
        if key in data:
            out[key] = data[key]
    return out


def _env_values() -> dict:
    out = {}
    for key, cast in (("digits", int), ("quad_order", int),
                      ("trunc_n", int), ("backend", str)):
        raw = os.environ.get(_ENV_PREFIX + key.upper())
        if raw is not None:
            try:
                out[key] = cast(raw)
            except ValueError:
                raise ContextError("bad value %r for %s%s"
                                   % (raw, _ENV_PREFIX, key.upper()))
    return out


@dataclass(frozen=True)
class NumContext:
    """Precision and truncation parameters for one computation."""

    digits: int = 120
    quad_order: int = 80
    trunc_N: int = 128
    eig_tol: Optional[float] = None  # None -> 10^-(digits-10)
    backend: str = "mp"

    def __post_init__(self):
        if self.backend not in ("mp", "f64"):
            raise ContextError("backend must be 'mp' or 'f64', got %r"
                               % (self.backend,))
        if self.digits < _MIN_DIGITS:
            raise ContextError("digits must be >= %d, got %d"
                               % (_MIN_DIGITS, self.digits))
        if self.quad_order < _MIN_QUAD_ORDER:
            raise ContextError("quad_order must be >= %d, got %d"
                               % (_MIN_QUAD_ORDER, self.quad_order))
        if self.trunc_N < _MIN_TRUNC_N:
            raise ContextError("trunc_N must be >= %d, got %d"
                               % (_MIN_TRUNC_N, self.trunc_N))

    # -- derived quantities -------------------------------------------------

    @property
    def eig_tol_resolved(self):
        """Eigen-residual tolerance as an mpf at current working precision."""
        if self.eig_tol is not None:
            return mp.mpf(self.eig_tol)
        return mp.mpf(10) ** (-(self.digits - 10))

    @property
    def quad_tol(self):
        """Relative quadrature target, 10^-(digits-15)."""
        return mp.mpf(10) ** (-(self.digits - 15))

    def kernel_threshold(self):
        """|eigenvalue| below this counts as kernel (mp lane)."""
        if self.backend == "f64":
            return 1e-6
        return mp.mpf(10) ** (-(self.digits // 3))

    # -- precision scope ----------------------------------------------------

    @contextmanager
    def precision(self, extra: int = 0):
        """Scope with mpmath working precision digits + GUARD + extra."""
        with mp.workdps(self.digits + GUARD_DIGITS + extra):
            yield mp

    def with_changes(self, **kw) -> "NumContext":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return {
            "digits": self.digits,
            "quad_order": self.quad_order,
            "trunc_N": self.trunc_N,
            "eig_tol": self.eig_tol,
            "backend": self.backend,
        }

    @classmethod
    def resolve(cls, **explicit) -> "NumContext":
        """Build a context honoring config file < env < explicit overrides."""
        values = {}
        values.update(_config_file_values())
        values.update(_env_values())
        if "trunc_n" in values:
            values["trunc_N"] = values.pop("trunc_n")
        for key, val in explicit.items():
            if val is not None:
                values[key] = val
        known = {"digits", "quad_order", "trunc_N", "eig_tol", "backend"}
        bad = set(values) - known
        if bad:
            raise ContextError("unknown context keys: %s" % sorted(bad))
        return cls(**values)


DEFAULT_CONTEXT = NumContext()
