"""semistab: a numerical laboratory for semigroup stability asymptotics.

Builds concrete operator models, computes semigroups, resolvents, and
fractional powers, fits resolvent-growth and decay exponents, and checks
the measured asymptotics against guaranteed decay rates.
"""

from . import battery, decaylab, errors, fraccalc, multiplier, numcore, operators, resolvent

__all__ = [
    "battery",
    "decaylab",
    "errors",
    "fraccalc",
    "multiplier",
    "numcore",
    "operators",
    "resolvent",
]

__version__ = "0.1.0"
