"""Configurable-precision arithmetic helpers.

All series accumulation and root refinement in this package runs on
mpmath reals.  The working precision is whatever ``mp.dps`` is at call
time; public entry points accept a ``dps`` argument and wrap their body
in :func:`working_dps`.  Numbers that enter a computation (potential
coefficients, radii, energies) are converted with :func:`to_mpf`, which
treats strings as exact decimal literals and Fractions exactly, so a
spec built once can be re-used at any later precision without baking in
rounding from construction time.
"""

from __future__ import annotations

from contextlib import contextmanager
from fractions import Fraction

import mpmath
from mpmath import mp

# Default decimal digits: generous for unconfined certification, where
# evaluating the truncated series at large R cancels 20+ digits.
DEFAULT_DPS = 50
# Confined scans are cheaper and shallower; they default lower.
CONFINED_DPS = 30

# Digits of headroom between the cancellation estimate and the working
# precision before a result is declared unreliable.
GUARD_DIGITS = 10


@contextmanager
def working_dps(dps=None):
    """Context manager setting ``mp.dps`` (no-op when ``dps`` is None)."""
    if dps is None:
        yield mp.dps
        return
    old = mp.dps
    mp.dps = int(dps)
    try:
        yield mp.dps
    finally:
        mp.dps = old


def to_mpf(x):
    """Convert ``x`` to an mpf at the current working precision.

    Strings are parsed as exact decimal literals, Fractions exactly;
    ints and floats convert to their exact binary value.  Prefer strings
    or Fractions for decimal inputs like ``"0.1"`` when full working
    precision matters.
    """
    if isinstance(x, str):
        return mp.mpf(x)
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def to_exact(x):
    """Normalize a user-supplied number to an exact representation.

    Decimal strings and Fractions become Fractions; ints stay ints.
    Floats are kept as floats (their binary value is exact, but the
    decimal the user typed may not be; parse strings when that matters).
    """
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (int, Fraction)):
        return x
    return x


def nstr(x, digits=15):
    """Readable fixed-precision rendering of an mpf."""
    return mpmath.nstr(x, digits)
