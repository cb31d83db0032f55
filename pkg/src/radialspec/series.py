"""Generalized power-series solution of the radial Schrödinger equation.

For a central potential with at most Coulomb-plus-centrifugal
singularity,

    V(r) = d_m2/r**2 + d_m1/r + sum_i d_i r**i,

the reduced radial equation  -u''/2 + V_eff(r,l) u = lam*u  has a
regular singular point at r=0.  The normalizable solution is a
generalized power series

    u(r, lam) = r**delta2 * sum_{i>=0} a_i r**(s*i),      a_0 = 1,

where delta2 = (1 + sqrt(8*d_m2 + (1+2l)**2)) / 2 is the larger indicial
exponent and s is the index stride (2 when the potential couples only
even powers, else 1).  The coefficients follow a linear recurrence in
which lam enters through the coefficient two raw powers back, so each
a_i is a polynomial of degree floor(s*i/2) in lam.

This module builds the coefficient table (numeric for fixed lam, or as
dense polynomials in lam), evaluates u and du/dr at a matching radius
with cancellation tracking, counts radial nodes, and reconstructs the
unnormalized wave function on a grid.  All arithmetic runs at the
working precision selected via the ``dps`` arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .arith import DEFAULT_DPS, GUARD_DIGITS, to_mpf, working_dps
from .errors import ConvergenceError, DomainError, PrecisionError, ResolutionError

__all__ = [
    "PotentialSpec",
    "ChannelParams",
    "SeriesTable",
    "BoundaryValues",
    "SeriesEvaluator",
    "indicial_exponents",
    "build_series",
    "boundary_values",
    "node_count",
    "wavefunction",
]

# Digits lost to plain roundoff accumulation before a sign is distrusted.
_NOISE_MARGIN = 5


def _float(x):
    """Lossy float view of an exact coefficient, for range checks only."""
    if isinstance(x, str):
        return float(Fraction(x))
    if isinstance(x, Fraction):
        return float(x)
    return float(x)


@dataclass(frozen=True)
class PotentialSpec:
    """Laurent-type central potential, exact-coefficient form.

    Coefficients may be ints, Fractions, decimal strings, floats or
    mpfs; they are converted to the working precision only when a
    series is built, so one spec serves every precision.

    Fields
    ------
    d_m2, d_m1 : coefficients of 1/r**2 and 1/r.
    regular    : tuple (d_0, d_1, ..., d_P) of the regular-part series.
    rho_V      : convergence radius of the regular part (inf if entire).
    step       : index stride s; 2 is allowed only when d_m1 = 0 and all
                 odd regular coefficients vanish.
    name       : optional label used in CLI output.
    """

    d_m2: object = 0
    d_m1: object = 0
    regular: tuple = ()
    rho_V: float = math.inf
    step: int = 1
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "regular", tuple(self.regular))
        if _float(self.d_m2) <= -0.125:
            raise DomainError(
                "1/r^2 coefficient %s <= -1/8: no normalizable regular "
                "solution exists" % (self.d_m2,)
            )
        if not (self.rho_V > 0):
            raise DomainError("rho_V must be positive")
        for i, d in enumerate(self.regular):
            if not math.isfinite(_float(d)):
                raise DomainError("regular coefficient d_%d is not finite" % i)
        if self.step not in (1, 2):
            raise DomainError("step must be 1 or 2")
        if self.step == 2:
            if _float(self.d_m1) != 0.0:
                raise DomainError("stride 2 requires d_m1 = 0")
            for i, d in enumerate(self.regular):
                if i % 2 == 1 and _float(d) != 0.0:
                    raise DomainError(
                        "stride 2 requires vanishing odd coefficients (d_%d != 0)" % i
                    )

    def v_reg(self, r):
        """Truncated regular part sum(d_i r**i) at the current precision."""
        r = to_mpf(r)
        acc = mp.mpf(0)
        pw = mp.mpf(1)
        for d in self.regular:
            acc += to_mpf(d) * pw
            pw *= r
        return acc

    def v(self, r):
        """Full truncated potential at r > 0."""
        r = to_mpf(r)
        return to_mpf(self.d_m2) / r**2 + to_mpf(self.d_m1) / r + self.v_reg(r)

    def v_eff_float(self, r, l):
        """Fast float view of V_eff(r,l), for window heuristics."""
        c2 = _float(self.d_m2) + l * (l + 1) / 2.0
        acc = c2 / r**2 + _float(self.d_m1) / r
        pw = 1.0
        for d in self.regular:
            acc += _float(d) * pw
            pw *= r
        return acc

    def v_eff_min_float(self, l, R, samples=2000):
        """Approximate min of V_eff over (0, R), sampled on a mixed grid."""
        lo = min(1e-6, R * 1e-6)
        vals = []
        # log-spaced points resolve the small-r region, linear ones the rest
        for k in range(samples // 2):
            r = lo * (R / lo) ** (k / (samples // 2 - 1))
            vals.append(self.v_eff_float(r, l))
        for k in range(1, samples // 2 + 1):
            r = R * k / (samples // 2)
            vals.append(self.v_eff_float(r, l))
        finite = [v for v in vals if math.isfinite(v)]
        if not finite:
            raise DomainError("effective potential has no finite samples on (0,R)")
        return min(finite)


@dataclass(frozen=True)
class ChannelParams:
    """Angular channel data: l and the indicial exponents.

    delta1 + delta2 = 1 and delta2 - delta1 = disc >= 0, with
    disc = sqrt(8*d_m2 + (1+2l)**2).  Only delta2 > 1/2 admits a
    normalizable solution.
    """

    l: float
    delta1: object
    delta2: object
    disc: object


def indicial_exponents(potential, l, dps=None):
    """Solve the indicial equation for the channel (potential, l).

    Returns the :class:`ChannelParams` with both exponents; ``delta2``
    is the larger root.  Raises :class:`DomainError` when the
    singularity is too attractive (d_m2 <= -1/8), or when the exponents
    degenerate (disc <= 0) so that no acceptable solution remains.
    """
    with working_dps(dps or DEFAULT_DPS):
        if _float(potential.d_m2) <= -0.125:
            raise DomainError("d_m2 <= -1/8: no normalizable solution")
        disc_sq = 8 * to_mpf(potential.d_m2) + (1 + 2 * to_mpf(l)) ** 2
        if disc_sq <= 0:
            raise DomainError(
                "8*d_m2 + (1+2l)^2 = %s <= 0: indicial exponents degenerate"
                % mp.nstr(disc_sq, 8)
            )
        disc = mp.sqrt(disc_sq)
        delta2 = (1 + disc) / 2
        delta1 = (1 - disc) / 2
        if not delta2 > 0.5:
            raise DomainError("delta2 <= 1/2: kinetic energy not normalizable")
        return ChannelParams(l=l, delta1=delta1, delta2=delta2, disc=disc)


@dataclass(frozen=True)
class SeriesTable:
    """Truncated coefficient table of the generalized series.

    ``coeffs[i]`` is the coefficient of ``r**(step*i + delta2)``.  In
    numeric mode the entries are mpf values for the fixed energy
    ``lam``; in lambda-poly mode each entry is a tuple of mpf
    polynomial coefficients in ascending powers of lam.
    """

    mode: str  # "numeric" | "lambda-poly"
    coeffs: tuple
    K: int
    channel: ChannelParams
    potential: PotentialSpec
    lam: object = None
    dps: int = DEFAULT_DPS


@dataclass(frozen=True)
class BoundaryValues:
    """u and du/dr of the truncated series at a matching radius."""

    u: object
    du: object
    R: object
    lam: object


class SeriesEvaluator:
    """Fast recurrence engine for one (potential, l, K, dps) combination.

    Precomputes the nonzero potential couplings, the inverse recurrence
    denominators and the indicial data once, so that per-energy work is
    a single O(K) pass.  Instances are immutable after construction and
    safe to share between threads running at the same precision.
    """

    def __init__(self, potential, l, K, dps=None):
        if K < 2:
            raise ValueError("truncation order K must be >= 2")
        self.potential = potential
        self.K = int(K)
        self.dps = int(dps or DEFAULT_DPS)
        with working_dps(self.dps):
            self.channel = indicial_exponents(potential, l, self.dps)
            s = potential.step
            self.step = s
            disc = self.channel.disc
            self.delta2 = self.channel.delta2
            # lam couples a_{i - 2/s}; offsets below are in stride units
            self.lam_off = 2 // s
            couplings = []
            if _float(potential.d_m1) != 0.0:
                couplings.append((1, 2 * to_mpf(potential.d_m1)))
            for m, d in enumerate(potential.regular):
                if _float(d) != 0.0:
                    couplings.append(((m + 2) // s, 2 * to_mpf(d)))
            self.couplings = tuple(couplings)
            inv = [None]
            for i in range(1, self.K + 1):
                den = (s * i) * (s * i + disc)
                if den == 0:
                    raise DomainError("recurrence denominator vanishes at i=%d" % i)
                inv.append(1 / den)
            self.inv_den = tuple(inv)
            # sign noise floor: |sum| below max_term * noise_eps is opaque
            self.noise_eps = mp.mpf(10) ** (-(self.dps - _NOISE_MARGIN))

    def coefficients(self, lam):
        """Numeric coefficient list a_0..a_K for fixed energy ``lam``."""
        lam2 = -2 * lam
        b = [mp.mpf(1)]
        lam_off = self.lam_off
        couplings = self.couplings
        inv = self.inv_den
        for i in range(1, self.K + 1):
            acc = mp.mpf(0)
            j = i - lam_off
            if j >= 0:
                acc += lam2 * b[j]
            for off, c in couplings:
                j = i - off
                if j >= 0:
                    acc += c * b[j]
            b.append(acc * inv[i])
        return b

    def coefficients_poly(self, lam_digits=None):
        """Coefficients as dense polynomials in lam (ascending tuples)."""
        b = [(mp.mpf(1),)]
        for i in range(1, self.K + 1):
            acc = [mp.mpf(0)]
            j = i - self.lam_off
            if j >= 0:
                # multiply by -2*lam: shift one degree up
                src = b[j]
                while len(acc) < len(src) + 1:
                    acc.append(mp.mpf(0))
                for m, c in enumerate(src):
                    acc[m + 1] -= 2 * c
            for off, cpl in self.couplings:
                j = i - off
                if j >= 0:
                    src = b[j]
                    while len(acc) < len(src):
                        acc.append(mp.mpf(0))
                    for m, c in enumerate(src):
                        acc[m] += cpl * c
            inv = self.inv_den[i]
            b.append(tuple(c * inv for c in acc))
        return b

    def radius(self, R):
        """Bind a matching radius; returns a :class:`RadiusEvaluator`."""
        return RadiusEvaluator(self, R)

    def table(self, lam=None):
        """Public :class:`SeriesTable` snapshot (numeric or lambda-poly)."""
        with working_dps(self.dps):
            if lam is None:
                return SeriesTable(
                    mode="lambda-poly",
                    coeffs=tuple(self.coefficients_poly()),
                    K=self.K,
                    channel=self.channel,
                    potential=self.potential,
                    lam=None,
                    dps=self.dps,
                )
            lam = to_mpf(lam)
            return SeriesTable(
                mode="numeric",
                coeffs=tuple(self.coefficients(lam)),
                K=self.K,
                channel=self.channel,
                potential=self.potential,
                lam=lam,
                dps=self.dps,
            )


class RadiusEvaluator:
    """u(R, lam) and du/dr(R, lam) with the R powers cached."""

    def __init__(self, ev, R):
        self.ev = ev
        with working_dps(ev.dps):
            self.R = to_mpf(R)
            if self.R <= 0:
                raise DomainError("matching radius must be positive")
            if not self.R < ev.potential.rho_V:
                raise ConvergenceError(
                    "R=%s outside the convergence radius rho_V=%s of the "
                    "potential expansion" % (mp.nstr(self.R, 8), ev.potential.rho_V)
                )
            x = self.R ** ev.step
            pw = [mp.mpf(1)]
            for _ in range(ev.K):
                pw.append(pw[-1] * x)
            self.powers = pw
            self.pref_u = self.R ** ev.delta2
            self.pref_du = self.pref_u / self.R

    def raw_sums(self, lam):
        """One fused recurrence+evaluation pass.

        Returns (su, sdu, ssl, max_u, max_du, max_sl, tail):

        * ``su``  -- sum a_i R**(s*i), i.e. u without the r**delta2 prefactor;
        * ``sdu`` -- sum (s*i + delta2) a_i R**(s*i), du/dr without R**(delta2-1);
        * ``ssl`` -- sum (s*i) a_i R**(s*i), the radial slope of the series
          factor u/r**delta2.  Its zeros implement the derivative boundary
          condition R u' = delta2 u used for the lower bracket ends;
        * ``max_*`` -- largest accumulated term magnitudes, for cancellation
          tracking;
        * ``tail`` -- magnitude of the last retained u-term (truncation).
        """
        ev = self.ev
        lam2 = -2 * lam
        b = [mp.mpf(1)]
        su = mp.mpf(1)
        sdu = ev.delta2 * 1
        ssl = mp.mpf(0)
        max_u = mp.mpf(1)
        max_du = abs(sdu)
        max_sl = mp.mpf(0)
        powers = self.powers
        couplings = ev.couplings
        inv = ev.inv_den
        lam_off = ev.lam_off
        s = ev.step
        delta2 = ev.delta2
        t = mp.mpf(1)
        for i in range(1, ev.K + 1):
            acc = mp.mpf(0)
            j = i - lam_off
            if j >= 0:
                acc += lam2 * b[j]
            for off, c in couplings:
                j = i - off
                if j >= 0:
                    acc += c * b[j]
            bi = acc * inv[i]
            b.append(bi)
            t = bi * powers[i]
            su += t
            ts = (s * i) * t
            ssl += ts
            td = ts + delta2 * t
            sdu += td
            at = abs(t)
            if at > max_u:
                max_u = at
            atd = abs(td)
            if atd > max_du:
                max_du = atd
            ats = abs(ts)
            if ats > max_sl:
                max_sl = ats
        return su, sdu, ssl, max_u, max_du, max_sl, abs(t)

    def values(self, lam):
        """(u, du, noise_u, noise_du): values plus absolute noise floors."""
        ev = self.ev
        with working_dps(ev.dps):
            su, sdu, _, max_u, max_du, _, _ = self.raw_sums(to_mpf(lam))
            return (
                self.pref_u * su,
                self.pref_du * sdu,
                self.pref_u * max_u * ev.noise_eps,
                self.pref_du * max_du * ev.noise_eps,
            )

    def condition(self, lam, kind="u"):
        """(value, noise floor) of a quantization condition at lam.

        kind "u" is the hard-wall condition u(R, lam) (without the
        lam-independent positive prefactor R**delta2); kind "du" is the
        derivative condition: the slope of the series factor, whose
        zeros fall below the corresponding eigenvalue while the "u"
        zeros fall above it.
        """
        ev = self.ev
        with working_dps(ev.dps):
            su, _, ssl, max_u, _, max_sl, _ = self.raw_sums(to_mpf(lam))
            if kind == "u":
                return su, max_u * ev.noise_eps
            return ssl, max_sl * ev.noise_eps

    def sign(self, lam, kind="u"):
        """Sign of a condition at lam: +1, -1, or 0 below the noise floor."""
        v, noise = self.condition(lam, kind)
        if abs(v) <= noise:
            return 0
        return 1 if v > 0 else -1

    def signs(self, lam):
        """(sign_u, sign_du) in one pass; 0 marks an untrusted value."""
        ev = self.ev
        with working_dps(ev.dps):
            su, _, ssl, max_u, _, max_sl, _ = self.raw_sums(to_mpf(lam))
            sg_u = 0 if abs(su) <= max_u * ev.noise_eps else (1 if su > 0 else -1)
            sg_sl = 0 if abs(ssl) <= max_sl * ev.noise_eps else (1 if ssl > 0 else -1)
            return sg_u, sg_sl

    def tail_ratio(self, lam):
        """|last term| / max term: estimates truncation vs roundoff floor."""
        ev = self.ev
        with working_dps(ev.dps):
            sums = self.raw_sums(to_mpf(lam))
            max_u, tail = sums[3], sums[6]
            return tail / max_u if max_u > 0 else mp.mpf(0)


def _evaluator_for(series, dps=None):
    """SeriesEvaluator matching a SeriesTable's defining data."""
    return SeriesEvaluator(
        series.potential, series.channel.l, series.K, dps or series.dps
    )


def _numeric_coeffs(series, lam, dps=None):
    """Numeric coefficient list for ``series`` at energy ``lam``.

    Numeric-mode tables are reused when lam matches; otherwise (or in
    lambda-poly mode) coefficients are produced for the requested lam.
    """
    if lam is None:
        if series.mode != "numeric":
            raise ValueError("lam is required for a lambda-poly series")
        return list(series.coeffs), series.lam
    lam = to_mpf(lam)
    if series.mode == "numeric":
        if series.lam == lam:
            return list(series.coeffs), lam
        return _evaluator_for(series, dps).coefficients(lam), lam
    # evaluate the polynomials at lam (Horner)
    out = []
    for poly in series.coeffs:
        acc = mp.mpf(0)
        for c in reversed(poly):
            acc = acc * lam + c
        out.append(acc)
    return out, lam


def build_series(potential, channel, K, lam=None, dps=None):
    """Build the truncated coefficient table for one channel.

    ``lam=None`` selects lambda-poly mode, where each coefficient is the
    exact polynomial in the energy; otherwise coefficients are numeric
    for the fixed energy.  Negative-index coefficients are treated as
    absent, and a_0 = 1 throughout.
    """
    ev = SeriesEvaluator(potential, channel.l, K, dps)
    return ev.table(lam)


def boundary_values(series, R, lam=None, dps=None):
    """Truncated u(R, lam) and du/dr(R, lam).

    Accumulation runs at the configured working precision; the largest
    accumulated term is tracked, and :class:`PrecisionError` is raised
    when max-term / |result| exceeds 10**(dps - guard) -- past that
    point the digits of the result are roundoff.
    """
    dps = dps or series.dps
    with working_dps(dps):
        lam_v = series.lam if lam is None else to_mpf(lam)
        if lam_v is None:
            raise ValueError("an energy value is required")
        R = to_mpf(R)
        ev = _evaluator_for(series, dps)
        rad = ev.radius(R)
        su, sdu, _, max_u, max_du, _, _ = rad.raw_sums(lam_v)
        guard = mp.mpf(10) ** (dps - GUARD_DIGITS)
        if abs(su) * guard < max_u or abs(sdu) * guard < max_du:
            raise PrecisionError(
                "cancellation at R=%s consumed the working precision "
                "(max term ratio %s); raise dps" % (mp.nstr(R, 8), mp.nstr(
                    max_u / abs(su) if su != 0 else mp.inf, 5))
            )
        return BoundaryValues(u=rad.pref_u * su, du=rad.pref_du * sdu, R=R, lam=lam_v)


def _profile_sign(coeffs, step, delta2, noise_eps, r):
    """Sign of u(r) from a fixed coefficient table; 0 if below noise."""
    x = r**step
    acc = mp.mpf(0)
    mx = mp.mpf(0)
    pw = mp.mpf(1)
    for b in coeffs:
        t = b * pw
        acc += t
        at = abs(t)
        if at > mx:
            mx = at
        pw *= x
    if abs(acc) <= mx * noise_eps:
        return 0
    return 1 if acc > 0 else -1


def node_count(series, lam, R, grid_points=64, dps=None):
    """Number of strict sign changes of u(r, lam) on the open interval (0, R).

    The interval is sampled on a uniform grid which is doubled until the
    count stabilizes; values below the roundoff noise floor are skipped
    rather than counted.  Raises :class:`ResolutionError` when the count
    keeps changing at the maximum refinement.
    """
    dps = dps or series.dps
    if grid_points < 8:
        grid_points = 8
    with working_dps(dps):
        coeffs, _ = _numeric_coeffs(series, lam, dps)
        step = series.potential.step
        delta2 = series.channel.delta2
        noise_eps = mp.mpf(10) ** (-(dps - _NOISE_MARGIN))
        R = to_mpf(R)

        def count(n):
            changes = 0
            prev = 0
            any_trusted = False
            for j in range(1, n + 1):
                r = R * j / (n + 1)
                sg = _profile_sign(coeffs, step, delta2, noise_eps, r)
                if sg == 0:
                    continue
                any_trusted = True
                if prev != 0 and sg != prev:
                    changes += 1
                prev = sg
            if not any_trusted:
                raise ResolutionError(
                    "series value is below the noise floor on the whole grid"
                )
            return changes

        n = int(grid_points)
        prev_count = count(n)
        for _ in range(8):
            n *= 2
            cur = count(n)
            if cur == prev_count:
                return cur
            prev_count = cur
        raise ResolutionError(
            "node count did not stabilize by %d grid points" % n
        )


def wavefunction(series, lam, r_grid, dps=None):
    """Unnormalized u(r, lam) = r**delta2 * sum a_i r**(s*i) on a grid.

    Grid points must lie in [0, rho_V); u(0) = 0 since delta2 > 1/2.
    """
    dps = dps or series.dps
    with working_dps(dps):
        coeffs, _ = _numeric_coeffs(series, lam, dps)
        step = series.potential.step
        delta2 = series.channel.delta2
        rho = series.potential.rho_V
        out = []
        for r in r_grid:
            r = to_mpf(r)
            if r < 0:
                raise DomainError("radius must be nonnegative")
            if not r < rho:
                raise ConvergenceError(
                    "grid point %s outside the convergence radius %s"
                    % (mp.nstr(r, 8), rho)
                )
            if r == 0:
                out.append(mp.mpf(0))
                continue
            x = r**step
            acc = mp.mpf(0)
            pw = mp.mpf(1)
            for b in coeffs:
                acc += b * pw
                pw *= x
            out.append(r**delta2 * acc)
        return out
